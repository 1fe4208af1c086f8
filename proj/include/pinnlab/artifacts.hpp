#pragma once

#include <string>
#include <vector>

#include "pinnlab/network.hpp"
#include "pinnlab/run_config.hpp"
#include "pinnlab/training.hpp"

namespace pinnlab {

/// Shortest exact decimal representation of a double (round-trips bitwise).
std::string format_double(double v);

/// history.csv: one row per logged checkpoint, columns
///   iter,loss_total,loss_r,loss_ic,loss_bc,rel_l2,lambda_max,elapsed_ms
/// NaN fields serialize as empty cells. The elapsed_ms column is always
/// written empty: wall time lives in summary.json so that run histories are
/// byte-identical across reruns of the same configuration.
void write_history_csv(const std::string& path,
                       const std::vector<HistoryRow>& rows);
std::vector<HistoryRow> read_history_csv(const std::string& path);

void write_summary_json(const std::string& path, const RunConfig& cfg,
                        const TrainResult& result);

/// params.json embeds the full run config so a saved network is
/// self-describing; loading restores bit-identical parameters.
void save_params(const std::string& path, const RunConfig& cfg,
                 const NetworkParams& params);
struct LoadedParams {
    RunConfig run;
    NetworkParams params;
};
LoadedParams load_params(const std::string& path);

} // namespace pinnlab
