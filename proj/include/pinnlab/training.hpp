#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pinnlab/network.hpp"
#include "pinnlab/problems.hpp"

namespace pinnlab {

struct TrainConfig {
    std::uint64_t seed = 0;
    long iterations = 15000;
    double lr = 1e-3;
    long log_every = 100;

    bool track_lambda_max = false;
    long lambda_every = 500;

    // Adam constants (fixed across all experiments).
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// One logged checkpoint. Quantities that were not measured on this row
/// (e.g. lambda_max off-cadence, or loss_ic for a problem without an initial
/// condition) are NaN and serialize as empty CSV cells.
struct HistoryRow {
    long iter = 0;
    double loss_total = 0, loss_r = 0, loss_ic = 0, loss_bc = 0;
    double rel_l2 = 0;
    double lambda_max = 0;
    double elapsed_ms = 0;
};

struct TrainResult {
    NetworkParams params;
    std::vector<HistoryRow> history;
    double final_rel_l2 = 0;
    long iterations_run = 0;
    double wall_ms = 0;
};

/// Full-batch Adam training of `net_cfg` on `problem_cfg`.
///
/// Deterministic: the master seed derives independent init and sampling
/// streams, collocation sets are drawn once and reused every iteration, and
/// all reductions have fixed order, so a (configs, seed) pair reproduces the
/// identical history on any machine built from the same sources.
TrainResult train(const ProblemConfig& problem_cfg,
                  const NetworkConfig& net_cfg, const TrainConfig& train_cfg,
                  int eval_n0, int eval_n1,
                  const std::function<void(const HistoryRow&)>& on_log = {});

} // namespace pinnlab
