#include "pinnlab/artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pinnlab/errors.hpp"

namespace pinnlab {

using json = nlohmann::json;

std::string format_double(double v) {
    // %.17g always round-trips; trim to the shortest form that still does.
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) return buf;
    }
    return buf;
}

static std::string cell(double v) {
    return std::isnan(v) ? std::string() : format_double(v);
}

void write_history_csv(const std::string& path,
                       const std::vector<HistoryRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << "iter,loss_total,loss_r,loss_ic,loss_bc,rel_l2,lambda_max,elapsed_ms\n";
    for (const auto& r : rows) {
        out << r.iter << ',' << cell(r.loss_total) << ',' << cell(r.loss_r)
            << ',' << cell(r.loss_ic) << ',' << cell(r.loss_bc) << ','
            << cell(r.rel_l2) << ',' << cell(r.lambda_max) << ','
            << /* elapsed_ms deliberately empty */ '\n';
    }
    if (!out) throw Error("failed writing " + path);
}

std::vector<HistoryRow> read_history_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line)) throw Error("empty history file: " + path);
    if (line != "iter,loss_total,loss_r,loss_ic,loss_bc,rel_l2,lambda_max,elapsed_ms")
        throw Error("unexpected history header in " + path);
    std::vector<HistoryRow> rows;
    const double nan = std::nan("");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string f;
        HistoryRow r;
        // strtod instead of std::stod: subnormal values parse with ERANGE
        // set, which stod turns into a spurious out_of_range throw.
        auto parse = [&](const std::string& s) {
            char* end = nullptr;
            const double v = std::strtod(s.c_str(), &end);
            if (end == s.c_str()) throw Error("bad numeric cell in " + path);
            return v;
        };
        auto next = [&]() -> double {
            if (!std::getline(ss, f, ',')) return nan;
            return f.empty() ? nan : parse(f);
        };
        std::getline(ss, f, ',');
        r.iter = std::stol(f);
        r.loss_total = next();
        r.loss_r = next();
        r.loss_ic = next();
        r.loss_bc = next();
        r.rel_l2 = next();
        r.lambda_max = next();
        r.elapsed_ms = next();
        rows.push_back(r);
    }
    return rows;
}

static json finite_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

void write_summary_json(const std::string& path, const RunConfig& cfg,
                        const TrainResult& result) {
    json j;
    j["run"] = run_config_to_json(cfg);
    j["param_count"] = param_count(cfg.network);
    j["iterations_run"] = result.iterations_run;
    j["wall_ms"] = result.wall_ms;
    const HistoryRow& last = result.history.back();
    json fin;
    fin["iter"] = last.iter;
    fin["loss_total"] = finite_or_null(last.loss_total);
    fin["loss_r"] = finite_or_null(last.loss_r);
    fin["loss_ic"] = finite_or_null(last.loss_ic);
    fin["loss_bc"] = finite_or_null(last.loss_bc);
    fin["rel_l2"] = finite_or_null(last.rel_l2);
    fin["lambda_max"] = finite_or_null(last.lambda_max);
    j["final"] = fin;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << '\n';
}

void save_params(const std::string& path, const RunConfig& cfg,
                 const NetworkParams& params) {
    json j;
    j["run"] = run_config_to_json(cfg);
    const auto n = static_cast<std::size_t>(param_count(params.config));
    std::vector<double> flat(n);
    flatten_params(params, flat.data());
    j["data"] = flat;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << j.dump() << '\n';
}

LoadedParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("invalid params file " + path + ": " + e.what());
    }
    LoadedParams lp{run_config_from_json(j.at("run")), {}};
    finalize_eval_shape(lp.run);
    std::vector<double> flat;
    j.at("data").get_to(flat);
    const auto want = static_cast<std::size_t>(param_count(lp.run.network));
    if (flat.size() != want)
        throw Error("params file " + path + ": wrong parameter count");
    lp.params = init_network(lp.run.network, 0);
    unflatten_params(lp.params, flat.data());
    return lp;
}

} // namespace pinnlab
