#include "pinnlab/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pinnlab/artifacts.hpp"
#include "pinnlab/errors.hpp"
#include "pinnlab/evaluation.hpp"
#include "pinnlab/run_config.hpp"

namespace pinnlab {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct CommonOpts {
    std::string preset;
    std::string presets_dir = "presets";
    std::optional<std::uint64_t> seed;
    std::optional<long> iters;
    std::optional<double> lr;
    std::optional<std::string> arch;
    std::optional<int> width;
    std::optional<int> layers;
    std::optional<std::string> multiplier_mode;
    std::optional<int> skip_stride;
    std::optional<long> log_every;
    bool track_lambda = false;
    std::optional<long> lambda_every;
    std::string out;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_track) {
    cmd->add_option("--preset,--config", o.preset,
                    "Preset name (resolved in --presets-dir) or path to a "
                    "run-config JSON file")
        ->required();
    cmd->add_option("--presets-dir", o.presets_dir,
                    "Directory containing preset JSON files");
    cmd->add_option("--seed", o.seed, "Override master seed");
    cmd->add_option("--iters", o.iters, "Override iteration count");
    cmd->add_option("--lr", o.lr, "Override learning rate");
    cmd->add_option("--arch", o.arch,
                    "Override architecture "
                    "(vanilla|resnet|modified_mlp|dm|sdm)");
    cmd->add_option("--width", o.width, "Override hidden width");
    cmd->add_option("--layers", o.layers, "Override hidden layer count");
    cmd->add_option("--multiplier-mode", o.multiplier_mode,
                    "dm/sdm multiplier mode (hidden_outputs|activations)");
    cmd->add_option("--skip-stride", o.skip_stride,
                    "sdm skip-product stride");
    cmd->add_option("--log-every", o.log_every, "History cadence");
    if (with_track) {
        cmd->add_flag("--track-lambda", o.track_lambda,
                      "Track the largest Hessian eigenvalue at checkpoints");
        cmd->add_option("--lambda-every", o.lambda_every,
                        "Hessian checkpoint cadence");
    }
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_flag("--quiet", o.quiet, "Suppress per-checkpoint output");
}

RunConfig resolve_config(const CommonOpts& o) {
    std::string path = o.preset;
    if (path.find('/') == std::string::npos &&
        path.find(".json") == std::string::npos) {
        path = o.presets_dir + "/" + o.preset + ".json";
    }
    RunConfig cfg = load_run_config_file(path);
    if (cfg.preset_name.empty())
        cfg.preset_name = fs::path(path).stem().string();

    if (o.seed) cfg.train.seed = *o.seed;
    if (o.iters) cfg.train.iterations = *o.iters;
    if (o.lr) cfg.train.lr = *o.lr;
    if (o.arch) cfg.network.kind = arch_from_name(*o.arch);
    if (o.width) cfg.network.width = *o.width;
    if (o.layers) cfg.network.hidden_layers = *o.layers;
    if (o.multiplier_mode)
        cfg.network.multiplier_mode =
            multiplier_mode_from_name(*o.multiplier_mode);
    if (o.skip_stride) cfg.network.skip_stride = *o.skip_stride;
    if (o.log_every) cfg.train.log_every = *o.log_every;
    if (o.track_lambda) cfg.train.track_lambda_max = true;
    if (o.lambda_every) cfg.train.lambda_every = *o.lambda_every;
    return cfg;
}

void print_row(const RunConfig& cfg, const HistoryRow& r) {
    std::string extra;
    if (!std::isnan(r.lambda_max)) {
        char b[48];
        std::snprintf(b, sizeof(b), " lambda_max %.4g", r.lambda_max);
        extra = b;
    }
    std::printf("[%s/%s s%llu] iter %ld/%ld loss %.6g rel_l2 %.4g%s (%.1fs)\n",
                cfg.preset_name.c_str(), arch_name(cfg.network.kind),
                static_cast<unsigned long long>(cfg.train.seed), r.iter,
                cfg.train.iterations, r.loss_total, r.rel_l2, extra.c_str(),
                r.elapsed_ms / 1000.0);
    std::fflush(stdout);
}

/// Default root for run artifacts; overridable so batch jobs can redirect
/// every command's output without threading --out through each invocation.
std::string runs_root() {
    const char* env = std::getenv("PINNLAB_RUNS_DIR");
    return (env && *env) ? env : "runs";
}

std::string default_out_dir(const RunConfig& cfg) {
    return runs_root() + "/" + cfg.preset_name + "_" +
           arch_name(cfg.network.kind) + "_s" +
           std::to_string(cfg.train.seed);
}

/// Trains one configuration and writes history.csv/summary.json/params.json.
TrainResult run_one(const RunConfig& cfg, const std::string& out_dir,
                    bool quiet) {
    fs::create_directories(out_dir);
    auto result =
        train(cfg.problem, cfg.network, cfg.train, cfg.eval_n0, cfg.eval_n1,
              quiet ? std::function<void(const HistoryRow&)>{}
                    : [&](const HistoryRow& r) { print_row(cfg, r); });
    write_history_csv(out_dir + "/history.csv", result.history);
    write_summary_json(out_dir + "/summary.json", cfg, result);
    save_params(out_dir + "/params.json", cfg, result.params);
    return result;
}

int cmd_train(const CommonOpts& o) {
    RunConfig cfg = resolve_config(o);
    const std::string out_dir = o.out.empty() ? default_out_dir(cfg) : o.out;
    auto result = run_one(cfg, out_dir, o.quiet);
    std::printf("final rel_l2 %.6g after %ld iterations (%.1fs) -> %s\n",
                result.final_rel_l2, result.iterations_run,
                result.wall_ms / 1000.0, out_dir.c_str());
    return 0;
}

struct CompareOpts : CommonOpts {
    std::vector<std::string> archs;
    int n_seeds = 5;
    std::uint64_t seed_base = 0;
};

/// Resume support for interrupted batteries: a run directory written by an
/// earlier invocation counts only if its summary echoes exactly the
/// configuration we would train now and all three artifacts are present.
bool try_cached_run(const RunConfig& cfg, const std::string& dir,
                    double& rel_l2) {
    std::ifstream in(dir + "/summary.json");
    if (!in) return false;
    try {
        json s;
        in >> s;
        if (s.at("run") != run_config_to_json(cfg)) return false;
        if (!fs::exists(dir + "/history.csv") ||
            !fs::exists(dir + "/params.json"))
            return false;
        rel_l2 = s.at("final").at("rel_l2").get<double>();
        return std::isfinite(rel_l2);
    } catch (const json::exception&) {
        return false;
    }
}

int cmd_compare(const CompareOpts& o) {
    RunConfig base = resolve_config(static_cast<const CommonOpts&>(o));
    if (o.archs.empty()) throw ConfigError("compare: need --archs");
    const std::string out_root =
        o.out.empty() ? runs_root() + "/compare_" + base.preset_name : o.out;
    fs::create_directories(out_root);

    json summary;
    summary["preset"] = base.preset_name;
    summary["run_template"] = run_config_to_json(base);
    summary["seeds"] = json::array();
    for (int s = 0; s < o.n_seeds; ++s)
        summary["seeds"].push_back(o.seed_base + static_cast<std::uint64_t>(s));

    for (const auto& arch : o.archs) {
        RunConfig cfg = base;
        cfg.network.kind = arch_from_name(arch);
        json per;
        std::vector<double> finals;
        for (int s = 0; s < o.n_seeds; ++s) {
            cfg.train.seed = o.seed_base + static_cast<std::uint64_t>(s);
            const std::string dir =
                out_root + "/" + arch + "_s" + std::to_string(cfg.train.seed);
            double final_rel = 0.0;
            const bool cached = try_cached_run(cfg, dir, final_rel);
            std::printf("== %s seed %llu ==%s\n", arch.c_str(),
                        static_cast<unsigned long long>(cfg.train.seed),
                        cached ? " complete, skipping" : "");
            std::fflush(stdout);
            if (!cached) final_rel = run_one(cfg, dir, o.quiet).final_rel_l2;
            finals.push_back(final_rel);
            per["per_seed_rel_l2"].push_back(final_rel);
            per["dirs"].push_back(dir);
            // Refresh the comparison summary after every run so partial
            // progress is usable while long batteries are still going.
            summary["results"][arch] = per;
            std::ofstream st(out_root + "/compare_summary.json");
            st << summary.dump(2) << '\n';
        }
        const double mean =
            std::accumulate(finals.begin(), finals.end(), 0.0) /
            static_cast<double>(finals.size());
        per["mean_rel_l2"] = mean;
        summary["results"][arch] = per;
        std::ofstream st(out_root + "/compare_summary.json");
        st << summary.dump(2) << '\n';
    }

    std::printf("\n%-14s %-12s per-seed rel_l2\n", "arch", "mean");
    for (const auto& arch : o.archs) {
        const auto& per = summary["results"][arch];
        std::string seeds_str;
        for (const auto& v : per["per_seed_rel_l2"]) {
            char b[24];
            std::snprintf(b, sizeof(b), "%.3e ", v.get<double>());
            seeds_str += b;
        }
        std::printf("%-14s %-12.4e %s\n", arch.c_str(),
                    per["mean_rel_l2"].get<double>(), seeds_str.c_str());
    }
    std::printf("-> %s/compare_summary.json\n", out_root.c_str());
    return 0;
}

struct EvalOpts {
    std::string params_path;
    std::string field_out;
};

int cmd_eval(const EvalOpts& o) {
    LoadedParams lp = load_params(o.params_path);
    auto problem = Problem::make(lp.run.problem);
    Evaluator ev(*problem, lp.run.eval_n0, lp.run.eval_n1);
    const Tensor pred = ev.predict(lp.params);
    const double err = relative_l2(pred, ev.reference());
    std::printf("problem %s arch %s rel_l2 %.8g\n",
                problem_name(lp.run.problem.kind),
                arch_name(lp.run.network.kind), err);
    if (!o.field_out.empty()) {
        std::ofstream out(o.field_out, std::ios::binary);
        if (!out) throw Error("cannot write " + o.field_out);
        const auto& g = ev.grid();
        const bool spatial2d = lp.run.problem.kind == ProblemKind::Helmholtz;
        out << (spatial2d ? "x,y,u_pred,u_ref\n" : "x,t,u_pred,u_ref\n");
        const auto n1 = static_cast<std::int64_t>(g.a1.size());
        for (std::size_t i = 0; i < g.a0.size(); ++i) {
            for (std::size_t j = 0; j < g.a1.size(); ++j) {
                const auto row = static_cast<std::int64_t>(i) * n1 +
                                 static_cast<std::int64_t>(j);
                out << format_double(g.a0[i]) << ',' << format_double(g.a1[j])
                    << ',' << format_double(pred[static_cast<std::size_t>(row)])
                    << ','
                    << format_double(ev.reference()[static_cast<std::size_t>(row)])
                    << '\n';
            }
        }
        std::printf("field -> %s\n", o.field_out.c_str());
    }
    return 0;
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{
        "pinnlab: physics-informed neural network training laboratory\n"
        "Benchmarks densely-multiplied PINN architectures against standard "
        "baselines on four PDE problems."};
    app.require_subcommand(1);

    CommonOpts train_o;
    auto* train_cmd =
        app.add_subcommand("train", "Train one network on one problem");
    add_common(train_cmd, train_o, true);

    CompareOpts cmp_o;
    auto* cmp_cmd = app.add_subcommand(
        "compare", "Train several architectures across seeds and summarize");
    add_common(cmp_cmd, cmp_o, true);
    cmp_cmd->add_option("--archs", cmp_o.archs, "Architectures to compare")
        ->required()
        ->delimiter(',');
    cmp_cmd->add_option("--seeds", cmp_o.n_seeds, "Number of seeds");
    cmp_cmd->add_option("--seed-base", cmp_o.seed_base, "First seed value");

    EvalOpts eval_o;
    auto* eval_cmd = app.add_subcommand(
        "eval", "Evaluate saved parameters against the reference solution");
    eval_cmd->add_option("--params", eval_o.params_path, "params.json path")
        ->required();
    eval_cmd->add_option("--field-out", eval_o.field_out,
                         "Write the predicted field as CSV");

    CommonOpts hess_o;
    auto* hess_cmd = app.add_subcommand(
        "hessian",
        "Train with Hessian eigenvalue tracking (alias for train "
        "--track-lambda)");
    add_common(hess_cmd, hess_o, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(train_o);
        if (cmp_cmd->parsed()) return cmd_compare(cmp_o);
        if (eval_cmd->parsed()) return cmd_eval(eval_o);
        if (hess_cmd->parsed()) {
            hess_o.track_lambda = true;
            return cmd_train(hess_o);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const DivergenceError& e) {
        std::fprintf(stderr, "divergence: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}

} // namespace pinnlab
