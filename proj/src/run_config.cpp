#include "pinnlab/run_config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "pinnlab/errors.hpp"
#include "pinnlab/evaluation.hpp"

namespace pinnlab {

using json = nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [k, v] : j.items()) {
        if (!allowed.count(k))
            throw ConfigError(where + ": unknown key '" + k + "'");
    }
}

template <typename T>
void get_to_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) {
        try {
            j.at(key).get_to(out);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("bad value for '") + key +
                              "': " + e.what());
        }
    }
}

} // namespace

RunConfig run_config_from_json(const json& j) {
    check_keys(j, {"preset_name", "problem", "network", "train", "eval"},
               "run config");
    RunConfig cfg;
    get_to_if(j, "preset_name", cfg.preset_name);

    if (!j.contains("problem") || !j.contains("network") ||
        !j.contains("train"))
        throw ConfigError("run config needs 'problem', 'network' and 'train'");

    {
        const json& p = j.at("problem");
        check_keys(p,
                   {"kind", "n_interior", "n_initial", "n_boundary",
                    "w_residual", "w_initial", "w_boundary", "diffusivity",
                    "helm_k", "helm_a1", "helm_a2", "viscosity", "beta"},
                   "problem");
        std::string kind;
        if (!p.contains("kind")) throw ConfigError("problem: missing 'kind'");
        p.at("kind").get_to(kind);
        cfg.problem.kind = problem_from_name(kind);
        get_to_if(p, "n_interior", cfg.problem.n_interior);
        get_to_if(p, "n_initial", cfg.problem.n_initial);
        get_to_if(p, "n_boundary", cfg.problem.n_boundary);
        get_to_if(p, "w_residual", cfg.problem.w_residual);
        get_to_if(p, "w_initial", cfg.problem.w_initial);
        get_to_if(p, "w_boundary", cfg.problem.w_boundary);
        get_to_if(p, "diffusivity", cfg.problem.diffusivity);
        get_to_if(p, "helm_k", cfg.problem.helm_k);
        get_to_if(p, "helm_a1", cfg.problem.helm_a1);
        get_to_if(p, "helm_a2", cfg.problem.helm_a2);
        get_to_if(p, "viscosity", cfg.problem.viscosity);
        get_to_if(p, "beta", cfg.problem.beta);
    }
    {
        const json& n = j.at("network");
        check_keys(n,
                   {"arch", "input_dim", "hidden_layers", "width",
                    "output_dim", "multiplier_mode", "skip_stride"},
                   "network");
        std::string arch;
        if (!n.contains("arch")) throw ConfigError("network: missing 'arch'");
        n.at("arch").get_to(arch);
        cfg.network.kind = arch_from_name(arch);
        get_to_if(n, "input_dim", cfg.network.input_dim);
        get_to_if(n, "hidden_layers", cfg.network.hidden_layers);
        get_to_if(n, "width", cfg.network.width);
        get_to_if(n, "output_dim", cfg.network.output_dim);
        if (n.contains("multiplier_mode")) {
            std::string m;
            n.at("multiplier_mode").get_to(m);
            cfg.network.multiplier_mode = multiplier_mode_from_name(m);
        }
        get_to_if(n, "skip_stride", cfg.network.skip_stride);
    }
    {
        const json& t = j.at("train");
        check_keys(t,
                   {"iterations", "lr", "seed", "log_every",
                    "track_lambda_max", "lambda_every"},
                   "train");
        get_to_if(t, "iterations", cfg.train.iterations);
        get_to_if(t, "lr", cfg.train.lr);
        get_to_if(t, "seed", cfg.train.seed);
        get_to_if(t, "log_every", cfg.train.log_every);
        get_to_if(t, "track_lambda_max", cfg.train.track_lambda_max);
        get_to_if(t, "lambda_every", cfg.train.lambda_every);
    }
    if (j.contains("eval")) {
        const json& e = j.at("eval");
        check_keys(e, {"n0", "n1"}, "eval");
        get_to_if(e, "n0", cfg.eval_n0);
        get_to_if(e, "n1", cfg.eval_n1);
    }
    return cfg;
}

json run_config_to_json(const RunConfig& cfg) {
    json j;
    if (!cfg.preset_name.empty()) j["preset_name"] = cfg.preset_name;
    json p;
    p["kind"] = problem_name(cfg.problem.kind);
    p["n_interior"] = cfg.problem.n_interior;
    p["n_initial"] = cfg.problem.n_initial;
    p["n_boundary"] = cfg.problem.n_boundary;
    p["w_residual"] = cfg.problem.w_residual;
    p["w_initial"] = cfg.problem.w_initial;
    p["w_boundary"] = cfg.problem.w_boundary;
    switch (cfg.problem.kind) {
        case ProblemKind::AllenCahn: p["diffusivity"] = cfg.problem.diffusivity; break;
        case ProblemKind::Helmholtz:
            p["helm_k"] = cfg.problem.helm_k;
            p["helm_a1"] = cfg.problem.helm_a1;
            p["helm_a2"] = cfg.problem.helm_a2;
            break;
        case ProblemKind::Burgers: p["viscosity"] = cfg.problem.viscosity; break;
        case ProblemKind::Convection: p["beta"] = cfg.problem.beta; break;
    }
    j["problem"] = p;

    json n;
    n["arch"] = arch_name(cfg.network.kind);
    n["input_dim"] = cfg.network.input_dim;
    n["hidden_layers"] = cfg.network.hidden_layers;
    n["width"] = cfg.network.width;
    n["output_dim"] = cfg.network.output_dim;
    if (cfg.network.kind == ArchKind::Dm || cfg.network.kind == ArchKind::Sdm)
        n["multiplier_mode"] = multiplier_mode_name(cfg.network.multiplier_mode);
    if (cfg.network.kind == ArchKind::Sdm)
        n["skip_stride"] = cfg.network.skip_stride;
    j["network"] = n;

    json t;
    t["iterations"] = cfg.train.iterations;
    t["lr"] = cfg.train.lr;
    t["seed"] = cfg.train.seed;
    t["log_every"] = cfg.train.log_every;
    t["track_lambda_max"] = cfg.train.track_lambda_max;
    t["lambda_every"] = cfg.train.lambda_every;
    j["train"] = t;

    json e;
    e["n0"] = cfg.eval_n0;
    e["n1"] = cfg.eval_n1;
    j["eval"] = e;
    return j;
}

RunConfig load_run_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("invalid JSON in " + path + ": " + e.what());
    }
    RunConfig cfg = run_config_from_json(j);
    finalize_eval_shape(cfg);
    return cfg;
}

void finalize_eval_shape(RunConfig& cfg) {
    int n0 = 0, n1 = 0;
    default_eval_shape(cfg.problem.kind, n0, n1);
    if (cfg.eval_n0 <= 0) cfg.eval_n0 = n0;
    if (cfg.eval_n1 <= 0) cfg.eval_n1 = n1;
}

} // namespace pinnlab
