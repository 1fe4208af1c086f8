#include "pinnlab/training.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "pinnlab/errors.hpp"
#include "pinnlab/evaluation.hpp"
#include "pinnlab/hessian.hpp"
#include "pinnlab/rng.hpp"
#include "pinnlab/tape.hpp"

namespace pinnlab {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct Adam {
    double lr, b1, b2, eps;
    long t = 0;
    std::vector<double> m, v;

    Adam(std::size_t n, const TrainConfig& c)
        : lr(c.lr), b1(c.beta1), b2(c.beta2), eps(c.eps), m(n, 0.0), v(n, 0.0) {}

    void step(double* theta, const double* g, std::size_t n) {
        ++t;
        const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
        const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            const double mh = m[i] / c1;
            const double vh = v[i] / c2;
            theta[i] -= lr * mh / (std::sqrt(vh) + eps);
        }
    }
};

double scalar_of(const Tape& tape, ValueId id) {
    return id >= 0 ? tape.value(id)[0] : kNan;
}

} // namespace

TrainResult train(const ProblemConfig& problem_cfg,
                  const NetworkConfig& net_cfg, const TrainConfig& train_cfg,
                  int eval_n0, int eval_n1,
                  const std::function<void(const HistoryRow&)>& on_log) {
    if (train_cfg.iterations < 1)
        throw ConfigError("train: iterations must be >= 1");
    if (!(train_cfg.lr > 0.0)) throw ConfigError("train: lr must be positive");

    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed_ms = [&] {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - t0)
            .count();
    };

    auto problem = Problem::make(problem_cfg);
    NetworkParams params =
        init_network(net_cfg, derive_seed(train_cfg.seed, 0));
    const SampleSets samples = problem->sample(derive_seed(train_cfg.seed, 1));
    Evaluator evaluator(*problem, eval_n0, eval_n1);

    const auto dim = static_cast<std::size_t>(param_count(net_cfg));
    std::vector<double> theta(dim), grad(dim);
    flatten_params(params, theta.data());
    Adam adam(dim, train_cfg);

    // Hessian probes reuse the training collocation sets.
    std::unique_ptr<LossGradOracle> oracle;
    if (train_cfg.track_lambda_max)
        oracle = std::make_unique<LossGradOracle>(*problem, net_cfg,
                                                  problem->sample(derive_seed(
                                                      train_cfg.seed, 1)));

    TrainResult result;
    result.history.reserve(
        static_cast<std::size_t>(train_cfg.iterations / train_cfg.log_every + 2));

    auto make_row = [&](long iter, const Tape& tape, const LossParts& lp,
                        bool with_lambda) {
        HistoryRow row;
        row.iter = iter;
        row.loss_total = scalar_of(tape, lp.total);
        row.loss_r = scalar_of(tape, lp.residual);
        row.loss_ic = scalar_of(tape, lp.initial);
        row.loss_bc = scalar_of(tape, lp.boundary);
        row.rel_l2 = evaluator.rel_l2(params);
        row.lambda_max = kNan;
        if (with_lambda && oracle) {
            PowerIterOptions po;
            po.seed = derive_seed(train_cfg.seed, 2);
            row.lambda_max = hessian_lambda_max(*oracle, theta.data(), po);
        }
        row.elapsed_ms = elapsed_ms();
        result.history.push_back(row);
        if (on_log) on_log(row);
    };

    for (long iter = 0; iter < train_cfg.iterations; ++iter) {
        Tape tape;
        TapedNet net(tape, params);
        LossParts lp = problem->losses(tape, net, samples);

        const double loss = tape.value(lp.total)[0];
        if (!std::isfinite(loss))
            throw DivergenceError("training diverged: non-finite loss at iteration " +
                                      std::to_string(iter),
                                  iter);

        const bool log_now = iter % train_cfg.log_every == 0;
        const bool lambda_now =
            train_cfg.track_lambda_max && iter % train_cfg.lambda_every == 0;
        if (log_now || lambda_now) make_row(iter, tape, lp, lambda_now);

        BackwardOptions bo;
        bo.release_primals = true;
        auto grads = tape.backward(lp.total, net.param_ids(), bo);
        std::size_t off = 0;
        for (const auto& g : grads) {
            for (std::size_t i = 0; i < g.size(); ++i) grad[off + i] = g[i];
            off += g.size();
        }
        bool finite = true;
        for (std::size_t i = 0; i < dim; ++i)
            if (!std::isfinite(grad[i])) { finite = false; break; }
        if (!finite)
            throw DivergenceError("training diverged: non-finite gradient at iteration " +
                                      std::to_string(iter),
                                  iter);

        adam.step(theta.data(), grad.data(), dim);
        unflatten_params(params, theta.data());
    }

    // Final checkpoint at iter == iterations with freshly computed losses.
    // lambda_max keeps its stride cadence, so it only appears here when the
    // final iteration happens to be a stride point.
    {
        Tape tape;
        TapedNet net(tape, params);
        LossParts lp = problem->losses(tape, net, samples);
        make_row(train_cfg.iterations, tape, lp,
                 train_cfg.track_lambda_max &&
                     train_cfg.iterations % train_cfg.lambda_every == 0);
    }

    result.params = std::move(params);
    result.final_rel_l2 = result.history.back().rel_l2;
    result.iterations_run = train_cfg.iterations;
    result.wall_ms = elapsed_ms();
    return result;
}

} // namespace pinnlab
