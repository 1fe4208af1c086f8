#include "pinnlab/hessian.hpp"

#include <cmath>
#include <vector>

#include "pinnlab/errors.hpp"
#include "pinnlab/rng.hpp"
#include "pinnlab/tape.hpp"

namespace pinnlab {

namespace {

double norm2(const double* v, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i] * v[i];
    return std::sqrt(s);
}

// One central-difference HVP into w, reusing caller scratch. Returns ||w||.
double hvp_into(const GradFn& grad, std::size_t n, const double* theta,
                const double* v, double eps, std::vector<double>& tp,
                std::vector<double>& gp, std::vector<double>& gm,
                std::vector<double>& w) {
    for (std::size_t i = 0; i < n; ++i) tp[i] = theta[i] + eps * v[i];
    grad(tp.data(), gp.data());
    for (std::size_t i = 0; i < n; ++i) tp[i] = theta[i] - eps * v[i];
    grad(tp.data(), gm.data());
    const double inv = 1.0 / (2.0 * eps);
    double nw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = (gp[i] - gm[i]) * inv;
        nw += w[i] * w[i];
    }
    if (!std::isfinite(nw))
        throw NumericError("hessian probe: non-finite gradient difference");
    return std::sqrt(nw);
}

} // namespace

LossGradOracle::LossGradOracle(const Problem& problem,
                               const NetworkConfig& net_cfg,
                               SampleSets samples)
    : problem_(&problem),
      params_(init_network(net_cfg, 0)), // shapes only; values overwritten
      samples_(std::move(samples)),
      dim_(static_cast<std::size_t>(param_count(net_cfg))) {}

double LossGradOracle::grad(const double* theta, double* grad_out) const {
    unflatten_params(params_, theta);
    Tape tape;
    TapedNet net(tape, params_);
    LossParts lp = problem_->losses(tape, net, samples_);
    const double loss = tape.value(lp.total)[0];
    BackwardOptions opts;
    opts.release_primals = true;
    auto grads = tape.backward(lp.total, net.param_ids(), opts);
    std::size_t off = 0;
    for (const auto& g : grads) {
        for (std::size_t i = 0; i < g.size(); ++i) grad_out[off + i] = g[i];
        off += g.size();
    }
    if (off != dim_) throw Error("LossGradOracle: gradient size mismatch");
    return loss;
}

GradFn LossGradOracle::as_grad_fn() const {
    return [this](const double* theta, double* grad_out) {
        return grad(theta, grad_out);
    };
}

std::vector<double> hvp(const GradFn& grad, std::size_t dim,
                        const double* theta, const double* v, double eps) {
    if (dim == 0) throw ConfigError("hvp: empty parameter vector");
    const double nv = norm2(v, dim);
    if (!(nv > 0.0)) throw ConfigError("hvp: direction must be nonzero");
    if (eps <= 0.0) eps = 1e-4 * (1.0 + norm2(theta, dim)) / nv;

    std::vector<double> tp(dim), gp(dim), gm(dim), w(dim);
    hvp_into(grad, dim, theta, v, eps, tp, gp, gm, w);
    return w;
}

double hessian_lambda_max(const GradFn& grad, std::size_t dim,
                          const double* theta, const PowerIterOptions& opts,
                          bool* degenerate) {
    if (dim == 0) throw ConfigError("hessian_lambda_max: empty parameter vector");
    if (opts.max_iters < 1)
        throw ConfigError("hessian_lambda_max: max_iters must be >= 1");
    if (!(opts.fd_scale > 0.0))
        throw ConfigError("hessian_lambda_max: fd_scale must be positive");
    if (degenerate) *degenerate = false;

    std::vector<double> v(dim), gp(dim), gm(dim), tp(dim), w(dim);

    Rng rng(opts.seed);
    for (auto& x : v) x = rng.normal();
    double nv = norm2(v.data(), dim);
    for (auto& x : v) x /= nv;

    const double eps = opts.fd_scale * (1.0 + norm2(theta, dim));

    double lambda = 0.0;
    for (int it = 0; it < opts.max_iters; ++it) {
        const double nw = hvp_into(grad, dim, theta, v.data(), eps, tp, gp, gm, w);
        if (!(nw > 0.0)) {
            // The Hessian annihilated the probe direction; report a zero
            // eigenvalue estimate rather than failing the whole run.
            if (degenerate) *degenerate = true;
            return 0.0;
        }
        double ray = 0.0;
        for (std::size_t i = 0; i < dim; ++i) ray += v[i] * w[i]; // ||v|| == 1
        const double prev = lambda;
        lambda = ray;
        for (std::size_t i = 0; i < dim; ++i) v[i] = w[i] / nw;
        if (it > 0 && std::abs(lambda - prev) <= opts.rel_tol * std::abs(lambda))
            break;
    }
    return std::abs(lambda);
}

double hessian_lambda_max(const LossGradOracle& oracle, const double* theta,
                          const PowerIterOptions& opts, bool* degenerate) {
    return hessian_lambda_max(oracle.as_grad_fn(), oracle.dim(), theta, opts,
                              degenerate);
}

} // namespace pinnlab
