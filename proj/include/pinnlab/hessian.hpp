#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "pinnlab/network.hpp"
#include "pinnlab/problems.hpp"

namespace pinnlab {

/// Loss-gradient callback: writes dL/dtheta into grad_out and returns L.
/// Both arrays have the dimension passed alongside the callback.
using GradFn = std::function<double(const double* theta, double* grad_out)>;

/// Evaluates the total-loss gradient of a problem at arbitrary parameter
/// vectors (fixed collocation sets), for matrix-free Hessian probes.
class LossGradOracle {
public:
    LossGradOracle(const Problem& problem, const NetworkConfig& net_cfg,
                   SampleSets samples);

    std::size_t dim() const { return dim_; }

    /// grad_out[dim] = dL/dtheta at theta[dim]; returns L(theta).
    double grad(const double* theta, double* grad_out) const;

    /// Adapter for the matrix-free probes below.
    GradFn as_grad_fn() const;

private:
    const Problem* problem_;
    mutable NetworkParams params_; // scratch; overwritten by each call
    SampleSets samples_;
    std::size_t dim_;
};

/// Hessian-vector product by central finite differences of the gradient:
///   Hv ~= (grad(theta + eps v) - grad(theta - eps v)) / (2 eps).
/// eps <= 0 selects the default 1e-4 (1 + ||theta||) / ||v||.
std::vector<double> hvp(const GradFn& grad, std::size_t dim,
                        const double* theta, const double* v,
                        double eps = 0.0);

struct PowerIterOptions {
    int max_iters = 100;
    double rel_tol = 1e-3;
    std::uint64_t seed = 0;
    /// Central-difference step: eps = fd_scale * (1 + ||theta||).
    double fd_scale = 1e-4;
};

/// Largest-magnitude Hessian eigenvalue of the loss at theta, by power
/// iteration on finite-difference Hessian-vector products. Stops when the
/// Rayleigh quotient moves by less than rel_tol relatively. If the very
/// first product collapses to zero (the Hessian annihilates the start
/// vector), returns 0 and sets *degenerate when provided.
double hessian_lambda_max(const GradFn& grad, std::size_t dim,
                          const double* theta,
                          const PowerIterOptions& opts = {},
                          bool* degenerate = nullptr);

double hessian_lambda_max(const LossGradOracle& oracle, const double* theta,
                          const PowerIterOptions& opts = {},
                          bool* degenerate = nullptr);

} // namespace pinnlab
