#pragma once

#include <vector>

#include "pinnlab/tensor.hpp"

namespace pinnlab {

/// Fourier pseudo-spectral RK4 solver for the Allen-Cahn benchmark
///   u_t = d u_xx - 5u^3 + 5u,  x in [-1,1) periodic,  u(x,0) = x^2 cos(pi x)
/// Snapshots are trig-interpolated onto arbitrary x locations.
// Defined at namespace scope (not nested) so its member initializers are
// parsed before the solve_grid default argument below needs them.
struct AcReferenceOptions {
    int n_modes = 1024;
    double dt = 1.25e-4;
    double diffusivity = 1e-4;
};

class AllenCahnReference {
public:
    using Options = AcReferenceOptions;

    /// ts must start at 0 and be integer multiples of dt.
    static Tensor solve_grid(const std::vector<double>& xs,
                             const std::vector<double>& ts,
                             const Options& opts = {});
};

/// Cole-Hopf closed-form evaluation of the viscous Burgers benchmark
///   u_t + u u_x = nu u_xx,  u(x,0) = -sin(pi x),  u(+-1,t) = 0
/// by log-space trapezoid quadrature of the exact heat-kernel integral over
/// the window where the integrand is within e^-160 of its peak. `oversample`
/// scales the base step (2 halves it); the constructor self-checks against a
/// doubled resolution and widened window.
class BurgersReference {
public:
    explicit BurgersReference(double nu, double oversample = 1.0);

    double at(double x, double t) const;
    Tensor grid(const std::vector<double>& xs,
                const std::vector<double>& ts) const;

private:
    double nu_;
    double h_base_;     // uniform step cap for the quadrature grid
    double win_drop_;   // exponent drop from the peak at the window edge
};

} // namespace pinnlab
