#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "pinnlab/network.hpp"
#include "pinnlab/tape.hpp"
#include "pinnlab/tensor.hpp"

namespace pinnlab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 6.28318530717958647692;

enum class ProblemKind { AllenCahn, Helmholtz, Burgers, Convection };

const char* problem_name(ProblemKind k);
ProblemKind problem_from_name(const std::string& s);

struct ProblemConfig {
    ProblemKind kind = ProblemKind::AllenCahn;

    std::int64_t n_interior = 20000;
    std::int64_t n_initial = 100;  // ignored by Helmholtz
    std::int64_t n_boundary = 200;

    double w_residual = 1.0;
    double w_initial = 1.0;
    double w_boundary = 1.0;

    // PDE constants; each problem reads only its own.
    double diffusivity = 1e-4;      // Allen-Cahn
    double helm_k = 1.0;            // Helmholtz wavenumber
    int helm_a1 = 1, helm_a2 = 4;   // Helmholtz manufactured-solution modes
    double viscosity = 0.01 / kPi;  // Burgers
    double beta = 30.0;             // convection speed
};

/// Training collocation sets. Which fields are defined depends on the
/// problem: paired sets (boundary_a/boundary_b, aligned row-by-row) encode
/// periodic or matched constraints; `boundary` holds a plain Dirichlet set.
struct SampleSets {
    Tensor interior;
    Tensor initial;
    Tensor boundary_a;
    Tensor boundary_b;
    Tensor boundary;
};

/// Ids of the recorded loss scalars; -1 where a term does not exist.
struct LossParts {
    ValueId total = -1;
    ValueId residual = -1;
    ValueId initial = -1;
    ValueId boundary = -1;
};

/// A benchmark PDE: domain, collocation sampling, composite taped loss, and
/// reference solution. All randomness flows from the seed arguments.
class Problem {
public:
    virtual ~Problem() = default;

    static std::unique_ptr<Problem> make(const ProblemConfig& cfg);

    const ProblemConfig& config() const { return cfg_; }
    virtual const char* name() const = 0;
    virtual Domain domain() const = 0;

    /// Derivative directions the residual needs from the network.
    virtual std::vector<DirSpec> residual_dirs() const = 0;

    virtual SampleSets sample(std::uint64_t seed) const = 0;

    /// Records residual/initial/boundary losses and their weighted total.
    virtual LossParts losses(Tape& tape, TapedNet& net,
                             const SampleSets& s) const = 0;

    /// Reference solution on the tensor-product grid axis0 x axis1,
    /// row-major (index = i0 * n1 + i1). Axis meaning: (x, t) for the
    /// time-dependent problems, (x, y) for Helmholtz.
    virtual Tensor reference_grid(const std::vector<double>& a0,
                                  const std::vector<double>& a1) const = 0;

protected:
    explicit Problem(const ProblemConfig& cfg) : cfg_(cfg) {}
    ProblemConfig cfg_;
};

// Closed forms shared with tests and reference solvers.
double allen_cahn_ic(double x);                       // x^2 cos(pi x)
double burgers_ic(double x);                          // -sin(pi x)
double convection_ic(double x);                       // sin(x)
double convection_exact(double x, double t, double beta);
double helmholtz_exact(double x, double y, int a1, int a2);
double helmholtz_source(double x, double y, double k, int a1, int a2);

} // namespace pinnlab
