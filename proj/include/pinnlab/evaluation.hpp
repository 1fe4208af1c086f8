#pragma once

#include <vector>

#include "pinnlab/network.hpp"
#include "pinnlab/problems.hpp"
#include "pinnlab/tensor.hpp"

namespace pinnlab {

/// Tensor-product evaluation grid: rows of X are (a0[i], a1[j]) in row-major
/// (i outer, j inner) order, matching Problem::reference_grid.
struct EvalGrid {
    std::vector<double> a0, a1;
    Tensor X;
};

EvalGrid make_eval_grid(const Problem& problem, int n0, int n1);

/// ||pred - ref||_2 / ||ref||_2 over all grid points (fixed summation order).
double relative_l2(const Tensor& pred, const Tensor& ref);

/// ||pred - ref||_2 with the same traversal order as relative_l2, so
/// absolute_l2 / ||ref||_2 reproduces relative_l2 exactly.
double absolute_l2(const Tensor& pred, const Tensor& ref);

/// Caches the reference solution on the evaluation grid so per-checkpoint
/// error evaluation only costs one network forward pass.
class Evaluator {
public:
    Evaluator(const Problem& problem, int n0, int n1);

    double rel_l2(const NetworkParams& params) const;
    double abs_l2(const NetworkParams& params) const;
    Tensor predict(const NetworkParams& params) const;

    const EvalGrid& grid() const { return grid_; }
    const Tensor& reference() const { return ref_; }

private:
    Domain domain_;
    EvalGrid grid_;
    Tensor ref_;
};

/// Default grid shape for a problem: 256 x 101 for the time-dependent
/// benchmarks, 256 x 256 for Helmholtz.
void default_eval_shape(ProblemKind kind, int& n0, int& n1);

} // namespace pinnlab
