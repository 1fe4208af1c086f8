#include "pinnlab/evaluation.hpp"

#include <cmath>

#include "pinnlab/errors.hpp"
#include "pinnlab/math_util.hpp"

namespace pinnlab {

EvalGrid make_eval_grid(const Problem& problem, int n0, int n1) {
    if (n0 < 2 || n1 < 2) throw ConfigError("eval grid needs >= 2 points per axis");
    const Domain dom = problem.domain();
    EvalGrid g;
    g.a0 = linspace(dom.bounds[0][0], dom.bounds[0][1], n0);
    g.a1 = linspace(dom.bounds[1][0], dom.bounds[1][1], n1);
    g.X = Tensor::uninit({static_cast<std::int64_t>(n0) * n1, 2});
    std::int64_t row = 0;
    for (int i = 0; i < n0; ++i) {
        for (int j = 0; j < n1; ++j, ++row) {
            g.X.at(row, 0) = g.a0[static_cast<std::size_t>(i)];
            g.X.at(row, 1) = g.a1[static_cast<std::size_t>(j)];
        }
    }
    return g;
}

double relative_l2(const Tensor& pred, const Tensor& ref) {
    if (!pred.same_shape(ref))
        throw ShapeError("relative_l2: shape mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - ref[i];
        num += d * d;
        den += ref[i] * ref[i];
    }
    if (den == 0.0) throw NumericError("relative_l2: reference is identically zero");
    return std::sqrt(num) / std::sqrt(den);
}

double absolute_l2(const Tensor& pred, const Tensor& ref) {
    if (!pred.same_shape(ref))
        throw ShapeError("absolute_l2: shape mismatch");
    double num = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - ref[i];
        num += d * d;
    }
    return std::sqrt(num);
}

Evaluator::Evaluator(const Problem& problem, int n0, int n1)
    : domain_(problem.domain()),
      grid_(make_eval_grid(problem, n0, n1)),
      ref_(problem.reference_grid(grid_.a0, grid_.a1)) {}

Tensor Evaluator::predict(const NetworkParams& params) const {
    return eval_forward(params, grid_.X, domain_);
}

double Evaluator::rel_l2(const NetworkParams& params) const {
    return relative_l2(predict(params), ref_);
}

double Evaluator::abs_l2(const NetworkParams& params) const {
    return absolute_l2(predict(params), ref_);
}

void default_eval_shape(ProblemKind kind, int& n0, int& n1) {
    n0 = 256;
    n1 = kind == ProblemKind::Helmholtz ? 256 : 101;
}

} // namespace pinnlab
