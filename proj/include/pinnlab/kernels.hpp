#pragma once

// Raw compute kernels shared by the tape's forward dispatch and the untaped
// inference path. Keeping one implementation guarantees that a network
// evaluated through either path produces bit-identical values.

#include <Eigen/Core>

#include <cstdint>

namespace pinnlab::kernels {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<RowMat>;
using CMapM = Eigen::Map<const RowMat>;
using MapA = Eigen::Map<Eigen::ArrayXd>;
using CMapA = Eigen::Map<const Eigen::ArrayXd>;

// ---- dense linear algebra ------------------------------------------------

/// C = A(n,k) * B(k,m)
inline void matmul(double* c, const double* a, const double* b,
                   std::int64_t n, std::int64_t k, std::int64_t m) {
    MapM C(c, n, m);
    C.noalias() = CMapM(a, n, k) * CMapM(b, k, m);
}

/// C += A(n,k) * B(k,m)
inline void matmul_acc(double* c, const double* a, const double* b,
                       std::int64_t n, std::int64_t k, std::int64_t m) {
    MapM C(c, n, m);
    C.noalias() += CMapM(a, n, k) * CMapM(b, k, m);
}

/// C = A(n,k) * B(m,k)^T
inline void matmul_bt(double* c, const double* a, const double* b,
                      std::int64_t n, std::int64_t k, std::int64_t m) {
    MapM C(c, n, m);
    C.noalias() = CMapM(a, n, k) * CMapM(b, m, k).transpose();
}

inline void matmul_bt_acc(double* c, const double* a, const double* b,
                          std::int64_t n, std::int64_t k, std::int64_t m) {
    MapM C(c, n, m);
    C.noalias() += CMapM(a, n, k) * CMapM(b, m, k).transpose();
}

/// C = A(k,n)^T * B(k,m)
inline void matmul_at(double* c, const double* a, const double* b,
                      std::int64_t n, std::int64_t k, std::int64_t m) {
    MapM C(c, n, m);
    C.noalias() = CMapM(a, k, n).transpose() * CMapM(b, k, m);
}

inline void matmul_at_acc(double* c, const double* a, const double* b,
                          std::int64_t n, std::int64_t k, std::int64_t m) {
    MapM C(c, n, m);
    C.noalias() += CMapM(a, k, n).transpose() * CMapM(b, k, m);
}

/// Y(n,m) = A(n,m) + row-broadcast bias(m)
inline void bias_add(double* y, const double* a, const double* b,
                     std::int64_t n, std::int64_t m) {
    MapM Y(y, n, m);
    Y = CMapM(a, n, m).rowwise() +
        Eigen::Map<const Eigen::RowVectorXd>(b, m);
}

/// bias gradient: g(m) += column sums of Ybar(n,m)
inline void colsum_acc(double* g, const double* ybar,
                       std::int64_t n, std::int64_t m) {
    Eigen::Map<Eigen::RowVectorXd> G(g, m);
    G += CMapM(ybar, n, m).colwise().sum();
}

// ---- elementwise ---------------------------------------------------------

inline void add(double* y, const double* a, const double* b, std::size_t n) {
    MapA(y, n) = CMapA(a, n) + CMapA(b, n);
}

inline void sub(double* y, const double* a, const double* b, std::size_t n) {
    MapA(y, n) = CMapA(a, n) - CMapA(b, n);
}

inline void mul(double* y, const double* a, const double* b, std::size_t n) {
    MapA(y, n) = CMapA(a, n) * CMapA(b, n);
}

inline void scale(double* y, const double* a, double alpha, std::size_t n) {
    MapA(y, n) = alpha * CMapA(a, n);
}

inline void square(double* y, const double* a, std::size_t n) {
    MapA(y, n) = CMapA(a, n).square();
}

inline void negate(double* y, const double* a, std::size_t n) {
    MapA(y, n) = -CMapA(a, n);
}

/// Vectorized tanh via 1 - 2/(exp(2x)+1). Saturates to exactly +/-1 and is
/// an order of magnitude faster than the scalar libm tanh; the small ULP
/// differences are irrelevant as long as every consumer uses this kernel.
inline void tanh(double* y, const double* a, std::size_t n) {
    MapA(y, n) = 1.0 - 2.0 / ((2.0 * CMapA(a, n)).exp() + 1.0);
}

inline double sum(const double* a, std::size_t n) {
    // Fixed left-to-right order for reproducibility.
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
}

inline double mean(const double* a, std::size_t n) {
    return sum(a, n) / static_cast<double>(n);
}

/// y = a.*b + c.*d  (product rule for a first input derivative)
inline void mul_add(double* y, const double* a, const double* b,
                    const double* c, const double* d, std::size_t n) {
    MapA(y, n) = CMapA(a, n) * CMapA(b, n) + CMapA(c, n) * CMapA(d, n);
}

/// y = a.*b + 2*c.*d + e.*f  (product rule for a second input derivative)
inline void leibniz2(double* y, const double* a, const double* b,
                     const double* c, const double* d, const double* e,
                     const double* f, std::size_t n) {
    MapA(y, n) = CMapA(a, n) * CMapA(b, n) +
                 2.0 * (CMapA(c, n) * CMapA(d, n)) +
                 CMapA(e, n) * CMapA(f, n);
}

/// y = (1 - t.^2) .* b where t is a tanh output (chain rule through tanh).
inline void dtanh_mul(double* y, const double* t, const double* b,
                      std::size_t n) {
    MapA(y, n) = (1.0 - CMapA(t, n).square()) * CMapA(b, n);
}

/// y = -2t(1-t^2).*b.^2 + (1-t^2).*c where t is a tanh output
/// (second-order chain rule through tanh: phi''(z)*z_d^2 + phi'(z)*z_dd).
inline void d2tanh_mul(double* y, const double* t, const double* b,
                       const double* c, std::size_t n) {
    CMapA T(t, n);
    const auto p1 = 1.0 - T.square();
    MapA(y, n) = (-2.0 * T * p1) * CMapA(b, n).square() + p1 * CMapA(c, n);
}

} // namespace pinnlab::kernels
