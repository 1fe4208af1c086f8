#pragma once

#include <cmath>
#include <vector>

namespace pinnlab {

namespace detail {
/// Quarter-period reduction: x = 0.5*q + r with |r| <= 0.25 exactly, and the
/// quadrant q mod 4 selecting the sin/cos branch. This makes sin(pi x) and
/// cos(pi x) exact (+-1 or +-0) at every multiple of one half, which plain
/// std::sin(M_PI*x) misses because M_PI is rounded.
inline int pi_reduce(double x, double& r) {
    const double q = std::nearbyint(2.0 * x);
    r = x - 0.5 * q;
    const auto qi = static_cast<long long>(std::fmod(q, 4.0));
    return static_cast<int>((qi % 4 + 4) % 4);
}
inline constexpr double kPiHi = 3.14159265358979323846;
} // namespace detail

/// sin(pi*x), exact at multiples of 1/2.
inline double sinpi(double x) {
    double r;
    switch (detail::pi_reduce(x, r)) {
        case 0: return std::sin(detail::kPiHi * r);
        case 1: return std::cos(detail::kPiHi * r);
        case 2: return -std::sin(detail::kPiHi * r);
        default: return -std::cos(detail::kPiHi * r);
    }
}

/// cos(pi*x), exact at multiples of 1/2.
inline double cospi(double x) {
    double r;
    switch (detail::pi_reduce(x, r)) {
        case 0: return std::cos(detail::kPiHi * r);
        case 1: return -std::sin(detail::kPiHi * r);
        case 2: return -std::cos(detail::kPiHi * r);
        default: return std::sin(detail::kPiHi * r);
    }
}

/// Evenly spaced grid with exact endpoints.
inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] =
            lo + (hi - lo) * (static_cast<double>(i) / (n - 1));
    v[0] = lo;
    v[static_cast<std::size_t>(n - 1)] = hi;
    return v;
}

} // namespace pinnlab
