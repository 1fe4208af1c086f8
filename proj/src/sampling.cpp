#include "pinnlab/sampling.hpp"

#include "pinnlab/errors.hpp"
#include "pinnlab/rng.hpp"

namespace pinnlab {

Tensor latin_hypercube(std::int64_t n, const Domain& domain,
                       std::uint64_t seed) {
    if (n < 1) throw ConfigError("latin_hypercube: need n >= 1");
    const auto d = static_cast<std::int64_t>(domain.bounds.size());
    if (d < 1) throw ConfigError("latin_hypercube: empty domain");
    for (auto [lo, hi] : domain.bounds)
        if (!(hi > lo)) throw ConfigError("latin_hypercube: hi must exceed lo");

    Tensor X = Tensor::uninit({n, d});
    Rng rng(seed);
    const double nd = static_cast<double>(n);
    for (std::int64_t j = 0; j < d; ++j) {
        const auto [lo, hi] = domain.bounds[static_cast<std::size_t>(j)];
        auto perm = rng.permutation(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) {
            // stratum perm[i], offset strictly inside (0,1)
            const double u = rng.uniform_open();
            const double frac =
                (static_cast<double>(perm[static_cast<std::size_t>(i)]) + u) / nd;
            X.at(i, j) = lo + (hi - lo) * frac;
        }
    }
    return X;
}

std::vector<double> lhs_1d(std::int64_t n, double lo, double hi,
                           std::uint64_t seed) {
    Domain d{{{lo, hi}}};
    Tensor X = latin_hypercube(n, d, seed);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = X.at(i, 0);
    return v;
}

} // namespace pinnlab
