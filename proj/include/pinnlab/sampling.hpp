#pragma once

#include <cstdint>

#include "pinnlab/network.hpp"
#include "pinnlab/tensor.hpp"

namespace pinnlab {

/// Latin hypercube sample of n points over an axis-aligned box: each
/// dimension is split into n equal strata, each stratum receives exactly one
/// point, and strata are paired across dimensions by a random permutation.
/// Points are strictly inside their strata (never on a boundary), and a
/// given (n, domain, seed) triple reproduces the same points everywhere.
Tensor latin_hypercube(std::int64_t n, const Domain& domain,
                       std::uint64_t seed);

/// One-dimensional stratified sample (Latin hypercube with d=1).
std::vector<double> lhs_1d(std::int64_t n, double lo, double hi,
                           std::uint64_t seed);

} // namespace pinnlab
