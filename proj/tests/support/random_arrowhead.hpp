#pragma once

#include <cstddef>
#include <random>

#include "fanopol/arrowhead.hpp"

namespace fanopol::testing {

/// Random arrowhead with diag in [0, 2), couplings in [-0.5, 0.5) and the
/// apex in [0.5, 1.5). Deterministic for a given seed.
inline ArrowheadMatrix random_arrowhead(std::size_t continuum, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> diag(0.0, 2.0);
    std::uniform_real_distribution<double> coupling(-0.5, 0.5);
    std::uniform_real_distribution<double> apex(0.5, 1.5);
    ArrowheadMatrix a;
    a.apex = apex(rng);
    a.diag.resize(continuum);
    a.coupling.resize(continuum);
    for (std::size_t j = 0; j < continuum; ++j) {
        a.diag[j] = diag(rng);
        a.coupling[j] = coupling(rng);
    }
    return a;
}

}  // namespace fanopol::testing
