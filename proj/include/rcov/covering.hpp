#pragma once

#include "rcov/interval_union.hpp"
#include "rcov/measure.hpp"
#include "rcov/radii.hpp"

#include <cstdint>
#include <vector>

namespace rcov {

// One sampled omega: K i.i.d. mu-distributed centers paired with the first K
// radii. Centers are re-derived from the seed, never persisted.
struct CoveringRealization {
    CantorScheme scheme;
    RadiiSequence radii;
    std::vector<double> centers;
    std::vector<double> r; // r_1..r_K, cached prefix of `radii`
    std::uint64_t seed = 0;

    std::int64_t K() const { return static_cast<std::int64_t>(centers.size()); }
    Interval ball(std::int64_t k) const; // 1-based
};

CoveringRealization realize(const CantorScheme& scheme, const RadiiSequence& radii, std::int64_t K, std::uint64_t seed);

// Union of B(omega_k, r_k) for from <= k <= to (1-based, inclusive).
IntervalUnion union_range(const CoveringRealization& real, std::int64_t from, std::int64_t to);

struct LimsupApprox {
    IntervalUnion set;
    std::vector<std::int64_t> bounds;
    // Only one block: the result is a plain union, not an intersection.
    bool degenerate = false;
};

// Intersection over j of the block unions of (n_{j-1}, n_j]. `bounds` holds
// n_0 < n_1 < ... < n_m <= K.
LimsupApprox limsup_approx(const CoveringRealization& real, const std::vector<std::int64_t>& bounds);

// n_j = ceil(n0 * rho^j), rho = (K/n0)^(1/m), forced strictly increasing with n_m = K.
std::vector<std::int64_t> geometric_schedule(std::int64_t K, std::int64_t n0 = 1000, int m = 4);

// Number of k with |x - omega_k| < r_k for every x of the sorted grid.
std::vector<std::int64_t> multiplicity_profile(const CoveringRealization& real, const std::vector<double>& grid);

} // namespace rcov
