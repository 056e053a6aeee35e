#pragma once

#include "rcov/interval_union.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rcov {

// One construction level: every parent interval splits into `branching`
// children of length `child_length`. Children sit at i * spacing from the
// parent's left endpoint unless explicit offsets are given; weights default
// to uniform.
struct LevelSpec {
    std::uint64_t branching = 1;
    double child_length = 0.0;
    double spacing = 0.0;
    std::vector<double> offsets;
    std::vector<double> weights;

    bool regular() const { return offsets.empty(); }
    bool uniform() const { return weights.empty(); }
    double offset(std::uint64_t i) const;
    double weight(std::uint64_t i) const;
    double max_weight() const;
    double sum_sq_weights() const;
    // Sum of weights of children [i0, i1], inclusive.
    double weight_range(std::uint64_t i0, std::uint64_t i1) const;
    // Index of the child selected by a uniform variate in [0,1).
    std::uint64_t pick(double v) const;

    std::vector<double> cumulative; // prefix sums of explicit weights, filled by finalize
    void finalize();
};

enum class SchemeKind { middle, oscillating, spaced, lebesgue, custom };

std::string to_string(SchemeKind kind);
SchemeKind scheme_kind_from_string(const std::string& name);

struct SchemeMetadata {
    // Lower and upper exponents of the model; equal for single-ratio schemes.
    double s = 0.0;
    double u = 0.0;
    // Hausdorff dimension of the support, used for the analytic spectrum.
    double support_dim = 0.0;
    // False when the builder inputs contradict 0 < s < u (oscillating family).
    bool exponent_order_consistent = true;
    // Depth requested by the caller when it had to be reduced for precision.
    std::optional<int> depth_requested;
};

class CantorScheme {
public:
    double base_lo = 0.0;
    double base_length = 1.0;
    std::vector<LevelSpec> levels;
    // Bottom cylinders carry uniform (Lebesgue) mass instead of point mass at
    // their left endpoint. Only the Lebesgue family uses this.
    bool uniform_fill = false;
    SchemeKind kind = SchemeKind::custom;
    nlohmann::json parameters = nlohmann::json::object();
    SchemeMetadata meta;

    int depth_limit() const { return static_cast<int>(levels.size()); }
    // Length of a level-n construction interval, n = 0 is the base interval.
    double length(int n) const { return n == 0 ? base_length : levels[n - 1].child_length; }
    Interval hull() const { return {base_lo, base_lo + base_length}; }

    // Fixed ratio, branching, relative offsets and weights on every level.
    bool self_similar() const;
    // Image under x -> lambda * x, lambda > 0.
    CantorScheme scaled(double lambda) const;
    // Throws invalid-parameter if any LevelSpec invariant fails.
    void validate() const;
};

CantorScheme build_middle_cantor(double ratio, double ell0 = 1.0, int depth = 40);

// Block bounds N_0 < N_1 < ...: ratio alpha on levels [N_2k, N_2k+1), beta on
// [N_2k+1, N_2k+2). Levels before N_0 use alpha.
CantorScheme build_oscillating_cantor(double alpha, double beta, const std::vector<std::int64_t>& block_bounds,
                                      double ell0 = 1.0, int depth = 40);
// N_k = 2^k for k = 0.., enough bounds to cover `depth` levels.
std::vector<std::int64_t> default_block_bounds(int depth);

// Depth is reduced (and recorded in meta.depth_requested) when the next level
// would need lengths below 1e-300 or more than 2^53 children.
CantorScheme build_spaced_cantor(double s, double u, double ell0, int depth = 8);

// Uniform measure on [a, b] as dyadic halving levels with uniform_fill.
CantorScheme build_lebesgue(double a, double b, int depth = 48);

// Explicit level list; used for scaled copies and hand-built schemes.
CantorScheme build_custom(double base_lo, double base_length, std::vector<LevelSpec> levels, bool uniform_fill);

nlohmann::json to_json(const CantorScheme& scheme);
CantorScheme scheme_from_json(const nlohmann::json& doc);

// Certified bracket on a mass. lower == upper when the descent resolved exactly.
struct MassBracket {
    double lower = 0.0;
    double upper = 0.0;
    double mid() const { return 0.5 * (lower + upper); }
    double width() const { return upper - lower; }
};

// Mass of the closed interval [lo, hi]. Cylinders that only touch J at an
// endpoint count as disjoint. Partially overlapped cylinders at the bottom
// level contribute [0, mass] (or their exact share under uniform_fill).
MassBracket interval_mass(const CantorScheme& scheme, double lo, double hi);
MassBracket ball_mass(const CantorScheme& scheme, double x, double r);

// i.i.d. mu-distributed points: weighted digits down to the bottom level, then
// the left endpoint of the final cylinder (plus a uniform offset under
// uniform_fill). Output depends only on (scheme, count, seed).
std::vector<double> sample_points(const CantorScheme& scheme, std::size_t count, std::uint64_t seed);

// Pieces of the support inside the open interval (lo, hi): cylinders are
// refined until they are no longer than `resolution` or reach the bottom
// level, then clipped to (lo, hi). Sorted by left endpoint. Uniform-fill
// schemes whose levels tile their parents return the clipped hull directly.
std::vector<Interval> support_pieces(const CantorScheme& scheme, double lo, double hi, double resolution);

// True when every level tiles its parent with uniform weights, so every
// cylinder carries normalized Lebesgue measure.
bool lebesgue_like(const CantorScheme& scheme);

struct FrostmanFit {
    double C = 0.0;
    double s = 0.0;
};

// s is the least-squares slope of log max_x mu(B(x,r)) against log r; C is
// the smallest constant with mu(B(x,r)) <= C r^s on every sampled pair.
FrostmanFit frostman_fit(const CantorScheme& scheme, const std::vector<double>& xs, const std::vector<double>& rs);

} // namespace rcov
