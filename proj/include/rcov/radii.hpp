#pragma once

#include "rcov/measure.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace rcov {

enum class RadiiRule { power, block, explicit_list };

// Positive radii r_1, r_2, ... (1-based). Power-law radii are infinite; block
// and explicit sequences are finite. Every rule evaluates in closed form, so
// the object is immutable and freely shared between threads.
class RadiiSequence {
public:
    RadiiRule rule() const { return rule_; }
    bool monotone() const { return monotone_; }
    // Number of radii, or nullopt for an infinite rule.
    std::optional<std::int64_t> size() const;
    // r_k for 1 <= k <= size(); throws invalid-parameter outside that range.
    double at(std::int64_t k) const;
    std::vector<double> prefix(std::int64_t count) const;

    double alpha() const { return alpha_; }
    double gamma() const { return gamma_; }
    double s0() const { return s0_; }
    // Block rule: M_0 = 0 < M_1 < ... and the constant radius of each block.
    const std::vector<std::int64_t>& block_ends() const { return block_ends_; }
    const std::vector<double>& block_radius() const { return block_radius_; }

    nlohmann::json to_json() const;
    static RadiiSequence from_json(const nlohmann::json& doc, const CantorScheme* scheme);

    friend RadiiSequence power_radii(double alpha);
    friend RadiiSequence block_radii(const CantorScheme& scheme, double gamma, double s0);
    friend RadiiSequence explicit_radii(std::vector<double> values);

private:
    RadiiRule rule_ = RadiiRule::explicit_list;
    bool monotone_ = true;
    double alpha_ = 0.0;
    double gamma_ = 0.0;
    double s0_ = 0.0;
    std::vector<std::int64_t> block_ends_;
    std::vector<double> block_radius_;
    std::vector<double> values_;
};

RadiiSequence power_radii(double alpha);
// Block-constant radii l_j^gamma / 2 on (M_{j-1}, M_j], M_j = floor(l_j^(-gamma*s0)),
// for every level of a spaced scheme.
RadiiSequence block_radii(const CantorScheme& scheme, double gamma, double s0);
RadiiSequence explicit_radii(std::vector<double> values);
RadiiSequence reorder_to_decreasing(const RadiiSequence& r);

// One radius per line; blank lines and lines starting with '#' are skipped.
RadiiSequence read_radii(std::istream& is);
void write_radii(std::ostream& os, const RadiiSequence& r, std::int64_t count);

struct WindowStats {
    std::int64_t from = 0;
    std::int64_t to = 0;
    double s1 = 0.0;
    double s3 = 0.0;
};

struct ExponentEstimate {
    double s1_hat = 0.0;
    double s2_hat = 0.0;
    double s3_hat = 0.0;
    std::int64_t window_from = 0;
    std::int64_t window_to = 0;
    // s2 came from the partial-sum root because the sequence is not monotone.
    bool non_monotone_caveat = false;
    // s2 had to be clamped into [s1, s3].
    bool clamped = false;
    // Same statistics on the window ending at K/2; drift = full - half.
    WindowStats half_window;
    double tail_drift_s1 = 0.0;
    double tail_drift_s3 = 0.0;
};

ExponentEstimate critical_exponents(const RadiiSequence& r, std::int64_t K, double window_fraction = 0.5);

// Sum_{k <= K} r_k^t.
double power_sum(const RadiiSequence& r, std::int64_t K, double t);

} // namespace rcov
