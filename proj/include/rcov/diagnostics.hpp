#pragma once

#include "rcov/energy.hpp"
#include "rcov/measure.hpp"
#include "rcov/radii.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rcov {

struct DiagnosticConfig {
    double t = 0.0;
    double u = 0.0;
    double s = 0.0;
    // Weight rule b_k = c * r_k^(t u / s). c = 0 selects the Frostman witness
    // c = (C^(t/s) s / (s - t))^-1 with C = frostman_C, or the certified
    // constant of the scheme when frostman_C is 0.
    double b_scale = 0.0;
    double frostman_C = 0.0;
    std::size_t sample_count = 16;
    std::int64_t horizon = 1 << 16; // partial-sum horizon N
    std::uint64_t seed = 1;
    EnergyOptions energy;
    // A log2 slope of the doubling-window increments above this reads as divergent.
    double trend_threshold = -0.05;

    // Throws invalid-parameter unless 0 < t < s, u > 0, horizon >= 4, samples >= 1.
    void validate() const;
};

struct GrowthPoint {
    std::int64_t N = 0;
    double partial_sum = 0.0;
    double ratio = 0.0; // P_N / P_{N/2}; 0 at the first checkpoint or when P_{N/2} = 0
};

struct PointGrowth {
    double x = 0.0;
    std::vector<GrowthPoint> curve; // checkpoints N = 1, 2, 4, ..., and the horizon
    std::int64_t members = 0;
    std::int64_t indeterminate = 0; // energy brackets straddling the threshold
    // log2-slope of the doubling-window increments over the upper half of the checkpoints.
    double trend = 0.0;
    bool divergent = false;
    // Power radii only: checkpoints k = 2^j whose whole run [ceil(k^(1/gamma)), k] are members.
    std::int64_t run_checks = 0;
    std::int64_t run_hits = 0;
};

struct GrowthReport {
    std::string kind; // "energy" or "mass"
    DiagnosticConfig config;
    double b_scale = 0.0; // resolved c
    std::int64_t horizon = 0;
    std::vector<PointGrowth> points;
    double divergent_fraction = 0.0;
    double mean_final_ratio = 0.0;
    double mean_trend = 0.0;
    std::int64_t indeterminate = 0;
    double run_gamma = 0.0; // 0 when the run check does not apply
};

// Resolved constant c of the weight rule.
double resolve_b_scale(const CantorScheme& scheme, const DiagnosticConfig& cfg);

// Membership x in A_k: energy of the normalized restriction to the closed
// ball B(x, r_k) at most 1/b_k. Sample points are drawn from the measure.
GrowthReport energy_divergence_diagnostic(const CantorScheme& scheme, const RadiiSequence& radii,
                                          const DiagnosticConfig& cfg);

// Membership: mu(B(x, r_k)) >= r_k^u.
GrowthReport mass_divergence_diagnostic(const CantorScheme& scheme, const RadiiSequence& radii,
                                        const DiagnosticConfig& cfg);

// Trend statistic used for classification, exposed for tests.
double doubling_trend(const std::vector<GrowthPoint>& curve);

void write_growth_csv(std::ostream& os, const GrowthReport& report);
void write_growth_summary_csv(std::ostream& os, const GrowthReport& report);

} // namespace rcov
