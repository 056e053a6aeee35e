#pragma once

#include "rcov/covering.hpp"
#include "rcov/interval_union.hpp"
#include "rcov/measure.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

namespace rcov {

struct FitPoint {
    double log_inv_delta = 0.0;
    double log_count = 0.0;
    std::int64_t balls = 0; // balls behind the point (band estimator only)
};

struct DimensionFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_ = 0.0;
    double r2 = 0.0;
    double delta_min = 0.0;
    double delta_max = 0.0;
    std::vector<FitPoint> points;
    // Constant counts: slope forced to 0.
    bool degenerate = false;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_ = 0.0;
    double r2 = 0.0;
};

// Ordinary least squares of y on x; stderr is NaN with two points.
LineFit ols(const std::vector<double>& x, const std::vector<double>& y);

// Grid cells [a + i delta, a + (i+1) delta), a = hull.lo, whose open interior meets U.
std::int64_t box_count(const IntervalUnion& U, double delta, const Interval& hull);

DimensionFit box_dimension_fit(const IntervalUnion& U, const std::vector<double>& deltas, const Interval& hull);

struct LimsupDimensionOptions {
    double r_min = 1e-12;
    double r_max = 0.1;
    double band_factor = 2.0;
    std::int64_t min_balls = 16;
    std::int64_t first_index = 1;
    // Support pieces are refined to this fraction of the ball radius.
    double piece_resolution = 1e-2;
};

// Scale-matched band estimator of the limsup set's dimension. Balls are
// grouped into radius bands of ratio band_factor; only bands that hold every
// ball of the sequence in that band are used. For each band the support inside
// its balls is box-counted at the band's median effective ball diameter, and
// the slope of log N against log(1/delta) is the estimate.
DimensionFit limsup_dimension(const CoveringRealization& real, const LimsupDimensionOptions& opts = {});

// Box-counting slope of the block-intersection surrogate over a delta grid.
DimensionFit surrogate_dimension(const CoveringRealization& real, const std::vector<std::int64_t>& bounds,
                                 const std::vector<double>& deltas);

struct LocalDimReport {
    double x = 0.0;
    std::vector<std::pair<double, double>> slopes; // (scale, chord slope from the top scale)
    double lower_hat = 0.0;
    double upper_hat = 0.0;
};

// Chord slopes log(mu(B(x,r_i)) / mu(B(x,r_top))) / log(r_i / r_top), r_top the
// largest scale. lower/upper are their min/max.
std::vector<LocalDimReport> local_dims(const CantorScheme& scheme, const std::vector<double>& xs,
                                       const std::vector<double>& scales);

struct DeltaFunctionals {
    double delta = 0.0;     // min (upper - lower)
    double delta_bar = 0.0; // max lower / upper
    double delta_hat = 0.0; // min lower / upper
    std::size_t sample_size = 0;
};

// Statistics over the reports with lower_hat > threshold.
DeltaFunctionals delta_functionals(const std::vector<LocalDimReport>& reports, double threshold);

// Grid function; absent values are -infinity.
struct SpectrumCurve {
    std::vector<double> grid;
    std::vector<double> values;
};

constexpr double k_absent = -std::numeric_limits<double>::infinity();

// Smallest increasing 1-Lipschitz majorant on the grid:
// out_i = max(max_{j<=i} F_j, max_{j>i} F_j - (s_j - s_i)).
SpectrumCurve lipschitz_hull(const SpectrumCurve& F);

// Linear interpolation; extrapolation-refused outside the grid.
double evaluate(const SpectrumCurve& F, double s);

// One-step spectrum: value `dim` for s >= dim, absent below; grid [0, 2] step `step` plus dim.
SpectrumCurve analytic_spectrum(double dim, double step = 0.005);

struct ConjectureSides {
    DimensionFit lhs;
    double rhs = 0.0;
};

ConjectureSides conjecture_sides(const CantorScheme& scheme, double alpha, const SpectrumCurve& F, std::int64_t K,
                                 std::uint64_t seed, const LimsupDimensionOptions& opts = {});

void write_fit_csv(std::ostream& os, const DimensionFit& fit);
void write_local_dims_csv(std::ostream& os, const std::vector<LocalDimReport>& reports);
void write_spectrum_csv(std::ostream& os, const SpectrumCurve& F);

} // namespace rcov
