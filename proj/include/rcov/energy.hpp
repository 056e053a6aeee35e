#pragma once

#include "rcov/interval_union.hpp"
#include "rcov/measure.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace rcov {

// Lower and upper bound on a non-negative quantity; upper may be +inf.
struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
    double mid() const { return 0.5 * (lo + hi); }
    Bracket& operator+=(const Bracket& o)
    {
        lo += o.lo;
        hi += o.hi;
        return *this;
    }
};

inline Bracket operator*(double w, const Bracket& b) { return {w * b.lo, w * b.hi}; }

enum class EnergyMethod { recursive_exact, cylinder_quadrature, monte_carlo };

std::string to_string(EnergyMethod m);
EnergyMethod energy_method_from_string(const std::string& name);

// How the measure continues below the scheme's bottom level.
//   continuation: the last level's rule repeats forever (the Cantor limit).
//   uniform: each bottom cylinder carries normalized Lebesgue measure.
// Uniform-fill schemes always use uniform bottoms.
enum class BottomModel { continuation, uniform };

struct EnergyOptions {
    // A cylinder pair is accepted once its kernel bracket is this tight (relative).
    double pair_tol = 1e-3;
    std::size_t mc_samples = 200000;
    std::uint64_t seed = 1;
    BottomModel bottom = BottomModel::continuation;
    // Requested relative bracket width; 0 disables the check.
    double precision = 0.0;
    // Throw PrecisionError instead of flagging when precision is not reached.
    bool strict = false;
};

struct EnergyReport {
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double error_bound = 0.0;
    bool diverged = false;
    bool precision_reached = true;
    EnergyMethod method = EnergyMethod::cylinder_quadrature;
    std::int64_t work = 0; // pair evaluations or Monte-Carlo samples
    int depth = 0;
};

// Divergence is declared once a certified lower bound exceeds this.
constexpr double k_divergence_threshold = 1e12;

// Normalized restriction mu_A of a scheme's measure, as disjoint pieces.
struct MeasureView {
    struct Run { // `count` consecutive level-`level` cylinders, each of mass `mass`
        int level = 0;
        double left = 0.0;
        std::uint64_t count = 1;
        double spacing = 0.0;
        double mass = 0.0;
    };
    struct Segment { // uniform density on [lo, hi]
        double lo = 0.0;
        double hi = 0.0;
        double mass = 0.0;
    };
    struct Remainder { // part of a bottom cylinder inside A, mass in [0, mass_max]
        int level = 0;
        double left = 0.0;
        double lo = 0.0;
        double hi = 0.0;
        double mass_max = 0.0;
    };
    std::vector<Run> runs;
    std::vector<Segment> segments;
    std::vector<Remainder> remainders;
    double mass_lo = 0.0; // mu(A) bracket
    double mass_hi = 0.0;
};

MeasureView whole_view(const CantorScheme& scheme);
// Zero-mass A raises zero-measure-restriction.
MeasureView restricted_normalized(const CantorScheme& scheme, double lo, double hi);

// Certified cylinder-pair engine for one scheme and one exponent t. Results
// are memoized, so one engine should be reused for many queries. Not thread
// safe; use one engine per worker.
class EnergyEngine {
public:
    EnergyEngine(const CantorScheme& scheme, double t, const EnergyOptions& opts = {});
    ~EnergyEngine();
    EnergyEngine(EnergyEngine&&) noexcept;

    double t() const;
    // Normalized self-energy of a level-n cylinder.
    Bracket self_energy(int n);
    // Normalized mutual energy of level-nA cylinder at 0 and level-nB cylinder at delta.
    Bracket pair(int nA, int nB, double delta);
    // Energy of a view's normalized measure.
    Bracket view_energy(const MeasureView& v);
    Bracket mutual(const MeasureView& a, const MeasureView& b);
    Bracket potential(double x);
    std::int64_t work() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

EnergyReport t_energy(const CantorScheme& scheme, double t, EnergyMethod method, const EnergyOptions& opts = {});
EnergyReport t_energy(const CantorScheme& scheme, const MeasureView& view, double t, const EnergyOptions& opts = {});
EnergyReport mutual_energy(const CantorScheme& scheme, const MeasureView& a, const MeasureView& b, double t,
                           const EnergyOptions& opts = {});
EnergyReport t_potential(const CantorScheme& scheme, double x, double t, const EnergyOptions& opts = {});

// I_t of normalized Lebesgue measure on U, inverted; 0 when t >= 1.
double capacity_lower_bound(const IntervalUnion& U, double t);

// Double integral of |x-y|^-t over [a1,b1] x [a2,b2] (not normalized).
double uniform_pair_integral(double a1, double b1, double a2, double b2, double t);

// Constant C such that mu(B(x,r)) <= C r^s for every x and every
// r >= length(depth_limit) * 1e-6, from a window-mass recursion. Regular,
// uniformly weighted schemes only.
double certified_frostman_constant(const CantorScheme& scheme, double s);

// Frostman energy bound K * mass^(-t/s), K = C^(t/s) s / (s - t).
double frostman_energy_bound(double C, double s, double t, double mass);

struct FrostmanCheckRow {
    double x = 0.0;
    double r = 0.0;
    double t = 0.0;
    double mass_lo = 0.0;
    double energy_lo = 0.0;
    double energy_hi = 0.0;
    double bound = 0.0;
    bool violation = false;
};

struct FrostmanCheck {
    std::vector<FrostmanCheckRow> rows;
    std::size_t violations = 0;
};

// One row per (x, r, t) triple: a violation is certified when the energy's
// lower bound exceeds the bound evaluated at the ball mass's lower bound.
FrostmanCheck frostman_energy_check(const CantorScheme& scheme, const std::vector<double>& xs,
                                    const std::vector<double>& rs, const std::vector<double>& ts, double C, double s,
                                    const EnergyOptions& opts = {});

void write_energy_csv(std::ostream& os, const std::vector<EnergyReport>& reports, const std::vector<double>& ts);
void write_frostman_csv(std::ostream& os, const FrostmanCheck& check);

} // namespace rcov
