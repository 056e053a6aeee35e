#include "rcov/estimators.hpp"

#include "rcov/error.hpp"
#include "rcov/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

namespace rcov {

LineFit ols(const std::vector<double>& x, const std::vector<double>& y)
{
    require(x.size() == y.size() && x.size() >= 2, ErrorKind::invalid_parameter, "least squares needs >= 2 points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    require(sxx > 0, ErrorKind::invalid_parameter, "least squares needs distinct abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        sse += e * e;
    }
    f.r2 = syy > 0 ? 1.0 - sse / syy : 1.0;
    f.stderr_ = x.size() > 2 ? std::sqrt(sse / (n - 2) / sxx) : std::nan("");
    return f;
}

namespace {

// Endpoints within round-off of a grid line are placed on it, so sets built on
// the same lattice as the grid do not touch neighbouring cells.
double snap(double q)
{
    const double r = std::nearbyint(q);
    const double tol = 1e-9 + 8.0 * std::numeric_limits<double>::epsilon() * std::abs(q);
    return std::abs(q - r) <= tol ? r : q;
}

} // namespace

std::int64_t box_count(const IntervalUnion& U, double delta, const Interval& hull)
{
    require(delta > 0 && std::isfinite(delta), ErrorKind::invalid_parameter, "box size must be positive");
    const double a = hull.lo;
    std::int64_t count = 0;
    std::int64_t last = std::numeric_limits<std::int64_t>::min();
    for (const Interval& iv : U.intervals()) {
        const double f0 = std::floor(snap((iv.lo - a) / delta));
        const double f1 = std::ceil(snap((iv.hi - a) / delta)) - 1;
        require(std::abs(f0) < 9e18 && std::abs(f1) < 9e18, ErrorKind::invalid_parameter,
                "box index overflow: delta too small for the set's extent");
        const auto i0 = static_cast<std::int64_t>(f0);
        const auto i1 = static_cast<std::int64_t>(f1);
        const std::int64_t start = std::max(i0, last == std::numeric_limits<std::int64_t>::min() ? i0 : last + 1);
        if (i1 >= start) {
            count += i1 - start + 1;
        }
        last = std::max(last, i1);
    }
    return count;
}

namespace {

DimensionFit fit_points(std::vector<FitPoint> pts)
{
    std::sort(pts.begin(), pts.end(),
              [](const FitPoint& a, const FitPoint& b) { return a.log_inv_delta < b.log_inv_delta; });
    DimensionFit fit;
    fit.points = pts;
    require(pts.size() >= 2, ErrorKind::invalid_parameter, "dimension fit needs at least two usable scales");
    std::vector<double> x;
    std::vector<double> y;
    for (const FitPoint& p : pts) {
        x.push_back(p.log_inv_delta);
        y.push_back(p.log_count);
    }
    fit.delta_min = std::exp(-x.back());
    fit.delta_max = std::exp(-x.front());
    if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); })) {
        fit.degenerate = true;
        fit.intercept = y.front();
        fit.r2 = 1.0;
        fit.stderr_ = 0.0;
        return fit;
    }
    const LineFit lf = ols(x, y);
    fit.slope = lf.slope;
    fit.intercept = lf.intercept;
    fit.stderr_ = lf.stderr_;
    fit.r2 = lf.r2;
    return fit;
}

} // namespace

DimensionFit box_dimension_fit(const IntervalUnion& U, const std::vector<double>& deltas, const Interval& hull)
{
    require(deltas.size() >= 4, ErrorKind::invalid_parameter, "box_dimension_fit needs at least 4 scales");
    std::vector<FitPoint> pts;
    std::vector<std::int64_t> counts(deltas.size());
    parallel_for(deltas.size(), [&](std::size_t i) { counts[i] = box_count(U, deltas[i], hull); });
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (counts[i] > 0) {
            pts.push_back({std::log(1.0 / deltas[i]), std::log(static_cast<double>(counts[i])), 0});
        }
    }
    return fit_points(std::move(pts));
}

DimensionFit limsup_dimension(const CoveringRealization& real, const LimsupDimensionOptions& opts)
{
    require(opts.band_factor > 1, ErrorKind::invalid_parameter, "band_factor must exceed 1");
    require(opts.r_min > 0 && opts.r_min < opts.r_max, ErrorKind::invalid_parameter, "need 0 < r_min < r_max");
    require(opts.first_index >= 1, ErrorKind::invalid_parameter, "first_index must be >= 1");
    const std::int64_t K = real.K();
    const double lb = std::log(opts.band_factor);
    auto band_of = [&](double r) { return static_cast<std::int64_t>(std::floor(std::log(r) / lb)); };

    std::map<std::int64_t, std::vector<std::int64_t>> bands;
    for (std::int64_t k = opts.first_index; k <= K; ++k) {
        const double r = real.r[static_cast<std::size_t>(k - 1)];
        if (r >= opts.r_min && r <= opts.r_max) {
            bands[band_of(r)].push_back(k);
        }
    }

    // A band is complete when the radii just outside its index range fall in
    // other bands, i.e. no ball of the band was cut off by the window.
    const auto seq_len = real.radii.size();
    auto radius_at = [&](std::int64_t k) -> std::optional<double> {
        if (k < 1) {
            return std::nullopt;
        }
        if (k <= K) {
            return real.r[static_cast<std::size_t>(k - 1)];
        }
        if (seq_len && k > *seq_len) {
            return std::nullopt;
        }
        return real.radii.at(k);
    };

    struct Band {
        std::int64_t id;
        const std::vector<std::int64_t>* members;
    };
    std::vector<Band> usable;
    for (const auto& [id, members] : bands) {
        if (static_cast<std::int64_t>(members.size()) < opts.min_balls) {
            continue;
        }
        if (real.radii.monotone()) {
            const auto before = radius_at(members.front() - 1);
            const auto after = radius_at(members.back() + 1);
            if ((before && band_of(*before) == id) || (after && band_of(*after) == id)) {
                continue;
            }
        }
        usable.push_back({id, &members});
    }

    std::vector<FitPoint> pts(usable.size());
    const Interval hull = real.scheme.hull();
    parallel_for(usable.size(), [&](std::size_t b) {
        std::vector<Interval> pieces;
        std::vector<double> diameters;
        for (std::int64_t k : *usable[b].members) {
            const Interval ball = real.ball(k);
            const double r = real.r[static_cast<std::size_t>(k - 1)];
            auto p = support_pieces(real.scheme, ball.lo, ball.hi, r * opts.piece_resolution);
            if (p.empty()) {
                continue;
            }
            diameters.push_back(p.back().hi - p.front().lo);
            pieces.insert(pieces.end(), p.begin(), p.end());
        }
        if (diameters.empty()) {
            pts[b] = {0, -1, 0};
            return;
        }
        const auto mid = diameters.begin() + static_cast<std::ptrdiff_t>(diameters.size() / 2);
        std::nth_element(diameters.begin(), mid, diameters.end());
        const double delta = *mid;
        const IntervalUnion U = IntervalUnion::from_intervals(std::move(pieces));
        const std::int64_t n = box_count(U, delta, hull);
        pts[b] = {std::log(1.0 / delta), std::log(static_cast<double>(n)),
                  static_cast<std::int64_t>(usable[b].members->size())};
    });
    std::erase_if(pts, [](const FitPoint& p) { return p.log_count < 0; });
    require(pts.size() >= 2, ErrorKind::invalid_parameter,
            "limsup_dimension: fewer than two complete radius bands in [" + std::to_string(opts.r_min) + ", " +
                std::to_string(opts.r_max) + "]");
    return fit_points(std::move(pts));
}

DimensionFit surrogate_dimension(const CoveringRealization& real, const std::vector<std::int64_t>& bounds,
                                 const std::vector<double>& deltas)
{
    const LimsupApprox E = limsup_approx(real, bounds);
    return box_dimension_fit(E.set, deltas, real.scheme.hull());
}

std::vector<LocalDimReport> local_dims(const CantorScheme& scheme, const std::vector<double>& xs,
                                       const std::vector<double>& scales)
{
    require(scales.size() >= 2, ErrorKind::invalid_parameter, "local_dims needs at least two scales");
    std::vector<double> sc = scales;
    std::sort(sc.begin(), sc.end());
    require(sc.front() > 0, ErrorKind::invalid_parameter, "scales must be positive");
    const double top = sc.back();
    std::vector<LocalDimReport> out(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) {
        LocalDimReport rep;
        rep.x = xs[i];
        const double m_top = ball_mass(scheme, xs[i], top).mid();
        rep.lower_hat = std::numeric_limits<double>::infinity();
        rep.upper_hat = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j + 1 < sc.size(); ++j) {
            const double m = ball_mass(scheme, xs[i], sc[j]).mid();
            if (!(m > 0) || !(m_top > 0) || sc[j] == top) {
                continue;
            }
            const double slope = std::log(m / m_top) / std::log(sc[j] / top);
            rep.slopes.emplace_back(sc[j], slope);
            rep.lower_hat = std::min(rep.lower_hat, slope);
            rep.upper_hat = std::max(rep.upper_hat, slope);
        }
        if (rep.slopes.empty()) {
            rep.lower_hat = rep.upper_hat = std::nan("");
        }
        out[i] = std::move(rep);
    });
    return out;
}

DeltaFunctionals delta_functionals(const std::vector<LocalDimReport>& reports, double threshold)
{
    DeltaFunctionals d;
    d.delta = std::numeric_limits<double>::infinity();
    d.delta_bar = -std::numeric_limits<double>::infinity();
    d.delta_hat = std::numeric_limits<double>::infinity();
    for (const LocalDimReport& r : reports) {
        if (!(r.lower_hat > threshold) || !(r.upper_hat > 0)) {
            continue;
        }
        ++d.sample_size;
        d.delta = std::min(d.delta, r.upper_hat - r.lower_hat);
        d.delta_bar = std::max(d.delta_bar, r.lower_hat / r.upper_hat);
        d.delta_hat = std::min(d.delta_hat, r.lower_hat / r.upper_hat);
    }
    if (d.sample_size == 0) {
        fail(ErrorKind::no_mass_above_threshold,
             "no sampled point has lower local dimension above " + std::to_string(threshold));
    }
    return d;
}

SpectrumCurve lipschitz_hull(const SpectrumCurve& F)
{
    require(!F.grid.empty() && F.grid.size() == F.values.size(), ErrorKind::invalid_parameter,
            "spectrum curve must be non-empty with one value per grid point");
    for (std::size_t i = 1; i < F.grid.size(); ++i) {
        require(F.grid[i] > F.grid[i - 1], ErrorKind::invalid_parameter, "spectrum grid must be strictly increasing");
    }
    const std::size_t n = F.grid.size();
    SpectrumCurve out{F.grid, std::vector<double>(n)};
    std::vector<double> suffix(n + 1, k_absent);
    for (std::size_t i = n; i-- > 0;) {
        suffix[i] = std::max(suffix[i + 1], F.values[i] - F.grid[i]);
    }
    double prefix = k_absent;
    for (std::size_t i = 0; i < n; ++i) {
        prefix = std::max(prefix, F.values[i]);
        out.values[i] = std::max(prefix, suffix[i + 1] + F.grid[i]);
    }
    return out;
}

double evaluate(const SpectrumCurve& F, double s)
{
    require(!F.grid.empty(), ErrorKind::invalid_parameter, "empty spectrum curve");
    if (s < F.grid.front() || s > F.grid.back()) {
        fail(ErrorKind::extrapolation_refused, "s = " + std::to_string(s) + " lies outside the spectrum grid [" +
                                                   std::to_string(F.grid.front()) + ", " +
                                                   std::to_string(F.grid.back()) + "]");
    }
    auto it = std::lower_bound(F.grid.begin(), F.grid.end(), s);
    const auto j = static_cast<std::size_t>(it - F.grid.begin());
    if (F.grid[j] == s) {
        return F.values[j];
    }
    const double a = F.values[j - 1];
    const double b = F.values[j];
    if (a == k_absent || b == k_absent) {
        return k_absent;
    }
    const double w = (s - F.grid[j - 1]) / (F.grid[j] - F.grid[j - 1]);
    return a + w * (b - a);
}

SpectrumCurve analytic_spectrum(double dim, double step)
{
    require(step > 0, ErrorKind::invalid_parameter, "grid step must be positive");
    SpectrumCurve F;
    const auto n = static_cast<std::int64_t>(std::llround(2.0 / step));
    for (std::int64_t i = 0; i <= n; ++i) {
        F.grid.push_back(static_cast<double>(i) * step);
    }
    F.grid.push_back(dim);
    std::sort(F.grid.begin(), F.grid.end());
    F.grid.erase(std::unique(F.grid.begin(), F.grid.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                 F.grid.end());
    for (double s : F.grid) {
        F.values.push_back(s >= dim - 1e-12 ? dim : k_absent);
    }
    return F;
}

ConjectureSides conjecture_sides(const CantorScheme& scheme, double alpha, const SpectrumCurve& F, std::int64_t K,
                                 std::uint64_t seed, const LimsupDimensionOptions& opts)
{
    require(alpha > 0, ErrorKind::invalid_parameter, "alpha must be positive");
    ConjectureSides out;
    out.rhs = evaluate(lipschitz_hull(F), 1.0 / alpha);
    const CoveringRealization real = realize(scheme, power_radii(alpha), K, seed);
    out.lhs = limsup_dimension(real, opts);
    return out;
}

void write_fit_csv(std::ostream& os, const DimensionFit& fit)
{
    const auto old = os.precision(17);
    os << "log_inv_delta,log_count,balls\n";
    for (const FitPoint& p : fit.points) {
        os << p.log_inv_delta << ',' << p.log_count << ',' << p.balls << '\n';
    }
    os.precision(old);
}

void write_local_dims_csv(std::ostream& os, const std::vector<LocalDimReport>& reports)
{
    const auto old = os.precision(17);
    os << "x,lower_hat,upper_hat,scales\n";
    for (const LocalDimReport& r : reports) {
        os << r.x << ',' << r.lower_hat << ',' << r.upper_hat << ',' << r.slopes.size() << '\n';
    }
    os.precision(old);
}

void write_spectrum_csv(std::ostream& os, const SpectrumCurve& F)
{
    const auto old = os.precision(17);
    os << "s,value\n";
    for (std::size_t i = 0; i < F.grid.size(); ++i) {
        os << F.grid[i] << ',';
        if (F.values[i] != k_absent) {
            os << F.values[i];
        }
        os << '\n';
    }
    os.precision(old);
}

} // namespace rcov
