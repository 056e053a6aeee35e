#include "rcov/covering.hpp"

#include "rcov/error.hpp"
#include "rcov/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace rcov {

Interval CoveringRealization::ball(std::int64_t k) const
{
    const auto i = static_cast<std::size_t>(k - 1);
    return {centers[i] - r[i], centers[i] + r[i]};
}

CoveringRealization realize(const CantorScheme& scheme, const RadiiSequence& radii, std::int64_t K, std::uint64_t seed)
{
    require(K >= 0, ErrorKind::invalid_parameter, "K must be non-negative");
    CoveringRealization real{scheme, radii, {}, radii.prefix(K), seed};
    real.centers = sample_points(scheme, static_cast<std::size_t>(K), seed);
    return real;
}

IntervalUnion union_range(const CoveringRealization& real, std::int64_t from, std::int64_t to)
{
    if (real.K() == 0) {
        return {};
    }
    require(from >= 1 && from <= to && to <= real.K(), ErrorKind::invalid_parameter,
            "union_range needs 1 <= from <= to <= K, got [" + std::to_string(from) + ", " + std::to_string(to) + "]");
    std::vector<Interval> balls;
    balls.reserve(static_cast<std::size_t>(to - from + 1));
    for (std::int64_t k = from; k <= to; ++k) {
        balls.push_back(real.ball(k));
    }
    return IntervalUnion::from_intervals(std::move(balls));
}

LimsupApprox limsup_approx(const CoveringRealization& real, const std::vector<std::int64_t>& bounds)
{
    require(bounds.size() >= 2, ErrorKind::invalid_parameter, "limsup_approx needs at least one block (two bounds)");
    require(bounds.front() >= 0 && bounds.back() <= real.K(), ErrorKind::invalid_parameter,
            "block bounds must lie in [0, K]");
    for (std::size_t i = 1; i < bounds.size(); ++i) {
        require(bounds[i] > bounds[i - 1], ErrorKind::invalid_parameter, "block bounds must be strictly increasing");
    }
    const std::size_t m = bounds.size() - 1;
    std::vector<IntervalUnion> blocks(m);
    parallel_for(m, [&](std::size_t j) { blocks[j] = union_range(real, bounds[j] + 1, bounds[j + 1]); });
    LimsupApprox out;
    out.bounds = bounds;
    out.degenerate = m == 1;
    out.set = std::move(blocks[0]);
    for (std::size_t j = 1; j < m; ++j) {
        out.set = out.set.intersect(blocks[j]);
    }
    return out;
}

std::vector<std::int64_t> geometric_schedule(std::int64_t K, std::int64_t n0, int m)
{
    require(m >= 1, ErrorKind::invalid_parameter, "schedule needs m >= 1");
    require(n0 >= 0 && K > n0 + m - 1, ErrorKind::invalid_parameter,
            "schedule needs K >= n0 + m, got K=" + std::to_string(K) + ", n0=" + std::to_string(n0));
    std::vector<std::int64_t> b{n0};
    const double base = static_cast<double>(std::max<std::int64_t>(n0, 1));
    const double rho = std::pow(static_cast<double>(K) / base, 1.0 / m);
    for (int j = 1; j <= m; ++j) {
        auto v = static_cast<std::int64_t>(std::ceil(base * std::pow(rho, j) - 1e-9));
        v = std::max(v, b.back() + 1);
        v = std::min(v, K - (m - j));
        b.push_back(v);
    }
    b.back() = K;
    return b;
}

std::vector<std::int64_t> multiplicity_profile(const CoveringRealization& real, const std::vector<double>& grid)
{
    require(std::is_sorted(grid.begin(), grid.end()), ErrorKind::invalid_parameter, "grid must be sorted");
    std::vector<double> starts(real.centers.size());
    std::vector<double> ends(real.centers.size());
    for (std::size_t i = 0; i < starts.size(); ++i) {
        starts[i] = real.centers[i] - real.r[i];
        ends[i] = real.centers[i] + real.r[i];
    }
    std::sort(starts.begin(), starts.end());
    std::sort(ends.begin(), ends.end());
    // Open balls: x is covered when start < x < end.
    std::vector<std::int64_t> out;
    out.reserve(grid.size());
    for (double x : grid) {
        const auto opened = std::lower_bound(starts.begin(), starts.end(), x) - starts.begin();
        const auto closed = std::upper_bound(ends.begin(), ends.end(), x) - ends.begin();
        out.push_back(static_cast<std::int64_t>(opened - closed));
    }
    return out;
}

} // namespace rcov
