#include "rcov/diagnostics.hpp"

#include "rcov/error.hpp"
#include "rcov/estimators.hpp"
#include "rcov/parallel.hpp"
#include "rcov/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

namespace rcov {

void DiagnosticConfig::validate() const
{
    require(t > 0 && t < s, ErrorKind::invalid_parameter, "diagnostics need 0 < t < s");
    require(u > 0, ErrorKind::invalid_parameter, "diagnostics need u > 0");
    require(horizon >= 4, ErrorKind::invalid_parameter, "partial-sum horizon must be at least 4");
    require(sample_count >= 1, ErrorKind::invalid_parameter, "at least one sample point is needed");
    require(b_scale >= 0 && frostman_C >= 0, ErrorKind::invalid_parameter, "weight constants must be non-negative");
}

double resolve_b_scale(const CantorScheme& scheme, const DiagnosticConfig& cfg)
{
    if (cfg.b_scale > 0) {
        return cfg.b_scale;
    }
    const double C = cfg.frostman_C > 0 ? cfg.frostman_C : certified_frostman_constant(scheme, cfg.s);
    return 1.0 / (std::pow(C, cfg.t / cfg.s) * cfg.s / (cfg.s - cfg.t));
}

double doubling_trend(const std::vector<GrowthPoint>& curve)
{
    // Increments between consecutive doubling checkpoints.
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t j = 1; j < curve.size(); ++j) {
        if (curve[j].N != 2 * curve[j - 1].N) {
            continue;
        }
        const double inc = curve[j].partial_sum - curve[j - 1].partial_sum;
        xs.push_back(std::log2(static_cast<double>(curve[j].N)));
        ys.push_back(std::log2(std::max(inc, 1e-300)));
    }
    if (xs.size() < 2) {
        return 0.0;
    }
    const std::size_t from = xs.size() / 2;
    std::vector<double> x(xs.begin() + static_cast<std::ptrdiff_t>(std::min(from, xs.size() - 2)), xs.end());
    std::vector<double> y(ys.begin() + static_cast<std::ptrdiff_t>(std::min(from, ys.size() - 2)), ys.end());
    return ols(x, y).slope;
}

namespace {

// 0: not a member, 1: member, 2: indeterminate.
using Membership = std::function<int(double x, double r)>;

std::vector<std::int64_t> checkpoints(std::int64_t horizon)
{
    std::vector<std::int64_t> out;
    for (std::int64_t n = 1; n <= horizon; n *= 2) {
        out.push_back(n);
    }
    if (out.back() != horizon) {
        out.push_back(horizon);
    }
    return out;
}

GrowthReport run_diagnostic(const std::string& kind, const CantorScheme& scheme, const RadiiSequence& radii,
                            const DiagnosticConfig& cfg, const std::function<Membership()>& make_membership)
{
    cfg.validate();
    GrowthReport rep;
    rep.kind = kind;
    rep.config = cfg;
    rep.b_scale = resolve_b_scale(scheme, cfg);
    rep.horizon = cfg.horizon;
    if (const auto n = radii.size()) {
        rep.horizon = std::min(rep.horizon, *n);
    }
    require(rep.horizon >= 4, ErrorKind::invalid_parameter, "radii sequence shorter than 4 terms");
    const std::vector<double> r = radii.prefix(rep.horizon);
    const double expo = cfg.t * cfg.u / cfg.s;
    const std::vector<std::int64_t> marks = checkpoints(rep.horizon);

    const bool power = radii.rule() == RadiiRule::power && kind == "mass";
    if (power) {
        const double eps = cfg.u - cfg.s;
        rep.run_gamma = eps > 0 ? 1.0 + eps / (cfg.s + eps) : 0.0;
    }

    const std::vector<double> xs = sample_points(scheme, cfg.sample_count, derive_seed(cfg.seed, 0x6469616700ULL));
    rep.points.resize(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) {
        const Membership member = make_membership();
        PointGrowth pg;
        pg.x = xs[i];
        std::vector<char> is_member(power ? static_cast<std::size_t>(rep.horizon) + 1 : 0, 0);
        double sum = 0.0;
        double last_r = -1.0;
        int last_m = 0;
        std::size_t mark = 0;
        double prev_sum = 0.0;
        for (std::int64_t k = 1; k <= rep.horizon; ++k) {
            const double rk = r[static_cast<std::size_t>(k - 1)];
            const int m = rk == last_r ? last_m : member(xs[i], rk);
            last_r = rk;
            last_m = m;
            if (m == 1) {
                sum += rep.b_scale * std::pow(rk, expo);
                ++pg.members;
                if (power) {
                    is_member[static_cast<std::size_t>(k)] = 1;
                }
            } else if (m == 2) {
                ++pg.indeterminate;
            }
            if (mark < marks.size() && k == marks[mark]) {
                GrowthPoint gp{k, sum, 0.0};
                if (mark > 0 && prev_sum > 0) {
                    gp.ratio = sum / prev_sum;
                }
                pg.curve.push_back(gp);
                prev_sum = sum;
                ++mark;
            }
        }
        pg.trend = doubling_trend(pg.curve);
        pg.divergent = pg.trend > cfg.trend_threshold;
        if (power && rep.run_gamma > 0) {
            for (std::int64_t k = 2; k <= rep.horizon; k *= 2) {
                const auto lo = static_cast<std::int64_t>(std::ceil(std::pow(static_cast<double>(k), 1.0 / rep.run_gamma)));
                ++pg.run_checks;
                bool all = true;
                for (std::int64_t j = std::max<std::int64_t>(1, lo); j <= k && all; ++j) {
                    all = is_member[static_cast<std::size_t>(j)] != 0;
                }
                pg.run_hits += all ? 1 : 0;
            }
        }
        rep.points[i] = std::move(pg);
    });

    double div = 0.0;
    double ratio = 0.0;
    double trend = 0.0;
    for (const PointGrowth& p : rep.points) {
        div += p.divergent ? 1.0 : 0.0;
        ratio += p.curve.empty() ? 0.0 : p.curve.back().ratio;
        trend += p.trend;
        rep.indeterminate += p.indeterminate;
    }
    const auto n = static_cast<double>(rep.points.size());
    rep.divergent_fraction = div / n;
    rep.mean_final_ratio = ratio / n;
    rep.mean_trend = trend / n;
    return rep;
}

} // namespace

GrowthReport energy_divergence_diagnostic(const CantorScheme& scheme, const RadiiSequence& radii,
                                          const DiagnosticConfig& cfg)
{
    cfg.validate();
    const double c = resolve_b_scale(scheme, cfg);
    const double expo = cfg.t * cfg.u / cfg.s;
    return run_diagnostic("energy", scheme, radii, cfg, [&]() -> Membership {
        auto engine = std::make_shared<EnergyEngine>(scheme, cfg.t, cfg.energy);
        return [engine, &scheme, c, expo](double x, double r) {
            const double threshold = 1.0 / (c * std::pow(r, expo));
            try {
                const Bracket e = engine->view_energy(restricted_normalized(scheme, x - r, x + r));
                if (e.hi <= threshold) {
                    return 1;
                }
                return e.lo > threshold ? 0 : 2;
            } catch (const Error& err) {
                if (err.kind() == ErrorKind::zero_measure_restriction) {
                    return 2;
                }
                throw;
            }
        };
    });
}

GrowthReport mass_divergence_diagnostic(const CantorScheme& scheme, const RadiiSequence& radii,
                                        const DiagnosticConfig& cfg)
{
    const double u = cfg.u;
    return run_diagnostic("mass", scheme, radii, cfg, [&]() -> Membership {
        return [&scheme, u](double x, double r) {
            // Certified: the lower mass bound must clear the threshold.
            return ball_mass(scheme, x, r).lower >= std::pow(r, u) ? 1 : 0;
        };
    });
}

void write_growth_csv(std::ostream& os, const GrowthReport& report)
{
    const auto old = os.precision(17);
    os << "kind,point,x,N,partial_sum,ratio\n";
    for (std::size_t i = 0; i < report.points.size(); ++i) {
        const PointGrowth& p = report.points[i];
        for (const GrowthPoint& g : p.curve) {
            os << report.kind << ',' << i << ',' << p.x << ',' << g.N << ',' << g.partial_sum << ',' << g.ratio << '\n';
        }
    }
    os.precision(old);
}

void write_growth_summary_csv(std::ostream& os, const GrowthReport& report)
{
    const auto old = os.precision(17);
    os << "kind,point,x,members,indeterminate,final_partial_sum,final_ratio,trend,divergent,run_checks,run_hits\n";
    for (std::size_t i = 0; i < report.points.size(); ++i) {
        const PointGrowth& p = report.points[i];
        const double fs = p.curve.empty() ? 0.0 : p.curve.back().partial_sum;
        const double fr = p.curve.empty() ? 0.0 : p.curve.back().ratio;
        os << report.kind << ',' << i << ',' << p.x << ',' << p.members << ',' << p.indeterminate << ',' << fs << ','
           << fr << ',' << p.trend << ',' << (p.divergent ? 1 : 0) << ',' << p.run_checks << ',' << p.run_hits << '\n';
    }
    os.precision(old);
}

} // namespace rcov
