#include "rcov/energy.hpp"

#include "rcov/error.hpp"
#include "rcov/parallel.hpp"
#include "rcov/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <optional>
#include <ostream>
#include <unordered_map>

namespace rcov {

namespace {

constexpr double k_inf = std::numeric_limits<double>::infinity();
constexpr double k_length_floor = 1e-290;
constexpr std::size_t k_memo_cap = 4'000'000;
constexpr std::uint64_t k_max_energy_branching = 10'000'000;

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 8> k_gl_x{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                       -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                       0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> k_gl_w{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                       0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                       0.2223810344533745, 0.1012285362903763};

double antiderivative2(double z, double t)
{
    const double a = std::abs(z);
    if (a == 0.0) {
        return 0.0;
    }
    if (t == 1.0) {
        return a * std::log(a);
    }
    return std::pow(a, 2.0 - t) / ((1.0 - t) * (2.0 - t));
}

// Exact normalized self-energy of Lebesgue measure on an interval of length len.
double uniform_self(double len, double t)
{
    return t < 1.0 ? 2.0 * std::pow(len, -t) / ((1.0 - t) * (2.0 - t)) : k_inf;
}

// Potential at x of normalized Lebesgue measure on [lo, hi].
double uniform_potential(double lo, double hi, double x, double t)
{
    const double len = hi - lo;
    auto prim = [&](double d) { // integral of |u|^-t over [0, d], d >= 0
        return t == 1.0 ? (d > 0 ? k_inf : 0.0) : std::pow(d, 1.0 - t) / (1.0 - t);
    };
    if (x <= lo || x >= hi) {
        const double near = x <= lo ? lo - x : x - hi;
        const double far = near + len;
        if (near == 0.0 && t >= 1.0) {
            return k_inf;
        }
        if (t == 1.0) {
            return std::log(far / near) / len;
        }
        return (std::pow(far, 1.0 - t) - std::pow(near, 1.0 - t)) / ((1.0 - t) * len);
    }
    if (t >= 1.0) {
        return k_inf;
    }
    return (prim(x - lo) + prim(hi - x)) / len;
}

struct PairKey {
    int a;
    int b;
    std::uint64_t bits;
    bool operator==(const PairKey&) const = default;
};

struct PairKeyHash {
    std::size_t operator()(const PairKey& k) const
    {
        return static_cast<std::size_t>(splitmix64(k.bits ^ (static_cast<std::uint64_t>(k.a) << 40) ^
                                                    (static_cast<std::uint64_t>(k.b) << 20)));
    }
};

} // namespace

double uniform_pair_integral(double a1, double b1, double a2, double b2, double t)
{
    const double l1 = b1 - a1;
    const double l2 = b2 - a2;
    if (!(l1 > 0) || !(l2 > 0)) {
        return 0.0;
    }
    const double gap = std::max(a2 - b1, a1 - b2);
    if (gap >= 2.0 * std::max(l1, l2)) {
        // Smooth kernel: tensor Gauss-Legendre avoids the cancellation of the
        // closed form for well separated intervals.
        double s = 0.0;
        for (std::size_t i = 0; i < 8; ++i) {
            const double x = a1 + 0.5 * l1 * (k_gl_x[i] + 1.0);
            for (std::size_t j = 0; j < 8; ++j) {
                const double y = a2 + 0.5 * l2 * (k_gl_x[j] + 1.0);
                s += k_gl_w[i] * k_gl_w[j] * std::pow(std::abs(x - y), -t);
            }
        }
        return s * 0.25 * l1 * l2;
    }
    if (gap <= 0 && t >= 1.0) {
        return k_inf;
    }
    return antiderivative2(b2 - a1, t) + antiderivative2(a2 - b1, t) - antiderivative2(a2 - a1, t) -
           antiderivative2(b2 - b1, t);
}

std::string to_string(EnergyMethod m)
{
    switch (m) {
    case EnergyMethod::recursive_exact: return "recursive-exact";
    case EnergyMethod::cylinder_quadrature: return "cylinder-quadrature";
    case EnergyMethod::monte_carlo: return "monte-carlo";
    }
    return "";
}

EnergyMethod energy_method_from_string(const std::string& name)
{
    for (EnergyMethod m : {EnergyMethod::recursive_exact, EnergyMethod::cylinder_quadrature, EnergyMethod::monte_carlo}) {
        if (to_string(m) == name) {
            return m;
        }
    }
    fail(ErrorKind::invalid_parameter, "unknown energy method '" + name + "'");
}

struct EnergyEngine::Impl {
    CantorScheme sc;
    double t;
    EnergyOptions opts;
    int D;
    bool leb;
    bool ufill;
    std::vector<LevelSpec> lv; // lv[n]: children of a level-n cylinder
    std::vector<double> len;   // len[n]: level-n length
    int max_level = 0;
    std::unordered_map<PairKey, Bracket, PairKeyHash> memo;
    std::vector<std::optional<Bracket>> self_memo;
    std::int64_t work = 0;

    Impl(const CantorScheme& scheme, double t_, const EnergyOptions& o)
        : sc(scheme), t(t_), opts(o), D(scheme.depth_limit()), leb(lebesgue_like(scheme)),
          ufill(scheme.uniform_fill || o.bottom == BottomModel::uniform)
    {
        require(t > 0 && std::isfinite(t), ErrorKind::invalid_parameter, "energy exponent t must be positive");
        require(opts.pair_tol > 0, ErrorKind::invalid_parameter, "pair tolerance must be positive");
        len.push_back(sc.base_length);
        for (const LevelSpec& l : sc.levels) {
            require(l.branching <= k_max_energy_branching, ErrorKind::invalid_parameter,
                    "energy engine supports at most 1e7 children per level");
            lv.push_back(l);
            len.push_back(l.child_length);
        }
        // Continuation below the bottom level, down to the length floor.
        const LevelSpec& last = sc.levels.back();
        const double parent = len[static_cast<std::size_t>(D - 1)];
        const double ratio = ufill ? 0.5 : last.child_length / parent;
        while (len.back() * ratio > k_length_floor && len.size() < 4000) {
            const double L = len.back();
            LevelSpec c;
            if (ufill) {
                c.branching = 2;
                c.child_length = L / 2;
                c.spacing = L / 2;
            } else {
                const double f = L / parent;
                c = last;
                c.child_length = last.child_length * f;
                c.spacing = last.spacing * f;
                for (double& off : c.offsets) {
                    off *= f;
                }
            }
            lv.push_back(c);
            len.push_back(c.child_length);
        }
        max_level = static_cast<int>(len.size()) - 1;
        self_memo.resize(len.size());
    }

    double k(double d) const { return std::pow(d, -t); }

    bool uniform_cyl(int n) const { return leb || (ufill && n >= D); }

    bool regular_uniform(int n) const
    {
        const LevelSpec& l = lv[static_cast<std::size_t>(n)];
        return l.regular() && l.uniform();
    }

    // Sum over ordered pairs of distinct children of a level-n cylinder.
    Bracket cross_sum(int n)
    {
        const LevelSpec& l = lv[static_cast<std::size_t>(n)];
        Bracket acc;
        const std::uint64_t N = l.branching;
        if (N < 2) {
            return acc;
        }
        if (regular_uniform(n)) {
            const double w = 1.0 / static_cast<double>(N);
            for (std::uint64_t d = 1; d < N; ++d) {
                const double c = 2.0 * static_cast<double>(N - d) * w * w;
                acc += c * pair(n + 1, n + 1, static_cast<double>(d) * l.spacing);
            }
            return acc;
        }
        for (std::uint64_t i = 0; i < N; ++i) {
            for (std::uint64_t j = i + 1; j < N; ++j) {
                acc += (2.0 * l.weight(i) * l.weight(j)) * pair(n + 1, n + 1, l.offset(j) - l.offset(i));
            }
        }
        return acc;
    }

    Bracket self_energy(int n)
    {
        if (n > max_level) {
            return {0.0, k_inf};
        }
        auto& slot = self_memo[static_cast<std::size_t>(n)];
        if (slot) {
            return *slot;
        }
        Bracket out;
        if (uniform_cyl(n)) {
            const double v = uniform_self(len[static_cast<std::size_t>(n)], t);
            out = {v, v};
        } else if (n > D) {
            const double f = std::pow(len[static_cast<std::size_t>(n)] / len[static_cast<std::size_t>(D)], -t);
            out = f * self_energy(D);
        } else if (n == D) {
            // Self-similar continuation: E = cross / (1 - sum w^2 rho^-t).
            const LevelSpec& l = lv[static_cast<std::size_t>(D)];
            const double rho = len[static_cast<std::size_t>(D + 1)] / len[static_cast<std::size_t>(D)];
            const double q = l.sum_sq_weights() * std::pow(rho, -t);
            if (q >= 1.0) {
                out = {k_inf, k_inf};
            } else {
                const Bracket c = cross_sum(D);
                out = {c.lo / (1.0 - q), c.hi / (1.0 - q)};
            }
        } else {
            const LevelSpec& l = lv[static_cast<std::size_t>(n)];
            out = l.sum_sq_weights() * self_energy(n + 1);
            out += cross_sum(n);
        }
        slot = out;
        return out;
    }

    Bracket pair(int nA, int nB, double delta)
    {
        if (nA > nB || (nA == nB && delta < 0)) {
            std::swap(nA, nB);
            delta = -delta;
        }
        if (nA == nB && delta == 0.0) {
            return self_energy(nA);
        }
        ++work;
        const double lenA = len[static_cast<std::size_t>(std::min(nA, max_level))];
        const double lenB = len[static_cast<std::size_t>(std::min(nB, max_level))];
        if (uniform_cyl(nA) && uniform_cyl(nB)) {
            const double v = uniform_pair_integral(0.0, lenA, delta, delta + lenB, t) / (lenA * lenB);
            return {v, v};
        }
        const double gap = delta >= 0 ? delta - lenA : -delta - lenB;
        const double far = delta >= 0 ? delta + lenB : lenA - delta;
        const double klo = k(far);
        const double khi = gap > 0 ? k(gap) : k_inf;
        if (gap > 0 && khi - klo <= opts.pair_tol * klo) {
            return {klo, khi};
        }
        if (nA >= max_level || nB >= max_level) {
            return {klo, khi};
        }
        PairKey key{nA, nB, 0};
        std::memcpy(&key.bits, &delta, sizeof delta);
        if (auto it = memo.find(key); it != memo.end()) {
            return it->second;
        }
        Bracket acc;
        const LevelSpec& la = lv[static_cast<std::size_t>(nA)];
        if (nA == nB && regular_uniform(nA) && la.branching > 1) {
            const auto N = static_cast<std::int64_t>(la.branching);
            const double w2 = 1.0 / (static_cast<double>(N) * static_cast<double>(N));
            for (std::int64_t d = -(N - 1); d <= N - 1; ++d) {
                const double c = static_cast<double>(N - std::abs(d)) * w2;
                acc += c * pair(nA + 1, nA + 1, delta + static_cast<double>(d) * la.spacing);
            }
        } else if (lenA >= lenB && !uniform_cyl(nA)) {
            for (std::uint64_t i = 0; i < la.branching; ++i) {
                acc += la.weight(i) * pair(nA + 1, nB, delta - la.offset(i));
            }
        } else if (!uniform_cyl(nB)) {
            const LevelSpec& lb = lv[static_cast<std::size_t>(nB)];
            for (std::uint64_t j = 0; j < lb.branching; ++j) {
                acc += lb.weight(j) * pair(nA, nB + 1, delta + lb.offset(j));
            }
        } else {
            for (std::uint64_t i = 0; i < la.branching; ++i) {
                acc += la.weight(i) * pair(nA + 1, nB, delta - la.offset(i));
            }
        }
        if (memo.size() < k_memo_cap) {
            memo.emplace(key, acc);
        }
        return acc;
    }

    // Mutual energy of uniform density on [lo, hi] and the level-n cylinder at `left`, normalized.
    Bracket segment_cylinder(double lo, double hi, int n, double left)
    {
        const double L = len[static_cast<std::size_t>(std::min(n, max_level))];
        if (uniform_cyl(n)) {
            const double v = uniform_pair_integral(lo, hi, left, left + L, t) / ((hi - lo) * L);
            return {v, v};
        }
        const double gap = std::max(left - hi, lo - (left + L));
        const double far = std::max(left + L - lo, hi - left);
        const double klo = k(far);
        const double khi = gap > 0 ? k(gap) : k_inf;
        if ((gap > 0 && khi - klo <= opts.pair_tol * klo) || n >= max_level) {
            return {klo, khi};
        }
        ++work;
        const LevelSpec& l = lv[static_cast<std::size_t>(n)];
        Bracket acc;
        for (std::uint64_t i = 0; i < l.branching; ++i) {
            acc += l.weight(i) * segment_cylinder(lo, hi, n + 1, left + l.offset(i));
        }
        return acc;
    }

    // Sup of the potential of a normalized level-n cylinder (n >= D) over its support.
    double continuation_potential_sup(int n)
    {
        const LevelSpec& l = lv[static_cast<std::size_t>(D)];
        if (l.branching < 2) {
            return k_inf;
        }
        const double L = len[static_cast<std::size_t>(D)];
        double min_gap = k_inf;
        for (std::uint64_t i = 1; i < std::min<std::uint64_t>(l.branching, 1 << 16); ++i) {
            min_gap = std::min(min_gap, l.offset(i) - l.offset(i - 1) - l.child_length);
        }
        const double rho = l.child_length / L;
        const double ratio = l.max_weight() * std::pow(rho, -t);
        if (!(min_gap > 0) || ratio >= 1.0) {
            return k_inf;
        }
        const double scale = len[static_cast<std::size_t>(n)] / L;
        return std::pow(min_gap * scale, -t) / (1.0 - ratio);
    }

    Bracket potential(double x)
    {
        struct Node {
            int n;
            double left;
            double mass;
        };
        Bracket acc;
        std::vector<Node> stack{{0, sc.base_lo, 1.0}};
        while (!stack.empty()) {
            const Node nd = stack.back();
            stack.pop_back();
            ++work;
            const double L = len[static_cast<std::size_t>(nd.n)];
            if (uniform_cyl(nd.n)) {
                const double v = uniform_potential(nd.left, nd.left + L, x, t);
                acc += nd.mass * Bracket{v, v};
                continue;
            }
            const double gap = std::max(nd.left - x, x - (nd.left + L));
            const double far = std::max(std::abs(x - nd.left), std::abs(nd.left + L - x));
            if (gap > 0) {
                const double klo = k(far);
                const double khi = k(gap);
                if (khi - klo <= opts.pair_tol * klo || nd.n >= max_level) {
                    acc += nd.mass * Bracket{klo, khi};
                    continue;
                }
            } else if (nd.n >= D) {
                const double sup = continuation_potential_sup(nd.n);
                const double lower = nd.mass * k(L);
                if (nd.n >= max_level || nd.mass * sup <= 1e-3 * opts.pair_tol * std::max(acc.lo, 1.0)) {
                    acc += Bracket{lower, std::max(lower, nd.mass * sup)};
                    continue;
                }
            }
            const LevelSpec& l = lv[static_cast<std::size_t>(nd.n)];
            for (std::uint64_t i = 0; i < l.branching; ++i) {
                stack.push_back({nd.n + 1, nd.left + l.offset(i), nd.mass * l.weight(i)});
            }
        }
        return acc;
    }

    // Numerator contributions between two view pieces.
    using Run = MeasureView::Run;
    using Segment = MeasureView::Segment;
    using Rem = MeasureView::Remainder;

    Bracket run_run(const Run& a, const Run& b)
    {
        Bracket acc;
        const double m = a.mass * b.mass;
        const double d0 = b.left - a.left;
        const bool diff = a.level == b.level && (a.count == 1 || b.count == 1 || a.spacing == b.spacing);
        if (diff) {
            const double sp = a.count > 1 ? a.spacing : b.spacing;
            const auto ca = static_cast<std::int64_t>(a.count);
            const auto cb = static_cast<std::int64_t>(b.count);
            for (std::int64_t d = -(ca - 1); d <= cb - 1; ++d) {
                const std::int64_t cnt = std::min(ca, cb - d) - std::max<std::int64_t>(0, -d);
                if (cnt > 0) {
                    acc += (m * static_cast<double>(cnt)) * pair(a.level, b.level, d0 + static_cast<double>(d) * sp);
                }
            }
            return acc;
        }
        for (std::uint64_t i = 0; i < a.count; ++i) {
            for (std::uint64_t j = 0; j < b.count; ++j) {
                const double d = d0 + static_cast<double>(j) * b.spacing - static_cast<double>(i) * a.spacing;
                acc += m * pair(a.level, b.level, d);
            }
        }
        return acc;
    }

    Bracket segment_run(const Segment& s, const Run& r)
    {
        Bracket acc;
        for (std::uint64_t i = 0; i < r.count; ++i) {
            acc += (s.mass * r.mass) *
                   segment_cylinder(s.lo, s.hi, r.level, r.left + static_cast<double>(i) * r.spacing);
        }
        return acc;
    }

    Bracket segment_segment(const Segment& a, const Segment& b)
    {
        const double v = uniform_pair_integral(a.lo, a.hi, b.lo, b.hi, t) * (a.mass / (a.hi - a.lo)) *
                         (b.mass / (b.hi - b.lo));
        return {v, v};
    }

    static double interval_gap(double lo1, double hi1, double lo2, double hi2)
    {
        return std::max(lo2 - hi1, lo1 - hi2);
    }

    Bracket rem_with(const Rem& r, double lo, double hi, double mass)
    {
        const double gap = interval_gap(r.lo, r.hi, lo, hi);
        return {0.0, gap > 0 ? r.mass_max * mass * k(gap) : k_inf};
    }

    Bracket rem_rem(const Rem& a, const Rem& b)
    {
        if (a.level == b.level && a.left == b.left) {
            const Bracket e = self_energy(a.level);
            return {0.0, a.mass_max * a.mass_max * e.hi};
        }
        const double gap = interval_gap(a.lo, a.hi, b.lo, b.hi);
        return {0.0, gap > 0 ? a.mass_max * b.mass_max * k(gap) : k_inf};
    }

    static double run_hi(const Run& r, const std::vector<double>& len)
    {
        return r.left + static_cast<double>(r.count - 1) * r.spacing + len[static_cast<std::size_t>(r.level)];
    }

    // Sum over all ordered piece pairs (p in a, q in b) of m_p m_q J(p, q).
    Bracket numerator(const MeasureView& a, const MeasureView& b)
    {
        Bracket acc;
        for (const Run& p : a.runs) {
            for (const Run& q : b.runs) {
                acc += run_run(p, q);
            }
            for (const Segment& q : b.segments) {
                acc += segment_run(q, p);
            }
            for (const Rem& q : b.remainders) {
                acc += rem_with(q, p.left, run_hi(p, len), p.mass * static_cast<double>(p.count));
            }
        }
        for (const Segment& p : a.segments) {
            for (const Run& q : b.runs) {
                acc += segment_run(p, q);
            }
            for (const Segment& q : b.segments) {
                acc += segment_segment(p, q);
            }
            for (const Rem& q : b.remainders) {
                acc += rem_with(q, p.lo, p.hi, p.mass);
            }
        }
        for (const Rem& p : a.remainders) {
            for (const Run& q : b.runs) {
                acc += rem_with(p, q.left, run_hi(q, len), q.mass * static_cast<double>(q.count));
            }
            for (const Segment& q : b.segments) {
                acc += rem_with(p, q.lo, q.hi, q.mass);
            }
            for (const Rem& q : b.remainders) {
                acc += rem_rem(p, q);
            }
        }
        return acc;
    }

    Bracket normalized(const Bracket& num, double ma_lo, double ma_hi, double mb_lo, double mb_hi) const
    {
        return {num.lo / (ma_hi * mb_hi), num.hi / (ma_lo * mb_lo)};
    }
};

EnergyEngine::EnergyEngine(const CantorScheme& scheme, double t, const EnergyOptions& opts)
    : impl_(std::make_unique<Impl>(scheme, t, opts))
{
}

EnergyEngine::~EnergyEngine() = default;
EnergyEngine::EnergyEngine(EnergyEngine&&) noexcept = default;

double EnergyEngine::t() const { return impl_->t; }
Bracket EnergyEngine::self_energy(int n) { return impl_->self_energy(n); }
Bracket EnergyEngine::pair(int nA, int nB, double delta) { return impl_->pair(nA, nB, delta); }
Bracket EnergyEngine::potential(double x) { return impl_->potential(x); }
std::int64_t EnergyEngine::work() const { return impl_->work; }

Bracket EnergyEngine::view_energy(const MeasureView& v)
{
    return impl_->normalized(impl_->numerator(v, v), v.mass_lo, v.mass_hi, v.mass_lo, v.mass_hi);
}

Bracket EnergyEngine::mutual(const MeasureView& a, const MeasureView& b)
{
    return impl_->normalized(impl_->numerator(a, b), a.mass_lo, a.mass_hi, b.mass_lo, b.mass_hi);
}

MeasureView whole_view(const CantorScheme& scheme)
{
    MeasureView v;
    if (lebesgue_like(scheme)) {
        const Interval h = scheme.hull();
        v.segments.push_back({h.lo, h.hi, 1.0});
    } else {
        v.runs.push_back({0, scheme.base_lo, 1, 0.0, 1.0});
    }
    v.mass_lo = v.mass_hi = 1.0;
    return v;
}

MeasureView restricted_normalized(const CantorScheme& scheme, double lo, double hi)
{
    MeasureView v;
    const Interval h = scheme.hull();
    if (lebesgue_like(scheme)) {
        const double a = std::max(lo, h.lo);
        const double b = std::min(hi, h.hi);
        if (!(b > a)) {
            fail(ErrorKind::zero_measure_restriction, "restriction set carries no mass");
        }
        v.segments.push_back({a, b, (b - a) / scheme.base_length});
        v.mass_lo = v.mass_hi = (b - a) / scheme.base_length;
        return v;
    }
    if (lo <= h.lo && hi >= h.hi) {
        return whole_view(scheme);
    }
    struct Node {
        double left;
        double mass;
    };
    std::vector<Node> frontier;
    if (h.hi > lo && h.lo < hi) {
        frontier.push_back({h.lo, 1.0});
    }
    std::vector<Node> next;
    for (int n = 0; n < scheme.depth_limit() && !frontier.empty(); ++n) {
        const LevelSpec& l = scheme.levels[static_cast<std::size_t>(n)];
        const double cl = l.child_length;
        next.clear();
        for (const Node& p : frontier) {
            // Children overlapping (lo, hi) in more than a point.
            std::int64_t a = 0;
            std::int64_t b = static_cast<std::int64_t>(l.branching) - 1;
            if (l.regular() && l.branching > 1) {
                a = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((lo - p.left - cl) / l.spacing)));
                b = std::min<std::int64_t>(b, static_cast<std::int64_t>(std::ceil((hi - p.left) / l.spacing)));
            }
            auto cleft = [&](std::int64_t i) { return p.left + l.offset(static_cast<std::uint64_t>(i)); };
            while (a <= b && cleft(a) + cl <= lo) {
                ++a;
            }
            while (a <= b && cleft(b) >= hi) {
                --b;
            }
            if (a > b) {
                continue;
            }
            auto full = [&](std::int64_t i) { return cleft(i) >= lo && cleft(i) + cl <= hi; };
            const std::int64_t fa = full(a) ? a : a + 1;
            const std::int64_t fb = full(b) ? b : b - 1;
            if (!full(a)) {
                next.push_back({cleft(a), p.mass * l.weight(static_cast<std::uint64_t>(a))});
            }
            if (b != a && !full(b)) {
                next.push_back({cleft(b), p.mass * l.weight(static_cast<std::uint64_t>(b))});
            }
            if (fa <= fb) {
                if (l.regular() && l.uniform()) {
                    v.runs.push_back({n + 1, cleft(fa), static_cast<std::uint64_t>(fb - fa + 1), l.spacing,
                                      p.mass * l.weight(0)});
                } else {
                    for (std::int64_t i = fa; i <= fb; ++i) {
                        v.runs.push_back({n + 1, cleft(i), 1, 0.0, p.mass * l.weight(static_cast<std::uint64_t>(i))});
                    }
                }
            }
        }
        frontier.swap(next);
    }
    const int D = scheme.depth_limit();
    const double bottom = scheme.length(D);
    for (const Node& p : frontier) {
        const double a = std::max(lo, p.left);
        const double b = std::min(hi, p.left + bottom);
        if (scheme.uniform_fill) {
            v.segments.push_back({a, b, p.mass * (b - a) / bottom});
        } else {
            v.remainders.push_back({D, p.left, a, b, p.mass});
        }
    }
    for (const auto& r : v.runs) {
        v.mass_lo += r.mass * static_cast<double>(r.count);
    }
    for (const auto& s : v.segments) {
        v.mass_lo += s.mass;
    }
    v.mass_hi = v.mass_lo;
    for (const auto& r : v.remainders) {
        v.mass_hi += r.mass_max;
    }
    if (!(v.mass_lo > 0)) {
        fail(ErrorKind::zero_measure_restriction,
             v.mass_hi > 0 ? "restriction set has no certified mass at the realizable depth"
                           : "restriction set carries no mass");
    }
    return v;
}

namespace {

EnergyReport finish(EnergyReport rep, const EnergyOptions& opts)
{
    if (rep.lower > k_divergence_threshold) {
        rep.diverged = true;
        rep.value = k_inf;
        rep.upper = k_inf;
        rep.error_bound = k_inf;
        return rep;
    }
    if (std::isfinite(rep.upper)) {
        rep.value = 0.5 * (rep.lower + rep.upper);
        rep.error_bound = 0.5 * (rep.upper - rep.lower);
    } else {
        rep.value = rep.lower;
        rep.error_bound = k_inf;
    }
    if (opts.precision > 0 && !(rep.error_bound <= opts.precision * rep.value)) {
        rep.precision_reached = false;
        if (opts.strict) {
            throw PrecisionError(rep.lower, rep.upper,
                                 "energy bracket wider than the requested relative precision " +
                                     std::to_string(opts.precision));
        }
    }
    return rep;
}

EnergyReport monte_carlo_energy(const CantorScheme& scheme, double t, const EnergyOptions& opts)
{
    EnergyEngine engine(scheme, t, opts);
    const int D = scheme.depth_limit();
    const bool ufill = scheme.uniform_fill || opts.bottom == BottomModel::uniform;
    const double bottom = scheme.length(D);
    const Bracket diag = engine.self_energy(D);

    std::vector<double> Q(static_cast<std::size_t>(D));
    double P = 1.0;
    for (int n = 0; n < D; ++n) {
        const double q = scheme.levels[static_cast<std::size_t>(n)].sum_sq_weights();
        Q[static_cast<std::size_t>(n)] = P * (1.0 - q);
        P *= q;
    }
    const double P_diag = P;
    double total_q = 0.0;
    for (double q : Q) {
        total_q += q;
    }
    std::vector<std::size_t> M(static_cast<std::size_t>(D));
    for (int n = 0; n < D; ++n) {
        const double share = total_q > 0 ? Q[static_cast<std::size_t>(n)] / total_q : 0.0;
        M[static_cast<std::size_t>(n)] =
            std::max<std::size_t>(32, static_cast<std::size_t>(std::llround(share * static_cast<double>(opts.mc_samples))));
    }

    struct Stratum {
        double mean_lo = 0, mean_hi = 0, var = 0;
    };
    std::vector<Stratum> st(static_cast<std::size_t>(D));
    parallel_for(static_cast<std::size_t>(D), [&](std::size_t ni) {
        const int n = static_cast<int>(ni);
        const LevelSpec& l = scheme.levels[ni];
        if (l.branching < 2 || Q[ni] == 0.0) {
            return;
        }
        Rng rng(derive_seed(opts.seed, ni));
        auto pick = [&](const LevelSpec& s) { return s.uniform() ? rng.below(s.branching) : s.pick(rng.uniform()); };
        auto within = [&]() {
            double x = 0.0;
            for (int m = n + 1; m < D; ++m) {
                const LevelSpec& s = scheme.levels[static_cast<std::size_t>(m)];
                x += s.offset(pick(s));
            }
            if (ufill) {
                x += rng.uniform() * bottom;
            }
            return x;
        };
        double s_lo = 0, s_hi = 0, s_mid = 0, s_mid2 = 0;
        const std::size_t count = M[ni];
        for (std::size_t k = 0; k < count; ++k) {
            std::uint64_t i = 0;
            std::uint64_t j = 0;
            if (l.uniform()) {
                i = rng.below(l.branching);
                j = rng.below(l.branching - 1);
                j += j >= i ? 1 : 0;
            } else {
                do {
                    i = l.pick(rng.uniform());
                    j = l.pick(rng.uniform());
                } while (i == j);
            }
            const double x = l.offset(i) + within();
            const double y = l.offset(j) + within();
            const double d = std::abs(x - y);
            double klo = 0;
            double khi = 0;
            if (ufill) {
                klo = khi = std::pow(d, -t);
            } else {
                klo = std::pow(d + bottom, -t);
                khi = d > bottom ? std::pow(d - bottom, -t) : k_inf;
            }
            const double mid = 0.5 * (klo + khi);
            s_lo += klo;
            s_hi += khi;
            s_mid += mid;
            s_mid2 += mid * mid;
        }
        const double c = static_cast<double>(count);
        const double mean = s_mid / c;
        st[ni] = {s_lo / c, s_hi / c, std::max(0.0, s_mid2 / c - mean * mean)};
    });

    double lo = P_diag * diag.lo;
    double hi = P_diag * diag.hi;
    double var = 0.0;
    std::int64_t samples = 0;
    for (std::size_t n = 0; n < st.size(); ++n) {
        lo += Q[n] * st[n].mean_lo;
        hi += Q[n] * st[n].mean_hi;
        var += Q[n] * Q[n] * st[n].var / static_cast<double>(M[n]);
        samples += static_cast<std::int64_t>(M[n]);
    }
    const double sigma3 = 3.0 * std::sqrt(var);
    EnergyReport rep;
    rep.method = EnergyMethod::monte_carlo;
    rep.lower = std::max(0.0, lo - sigma3);
    rep.upper = hi + sigma3;
    rep.work = samples;
    rep.depth = D;
    return finish(rep, opts);
}

} // namespace

EnergyReport t_energy(const CantorScheme& scheme, double t, EnergyMethod method, const EnergyOptions& opts)
{
    require(t > 0, ErrorKind::invalid_parameter, "energy exponent t must be positive");
    if (method == EnergyMethod::monte_carlo) {
        return monte_carlo_energy(scheme, t, opts);
    }
    EnergyEngine engine(scheme, t, opts);
    EnergyReport rep;
    rep.method = method;
    rep.depth = scheme.depth_limit();
    if (method == EnergyMethod::recursive_exact) {
        require(scheme.self_similar(), ErrorKind::invalid_parameter,
                "recursive-exact needs a strictly self-similar scheme");
        const LevelSpec& l = scheme.levels.front();
        const double rho = l.child_length / scheme.base_length;
        const double q = l.sum_sq_weights() * std::pow(rho, -t);
        if (q >= 1.0) {
            rep.diverged = true;
            rep.lower = rep.upper = rep.value = rep.error_bound = k_inf;
            rep.work = engine.work();
            return rep;
        }
        // Cross terms of the level-0 cylinder; the self term is solved for.
        Bracket c;
        for (std::uint64_t i = 0; i < l.branching; ++i) {
            for (std::uint64_t j = 0; j < l.branching; ++j) {
                if (i != j) {
                    c += (l.weight(i) * l.weight(j)) * engine.pair(1, 1, l.offset(j) - l.offset(i));
                }
            }
        }
        rep.lower = c.lo / (1.0 - q);
        rep.upper = c.hi / (1.0 - q);
    } else {
        const Bracket e = engine.self_energy(0);
        rep.lower = e.lo;
        rep.upper = e.hi;
    }
    rep.work = engine.work();
    return finish(rep, opts);
}

EnergyReport t_energy(const CantorScheme& scheme, const MeasureView& view, double t, const EnergyOptions& opts)
{
    EnergyEngine engine(scheme, t, opts);
    const Bracket e = engine.view_energy(view);
    EnergyReport rep;
    rep.method = EnergyMethod::cylinder_quadrature;
    rep.lower = e.lo;
    rep.upper = e.hi;
    rep.work = engine.work();
    rep.depth = scheme.depth_limit();
    return finish(rep, opts);
}

EnergyReport mutual_energy(const CantorScheme& scheme, const MeasureView& a, const MeasureView& b, double t,
                           const EnergyOptions& opts)
{
    EnergyEngine engine(scheme, t, opts);
    const Bracket e = engine.mutual(a, b);
    EnergyReport rep;
    rep.method = EnergyMethod::cylinder_quadrature;
    rep.lower = e.lo;
    rep.upper = e.hi;
    rep.work = engine.work();
    rep.depth = scheme.depth_limit();
    return finish(rep, opts);
}

EnergyReport t_potential(const CantorScheme& scheme, double x, double t, const EnergyOptions& opts)
{
    EnergyEngine engine(scheme, t, opts);
    const Bracket p = engine.potential(x);
    EnergyReport rep;
    rep.method = EnergyMethod::cylinder_quadrature;
    rep.lower = p.lo;
    rep.upper = p.hi;
    rep.work = engine.work();
    rep.depth = scheme.depth_limit();
    return finish(rep, opts);
}

double capacity_lower_bound(const IntervalUnion& U, double t)
{
    require(!U.empty(), ErrorKind::invalid_parameter, "capacity needs a non-empty set");
    require(t > 0, ErrorKind::invalid_parameter, "capacity exponent must be positive");
    if (t >= 1.0) {
        return 0.0;
    }
    // Any sub-union is an admissible witness; keep the longest runs when the
    // quadratic pair sum would be too large.
    std::vector<Interval> runs = U.intervals();
    constexpr std::size_t k_max_runs = 4096;
    if (runs.size() > k_max_runs) {
        std::nth_element(runs.begin(), runs.begin() + k_max_runs, runs.end(),
                         [](const Interval& a, const Interval& b) { return a.length() > b.length(); });
        runs.resize(k_max_runs);
        std::sort(runs.begin(), runs.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    }
    double total = 0.0;
    for (const Interval& r : runs) {
        total += r.length();
    }
    double num = 0.0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        num += uniform_pair_integral(runs[i].lo, runs[i].hi, runs[i].lo, runs[i].hi, t);
        for (std::size_t j = i + 1; j < runs.size(); ++j) {
            num += 2.0 * uniform_pair_integral(runs[i].lo, runs[i].hi, runs[j].lo, runs[j].hi, t);
        }
    }
    const double energy = num / (total * total);
    return std::isfinite(energy) && energy > 0 ? 1.0 / energy : 0.0;
}

namespace {

// Upper bound on the largest relative mass a closed window of length L can
// catch inside a level-n cylinder.
double window_mass(const std::vector<LevelSpec>& lv, const std::vector<double>& len, std::size_t n, double L)
{
    if (n + 1 >= len.size() || L >= len[n]) {
        return 1.0;
    }
    const LevelSpec& l = lv[n];
    if (l.branching == 1) {
        return window_mass(lv, len, n + 1, L);
    }
    const double w = 1.0 / static_cast<double>(l.branching);
    const double reach = std::floor((L + l.child_length) / l.spacing) + 1.0;
    const double k = std::min(static_cast<double>(l.branching), reach);
    const double inner = window_mass(lv, len, n + 1, L);
    if (k <= 1.0) {
        return w * inner;
    }
    return std::min(1.0, w * (k - 2.0 + 2.0 * inner));
}

} // namespace

double certified_frostman_constant(const CantorScheme& scheme, double s)
{
    require(s > 0 && s <= 1, ErrorKind::invalid_parameter, "Frostman exponent must be in (0, 1]");
    if (lebesgue_like(scheme)) {
        return std::pow(2.0 / scheme.base_length, s);
    }
    for (const LevelSpec& l : scheme.levels) {
        require(l.regular() && l.uniform(), ErrorKind::invalid_parameter,
                "certified Frostman constants need regular uniformly weighted levels");
    }
    // Levels including the self-similar continuation of the last rule.
    std::vector<LevelSpec> lv = scheme.levels;
    std::vector<double> len{scheme.base_length};
    for (const LevelSpec& l : lv) {
        len.push_back(l.child_length);
    }
    const double r_floor = len.back() * 1e-6;
    const LevelSpec last = lv.back();
    const double parent = len[len.size() - 2];
    while (len.back() > r_floor && len.back() > k_length_floor) {
        const double f = len.back() / parent;
        LevelSpec c = last;
        c.child_length = last.child_length * f;
        c.spacing = last.spacing * f;
        lv.push_back(c);
        len.push_back(c.child_length);
    }
    lv.push_back(lv.back());
    double C = std::pow(scheme.base_length, -s);
    const double step = 1.01;
    for (double r = r_floor; r < scheme.base_length; r *= step) {
        const double W = window_mass(lv, len, 0, 2.0 * r * step);
        C = std::max(C, W / std::pow(r, s));
    }
    return C;
}

double frostman_energy_bound(double C, double s, double t, double mass)
{
    if (!(t < s)) {
        return k_inf;
    }
    const double K = std::pow(C, t / s) * s / (s - t);
    return K * std::pow(mass, -t / s);
}

FrostmanCheck frostman_energy_check(const CantorScheme& scheme, const std::vector<double>& xs,
                                    const std::vector<double>& rs, const std::vector<double>& ts, double C, double s,
                                    const EnergyOptions& opts)
{
    require(xs.size() == rs.size() && rs.size() == ts.size(), ErrorKind::invalid_parameter,
            "frostman check needs equally many x, r and t values");
    FrostmanCheck out;
    out.rows.resize(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) {
        FrostmanCheckRow row;
        row.x = xs[i];
        row.r = rs[i];
        row.t = ts[i];
        require(ts[i] > 0 && ts[i] < s, ErrorKind::invalid_parameter, "frostman check needs 0 < t < s");
        row.mass_lo = ball_mass(scheme, xs[i], rs[i]).lower;
        row.bound = frostman_energy_bound(C, s, ts[i], row.mass_lo);
        try {
            EnergyEngine engine(scheme, ts[i], opts);
            const Bracket e = engine.view_energy(restricted_normalized(scheme, xs[i] - rs[i], xs[i] + rs[i]));
            row.energy_lo = e.lo;
            row.energy_hi = e.hi;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::zero_measure_restriction) {
                throw;
            }
            row.energy_lo = 0.0;
            row.energy_hi = k_inf;
        }
        row.violation = row.energy_lo > row.bound;
        out.rows[i] = row;
    });
    for (const auto& r : out.rows) {
        out.violations += r.violation ? 1 : 0;
    }
    return out;
}

void write_energy_csv(std::ostream& os, const std::vector<EnergyReport>& reports, const std::vector<double>& ts)
{
    const auto old = os.precision(17);
    os << "t,method,value,lower,upper,error_bound,diverged,precision_reached,work,depth\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const EnergyReport& r = reports[i];
        os << ts[i] << ',' << to_string(r.method) << ',' << r.value << ',' << r.lower << ',' << r.upper << ','
           << r.error_bound << ',' << (r.diverged ? 1 : 0) << ',' << (r.precision_reached ? 1 : 0) << ',' << r.work
           << ',' << r.depth << '\n';
    }
    os.precision(old);
}

void write_frostman_csv(std::ostream& os, const FrostmanCheck& check)
{
    const auto old = os.precision(17);
    os << "x,r,t,mass_lo,energy_lo,energy_hi,bound,violation\n";
    for (const auto& r : check.rows) {
        os << r.x << ',' << r.r << ',' << r.t << ',' << r.mass_lo << ',' << r.energy_lo << ',' << r.energy_hi << ','
           << r.bound << ',' << (r.violation ? 1 : 0) << '\n';
    }
    os.precision(old);
}

} // namespace rcov
