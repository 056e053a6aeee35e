#include "rcov/measure.hpp"

#include "rcov/error.hpp"
#include "rcov/parallel.hpp"
#include "rcov/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rcov {

namespace {

constexpr double k_min_length = 1e-300;
constexpr double k_max_branching = 9007199254740992.0; // 2^53
constexpr std::size_t k_sample_chunk = 1 << 16;

std::int64_t clamp_index(double v, std::int64_t lo, std::int64_t hi)
{
    if (!(v > static_cast<double>(lo))) {
        return lo;
    }
    if (v >= static_cast<double>(hi)) {
        return hi;
    }
    return static_cast<std::int64_t>(v);
}

} // namespace

double LevelSpec::offset(std::uint64_t i) const
{
    return regular() ? static_cast<double>(i) * spacing : offsets[i];
}

double LevelSpec::weight(std::uint64_t i) const
{
    return uniform() ? 1.0 / static_cast<double>(branching) : weights[i];
}

double LevelSpec::max_weight() const
{
    if (uniform()) {
        return 1.0 / static_cast<double>(branching);
    }
    return *std::max_element(weights.begin(), weights.end());
}

double LevelSpec::sum_sq_weights() const
{
    if (uniform()) {
        return 1.0 / static_cast<double>(branching);
    }
    double s = 0.0;
    for (double w : weights) {
        s += w * w;
    }
    return s;
}

double LevelSpec::weight_range(std::uint64_t i0, std::uint64_t i1) const
{
    if (i1 < i0) {
        return 0.0;
    }
    if (uniform()) {
        return static_cast<double>(i1 - i0 + 1) / static_cast<double>(branching);
    }
    return cumulative[i1 + 1] - cumulative[i0];
}

std::uint64_t LevelSpec::pick(double v) const
{
    if (uniform()) {
        return std::min<std::uint64_t>(branching - 1, static_cast<std::uint64_t>(v * static_cast<double>(branching)));
    }
    const double target = v * cumulative.back();
    auto it = std::upper_bound(cumulative.begin() + 1, cumulative.end(), target);
    const auto idx = static_cast<std::uint64_t>(it - (cumulative.begin() + 1));
    return std::min<std::uint64_t>(idx, branching - 1);
}

void LevelSpec::finalize()
{
    cumulative.clear();
    if (!uniform()) {
        cumulative.resize(weights.size() + 1, 0.0);
        std::partial_sum(weights.begin(), weights.end(), cumulative.begin() + 1);
    }
}

std::string to_string(SchemeKind kind)
{
    switch (kind) {
    case SchemeKind::middle: return "middle";
    case SchemeKind::oscillating: return "oscillating";
    case SchemeKind::spaced: return "spaced";
    case SchemeKind::lebesgue: return "lebesgue";
    case SchemeKind::custom: return "custom";
    }
    return "custom";
}

SchemeKind scheme_kind_from_string(const std::string& name)
{
    for (SchemeKind k : {SchemeKind::middle, SchemeKind::oscillating, SchemeKind::spaced, SchemeKind::lebesgue,
                         SchemeKind::custom}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    fail(ErrorKind::invalid_parameter, "unknown scheme kind '" + name + "'");
}

bool CantorScheme::self_similar() const
{
    if (levels.empty()) {
        return false;
    }
    const LevelSpec& first = levels.front();
    const double ratio = first.child_length / base_length;
    double parent = base_length;
    for (const LevelSpec& lv : levels) {
        if (lv.branching != first.branching || lv.uniform() != first.uniform() || lv.regular() != first.regular()) {
            return false;
        }
        if (std::abs(lv.child_length / parent - ratio) > 1e-12 * ratio) {
            return false;
        }
        for (std::uint64_t i = 0; i < std::min<std::uint64_t>(lv.branching, 64); ++i) {
            if (std::abs(lv.offset(i) / parent - first.offset(i) / base_length) > 1e-12) {
                return false;
            }
            if (std::abs(lv.weight(i) - first.weight(i)) > 1e-15) {
                return false;
            }
        }
        parent = lv.child_length;
    }
    return true;
}

CantorScheme CantorScheme::scaled(double lambda) const
{
    require(lambda > 0 && std::isfinite(lambda), ErrorKind::invalid_parameter, "scale factor must be positive");
    std::vector<LevelSpec> lv = levels;
    for (LevelSpec& l : lv) {
        l.child_length *= lambda;
        l.spacing *= lambda;
        for (double& o : l.offsets) {
            o *= lambda;
        }
    }
    CantorScheme out = build_custom(base_lo * lambda, base_length * lambda, std::move(lv), uniform_fill);
    out.meta = meta;
    out.meta.depth_requested.reset();
    return out;
}

void CantorScheme::validate() const
{
    require(base_length > 0 && std::isfinite(base_length) && std::isfinite(base_lo), ErrorKind::invalid_parameter,
            "base interval must have positive finite length");
    double parent = base_length;
    for (std::size_t n = 0; n < levels.size(); ++n) {
        const LevelSpec& lv = levels[n];
        const std::string where = "level " + std::to_string(n + 1) + ": ";
        require(lv.branching >= 1, ErrorKind::invalid_parameter, where + "branching must be positive");
        require(lv.child_length > 0 && lv.child_length < parent * (1 + 1e-12) &&
                    (lv.branching > 1 || lv.child_length < parent),
                ErrorKind::invalid_parameter, where + "child length must be in (0, parent length)");
        if (!lv.regular()) {
            require(lv.offsets.size() == lv.branching, ErrorKind::invalid_parameter,
                    where + "offsets must have one entry per child");
            require(lv.offsets.front() >= 0, ErrorKind::invalid_parameter, where + "offsets must be non-negative");
            for (std::size_t i = 1; i < lv.offsets.size(); ++i) {
                require(lv.offsets[i - 1] + lv.child_length <= lv.offsets[i], ErrorKind::invalid_parameter,
                        where + "children overlap or offsets not increasing");
            }
        } else if (lv.branching > 1) {
            require(lv.spacing >= lv.child_length, ErrorKind::invalid_parameter, where + "children overlap");
        }
        const double last = lv.offset(lv.branching - 1) + lv.child_length;
        require(last <= parent * (1 + 1e-12), ErrorKind::invalid_parameter, where + "children exceed parent interval");
        if (!lv.uniform()) {
            require(lv.weights.size() == lv.branching, ErrorKind::invalid_parameter,
                    where + "weights must have one entry per child");
            double sum = 0.0;
            for (double w : lv.weights) {
                require(w > 0, ErrorKind::invalid_parameter, where + "weights must be positive");
                sum += w;
            }
            require(std::abs(sum - 1.0) <= 1e-12, ErrorKind::invalid_parameter, where + "weights must sum to 1");
        }
        parent = lv.child_length;
    }
}

namespace {

LevelSpec two_children(double parent, double ratio)
{
    LevelSpec lv;
    lv.branching = 2;
    lv.child_length = parent * ratio;
    lv.spacing = parent - lv.child_length;
    return lv;
}

void check_depth(int depth)
{
    require(depth >= 1 && depth <= 2000, ErrorKind::invalid_parameter, "depth must be in [1, 2000]");
}

// Drops levels whose lengths underflow the documented floor.
void cap_depth(CantorScheme& scheme, int requested)
{
    std::size_t keep = scheme.levels.size();
    for (std::size_t n = 0; n < scheme.levels.size(); ++n) {
        if (scheme.levels[n].child_length < k_min_length) {
            keep = n;
            break;
        }
    }
    require(keep >= 1, ErrorKind::construction_degenerate, "first level is below the length floor");
    if (keep < scheme.levels.size()) {
        scheme.levels.resize(keep);
        scheme.meta.depth_requested = requested;
    }
}

} // namespace

CantorScheme build_middle_cantor(double ratio, double ell0, int depth)
{
    require(ratio > 0 && ratio < 0.5, ErrorKind::invalid_parameter, "middle Cantor ratio must be in (0, 1/2)");
    require(ell0 > 0 && std::isfinite(ell0), ErrorKind::invalid_parameter, "ell0 must be positive");
    check_depth(depth);
    CantorScheme sc;
    sc.kind = SchemeKind::middle;
    sc.base_length = ell0;
    double parent = ell0;
    for (int n = 0; n < depth; ++n) {
        sc.levels.push_back(two_children(parent, ratio));
        parent = sc.levels.back().child_length;
    }
    sc.parameters = {{"ratio", ratio}, {"ell0", ell0}, {"depth", depth}};
    const double dim = std::log(2.0) / -std::log(ratio);
    sc.meta = {dim, dim, dim, true, std::nullopt};
    cap_depth(sc, depth);
    return sc;
}

std::vector<std::int64_t> default_block_bounds(int depth)
{
    std::vector<std::int64_t> b;
    std::int64_t n = 1;
    while (true) {
        b.push_back(n);
        if (n > depth) {
            break;
        }
        n *= 2;
    }
    return b;
}

CantorScheme build_oscillating_cantor(double alpha, double beta, const std::vector<std::int64_t>& block_bounds,
                                      double ell0, int depth)
{
    require(alpha > 0 && alpha < 0.5 && beta > 0 && beta < 0.5, ErrorKind::invalid_parameter,
            "oscillating Cantor ratios must be in (0, 1/2)");
    require(ell0 > 0 && std::isfinite(ell0), ErrorKind::invalid_parameter, "ell0 must be positive");
    check_depth(depth);
    for (std::size_t i = 1; i < block_bounds.size(); ++i) {
        require(block_bounds[i] > block_bounds[i - 1], ErrorKind::invalid_parameter,
                "block bounds must be strictly increasing");
    }
    CantorScheme sc;
    sc.kind = SchemeKind::oscillating;
    sc.base_length = ell0;
    double parent = ell0;
    for (int n = 1; n <= depth; ++n) {
        const auto passed = std::upper_bound(block_bounds.begin(), block_bounds.end(), n) - block_bounds.begin();
        const bool use_beta = passed > 0 && (passed - 1) % 2 == 1;
        sc.levels.push_back(two_children(parent, use_beta ? beta : alpha));
        parent = sc.levels.back().child_length;
    }
    sc.parameters = {{"alpha", alpha}, {"beta", beta}, {"block_bounds", block_bounds}, {"ell0", ell0},
                     {"depth", depth}};
    const double s = std::log(2.0) / -std::log(alpha);
    const double u = std::log(2.0) / -std::log(beta);
    sc.meta = {s, u, std::min(s, u), s <= u, std::nullopt};
    cap_depth(sc, depth);
    return sc;
}

CantorScheme build_spaced_cantor(double s, double u, double ell0, int depth)
{
    require(s > 0 && s < u && u < 1, ErrorKind::invalid_parameter, "spaced Cantor needs 0 < s < u < 1");
    require(ell0 > 0 && ell0 < 1, ErrorKind::invalid_parameter, "spaced Cantor needs ell0 in (0, 1)");
    check_depth(depth);
    const double v = u * (1 - s) / (s * (1 - u));
    CantorScheme sc;
    sc.kind = SchemeKind::spaced;
    sc.base_length = ell0;
    double prev = ell0;
    for (int k = 1; k <= depth; ++k) {
        const double ell = std::pow(prev, v);
        const double big = std::pow(ell, s / u);
        const double count = std::floor(prev / big * (1 + 1e-12));
        if (ell < k_min_length || count > k_max_branching) {
            require(k > 1, ErrorKind::construction_degenerate, "spaced Cantor level 1 is not representable");
            sc.meta.depth_requested = depth;
            break;
        }
        if (count < 2) {
            fail(ErrorKind::construction_degenerate,
                 "spaced Cantor level " + std::to_string(k) + " has N_k = " + std::to_string(static_cast<long long>(count)) +
                     " < 2; choose a smaller ell0");
        }
        LevelSpec lv;
        lv.branching = static_cast<std::uint64_t>(count);
        lv.child_length = ell;
        lv.spacing = big;
        sc.levels.push_back(lv);
        prev = ell;
    }
    sc.parameters = {{"s", s}, {"u", u}, {"ell0", ell0}, {"depth", depth}};
    sc.meta.s = s;
    sc.meta.u = u;
    sc.meta.support_dim = s;
    sc.meta.exponent_order_consistent = true;
    return sc;
}

CantorScheme build_lebesgue(double a, double b, int depth)
{
    require(std::isfinite(a) && std::isfinite(b) && a < b, ErrorKind::invalid_parameter, "Lebesgue needs a < b");
    check_depth(depth);
    CantorScheme sc;
    sc.kind = SchemeKind::lebesgue;
    sc.base_lo = a;
    sc.base_length = b - a;
    sc.uniform_fill = true;
    double parent = b - a;
    for (int n = 0; n < depth; ++n) {
        LevelSpec lv;
        lv.branching = 2;
        lv.child_length = parent / 2;
        lv.spacing = parent / 2;
        sc.levels.push_back(lv);
        parent = lv.child_length;
    }
    sc.parameters = {{"a", a}, {"b", b}, {"depth", depth}};
    sc.meta = {1.0, 1.0, 1.0, true, std::nullopt};
    cap_depth(sc, depth);
    return sc;
}

CantorScheme build_custom(double base_lo, double base_length, std::vector<LevelSpec> levels, bool uniform_fill)
{
    CantorScheme sc;
    sc.kind = SchemeKind::custom;
    sc.base_lo = base_lo;
    sc.base_length = base_length;
    sc.levels = std::move(levels);
    sc.uniform_fill = uniform_fill;
    require(!sc.levels.empty(), ErrorKind::invalid_parameter, "scheme needs at least one level");
    for (LevelSpec& lv : sc.levels) {
        lv.finalize();
    }
    sc.validate();
    nlohmann::json lv_doc = nlohmann::json::array();
    for (const LevelSpec& lv : sc.levels) {
        nlohmann::json l = {{"branching", lv.branching}, {"child_length", lv.child_length}};
        if (lv.regular()) {
            l["spacing"] = lv.spacing;
        } else {
            l["offsets"] = lv.offsets;
        }
        if (!lv.uniform()) {
            l["weights"] = lv.weights;
        }
        lv_doc.push_back(l);
    }
    sc.parameters = {{"base_lo", base_lo}, {"base_length", base_length}, {"uniform_fill", uniform_fill},
                     {"levels", lv_doc}};
    // Similarity dimension as a best-effort summary for custom schemes.
    const LevelSpec& f = sc.levels.front();
    double dim = 1.0;
    if (f.branching > 1) {
        dim = std::log(static_cast<double>(f.branching)) / -std::log(f.child_length / base_length);
    }
    sc.meta = {dim, dim, std::min(dim, 1.0), true, std::nullopt};
    if (uniform_fill) {
        sc.meta = {1.0, 1.0, 1.0, true, std::nullopt};
    }
    return sc;
}

nlohmann::json to_json(const CantorScheme& scheme)
{
    return {{"kind", to_string(scheme.kind)}, {"parameters", scheme.parameters}, {"depth_limit", scheme.depth_limit()}};
}

CantorScheme scheme_from_json(const nlohmann::json& doc)
{
    try {
        const SchemeKind kind = scheme_kind_from_string(doc.at("kind").get<std::string>());
        const nlohmann::json p = doc.value("parameters", nlohmann::json::object());
        CantorScheme sc;
        switch (kind) {
        case SchemeKind::middle:
            sc = build_middle_cantor(p.at("ratio").get<double>(), p.value("ell0", 1.0), p.value("depth", 40));
            break;
        case SchemeKind::oscillating: {
            const int depth = p.value("depth", 40);
            std::vector<std::int64_t> bounds = p.contains("block_bounds")
                                                   ? p.at("block_bounds").get<std::vector<std::int64_t>>()
                                                   : default_block_bounds(depth);
            sc = build_oscillating_cantor(p.at("alpha").get<double>(), p.at("beta").get<double>(), bounds,
                                          p.value("ell0", 1.0), depth);
            break;
        }
        case SchemeKind::spaced:
            sc = build_spaced_cantor(p.at("s").get<double>(), p.at("u").get<double>(), p.at("ell0").get<double>(),
                                     p.value("depth", 8));
            break;
        case SchemeKind::lebesgue:
            sc = build_lebesgue(p.value("a", 0.0), p.value("b", 1.0), p.value("depth", 48));
            break;
        case SchemeKind::custom: {
            std::vector<LevelSpec> levels;
            for (const auto& l : p.at("levels")) {
                LevelSpec lv;
                lv.branching = l.at("branching").get<std::uint64_t>();
                lv.child_length = l.at("child_length").get<double>();
                lv.spacing = l.value("spacing", 0.0);
                if (l.contains("offsets")) {
                    lv.offsets = l.at("offsets").get<std::vector<double>>();
                }
                if (l.contains("weights")) {
                    lv.weights = l.at("weights").get<std::vector<double>>();
                }
                levels.push_back(std::move(lv));
            }
            sc = build_custom(p.value("base_lo", 0.0), p.at("base_length").get<double>(), std::move(levels),
                              p.value("uniform_fill", false));
            break;
        }
        }
        if (doc.contains("depth_limit")) {
            require(doc.at("depth_limit").get<int>() == sc.depth_limit(), ErrorKind::invalid_parameter,
                    "depth_limit " + doc.at("depth_limit").dump() + " does not match the realizable depth " +
                        std::to_string(sc.depth_limit()));
        }
        return sc;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::invalid_parameter, std::string("scheme document: ") + e.what());
    }
}

namespace {

struct Partial {
    double left;
    double mass;
};

// Children of a level-(n-1) cylinder at `parent_left` that overlap [lo, hi]
// in more than a point. Returns false when there are none.
bool overlapping_children(const LevelSpec& lv, double parent_left, double lo, double hi, std::uint64_t& i0,
                          std::uint64_t& i1)
{
    const double cl = lv.child_length;
    const auto last = static_cast<std::int64_t>(lv.branching) - 1;
    std::int64_t a = 0;
    std::int64_t b = last;
    if (lv.regular()) {
        if (lv.branching > 1) {
            const double sp = lv.spacing;
            a = clamp_index(std::floor((lo - parent_left - cl) / sp), 0, last);
            b = clamp_index(std::ceil((hi - parent_left) / sp), 0, last);
        }
    } else {
        // First child whose right end passes lo, last child whose left end is before hi.
        auto ia = std::upper_bound(lv.offsets.begin(), lv.offsets.end(), lo - parent_left - cl);
        a = std::max<std::int64_t>(0, (ia - lv.offsets.begin()) - 1);
        auto ib = std::lower_bound(lv.offsets.begin(), lv.offsets.end(), hi - parent_left);
        b = std::min<std::int64_t>(last, ib - lv.offsets.begin());
    }
    auto left_of = [&](std::int64_t i) { return parent_left + lv.offset(static_cast<std::uint64_t>(i)); };
    while (a <= b && left_of(a) + cl <= lo) {
        ++a;
    }
    while (a <= b && left_of(b) >= hi) {
        --b;
    }
    if (a > b) {
        return false;
    }
    i0 = static_cast<std::uint64_t>(a);
    i1 = static_cast<std::uint64_t>(b);
    return true;
}

} // namespace

MassBracket interval_mass(const CantorScheme& scheme, double lo, double hi)
{
    if (!(hi > lo)) {
        return {};
    }
    if (scheme.kind == SchemeKind::lebesgue) {
        const Interval h = scheme.hull();
        const double len = std::max(0.0, std::min(hi, h.hi) - std::max(lo, h.lo));
        const double m = std::min(1.0, len / scheme.base_length);
        return {m, m};
    }

    const double base_hi = scheme.base_lo + scheme.base_length;
    if (base_hi <= lo || scheme.base_lo >= hi) {
        return {};
    }
    if (scheme.base_lo >= lo && base_hi <= hi) {
        return {1.0, 1.0};
    }

    double full = 0.0;
    std::vector<Partial> frontier{{scheme.base_lo, 1.0}};
    std::vector<Partial> next;
    for (const LevelSpec& lv : scheme.levels) {
        next.clear();
        const double cl = lv.child_length;
        for (const Partial& p : frontier) {
            std::uint64_t i0 = 0;
            std::uint64_t i1 = 0;
            if (!overlapping_children(lv, p.left, lo, hi, i0, i1)) {
                continue;
            }
            auto handle_end = [&](std::uint64_t i) {
                const double c = p.left + lv.offset(i);
                const double m = p.mass * lv.weight(i);
                if (c >= lo && c + cl <= hi) {
                    full += m;
                } else {
                    next.push_back({c, m});
                }
            };
            handle_end(i0);
            if (i1 > i0) {
                handle_end(i1);
                full += p.mass * lv.weight_range(i0 + 1, i1 - 1);
            }
        }
        frontier.swap(next);
        if (frontier.empty()) {
            break;
        }
    }

    double unresolved = 0.0;
    const double bottom = scheme.length(scheme.depth_limit());
    for (const Partial& p : frontier) {
        if (scheme.uniform_fill) {
            const double overlap = std::max(0.0, std::min(hi, p.left + bottom) - std::max(lo, p.left));
            full += p.mass * overlap / bottom;
        } else {
            unresolved += p.mass;
        }
    }
    full = std::min(full, 1.0);
    return {full, std::min(1.0, full + unresolved)};
}

MassBracket ball_mass(const CantorScheme& scheme, double x, double r)
{
    return interval_mass(scheme, x - r, x + r);
}

bool lebesgue_like(const CantorScheme& scheme)
{
    if (!scheme.uniform_fill) {
        return false;
    }
    double parent = scheme.base_length;
    for (const LevelSpec& lv : scheme.levels) {
        if (!lv.uniform() || !lv.regular() ||
            std::abs(static_cast<double>(lv.branching) * lv.child_length - parent) > 1e-12 * parent ||
            (lv.branching > 1 && std::abs(lv.spacing - lv.child_length) > 1e-12 * parent)) {
            return false;
        }
        parent = lv.child_length;
    }
    return true;
}

std::vector<Interval> support_pieces(const CantorScheme& scheme, double lo, double hi, double resolution)
{
    std::vector<Interval> out;
    if (!(hi > lo)) {
        return out;
    }
    if (scheme.kind == SchemeKind::lebesgue || lebesgue_like(scheme)) {
        const Interval h = scheme.hull();
        const Interval piece{std::max(lo, h.lo), std::min(hi, h.hi)};
        if (!piece.empty()) {
            out.push_back(piece);
        }
        return out;
    }
    struct Node {
        int level;
        double left;
    };
    std::vector<Node> stack{{0, scheme.base_lo}};
    const int depth = scheme.depth_limit();
    while (!stack.empty()) {
        const Node nd = stack.back();
        stack.pop_back();
        const double len = scheme.length(nd.level);
        if (nd.left + len <= lo || nd.left >= hi) {
            continue;
        }
        const bool inside = nd.left >= lo && nd.left + len <= hi;
        if ((inside && len <= resolution) || nd.level == depth) {
            out.push_back({std::max(lo, nd.left), std::min(hi, nd.left + len)});
            continue;
        }
        const LevelSpec& lv = scheme.levels[static_cast<std::size_t>(nd.level)];
        std::uint64_t i0 = 0;
        std::uint64_t i1 = 0;
        if (!overlapping_children(lv, nd.left, lo, hi, i0, i1)) {
            continue;
        }
        for (std::uint64_t i = i1 + 1; i-- > i0;) {
            stack.push_back({nd.level + 1, nd.left + lv.offset(i)});
        }
    }
    return out;
}

std::vector<double> sample_points(const CantorScheme& scheme, std::size_t count, std::uint64_t seed)
{
    std::vector<double> out(count);
    const std::size_t chunks = (count + k_sample_chunk - 1) / k_sample_chunk;
    const double bottom = scheme.length(scheme.depth_limit());
    parallel_for(chunks, [&](std::size_t c) {
        Rng rng(derive_seed(seed, c));
        const std::size_t begin = c * k_sample_chunk;
        const std::size_t end = std::min(count, begin + k_sample_chunk);
        for (std::size_t k = begin; k < end; ++k) {
            if (scheme.kind == SchemeKind::lebesgue) {
                out[k] = scheme.base_lo + rng.uniform() * scheme.base_length;
                continue;
            }
            double x = scheme.base_lo;
            for (const LevelSpec& lv : scheme.levels) {
                const std::uint64_t i = lv.uniform() ? rng.below(lv.branching) : lv.pick(rng.uniform());
                x += lv.offset(i);
            }
            if (scheme.uniform_fill) {
                x += rng.uniform() * bottom;
            }
            out[k] = x;
        }
    });
    return out;
}

FrostmanFit frostman_fit(const CantorScheme& scheme, const std::vector<double>& xs, const std::vector<double>& rs)
{
    require(!xs.empty() && !rs.empty(), ErrorKind::invalid_parameter, "frostman_fit needs samples and scales");
    std::vector<double> scales = rs;
    std::sort(scales.begin(), scales.end());
    scales.erase(std::unique(scales.begin(), scales.end()), scales.end());
    require(scales.size() >= 2 && scales.front() > 0, ErrorKind::invalid_parameter,
            "frostman_fit needs at least two distinct positive scales");

    std::vector<double> lx;
    std::vector<double> ly;
    std::vector<std::vector<double>> masses(scales.size());
    for (std::size_t i = 0; i < scales.size(); ++i) {
        double best = 0.0;
        for (double x : xs) {
            const double m = ball_mass(scheme, x, scales[i]).upper;
            masses[i].push_back(m);
            best = std::max(best, m);
        }
        if (best > 0) {
            lx.push_back(std::log(scales[i]));
            ly.push_back(std::log(best));
        }
    }
    require(lx.size() >= 2, ErrorKind::invalid_parameter, "frostman_fit: fewer than two scales carry mass");
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    FrostmanFit fit;
    fit.s = sxy / sxx;
    for (std::size_t i = 0; i < scales.size(); ++i) {
        const double denom = std::pow(scales[i], fit.s);
        for (double m : masses[i]) {
            fit.C = std::max(fit.C, m / denom);
        }
    }
    return fit;
}

} // namespace rcov
