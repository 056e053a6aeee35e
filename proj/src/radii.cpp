#include "rcov/radii.hpp"

#include "rcov/error.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

namespace rcov {

std::optional<std::int64_t> RadiiSequence::size() const
{
    switch (rule_) {
    case RadiiRule::power: return std::nullopt;
    case RadiiRule::block: return block_ends_.back();
    case RadiiRule::explicit_list: return static_cast<std::int64_t>(values_.size());
    }
    return std::nullopt;
}

double RadiiSequence::at(std::int64_t k) const
{
    const auto n = size();
    if (k < 1 || (n && k > *n)) {
        fail(ErrorKind::invalid_parameter, "radius index " + std::to_string(k) + " out of range");
    }
    switch (rule_) {
    case RadiiRule::power: return std::pow(static_cast<double>(k), -alpha_);
    case RadiiRule::block: {
        auto it = std::lower_bound(block_ends_.begin() + 1, block_ends_.end(), k);
        return block_radius_[static_cast<std::size_t>(it - block_ends_.begin()) - 1];
    }
    case RadiiRule::explicit_list: return values_[static_cast<std::size_t>(k - 1)];
    }
    return 0.0;
}

std::vector<double> RadiiSequence::prefix(std::int64_t count) const
{
    require(count >= 0, ErrorKind::invalid_parameter, "prefix length must be non-negative");
    const auto n = size();
    require(!n || count <= *n, ErrorKind::invalid_parameter,
            "sequence has only " + std::to_string(n.value_or(0)) + " radii, " + std::to_string(count) + " requested");
    std::vector<double> out(static_cast<std::size_t>(count));
    if (rule_ == RadiiRule::explicit_list) {
        std::copy_n(values_.begin(), count, out.begin());
    } else if (rule_ == RadiiRule::block) {
        std::int64_t k = 0;
        for (std::size_t j = 1; j < block_ends_.size() && k < count; ++j) {
            for (; k < std::min(count, block_ends_[j]); ++k) {
                out[static_cast<std::size_t>(k)] = block_radius_[j - 1];
            }
        }
    } else {
        for (std::int64_t k = 0; k < count; ++k) {
            out[static_cast<std::size_t>(k)] = std::pow(static_cast<double>(k + 1), -alpha_);
        }
    }
    return out;
}

nlohmann::json RadiiSequence::to_json() const
{
    switch (rule_) {
    case RadiiRule::power: return {{"rule", "power"}, {"alpha", alpha_}};
    case RadiiRule::block:
        return {{"rule", "block"}, {"gamma", gamma_}, {"s0", s0_}, {"block_ends", block_ends_}};
    case RadiiRule::explicit_list: return {{"rule", "explicit"}, {"values", values_}};
    }
    return {};
}

RadiiSequence RadiiSequence::from_json(const nlohmann::json& doc, const CantorScheme* scheme)
{
    try {
        const std::string rule = doc.at("rule").get<std::string>();
        if (rule == "power") {
            return power_radii(doc.at("alpha").get<double>());
        }
        if (rule == "block") {
            require(scheme != nullptr, ErrorKind::invalid_parameter, "block radii need a spaced scheme");
            return block_radii(*scheme, doc.at("gamma").get<double>(), doc.at("s0").get<double>());
        }
        if (rule == "explicit") {
            return explicit_radii(doc.at("values").get<std::vector<double>>());
        }
        fail(ErrorKind::invalid_parameter, "unknown radii rule '" + rule + "'");
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::invalid_parameter, std::string("radii document: ") + e.what());
    }
}

RadiiSequence power_radii(double alpha)
{
    require(alpha > 0 && std::isfinite(alpha), ErrorKind::invalid_parameter, "power radii need alpha > 0");
    RadiiSequence r;
    r.rule_ = RadiiRule::power;
    r.alpha_ = alpha;
    r.monotone_ = true;
    return r;
}

RadiiSequence block_radii(const CantorScheme& scheme, double gamma, double s0)
{
    require(scheme.kind == SchemeKind::spaced, ErrorKind::invalid_parameter, "block radii need a spaced Cantor scheme");
    const double s = scheme.meta.s;
    const double u = scheme.meta.u;
    const double eps = 1e-12;
    require(gamma >= s / u - eps && gamma <= 1 + eps, ErrorKind::invalid_parameter,
            "block radii need gamma in [s/u, 1] = [" + std::to_string(s / u) + ", 1]");
    require(s0 > 0 && s0 <= s / gamma + eps, ErrorKind::invalid_parameter,
            "block radii need s0 in (0, s/gamma] = (0, " + std::to_string(s / gamma) + "]");
    RadiiSequence r;
    r.rule_ = RadiiRule::block;
    r.gamma_ = gamma;
    r.s0_ = s0;
    r.block_ends_.push_back(0);
    for (int j = 1; j <= scheme.depth_limit(); ++j) {
        const double ell = scheme.length(j);
        const double m = std::floor(std::exp(-gamma * s0 * std::log(ell)) * (1 + 1e-12));
        require(m < 1e9, ErrorKind::invalid_parameter, "block " + std::to_string(j) + " exceeds 1e9 radii");
        const auto mj = static_cast<std::int64_t>(m);
        if (mj <= r.block_ends_.back()) {
            continue;
        }
        r.block_ends_.push_back(mj);
        r.block_radius_.push_back(std::pow(ell, gamma) / 2);
    }
    require(r.block_ends_.size() >= 2, ErrorKind::construction_degenerate, "block radii: every block is empty");
    r.monotone_ = true;
    return r;
}

RadiiSequence explicit_radii(std::vector<double> values)
{
    for (double v : values) {
        require(v > 0 && std::isfinite(v), ErrorKind::invalid_parameter, "radii must be positive and finite");
    }
    RadiiSequence r;
    r.rule_ = RadiiRule::explicit_list;
    r.monotone_ = std::is_sorted(values.begin(), values.end(), std::greater<>());
    r.values_ = std::move(values);
    return r;
}

RadiiSequence reorder_to_decreasing(const RadiiSequence& r)
{
    const auto n = r.size();
    require(n.has_value(), ErrorKind::invalid_parameter, "only finite sequences can be reordered");
    std::vector<double> v = r.prefix(*n);
    std::sort(v.begin(), v.end(), std::greater<>());
    return explicit_radii(std::move(v));
}

RadiiSequence read_radii(std::istream& is)
{
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        try {
            std::size_t used = 0;
            values.push_back(std::stod(line.substr(first), &used));
        } catch (const std::exception&) {
            fail(ErrorKind::invalid_parameter, "radii file line " + std::to_string(lineno) + ": not a number");
        }
    }
    return explicit_radii(std::move(values));
}

void write_radii(std::ostream& os, const RadiiSequence& r, std::int64_t count)
{
    const auto old = os.precision(17);
    for (double v : r.prefix(count)) {
        os << v << '\n';
    }
    os.precision(old);
}

double power_sum(const RadiiSequence& r, std::int64_t K, double t)
{
    double sum = 0.0;
    if (r.rule() == RadiiRule::block) {
        const auto& ends = r.block_ends();
        for (std::size_t j = 1; j < ends.size() && ends[j - 1] < K; ++j) {
            const auto count = std::min(K, ends[j]) - ends[j - 1];
            sum += static_cast<double>(count) * std::pow(r.block_radius()[j - 1], t);
        }
        return sum;
    }
    for (double v : r.prefix(K)) {
        sum += std::pow(v, t);
    }
    return sum;
}

namespace {

WindowStats window_stats(const std::vector<double>& radii, std::int64_t from, std::int64_t to)
{
    WindowStats w{from, to, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    bool any = false;
    for (std::int64_t k = from; k <= to; ++k) {
        const double r = radii[static_cast<std::size_t>(k - 1)];
        if (r >= 1.0) {
            continue;
        }
        const double v = std::log(static_cast<double>(k)) / -std::log(r);
        w.s1 = std::min(w.s1, v);
        w.s3 = std::max(w.s3, v);
        any = true;
    }
    if (!any) {
        fail(ErrorKind::undefined_exponent, "every radius in window [" + std::to_string(from) + ", " +
                                                std::to_string(to) + "] is >= 1");
    }
    return w;
}

// Root of sum r_k^t = 1 by bisection; f is decreasing in t when all r_k < 1.
std::optional<double> partial_sum_root(const std::vector<double>& radii)
{
    auto f = [&](double t) {
        double s = 0.0;
        for (double r : radii) {
            s += std::pow(r, t);
        }
        return s - 1.0;
    };
    double lo = 0.0;
    double hi = 1.0;
    while (f(hi) > 0) {
        hi *= 2;
        if (hi > 1e4) {
            return std::nullopt;
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

ExponentEstimate critical_exponents(const RadiiSequence& r, std::int64_t K, double window_fraction)
{
    require(K >= 100, ErrorKind::invalid_parameter, "critical_exponents needs K >= 100");
    require(window_fraction > 0 && window_fraction < 1, ErrorKind::invalid_parameter,
            "window_fraction must be in (0, 1)");
    const std::vector<double> radii = r.prefix(K);
    ExponentEstimate e;
    e.window_from = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(window_fraction * static_cast<double>(K))));
    e.window_to = K;
    const WindowStats full = window_stats(radii, e.window_from, K);
    e.s1_hat = full.s1;
    e.s3_hat = full.s3;
    if (r.monotone()) {
        e.s2_hat = e.s3_hat;
    } else {
        e.non_monotone_caveat = true;
        const auto root = partial_sum_root(radii);
        e.s2_hat = root.value_or(e.s3_hat);
        if (e.s2_hat < e.s1_hat || e.s2_hat > e.s3_hat) {
            e.s2_hat = std::clamp(e.s2_hat, e.s1_hat, e.s3_hat);
            e.clamped = true;
        }
    }
    const std::int64_t half = K / 2;
    const std::int64_t half_from =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(window_fraction * static_cast<double>(half))));
    try {
        e.half_window = window_stats(radii, half_from, half);
        e.tail_drift_s1 = e.s1_hat - e.half_window.s1;
        e.tail_drift_s3 = e.s3_hat - e.half_window.s3;
    } catch (const Error&) {
        e.half_window = {half_from, half, std::nan(""), std::nan("")};
        e.tail_drift_s1 = std::nan("");
        e.tail_drift_s3 = std::nan("");
    }
    if (e.s1_hat > e.s2_hat + 1e-12 || e.s2_hat > e.s3_hat + 1e-12) {
        fail(ErrorKind::internal, "exponent ordering violated");
    }
    return e;
}

} // namespace rcov
