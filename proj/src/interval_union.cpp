#include "rcov/interval_union.hpp"

#include "rcov/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

namespace rcov {

IntervalUnion IntervalUnion::from_intervals(std::vector<Interval> pieces)
{
    std::sort(pieces.begin(), pieces.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    return from_sorted(pieces);
}

IntervalUnion IntervalUnion::from_sorted(const std::vector<Interval>& pieces)
{
    IntervalUnion out;
    out.runs_.reserve(pieces.size());
    for (const Interval& p : pieces) {
        if (p.empty()) {
            continue;
        }
        if (!out.runs_.empty() && p.lo <= out.runs_.back().hi) {
            out.runs_.back().hi = std::max(out.runs_.back().hi, p.hi);
        } else {
            out.runs_.push_back(p);
        }
    }
    return out;
}

double IntervalUnion::total_length() const
{
    double sum = 0.0;
    for (const Interval& r : runs_) {
        sum += r.length();
    }
    return sum;
}

bool IntervalUnion::contains_point(double x) const
{
    auto it = std::upper_bound(runs_.begin(), runs_.end(), x,
                               [](double v, const Interval& r) { return v < r.lo; });
    if (it == runs_.begin()) {
        return false;
    }
    --it;
    return x > it->lo && x < it->hi;
}

bool IntervalUnion::contains(const IntervalUnion& other) const
{
    std::size_t i = 0;
    for (const Interval& r : other.runs_) {
        while (i < runs_.size() && runs_[i].hi < r.hi) {
            ++i;
        }
        if (i == runs_.size() || runs_[i].lo > r.lo) {
            return false;
        }
    }
    return true;
}

IntervalUnion IntervalUnion::intersect(const IntervalUnion& other) const
{
    IntervalUnion out;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < runs_.size() && j < other.runs_.size()) {
        const Interval& a = runs_[i];
        const Interval& b = other.runs_[j];
        const double lo = std::max(a.lo, b.lo);
        const double hi = std::min(a.hi, b.hi);
        if (lo < hi) {
            out.runs_.push_back({lo, hi});
        }
        if (a.hi < b.hi) {
            ++i;
        } else {
            ++j;
        }
    }
    return out;
}

IntervalUnion IntervalUnion::unite(const IntervalUnion& other) const
{
    std::vector<Interval> merged;
    merged.reserve(runs_.size() + other.runs_.size());
    std::merge(runs_.begin(), runs_.end(), other.runs_.begin(), other.runs_.end(),
               std::back_inserter(merged),
               [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    return from_sorted(merged);
}

bool IntervalUnion::is_canonical() const
{
    for (std::size_t i = 0; i < runs_.size(); ++i) {
        if (runs_[i].empty()) {
            return false;
        }
        if (i > 0 && !(runs_[i - 1].hi < runs_[i].lo)) {
            return false;
        }
    }
    return true;
}

void write_csv(std::ostream& os, const IntervalUnion& u)
{
    os << "left,right\n";
    std::array<char, 64> buf{};
    for (const Interval& r : u.intervals()) {
        auto res = std::to_chars(buf.data(), buf.data() + buf.size(), r.lo);
        os.write(buf.data(), res.ptr - buf.data());
        os << ',';
        res = std::to_chars(buf.data(), buf.data() + buf.size(), r.hi);
        os.write(buf.data(), res.ptr - buf.data());
        os << '\n';
    }
}

IntervalUnion read_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line.rfind("left,right", 0) != 0) {
        fail(ErrorKind::io_error, "interval CSV: missing 'left,right' header");
    }
    std::vector<Interval> runs;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            fail(ErrorKind::io_error, "interval CSV: malformed row '" + line + "'");
        }
        Interval r;
        const char* b = line.data();
        auto r1 = std::from_chars(b, b + comma, r.lo);
        auto r2 = std::from_chars(b + comma + 1, b + line.size(), r.hi);
        if (r1.ec != std::errc() || r2.ec != std::errc()) {
            fail(ErrorKind::io_error, "interval CSV: malformed number in '" + line + "'");
        }
        runs.push_back(r);
    }
    return IntervalUnion::from_intervals(std::move(runs));
}

namespace {

constexpr std::array<char, 4> k_magic{'R', 'C', 'I', 'U'};
constexpr std::uint32_t k_binary_version = 1;

template <class T>
void put_le(std::ostream& os, T value)
{
    static_assert(std::endian::native == std::endian::little, "little-endian host assumed");
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get_le(std::istream& is)
{
    T value{};
    if (!is.read(reinterpret_cast<char*>(&value), sizeof(T))) {
        fail(ErrorKind::io_error, "interval binary: truncated stream");
    }
    return value;
}

} // namespace

void write_binary(std::ostream& os, const IntervalUnion& u)
{
    os.write(k_magic.data(), k_magic.size());
    put_le<std::uint32_t>(os, k_binary_version);
    put_le<std::uint64_t>(os, u.size());
    for (const Interval& r : u.intervals()) {
        put_le<double>(os, r.lo);
        put_le<double>(os, r.hi);
    }
}

IntervalUnion read_binary(std::istream& is)
{
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != k_magic) {
        fail(ErrorKind::io_error, "interval binary: bad magic");
    }
    const auto version = get_le<std::uint32_t>(is);
    if (version != k_binary_version) {
        fail(ErrorKind::io_error, "interval binary: unsupported version " + std::to_string(version));
    }
    const auto count = get_le<std::uint64_t>(is);
    std::vector<Interval> runs;
    runs.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Interval r;
        r.lo = get_le<double>(is);
        r.hi = get_le<double>(is);
        runs.push_back(r);
    }
    IntervalUnion u = IntervalUnion::from_sorted(runs);
    if (u.size() != count) {
        fail(ErrorKind::io_error, "interval binary: runs are not canonical");
    }
    return u;
}

} // namespace rcov
