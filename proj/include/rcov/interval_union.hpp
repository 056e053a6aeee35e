#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace rcov {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi > lo ? hi - lo : 0.0; }
    bool empty() const { return !(hi > lo); }
    friend bool operator==(const Interval&, const Interval&) = default;
};

// Finite union of open intervals in canonical form: sorted by left endpoint,
// pairwise disjoint, and no two intervals share an endpoint (touching runs are
// merged, which only changes the set by finitely many points).
class IntervalUnion {
public:
    IntervalUnion() = default;

    // Canonicalizes an arbitrary list in O(n log n). Empty intervals are dropped.
    static IntervalUnion from_intervals(std::vector<Interval> pieces);
    // Skips the sort; `pieces` must already be sorted by left endpoint.
    static IntervalUnion from_sorted(const std::vector<Interval>& pieces);

    const std::vector<Interval>& intervals() const { return runs_; }
    std::size_t size() const { return runs_.size(); }
    bool empty() const { return runs_.empty(); }
    double total_length() const;

    bool contains_point(double x) const;
    // Interval-wise containment: every run of `other` lies inside a run of *this.
    bool contains(const IntervalUnion& other) const;

    IntervalUnion intersect(const IntervalUnion& other) const;
    IntervalUnion unite(const IntervalUnion& other) const;

    bool is_canonical() const;

    friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;

private:
    std::vector<Interval> runs_;
};

// CSV with header "left,right", one run per row, round-trip precision.
void write_csv(std::ostream& os, const IntervalUnion& u);
IntervalUnion read_csv(std::istream& is);

// Binary run format, see docs/formats.md.
void write_binary(std::ostream& os, const IntervalUnion& u);
IntervalUnion read_binary(std::istream& is);

} // namespace rcov
