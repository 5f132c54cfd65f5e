#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace selinf {

/// An open interval (lo, hi); lo may be -inf and hi may be +inf.
struct Interval {
  double lo;
  double hi;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// A finite union of disjoint open intervals a_1 < b_1 < ... < a_k < b_k.
///
/// Instances are always canonical: intervals are sorted and maximal, so
/// overlapping or touching inputs are merged. Immutable after construction.
class TruncationSet {
 public:
  /// Canonicalizes `raw`. Throws ValidationError for an empty list, a NaN
  /// endpoint, or any pair with lo >= hi.
  static TruncationSet make(std::span<const Interval> raw);
  static TruncationSet make(std::initializer_list<Interval> raw) {
    return make(std::span<const Interval>(raw.begin(), raw.size()));
  }

  /// Parses the text form "(a,b),(c,d)" with optional whitespace and
  /// inf / -inf endpoints.
  static TruncationSet parse(std::string_view text);

  static TruncationSet real_line();

  /// Text form accepted by parse(); parse(to_string()) reproduces the set exactly.
  std::string to_string() const;

  std::span<const Interval> intervals() const { return intervals_; }
  std::size_t size() const { return intervals_.size(); }

  /// True iff v lies strictly inside one of the intervals.
  bool contains(double v) const;

  bool bounded_above() const;
  bool bounded_below() const;
  double infimum() const { return intervals_.front().lo; }
  double supremum() const { return intervals_.back().hi; }

  friend bool operator==(const TruncationSet&, const TruncationSet&) = default;

 private:
  explicit TruncationSet(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {}

  std::vector<Interval> intervals_;
};

inline TruncationSet make_truncation_set(std::span<const Interval> raw) {
  return TruncationSet::make(raw);
}

}  // namespace selinf
