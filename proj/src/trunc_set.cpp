#include "selinf/trunc_set.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include "selinf/error.hpp"

namespace selinf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::vector<Interval> run() {
    std::vector<Interval> out;
    skip_ws();
    if (at_end()) fail("empty truncation set");
    for (;;) {
      expect('(');
      const double lo = number();
      expect(',');
      const double hi = number();
      expect(')');
      out.push_back({lo, hi});
      skip_ws();
      if (at_end()) break;
      expect(',');
    }
    return out;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }

  void skip_ws() {
    while (!at_end() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (at_end() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  double number() {
    skip_ws();
    std::size_t end = pos_;
    while (end < text_.size() && text_[end] != ',' && text_[end] != ')' && text_[end] != ' ') ++end;
    std::string_view token = text_.substr(pos_, end - pos_);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    if (token == "inf" || token == "infinity") {
      pos_ = end;
      return kInf;
    }
    if (token == "-inf" || token == "-infinity") {
      pos_ = end;
      return -kInf;
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || std::isnan(value)) {
      fail("invalid endpoint '" + std::string(token) + "'");
    }
    pos_ = end;
    return value;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("truncation set \"" + std::string(text_) + "\": " + what +
                          " at offset " + std::to_string(pos_));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string format_endpoint(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace

TruncationSet TruncationSet::make(std::span<const Interval> raw) {
  if (raw.empty()) throw ValidationError("truncation set needs at least one interval");
  std::vector<Interval> sorted(raw.begin(), raw.end());
  for (const auto& iv : sorted) {
    if (std::isnan(iv.lo) || std::isnan(iv.hi) || !(iv.lo < iv.hi)) {
      throw ValidationError("truncation set interval (" + format_endpoint(iv.lo) + "," +
                            format_endpoint(iv.hi) + ") is empty or malformed");
    }
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  merged.reserve(sorted.size());
  for (const auto& iv : sorted) {
    if (!merged.empty() && iv.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    } else {
      merged.push_back(iv);
    }
  }
  return TruncationSet(std::move(merged));
}

TruncationSet TruncationSet::parse(std::string_view text) {
  const auto raw = Parser(text).run();
  return make(raw);
}

TruncationSet TruncationSet::real_line() { return TruncationSet({{-kInf, kInf}}); }

std::string TruncationSet::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    if (i > 0) out += ',';
    out += '(' + format_endpoint(intervals_[i].lo) + ',' + format_endpoint(intervals_[i].hi) + ')';
  }
  return out;
}

bool TruncationSet::contains(double v) const {
  // First interval whose upper endpoint exceeds v.
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), v,
                             [](double x, const Interval& iv) { return x < iv.hi; });
  return it != intervals_.end() && it->lo < v;
}

bool TruncationSet::bounded_above() const { return supremum() < kInf; }

bool TruncationSet::bounded_below() const { return infimum() > -kInf; }

}  // namespace selinf
