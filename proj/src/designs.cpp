#include "selinf/designs.hpp"

#include <algorithm>
#include <cmath>

#include "selinf/error.hpp"
#include "selinf/scalar_normal.hpp"

namespace selinf {

namespace {

// Rounds v to an integer if it is one up to floating error.
bool as_integer(double v, int& out) {
  const double r = std::round(v);
  if (std::fabs(v - r) > 1e-9 * std::max(1.0, std::fabs(v))) return false;
  out = static_cast<int>(r);
  return true;
}

double quantile_width(const QuantilePair& pair) {
  return std_quantile(pair.q2()) - std_quantile(pair.q1());
}

}  // namespace

CarvingDesign::CarvingDesign(int n, double delta, double sigma2, TruncationSet truncation)
    : n_(n), delta_(delta), sigma2_(sigma2), selection_size_(0), truncation_(std::move(truncation)) {
  if (n < 2) throw ValidationError("carving: n must be at least 2");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("carving: delta must lie in (0, 1)");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ValidationError("carving: sigma2 must be positive");
  if (!as_integer(delta * n, selection_size_) || selection_size_ < 1 || selection_size_ > n - 1) {
    throw ValidationError("carving: delta * n must be an integer between 1 and n - 1");
  }
}

RandResponseDesign::RandResponseDesign(int n, double sigma2, double tau2, TruncationSet truncation)
    : n_(n), sigma2_(sigma2), tau2_(tau2), truncation_(std::move(truncation)) {
  if (n < 1) throw ValidationError("randomized response: n must be positive");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw ValidationError("randomized response: sigma2 must be positive");
  }
  if (!(tau2 > 0.0) || !std::isfinite(tau2)) {
    throw ValidationError("randomized response: tau2 must be positive");
  }
}

int RandResponseDesign::inference_size() const {
  int m = 0;
  if (!as_integer(n_ * tau2_ / (sigma2_ + tau2_), m) || m < 1 || m > n_ - 1) {
    throw ValidationError("randomized response: n tau2 / (sigma2 + tau2) must be an integer between 1 and n - 1");
  }
  return m;
}

SpecFamily carving_family(const CarvingDesign& d) {
  const double s2 = d.sigma2() / d.n();
  return {s2, s2 * (1.0 - d.delta()) / d.delta(), d.truncation()};
}

CondNormalSpec carving_spec(const CarvingDesign& d, double mu) { return carving_family(d).at(mu); }

double carving_bound(const CarvingDesign& d, const QuantilePair& pair) {
  return std::sqrt(d.sigma2() / d.n()) * quantile_width(pair) / std::sqrt(1.0 - d.delta());
}

ConfidenceInterval splitting_interval_carving(const CarvingDesign& d, double xbar_holdout,
                                              const QuantilePair& pair) {
  return classical_interval(xbar_holdout, std::sqrt(d.sigma2() / d.holdout_size()), pair);
}

SpecFamily randresp_family(const RandResponseDesign& d) {
  return {d.sigma2() / d.n(), d.tau2() / d.n(), d.truncation()};
}

CondNormalSpec randresp_spec(const RandResponseDesign& d, double mu) {
  return randresp_family(d).at(mu);
}

double randresp_bound(const RandResponseDesign& d, const QuantilePair& pair) {
  return std::sqrt(d.sigma2() / d.n()) * quantile_width(pair) *
         std::sqrt(1.0 + d.sigma2() / d.tau2());
}

ConfidenceInterval splitting_interval_randresp(const RandResponseDesign& d, double xbar_m,
                                               const QuantilePair& pair) {
  return classical_interval(xbar_m, std::sqrt(d.sigma2() / d.inference_size()), pair);
}

ConfidenceInterval classical_interval(double xbar, double sd, const QuantilePair& pair) {
  if (!(sd > 0.0)) throw DomainError("classical interval: sd must be positive");
  return {xbar + sd * std_quantile(pair.q1()), xbar + sd * std_quantile(pair.q2()), pair,
          sd * quantile_width(pair), xbar};
}

}  // namespace selinf
