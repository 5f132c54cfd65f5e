#pragma once

// Sampling designs that reduce inference after selection to the conditional
// law X | X + U in T, and the sample-splitting intervals they are compared to.

#include "selinf/cond_normal.hpp"
#include "selinf/quantile_ci.hpp"
#include "selinf/trunc_set.hpp"

namespace selinf {

/// Selection on the mean of the first delta*n observations, inference on the
/// mean of all n.
class CarvingDesign {
 public:
  /// Throws ValidationError unless n >= 2, 0 < delta < 1, delta*n is an
  /// integer in [1, n - 1] and sigma2 > 0.
  CarvingDesign(int n, double delta, double sigma2, TruncationSet truncation);

  int n() const { return n_; }
  double delta() const { return delta_; }
  double sigma2() const { return sigma2_; }
  const TruncationSet& truncation() const { return truncation_; }
  int selection_size() const { return selection_size_; }
  int holdout_size() const { return n_ - selection_size_; }

 private:
  int n_;
  double delta_;
  double sigma2_;
  int selection_size_;
  TruncationSet truncation_;
};

/// Selection on the mean of X_i + omega_i with omega ~ N(0, tau2 I), inference
/// on the mean of X_i.
class RandResponseDesign {
 public:
  /// Throws ValidationError unless n >= 1, sigma2 > 0 and tau2 > 0.
  RandResponseDesign(int n, double sigma2, double tau2, TruncationSet truncation);

  int n() const { return n_; }
  double sigma2() const { return sigma2_; }
  double tau2() const { return tau2_; }
  const TruncationSet& truncation() const { return truncation_; }

  /// m = n tau2 / (sigma2 + tau2), the held-out size of the comparable split.
  /// Throws ValidationError unless m is a positive integer below n.
  int inference_size() const;

 private:
  int n_;
  double sigma2_;
  double tau2_;
  TruncationSet truncation_;
};

SpecFamily carving_family(const CarvingDesign& d);
CondNormalSpec carving_spec(const CarvingDesign& d, double mu);
/// (sigma / sqrt(n)) (Phi^{-1}(q2) - Phi^{-1}(q1)) / sqrt(1 - delta).
double carving_bound(const CarvingDesign& d, const QuantilePair& pair);
/// z-interval from the mean of the last (1 - delta) n observations.
ConfidenceInterval splitting_interval_carving(const CarvingDesign& d, double xbar_holdout,
                                              const QuantilePair& pair);

SpecFamily randresp_family(const RandResponseDesign& d);
CondNormalSpec randresp_spec(const RandResponseDesign& d, double mu);
/// (sigma / sqrt(n)) (Phi^{-1}(q2) - Phi^{-1}(q1)) sqrt(1 + sigma2 / tau2).
double randresp_bound(const RandResponseDesign& d, const QuantilePair& pair);
/// z-interval from the mean of the last m observations.
ConfidenceInterval splitting_interval_randresp(const RandResponseDesign& d, double xbar_m,
                                               const QuantilePair& pair);

/// [xbar + sd Phi^{-1}(q1), xbar + sd Phi^{-1}(q2)]; bound holds the exact length.
ConfidenceInterval classical_interval(double xbar, double sd, const QuantilePair& pair);

}  // namespace selinf
