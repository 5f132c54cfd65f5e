#pragma once

// Lasso selection on a randomized response and the selective interval for a
// linear contrast of the selected coefficients.

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <vector>

#include "selinf/quantile_ci.hpp"
#include "selinf/trunc_set.hpp"

namespace selinf {

/// Fixed design A (n x d), observed response y and known variances.
struct RegressionProblem {
  Eigen::MatrixXd design;
  Eigen::VectorXd response;
  double sigma2 = 1.0;
  double lambda = 1.0;
  double tau2 = 1.0;

  /// Throws ValidationError on mismatched sizes, nonpositive sigma2 / lambda /
  /// tau2, or a design whose columns are not in general position.
  void validate() const;
};

/// Throws ValidationError unless the columns of A are in general position.
/// For d <= n this is full column rank. For d > n every n-column subset must
/// have full rank; enumerated when d <= 12 and sampled otherwise.
void check_general_position(const Eigen::MatrixXd& design);

inline constexpr double kActiveThreshold = 1e-9;
inline constexpr double kKktTolerance = 1e-8;

struct LassoFit {
  Eigen::VectorXd beta;
  int sweeps = 0;
  double duality_gap = 0.0;
  double kkt_residual = 0.0;
};

/// argmin 0.5 ||v - A b||^2 + lambda ||b||_1 by cyclic coordinate descent on
/// the Gram matrix, followed by an exact solve on the detected active set.
/// Throws NonConvergenceError if the result fails the KKT certificate.
LassoFit lasso_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& v, double lambda);

/// Largest violation of the Lasso optimality conditions at beta.
double kkt_residual(const Eigen::MatrixXd& design, const Eigen::VectorXd& v,
                    const Eigen::VectorXd& beta, double lambda);

/// Model m, signs s and the polyhedron {y : rows * y < offsets} on which the
/// Lasso selects exactly (m, s).
struct LassoSelection {
  std::vector<int> model;
  std::vector<int> signs;
  Eigen::MatrixXd rows;
  Eigen::VectorXd offsets;

  /// Strict membership; points on a facet are outside.
  bool contains(const Eigen::VectorXd& y) const;
};

/// Polyhedron of the event {model = m, signs = s} for a given (m, s).
LassoSelection selection_polyhedron(const Eigen::MatrixXd& design, double lambda,
                                    const std::vector<int>& model, const std::vector<int>& signs);

/// Runs the Lasso at v and returns the polyhedron of the observed (m, s).
/// Throws NoSelectionError when nothing is selected and InconsistencyError if
/// v is not strictly inside its own polyhedron.
LassoSelection selection_event(const Eigen::MatrixXd& design, const Eigen::VectorXd& v,
                               double lambda);

/// Model and signs read off a coefficient vector.
std::pair<std::vector<int>, std::vector<int>> active_set(const Eigen::VectorXd& beta);

/// {w : polyhedron holds at z + w eta / ||eta||^2}, or nullopt if empty.
/// Rows whose coefficient along eta vanishes only decide feasibility.
std::optional<Interval> line_segment(const LassoSelection& sel, const Eigen::VectorXd& eta,
                                     const Eigen::VectorXd& z);

/// line_segment as a truncation set. Throws ValidationError if z is not
/// orthogonal to eta and InconsistencyError if the segment is empty.
TruncationSet truncation_interval(const LassoSelection& sel, const Eigen::VectorXd& eta,
                                  const Eigen::VectorXd& z);

inline constexpr int kMaxEnumeratedModel = 12;

/// Union of line_segment over every sign pattern of the model m.
/// Throws ValidationError for |m| > kMaxEnumeratedModel and
/// InconsistencyError if every segment is empty.
TruncationSet truncation_union(const Eigen::MatrixXd& design, double lambda,
                               const std::vector<int>& model, const Eigen::VectorXd& eta,
                               const Eigen::VectorXd& z);

/// eta = A_m (A_m' A_m)^{-1} gamma, so that eta' theta = gamma' beta_m.
Eigen::VectorXd contrast_vector(const Eigen::MatrixXd& design, const std::vector<int>& model,
                                const Eigen::VectorXd& gamma);

struct SelectiveResult {
  LassoSelection selection;
  Eigen::VectorXd eta;
  Eigen::VectorXd z;  ///< (I - P_eta)(y + omega)
  SpecFamily family;
  ConfidenceInterval interval;
  /// sigma ||eta|| (Phi^{-1}(q2) - Phi^{-1}(q1)) sqrt(1 + sigma2 / tau2).
  double length_bound;
};

/// Selects on y + omega, then inverts the conditional law of eta' y given the
/// selected model (and signs, if requested) and (I - P_eta)(y + omega).
SelectiveResult selective_interval(const RegressionProblem& problem, const Eigen::VectorXd& omega,
                                   const Eigen::VectorXd& gamma, const QuantilePair& pair,
                                   bool condition_on_signs);

/// Reads "response,x1,...,xd" rows after a header line.
/// Throws ValidationError on ragged rows or non-numeric fields.
RegressionProblem read_regression_csv(std::istream& in);

}  // namespace selinf
