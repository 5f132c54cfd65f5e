#include "selinf/lasso.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <string>

#include "selinf/error.hpp"
#include "selinf/rng.hpp"
#include "selinf/scalar_normal.hpp"

namespace selinf {

namespace {

constexpr int kMaxSweeps = 100000;
constexpr double kGapTolerance = 1e-10;
constexpr double kRankTolerance = 1e-10;

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

Eigen::MatrixXd columns(const Eigen::MatrixXd& a, const std::vector<int>& idx) {
  Eigen::MatrixXd out(a.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
  return out;
}

bool full_column_rank(const Eigen::MatrixXd& m) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  qr.setThreshold(kRankTolerance);
  return qr.rank() == m.cols();
}

// Advances idx to the next k-subset of {0..d-1} in lexicographic order.
bool next_subset(std::vector<int>& idx, int d) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[i] == d - k + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

// Exact solution on a fixed active set with fixed signs.
Eigen::VectorXd solve_on_active(const Eigen::MatrixXd& design, const Eigen::VectorXd& v,
                                double lambda, const std::vector<int>& model,
                                const std::vector<int>& signs) {
  const Eigen::MatrixXd am = columns(design, model);
  Eigen::VectorXd s(static_cast<Eigen::Index>(signs.size()));
  for (std::size_t k = 0; k < signs.size(); ++k) s(static_cast<Eigen::Index>(k)) = signs[k];
  const Eigen::VectorXd bm = (am.transpose() * am).ldlt().solve(am.transpose() * v - lambda * s);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(design.cols());
  for (std::size_t k = 0; k < model.size(); ++k) beta(model[k]) = bm(static_cast<Eigen::Index>(k));
  return beta;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_row(std::string_view line, int line_no) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    const auto field = trim(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos));
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
      throw ValidationError("csv line " + std::to_string(line_no) + ": non-numeric field '" +
                            std::string(field) + "'");
    }
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

void RegressionProblem::validate() const {
  if (design.rows() == 0 || design.cols() == 0) throw ValidationError("design matrix is empty");
  if (response.size() != design.rows()) {
    throw ValidationError("response length does not match the number of design rows");
  }
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ValidationError("sigma2 must be positive");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be positive");
  if (!(tau2 > 0.0) || !std::isfinite(tau2)) throw ValidationError("tau2 must be positive");
  check_general_position(design);
}

void check_general_position(const Eigen::MatrixXd& design) {
  const int n = static_cast<int>(design.rows());
  const int d = static_cast<int>(design.cols());
  if (!design.allFinite()) throw ValidationError("design matrix has non-finite entries");
  if (d <= n) {
    if (!full_column_rank(design)) {
      throw ValidationError("design columns are not in general position (rank deficient)");
    }
    return;
  }
  auto fail = [](const std::vector<int>& idx) {
    std::string cols;
    for (int j : idx) cols += (cols.empty() ? "" : ",") + std::to_string(j);
    throw ValidationError("design columns are not in general position: columns {" + cols +
                          "} are linearly dependent");
  };
  if (d <= kMaxEnumeratedModel) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    do {
      if (!full_column_rank(columns(design, idx))) fail(idx);
    } while (next_subset(idx, d));
    return;
  }
  RandomStream stream(0x5eed, 0);
  std::vector<int> all(static_cast<std::size_t>(d));
  std::iota(all.begin(), all.end(), 0);
  for (int trial = 0; trial < 200; ++trial) {
    std::shuffle(all.begin(), all.end(), stream);
    std::vector<int> idx(all.begin(), all.begin() + n);
    std::sort(idx.begin(), idx.end());
    if (!full_column_rank(columns(design, idx))) fail(idx);
  }
}

double kkt_residual(const Eigen::MatrixXd& design, const Eigen::VectorXd& v,
                    const Eigen::VectorXd& beta, double lambda) {
  const Eigen::VectorXd g = design.transpose() * (v - design * beta);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (std::fabs(beta(j)) > kActiveThreshold) {
      worst = std::max(worst, std::fabs(g(j) - lambda * (beta(j) > 0.0 ? 1.0 : -1.0)));
    } else {
      worst = std::max(worst, std::fabs(g(j)) - lambda);
    }
  }
  return worst;
}

LassoFit lasso_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& v, double lambda) {
  if (v.size() != design.rows()) throw ValidationError("lasso: response length mismatch");
  if (!(lambda > 0.0)) throw ValidationError("lasso: lambda must be positive");
  const Eigen::Index d = design.cols();
  const Eigen::MatrixXd gram = design.transpose() * design;
  const Eigen::VectorXd corr = design.transpose() * v;
  const double half_vv = 0.5 * v.squaredNorm();

  LassoFit fit;
  fit.beta = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd grad = corr;  // A'(v - A beta)
  double gap = kInf;
  for (fit.sweeps = 1; fit.sweeps <= kMaxSweeps; ++fit.sweeps) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double old = fit.beta(j);
      const double updated = soft_threshold(grad(j) + gram(j, j) * old, lambda) / gram(j, j);
      if (updated != old) {
        grad.noalias() -= gram.col(j) * (updated - old);
        fit.beta(j) = updated;
      }
    }
    const Eigen::VectorXd r = v - design * fit.beta;
    const double primal = 0.5 * r.squaredNorm() + lambda * fit.beta.lpNorm<1>();
    const double scale = std::min(1.0, lambda / std::max(grad.lpNorm<Eigen::Infinity>(), 1e-300));
    const double dual = half_vv - 0.5 * (v - scale * r).squaredNorm();
    gap = primal - dual;
    if (gap <= kGapTolerance * std::max(1.0, primal)) break;
  }
  fit.duality_gap = gap;

  const auto [model, signs] = active_set(fit.beta);
  if (!model.empty()) {
    Eigen::VectorXd polished = solve_on_active(design, v, lambda, model, signs);
    bool signs_hold = true;
    for (std::size_t k = 0; k < model.size(); ++k) {
      if (polished(model[k]) * signs[k] <= kActiveThreshold) signs_hold = false;
    }
    if (signs_hold && kkt_residual(design, v, polished, lambda) <=
                          std::max(kkt_residual(design, v, fit.beta, lambda), 0.0)) {
      fit.beta = std::move(polished);
    }
  }
  fit.kkt_residual = kkt_residual(design, v, fit.beta, lambda);
  if (!(fit.kkt_residual <= kKktTolerance)) {
    throw NonConvergenceError("lasso: KKT residual " + std::to_string(fit.kkt_residual) +
                              " after " + std::to_string(fit.sweeps) + " sweeps");
  }
  return fit;
}

std::pair<std::vector<int>, std::vector<int>> active_set(const Eigen::VectorXd& beta) {
  std::vector<int> model;
  std::vector<int> signs;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (std::fabs(beta(j)) > kActiveThreshold) {
      model.push_back(static_cast<int>(j));
      signs.push_back(beta(j) > 0.0 ? 1 : -1);
    }
  }
  return {model, signs};
}

bool LassoSelection::contains(const Eigen::VectorXd& y) const {
  return ((rows * y).array() < offsets.array()).all();
}

LassoSelection selection_polyhedron(const Eigen::MatrixXd& design, double lambda,
                                    const std::vector<int>& model, const std::vector<int>& signs) {
  if (model.size() != signs.size()) throw ValidationError("model and sign vector differ in length");
  const Eigen::Index n = design.rows();
  const Eigen::Index d = design.cols();
  const auto k = static_cast<Eigen::Index>(model.size());

  std::vector<int> inactive;
  for (int j = 0; j < d; ++j) {
    if (std::find(model.begin(), model.end(), j) == model.end()) inactive.push_back(j);
  }
  const auto q = static_cast<Eigen::Index>(inactive.size());
  const Eigen::MatrixXd a_in = columns(design, inactive);

  LassoSelection sel;
  sel.model = model;
  sel.signs = signs;
  sel.rows.resize(2 * q + k, n);
  sel.offsets.resize(2 * q + k);

  if (k == 0) {
    sel.rows.topRows(q) = a_in.transpose() / lambda;
    sel.rows.bottomRows(q) = -a_in.transpose() / lambda;
    sel.offsets.setOnes();
    return sel;
  }

  const Eigen::MatrixXd am = columns(design, model);
  const auto gram_m = (am.transpose() * am).ldlt();
  const Eigen::MatrixXd pinv = gram_m.solve(am.transpose());  // (A_m'A_m)^{-1} A_m'
  Eigen::VectorXd s(k);
  for (Eigen::Index i = 0; i < k; ++i) s(i) = signs[static_cast<std::size_t>(i)];

  if (q > 0) {
    const Eigen::MatrixXd resid_proj =
        a_in.transpose() - (a_in.transpose() * am) * pinv;  // A_{-m}'(I - P_m)
    const Eigen::VectorXd tilt = a_in.transpose() * (pinv.transpose() * s);
    sel.rows.topRows(q) = resid_proj / lambda;
    sel.rows.middleRows(q, q) = -resid_proj / lambda;
    sel.offsets.head(q) = Eigen::VectorXd::Ones(q) - tilt;
    sel.offsets.segment(q, q) = Eigen::VectorXd::Ones(q) + tilt;
  }
  const Eigen::VectorXd gs = gram_m.solve(s);
  sel.rows.bottomRows(k) = -(s.asDiagonal() * pinv);
  sel.offsets.tail(k) = -lambda * s.cwiseProduct(gs);
  return sel;
}

LassoSelection selection_event(const Eigen::MatrixXd& design, const Eigen::VectorXd& v,
                               double lambda) {
  const auto fit = lasso_fit(design, v, lambda);
  const auto [model, signs] = active_set(fit.beta);
  if (model.empty()) throw NoSelectionError("lasso selected no variables");
  auto sel = selection_polyhedron(design, lambda, model, signs);
  if (!sel.contains(v)) {
    throw InconsistencyError("observed response lies outside its own selection polyhedron");
  }
  return sel;
}

std::optional<Interval> line_segment(const LassoSelection& sel, const Eigen::VectorXd& eta,
                                     const Eigen::VectorXd& z) {
  const double eta_norm = eta.norm();
  const Eigen::VectorXd along = sel.rows * eta / (eta_norm * eta_norm);
  const Eigen::VectorXd slack = sel.offsets - sel.rows * z;
  double lo = -kInf;
  double hi = kInf;
  for (Eigen::Index i = 0; i < along.size(); ++i) {
    const double row_scale = sel.rows.row(i).norm() / eta_norm;
    if (std::fabs(along(i)) <= 1e-12 * row_scale) {
      if (!(slack(i) > 0.0)) return std::nullopt;
      continue;
    }
    const double w = slack(i) / along(i);
    if (along(i) > 0.0) {
      hi = std::min(hi, w);
    } else {
      lo = std::max(lo, w);
    }
  }
  if (!(lo < hi)) return std::nullopt;
  return Interval{lo, hi};
}

TruncationSet truncation_interval(const LassoSelection& sel, const Eigen::VectorXd& eta,
                                  const Eigen::VectorXd& z) {
  const double eta_norm = eta.norm();
  if (!(eta_norm > 0.0)) throw ValidationError("contrast vector is zero");
  if (std::fabs(eta.dot(z)) / eta_norm > 1e-10 * std::max(z.norm(), 1.0)) {
    throw ValidationError("z is not orthogonal to the contrast vector");
  }
  const auto seg = line_segment(sel, eta, z);
  if (!seg) throw InconsistencyError("selection event does not meet the conditioning line");
  const Interval one[] = {*seg};
  return TruncationSet::make(one);
}

TruncationSet truncation_union(const Eigen::MatrixXd& design, double lambda,
                               const std::vector<int>& model, const Eigen::VectorXd& eta,
                               const Eigen::VectorXd& z) {
  const int k = static_cast<int>(model.size());
  if (k > kMaxEnumeratedModel) {
    throw ValidationError("model has " + std::to_string(k) + " variables; sign enumeration is limited to " +
                          std::to_string(kMaxEnumeratedModel));
  }
  std::vector<Interval> pieces;
  std::vector<int> signs(static_cast<std::size_t>(k));
  for (unsigned pattern = 0; pattern < (1u << k); ++pattern) {
    for (int i = 0; i < k; ++i) signs[static_cast<std::size_t>(i)] = (pattern >> i) & 1u ? -1 : 1;
    const auto seg = line_segment(selection_polyhedron(design, lambda, model, signs), eta, z);
    if (seg) pieces.push_back(*seg);
  }
  if (pieces.empty()) throw InconsistencyError("no sign pattern of the model meets the conditioning line");
  return TruncationSet::make(pieces);
}

Eigen::VectorXd contrast_vector(const Eigen::MatrixXd& design, const std::vector<int>& model,
                                const Eigen::VectorXd& gamma) {
  if (gamma.size() != static_cast<Eigen::Index>(model.size())) {
    throw ValidationError("gamma has " + std::to_string(gamma.size()) + " entries but the model has " +
                          std::to_string(model.size()) + " variables");
  }
  const Eigen::MatrixXd am = columns(design, model);
  Eigen::VectorXd eta = am * (am.transpose() * am).ldlt().solve(gamma);
  if (!(eta.norm() > 0.0)) throw ValidationError("contrast vector is zero");
  return eta;
}

SelectiveResult selective_interval(const RegressionProblem& problem, const Eigen::VectorXd& omega,
                                   const Eigen::VectorXd& gamma, const QuantilePair& pair,
                                   bool condition_on_signs) {
  problem.validate();
  if (omega.size() != problem.response.size()) throw ValidationError("omega length mismatch");
  const Eigen::VectorXd v = problem.response + omega;
  auto sel = selection_event(problem.design, v, problem.lambda);
  Eigen::VectorXd eta = contrast_vector(problem.design, sel.model, gamma);
  const double eta2 = eta.squaredNorm();
  Eigen::VectorXd z = v - eta * (eta.dot(v) / eta2);
  TruncationSet trunc = condition_on_signs
                            ? truncation_interval(sel, eta, z)
                            : truncation_union(problem.design, problem.lambda, sel.model, eta, z);
  SpecFamily family{problem.sigma2 * eta2, problem.tau2 * eta2, std::move(trunc)};
  const auto ci = interval(family, eta.dot(problem.response), pair);
  const double bound = std::sqrt(family.sigma2) * (std_quantile(pair.q2()) - std_quantile(pair.q1())) *
                       std::sqrt(1.0 + problem.sigma2 / problem.tau2);
  return {std::move(sel), std::move(eta), std::move(z), std::move(family), ci, bound};
}

RegressionProblem read_regression_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    rows.push_back(parse_row(line, line_no));
    if (rows.back().size() < 2) {
      throw ValidationError("csv line " + std::to_string(line_no) + ": need a response and at least one column");
    }
    if (rows.back().size() != rows.front().size()) {
      throw ValidationError("csv line " + std::to_string(line_no) + ": expected " +
                            std::to_string(rows.front().size()) + " fields");
    }
  }
  if (rows.empty()) throw ValidationError("csv has no data rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(rows.front().size() - 1);
  RegressionProblem p;
  p.design.resize(n, d);
  p.response.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    p.response(i) = r[0];
    for (Eigen::Index j = 0; j < d; ++j) p.design(i, j) = r[static_cast<std::size_t>(j + 1)];
  }
  return p;
}

}  // namespace selinf
