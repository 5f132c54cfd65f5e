#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "selfcheck.hpp"
#include "selinf/designs.hpp"
#include "selinf/error.hpp"
#include "selinf/lasso.hpp"
#include "selinf/quantile_ci.hpp"
#include "selinf/rng.hpp"
#include "selinf/sim_harness.hpp"
#include "selinf/trunc_set.hpp"

namespace selinf::cli {

namespace {

// A rejected flag value; the message always starts with the flag name.
class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& flag, const std::string& what) : std::runtime_error(flag + ": " + what) {}
};

struct Common {
  double sigma2 = 1.0;
  double tau2 = 1.0;
  std::string trunc = "(-1,1)";
  double q1 = 0.025;
  double q2 = 0.975;
  std::uint64_t seed = 0;
  std::string out;
  int replicates = 2000;
  int workers = 1;
};

void add_model_flags(CLI::App& cmd, Common& c, bool allow_zero_tau2) {
  cmd.add_option("--sigma2", c.sigma2, "Variance of the observed statistic (> 0)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  auto* tau = cmd.add_option("--tau2", c.tau2, "Variance of the randomization noise")->capture_default_str();
  if (allow_zero_tau2) {
    tau->check(CLI::NonNegativeNumber);
  } else {
    tau->check(CLI::PositiveNumber);
  }
  cmd.add_option("--trunc", c.trunc, "Truncation set, e.g. \"(-inf,-2),(2,inf)\"")->capture_default_str();
}

void add_pair_flags(CLI::App& cmd, Common& c) {
  cmd.add_option("--q1", c.q1, "Lower quantile level, in (0, 1)")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd.add_option("--q2", c.q2, "Upper quantile level, in [q1, 1)")->check(CLI::Range(0.0, 1.0))->capture_default_str();
}

void add_out_flag(CLI::App& cmd, Common& c) {
  cmd.add_option("--out", c.out, "Write CSV to this path instead of stdout");
}

void add_mc_flags(CLI::App& cmd, Common& c) {
  cmd.add_option("--replicates", c.replicates, "Monte Carlo replicates (>= 1)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--seed", c.seed, "Master seed of the random streams")->capture_default_str();
  cmd.add_option("--workers", c.workers, "Worker threads; 0 uses every core. Output does not depend on it")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

QuantilePair parse_pair(const Common& c) {
  if (!(c.q1 > 0.0 && c.q1 < 1.0)) throw UsageError("--q1", "must lie in (0, 1)");
  if (!(c.q2 > 0.0 && c.q2 < 1.0)) throw UsageError("--q2", "must lie in (0, 1)");
  if (c.q2 < c.q1) throw UsageError("--q2", "must not be smaller than --q1");
  return QuantilePair(c.q1, c.q2);
}

TruncationSet parse_trunc(const std::string& text) {
  try {
    return TruncationSet::parse(text);
  } catch (const ValidationError& e) {
    throw UsageError("--trunc", e.what());
  }
}

void check_finite(const std::string& flag, double v) {
  if (!std::isfinite(v)) throw UsageError(flag, "must be finite");
}

std::vector<double> step_grid(const std::string& flag, double lo, double hi, double step) {
  check_finite(flag + "-min", lo);
  check_finite(flag + "-max", hi);
  if (!(step > 0.0) || !std::isfinite(step)) throw UsageError(flag + "-step", "must be positive");
  if (hi < lo) throw UsageError(flag + "-max", "must not be below " + flag + "-min");
  const long count = std::lround(std::floor((hi - lo) / step + 1e-9));
  if (count > 10'000'000) throw UsageError(flag + "-step", "grid is too large");
  std::vector<double> out;
  for (long i = 0; i <= count; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

// Writes through `emit` to --out or to `out`.
void deliver(const Common& c, std::ostream& out, const std::function<void(std::ostream&)>& emit) {
  if (c.out.empty()) {
    emit(out);
    return;
  }
  std::ofstream file(c.out, std::ios::binary);
  if (!file) throw UsageError("--out", "cannot open '" + c.out + "' for writing");
  emit(file);
  if (!file) throw std::runtime_error("write to '" + c.out + "' failed");
}

SetFamily parse_family(const std::string& name) {
  if (name == "bounded") return SetFamily::kBounded;
  if (name == "gap") return SetFamily::kGap;
  if (name == "custom") return SetFamily::kCustom;
  throw UsageError("--family", "expected bounded, gap or custom");
}

Eigen::VectorXd parse_gamma(const std::string& text, const std::vector<int>& model, int d) {
  const bool is_index = text.find_first_of(",.eE") == std::string::npos;
  if (is_index) {
    int idx = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), idx);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw UsageError("--gamma", "expected a column index or a comma-separated vector");
    }
    if (idx < 0 || idx >= d) throw UsageError("--gamma", "column index out of range");
    const auto it = std::find(model.begin(), model.end(), idx);
    if (it == model.end()) {
      throw UsageError("--gamma", "column " + std::to_string(idx) + " is not in the selected model");
    }
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.size()));
    g(it - model.begin()) = 1.0;
    return g;
  }
  std::vector<double> values;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(field, &used));
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw UsageError("--gamma", "non-numeric entry '" + field + "'");
    }
  }
  if (values.size() != model.size()) {
    throw UsageError("--gamma", "has " + std::to_string(values.size()) + " entries but the selected model has " +
                                    std::to_string(model.size()) + " variables");
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Selective confidence intervals under randomized selection"};
  app.name(args.empty() ? "selinf" : args.front());
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every command");

  Common c;

  double x = 0.0;
  auto* ci = app.add_subcommand("ci", "Interval for one observed statistic");
  ci->add_option("--x", x, "Observed statistic")->required();
  add_model_flags(*ci, c, true);
  add_pair_flags(*ci, c);
  add_out_flag(*ci, c);

  std::string family_name = "bounded";
  std::vector<double> a_values = default_a_values();
  double grid_min = -10.0;
  double grid_max = 10.0;
  double x_step = 0.1;
  double mu_step = 0.25;

  auto* lc = app.add_subcommand("length-curve", "Interval length as a function of x");
  lc->add_option("--family", family_name, "bounded: (-a,a); gap: (-inf,-a)u(a,inf); custom: --trunc")
      ->capture_default_str();
  lc->add_option("--a", a_values, "Family parameters (> 0)")->delimiter(',')->capture_default_str();
  lc->add_option("--x-min", grid_min, "Grid start")->capture_default_str();
  lc->add_option("--x-max", grid_max, "Grid end")->capture_default_str();
  lc->add_option("--x-step", x_step, "Grid step (> 0)")->capture_default_str();
  add_model_flags(*lc, c, false);
  add_pair_flags(*lc, c);
  lc->add_option("--workers", c.workers, "Worker threads; 0 uses every core")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  add_out_flag(*lc, c);

  auto* el = app.add_subcommand("expected-length", "Monte Carlo conditional expected length over mu");
  el->add_option("--family", family_name, "bounded, gap or custom")->capture_default_str();
  el->add_option("--a", a_values, "Family parameters (> 0)")->delimiter(',')->capture_default_str();
  el->add_option("--mu-min", grid_min, "Grid start")->capture_default_str();
  el->add_option("--mu-max", grid_max, "Grid end")->capture_default_str();
  el->add_option("--mu-step", mu_step, "Grid step (> 0)")->capture_default_str();
  add_model_flags(*el, c, false);
  add_pair_flags(*el, c);
  add_mc_flags(*el, c);
  add_out_flag(*el, c);

  std::string design = "carving";
  int n = 100;
  double delta = 0.75;
  double mu = 0.0;
  auto* dom = app.add_subcommand("dominance", "Selective versus sample-splitting interval lengths");
  dom->add_option("--design", design, "carving or randresp")->capture_default_str();
  dom->add_option("--n", n, "Sample size")->check(CLI::PositiveNumber)->capture_default_str();
  dom->add_option("--delta", delta, "Selection fraction for carving, in (0, 1)")->capture_default_str();
  dom->add_option("--mu", mu, "True mean")->capture_default_str();
  dom->add_option("--sigma2", c.sigma2, "Per-observation variance (> 0)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  dom->add_option("--tau2", c.tau2, "Per-observation noise variance for randresp (> 0)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  dom->add_option("--trunc", c.trunc, "Selection set for the selection mean")->capture_default_str();
  add_pair_flags(*dom, c);
  add_mc_flags(*dom, c);
  add_out_flag(*dom, c);

  std::string data_path;
  double lambda = 0.0;
  std::string gamma_text;
  bool on_signs = false;
  auto* lasso = app.add_subcommand("lasso-demo", "Lasso on a randomized response and a selective interval");
  lasso->add_option("--data", data_path, "CSV with a header; first column response, rest design")->required();
  lasso->add_option("--lambda", lambda, "Lasso penalty (> 0)")->required()->check(CLI::PositiveNumber);
  lasso->add_option("--gamma", gamma_text, "Column index in the model, or a contrast vector over the model")
      ->required();
  lasso->add_flag("--condition-on-signs", on_signs, "Condition on the selected signs as well");
  lasso->add_option("--sigma2", c.sigma2, "Response variance (> 0)")->check(CLI::PositiveNumber)->capture_default_str();
  lasso->add_option("--tau2", c.tau2, "Randomization variance per observation (> 0)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  lasso->add_option("--seed", c.seed, "Seed of the randomization noise")->capture_default_str();
  add_pair_flags(*lasso, c);
  add_out_flag(*lasso, c);

  auto* self = app.add_subcommand("selfcheck", "Run the numerical oracle suite");
  add_out_flag(*self, c);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (ci->parsed()) {
      check_finite("--x", x);
      const auto pair = parse_pair(c);
      const SpecFamily family{c.sigma2, c.tau2, parse_trunc(c.trunc)};
      const auto res = interval(family, x, pair);
      deliver(c, out, [&](std::ostream& o) {
        o << "x,lower,upper,length,bound\n"
          << format_number(x) << ',' << format_number(res.lower) << ',' << format_number(res.upper) << ','
          << format_number(res.length()) << ',' << format_number(res.bound) << '\n';
      });
      return kOk;
    }
    if (lc->parsed() || el->parsed()) {
      const bool lengths = lc->parsed();
      ExperimentConfig cfg;
      cfg.family = parse_family(family_name);
      if (cfg.family == SetFamily::kCustom) {
        cfg.custom = parse_trunc(c.trunc);
      } else {
        for (double a : a_values) {
          if (!(a > 0.0) || !std::isfinite(a)) throw UsageError("--a", "values must be positive");
        }
        cfg.a_values = a_values;
      }
      cfg.sigma2 = c.sigma2;
      cfg.tau2 = c.tau2;
      cfg.pair = parse_pair(c);
      cfg.grid = lengths ? step_grid("--x", grid_min, grid_max, x_step)
                         : step_grid("--mu", grid_min, grid_max, mu_step);
      cfg.replicates = c.replicates;
      cfg.master_seed = c.seed;
      cfg.workers = c.workers;
      if (lengths) {
        const auto rows = length_curve(cfg);
        deliver(c, out, [&](std::ostream& o) { write_csv(o, std::span<const LengthRow>(rows)); });
      } else {
        const auto rows = expected_length_curve(cfg);
        deliver(c, out, [&](std::ostream& o) { write_csv(o, std::span<const ExpectedLengthRow>(rows)); });
      }
      return kOk;
    }
    if (dom->parsed()) {
      DominanceConfig cfg;
      if (design == "carving") {
        cfg.kind = DesignKind::kCarving;
        if (!(delta > 0.0 && delta < 1.0)) throw UsageError("--delta", "must lie in (0, 1)");
        int k = static_cast<int>(std::lround(delta * n));
        if (std::fabs(delta * n - k) > 1e-9 * n || k < 1 || k > n - 1) {
          throw UsageError("--delta", "delta * n must be an integer between 1 and n - 1");
        }
      } else if (design == "randresp") {
        cfg.kind = DesignKind::kRandResponse;
        const double m = n * c.tau2 / (c.sigma2 + c.tau2);
        if (std::fabs(m - std::round(m)) > 1e-9 * n || std::round(m) < 1 || std::round(m) > n - 1) {
          throw UsageError("--tau2", "n * tau2 / (sigma2 + tau2) must be an integer between 1 and n - 1");
        }
      } else {
        throw UsageError("--design", "expected carving or randresp");
      }
      check_finite("--mu", mu);
      cfg.n = n;
      cfg.delta = delta;
      cfg.sigma2 = c.sigma2;
      cfg.tau2 = c.tau2;
      cfg.mu = mu;
      cfg.truncation = parse_trunc(c.trunc);
      cfg.pair = parse_pair(c);
      cfg.replicates = c.replicates;
      cfg.master_seed = c.seed;
      cfg.workers = c.workers;
      const auto rows = dominance_experiment(cfg);
      deliver(c, out, [&](std::ostream& o) { write_csv(o, std::span<const DominanceRow>(rows)); });
      return kOk;
    }
    if (lasso->parsed()) {
      const auto pair = parse_pair(c);
      std::ifstream file(data_path);
      if (!file) throw UsageError("--data", "cannot open '" + data_path + "'");
      RegressionProblem problem;
      try {
        problem = read_regression_csv(file);
      } catch (const ValidationError& e) {
        throw UsageError("--data", e.what());
      }
      problem.sigma2 = c.sigma2;
      problem.tau2 = c.tau2;
      problem.lambda = lambda;
      try {
        problem.validate();
      } catch (const ValidationError& e) {
        throw UsageError("--data", e.what());
      }
      RandomStream stream(c.seed, 0);
      Eigen::VectorXd omega(problem.response.size());
      const double tau = std::sqrt(c.tau2);
      for (Eigen::Index i = 0; i < omega.size(); ++i) omega(i) = tau * stream.normal();

      const Eigen::VectorXd v = problem.response + omega;
      const auto selected = active_set(lasso_fit(problem.design, v, lambda).beta);
      if (selected.first.empty()) throw NoSelectionError("the Lasso selected no variables");
      const auto gamma = parse_gamma(gamma_text, selected.first, static_cast<int>(problem.design.cols()));
      const auto res = selective_interval(problem, omega, gamma, pair, on_signs);
      deliver(c, out, [&](std::ostream& o) {
        o << "model,signs,truncation,estimate,lower,upper,length,bound\n"
          << join(res.selection.model) << ',' << join(res.selection.signs) << ",\""
          << res.family.truncation.to_string() << "\"," << format_number(res.interval.x) << ','
          << format_number(res.interval.lower) << ',' << format_number(res.interval.upper) << ','
          << format_number(res.interval.length()) << ',' << format_number(res.length_bound) << '\n';
      });
      return kOk;
    }
    if (self->parsed()) {
      bool ok = true;
      deliver(c, out, [&](std::ostream& o) { ok = run_selfcheck(o); });
      return ok ? kOk : kFailure;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NonConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace selinf::cli
