#pragma once

// Deterministic experiment drivers: length curves, Monte Carlo expected
// lengths, coverage and dominance studies. Every replicate draws from its own
// counter-based stream, so results do not depend on the number of workers.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selinf/designs.hpp"
#include "selinf/quantile_ci.hpp"
#include "selinf/trunc_set.hpp"

namespace selinf {

enum class SetFamily {
  kBounded,  ///< (-a, a)
  kGap,      ///< (-inf, -a) u (a, inf)
  kCustom,
};

/// The named family member for a > 0. Throws ValidationError otherwise.
TruncationSet family_member(SetFamily family, double a);

/// x in [-10, 10] step 0.1.
std::vector<double> default_x_grid();
/// mu in [-10, 10] step 0.25.
std::vector<double> default_mu_grid();
/// a in {0.5, 1, 2, 3}.
std::vector<double> default_a_values();

struct ExperimentConfig {
  SetFamily family = SetFamily::kBounded;
  std::vector<double> a_values = default_a_values();
  std::optional<TruncationSet> custom;  ///< used when family == kCustom
  double sigma2 = 1.0;
  double tau2 = 1.0;
  QuantilePair pair{0.025, 0.975};
  std::vector<double> grid;  ///< x values for length curves, mu values for expected lengths
  int replicates = 2000;
  std::uint64_t master_seed = 0;
  int workers = 1;  ///< 0 picks the hardware concurrency

  /// Throws ValidationError on an empty grid, replicates < 1, a <= 0 for a
  /// named family, a missing custom set, or invalid variances.
  void validate() const;
  /// One truncation set per a value, or the single custom set.
  std::vector<std::pair<double, TruncationSet>> truncation_sets() const;
};

struct LengthRow {
  double a;  ///< NaN for a custom set
  double x;
  double length;
  double bound;
  double unconditional_length;
};

std::vector<LengthRow> length_curve(const ExperimentConfig& cfg);

struct ExpectedLengthRow {
  double a;
  double mu;
  double mean_length;
  double std_error;
};

/// Conditional expected interval length at each mu, estimated from
/// cfg.replicates exact conditional draws.
std::vector<ExpectedLengthRow> expected_length_curve(const ExperimentConfig& cfg);

struct CoverageSummary {
  int covered = 0;
  int total = 0;
  double mean_length = 0.0;

  double rate() const { return total == 0 ? 0.0 : static_cast<double>(covered) / total; }
};

/// Draws x from the conditional law at mu and records how often the interval
/// covers mu.
CoverageSummary coverage_experiment(const SpecFamily& family, double mu, const QuantilePair& pair,
                                    int replicates, std::uint64_t master_seed, int workers = 1);

enum class DesignKind { kCarving, kRandResponse };

struct DominanceConfig {
  DesignKind kind = DesignKind::kCarving;
  int n = 100;
  double delta = 0.75;  ///< carving only
  double sigma2 = 1.0;
  double tau2 = 1.0;  ///< per-observation noise variance, randomized response only
  double mu = 0.0;
  TruncationSet truncation = TruncationSet::real_line();
  QuantilePair pair{0.025, 0.975};
  int replicates = 2000;  ///< kept (selected) replicates
  std::int64_t max_attempts = 100'000'000;
  std::uint64_t master_seed = 0;
  int workers = 1;
};

struct DominanceRow {
  int replicate;
  double selective_length;
  double splitting_length;
  bool covered_selective;
  bool covered_splitting;
};

/// Simulates the design from its sufficient statistics, keeps the first
/// `replicates` attempts (in attempt order) whose selection statistic lands
/// in T, and compares the selective interval with the sample-splitting one.
/// Throws NonConvergenceError if max_attempts is exhausted first.
std::vector<DominanceRow> dominance_experiment(const DominanceConfig& cfg);

void write_csv(std::ostream& out, std::span<const LengthRow> rows);
void write_csv(std::ostream& out, std::span<const ExpectedLengthRow> rows);
void write_csv(std::ostream& out, std::span<const DominanceRow> rows);

/// %.17g, or "NA" for NaN.
std::string format_number(double v);

}  // namespace selinf
