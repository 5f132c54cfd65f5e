#include "selinf/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>

#include "selinf/error.hpp"
#include "selinf/rng.hpp"

namespace selinf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream groups; the low 32 bits of a stream id hold the replicate index.
constexpr std::uint64_t kCoverageGroup = 1;
constexpr std::uint64_t kDominanceGroup = 2;
constexpr std::uint64_t kExpectedLengthGroup = 1u << 16;

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(i) for i in [0, count); each index is handled exactly once.
template <typename Body>
void parallel_for(std::size_t count, int workers, const Body& body) {
  const auto threads = static_cast<std::size_t>(resolve_workers(workers));
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> step_grid(double lo, double hi, double step) {
  std::vector<double> out;
  const int count = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= count; ++i) out.push_back(lo + i * step);
  return out;
}

}  // namespace

TruncationSet family_member(SetFamily family, double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("family parameter a must be positive");
  switch (family) {
    case SetFamily::kBounded:
      return TruncationSet::make({{-a, a}});
    case SetFamily::kGap:
      return TruncationSet::make({{-kInf, -a}, {a, kInf}});
    case SetFamily::kCustom:
      break;
  }
  throw ValidationError("custom sets have no family parameter");
}

std::vector<double> default_x_grid() { return step_grid(-10.0, 10.0, 0.1); }
std::vector<double> default_mu_grid() { return step_grid(-10.0, 10.0, 0.25); }
std::vector<double> default_a_values() { return {0.5, 1.0, 2.0, 3.0}; }

void ExperimentConfig::validate() const {
  if (grid.empty()) throw ValidationError("grid must not be empty");
  if (replicates < 1) throw ValidationError("replicates must be at least 1");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ValidationError("sigma2 must be positive");
  if (!(tau2 >= 0.0) || !std::isfinite(tau2)) throw ValidationError("tau2 must be nonnegative");
  for (double g : grid) {
    if (!std::isfinite(g)) throw ValidationError("grid values must be finite");
  }
  if (family == SetFamily::kCustom) {
    if (!custom) throw ValidationError("custom family requires a truncation set");
    return;
  }
  if (a_values.empty()) throw ValidationError("a_values must not be empty");
  for (double a : a_values) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("a values must be positive");
  }
}

std::vector<std::pair<double, TruncationSet>> ExperimentConfig::truncation_sets() const {
  std::vector<std::pair<double, TruncationSet>> out;
  if (family == SetFamily::kCustom) {
    out.emplace_back(kNaN, *custom);
    return out;
  }
  for (double a : a_values) out.emplace_back(a, family_member(family, a));
  return out;
}

std::vector<LengthRow> length_curve(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto sets = cfg.truncation_sets();
  const double bound = length_bound(cfg.sigma2, cfg.tau2, cfg.pair);
  const double plain = unconditional_length(cfg.sigma2, cfg.pair);
  const std::size_t per_set = cfg.grid.size();
  std::vector<LengthRow> rows(sets.size() * per_set);
  parallel_for(rows.size(), cfg.workers, [&](std::size_t i) {
    const auto& [a, set] = sets[i / per_set];
    const double x = cfg.grid[i % per_set];
    const SpecFamily family{cfg.sigma2, cfg.tau2, set};
    rows[i] = {a, x, interval(family, x, cfg.pair).length(), bound, plain};
  });
  return rows;
}

std::vector<ExpectedLengthRow> expected_length_curve(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!(cfg.tau2 > 0.0)) throw ValidationError("expected lengths require tau2 > 0");
  const auto sets = cfg.truncation_sets();
  const std::size_t per_set = cfg.grid.size();
  std::vector<ExpectedLengthRow> rows(sets.size() * per_set);
  parallel_for(rows.size(), cfg.workers, [&](std::size_t i) {
    const auto& [a, set] = sets[i / per_set];
    const double mu = cfg.grid[i % per_set];
    const SpecFamily family{cfg.sigma2, cfg.tau2, set};
    const auto spec = family.at(mu);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int r = 0; r < cfg.replicates; ++r) {
      RandomStream stream(cfg.master_seed, stream_id(kExpectedLengthGroup + i, static_cast<std::uint64_t>(r)));
      const double len = interval(family, sample(spec, stream), cfg.pair).length();
      sum += len;
      sum_sq += len * len;
    }
    const double n = cfg.replicates;
    const double mean = sum / n;
    const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
    rows[i] = {a, mu, mean, std::sqrt(var / n)};
  });
  return rows;
}

CoverageSummary coverage_experiment(const SpecFamily& family, double mu, const QuantilePair& pair,
                                    int replicates, std::uint64_t master_seed, int workers) {
  if (replicates < 1) throw ValidationError("replicates must be at least 1");
  const auto spec = family.at(mu);
  std::vector<ConfidenceInterval> cis(static_cast<std::size_t>(replicates), {0, 0, pair, 0, 0});
  parallel_for(cis.size(), workers, [&](std::size_t r) {
    RandomStream stream(master_seed, stream_id(kCoverageGroup, r));
    cis[r] = interval(family, sample(spec, stream), pair);
  });
  CoverageSummary out;
  for (const auto& ci : cis) {
    out.covered += ci.covers(mu) ? 1 : 0;
    out.mean_length += ci.length();
  }
  out.total = replicates;
  out.mean_length /= replicates;
  return out;
}

std::vector<DominanceRow> dominance_experiment(const DominanceConfig& cfg) {
  if (cfg.replicates < 1) throw ValidationError("replicates must be at least 1");
  if (!std::isfinite(cfg.mu)) throw ValidationError("mu must be finite");
  const double sigma = std::sqrt(cfg.sigma2);

  // Per attempt: the selection statistic, the statistic used for inference,
  // and the held-out mean of the comparable split.
  struct Draw {
    double selection;
    double inference;
    double holdout;
  };
  std::function<Draw(RandomStream&)> draw;
  std::function<ConfidenceInterval(double)> selective;
  std::function<ConfidenceInterval(double)> splitting;

  std::optional<CarvingDesign> carving;
  std::optional<RandResponseDesign> randresp;
  if (cfg.kind == DesignKind::kCarving) {
    carving.emplace(cfg.n, cfg.delta, cfg.sigma2, cfg.truncation);
    const double k_sel = carving->selection_size();
    const double k_out = carving->holdout_size();
    draw = [&, k_sel, k_out](RandomStream& s) {
      const double first = cfg.mu + sigma / std::sqrt(k_sel) * s.normal();
      const double rest = cfg.mu + sigma / std::sqrt(k_out) * s.normal();
      return Draw{first, (k_sel * first + k_out * rest) / cfg.n, rest};
    };
    const SpecFamily family = carving_family(*carving);
    selective = [&, family](double x) { return interval(family, x, cfg.pair); };
    splitting = [&](double x) { return splitting_interval_carving(*carving, x, cfg.pair); };
  } else {
    randresp.emplace(cfg.n, cfg.sigma2, cfg.tau2, cfg.truncation);
    const double m = randresp->inference_size();
    const double first_n = cfg.n - m;
    const double noise_sd = std::sqrt(cfg.tau2 / cfg.n);
    draw = [&, m, first_n, noise_sd](RandomStream& s) {
      const double first = cfg.mu + sigma / std::sqrt(first_n) * s.normal();
      const double last = cfg.mu + sigma / std::sqrt(m) * s.normal();
      const double mean = (first_n * first + m * last) / cfg.n;
      return Draw{mean + noise_sd * s.normal(), mean, last};
    };
    const SpecFamily family = randresp_family(*randresp);
    selective = [&, family](double x) { return interval(family, x, cfg.pair); };
    splitting = [&](double x) { return splitting_interval_randresp(*randresp, x, cfg.pair); };
  }

  std::vector<Draw> kept;
  kept.reserve(static_cast<std::size_t>(cfg.replicates));
  for (std::int64_t attempt = 0; static_cast<int>(kept.size()) < cfg.replicates; ++attempt) {
    if (attempt >= cfg.max_attempts) {
      throw NonConvergenceError("dominance: only " + std::to_string(kept.size()) + " of " +
                                std::to_string(cfg.replicates) + " replicates selected in " +
                                std::to_string(cfg.max_attempts) + " attempts");
    }
    RandomStream stream(cfg.master_seed, stream_id(kDominanceGroup, static_cast<std::uint64_t>(attempt)));
    const Draw d = draw(stream);
    if (cfg.truncation.contains(d.selection)) kept.push_back(d);
  }

  std::vector<DominanceRow> rows(kept.size());
  parallel_for(rows.size(), cfg.workers, [&](std::size_t r) {
    const auto sel = selective(kept[r].inference);
    const auto split = splitting(kept[r].holdout);
    rows[r] = {static_cast<int>(r), sel.length(), split.bound, sel.covers(cfg.mu), split.covers(cfg.mu)};
  });
  return rows;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, std::span<const LengthRow> rows) {
  out << "a,x,length,bound,unconditional_length\n";
  for (const auto& r : rows) {
    out << format_number(r.a) << ',' << format_number(r.x) << ',' << format_number(r.length) << ','
        << format_number(r.bound) << ',' << format_number(r.unconditional_length) << '\n';
  }
}

void write_csv(std::ostream& out, std::span<const ExpectedLengthRow> rows) {
  out << "a,mu,mean_length,std_error\n";
  for (const auto& r : rows) {
    out << format_number(r.a) << ',' << format_number(r.mu) << ',' << format_number(r.mean_length)
        << ',' << format_number(r.std_error) << '\n';
  }
}

void write_csv(std::ostream& out, std::span<const DominanceRow> rows) {
  out << "replicate,selective_length,splitting_length,covered_selective,covered_splitting\n";
  for (const auto& r : rows) {
    out << r.replicate << ',' << format_number(r.selective_length) << ','
        << format_number(r.splitting_length) << ',' << (r.covered_selective ? 1 : 0) << ','
        << (r.covered_splitting ? 1 : 0) << '\n';
  }
}

}  // namespace selinf
