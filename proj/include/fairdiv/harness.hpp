#pragma once

// Seeded Monte Carlo experiment driver. Trial k of cell c draws from the
// stream derived from (master_seed, c, k), so results do not depend on how
// trials are scheduled across threads.

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "fairdiv/allocators.hpp"
#include "fairdiv/assignment_dynamics.hpp"
#include "fairdiv/distributions.hpp"
#include "fairdiv/errors.hpp"
#include "fairdiv/model.hpp"
#include "fairdiv/rng.hpp"
#include "fairdiv/stats.hpp"

namespace fairdiv {

enum class Experiment { kEfSweep, kPropSweep, kEfxSweep, kAssignThreshold, kWormald, kLemma4Ks };

inline Experiment parse_experiment(const std::string& name) {
  static const std::map<std::string, Experiment> kNames = {
      {"ef-sweep", Experiment::kEfSweep},           {"prop-sweep", Experiment::kPropSweep},
      {"efx-sweep", Experiment::kEfxSweep},         {"assign-threshold", Experiment::kAssignThreshold},
      {"wormald", Experiment::kWormald},            {"lemma4-ks", Experiment::kLemma4Ks}};
  auto it = kNames.find(name);
  if (it == kNames.end()) throw ConfigError("experiment", "unknown preset '" + name + "'");
  return it->second;
}

enum class AllocatorName { kRr, kRrRev, kThreshold, kTwoStage, kEfxViaEf, kMaxAssign, kEfxAuto, kPropAuto };

inline std::optional<AllocatorName> parse_allocator(const std::string& name) {
  static const std::map<std::string, AllocatorName> kNames = {
      {"rr", AllocatorName::kRr},           {"rr-rev", AllocatorName::kRrRev},
      {"threshold", AllocatorName::kThreshold}, {"two-stage", AllocatorName::kTwoStage},
      {"efx-via-ef", AllocatorName::kEfxViaEf}, {"max-assign", AllocatorName::kMaxAssign},
      {"efx-auto", AllocatorName::kEfxAuto},    {"prop-auto", AllocatorName::kPropAuto}};
  auto it = kNames.find(name);
  if (it == kNames.end()) return std::nullopt;
  return it->second;
}

/// Runs a named allocator with the default thresholds for value-density floor alpha.
inline AllocatorResult run_allocator(AllocatorName name, const Instance& inst, double alpha) {
  const std::size_t n = inst.agents();
  switch (name) {
    case AllocatorName::kRr:
      return round_robin(inst).result;
    case AllocatorName::kRrRev:
      return round_robin_reversed_last(inst).result;
    case AllocatorName::kThreshold: {
      if (inst.items() < n) throw PreconditionError("threshold needs m >= n");
      std::vector<Item> first(n);
      for (Item j = 0; j < n; ++j) first[j] = j;
      return {threshold_matching(inst, proportional_threshold(n, alpha), first),
              std::string(tags::kThresholdMatching), false, {}};
    }
    case AllocatorName::kTwoStage:
      return two_stage_matching(inst, proportional_threshold(n, alpha));
    case AllocatorName::kEfxViaEf:
      return efx_via_ef(inst, alpha);
    case AllocatorName::kMaxAssign:
      return maximum_assignment_efx(inst, max_assignment_threshold(n, alpha));
    case AllocatorName::kEfxAuto:
      return efx_dispatch(inst, alpha);
    case AllocatorName::kPropAuto:
      return prop_dispatch(inst, alpha);
  }
  throw std::logic_error("unhandled allocator");
}

struct ExperimentConfig {
  std::string experiment;
  std::vector<std::size_t> n_values;
  std::vector<std::size_t> m_values;
  std::vector<double> ratio_values;
  std::string distribution = "uniform";
  std::string algorithm;  // empty selects the preset's default
  std::size_t trials = 0;
  std::uint64_t master_seed = 0;
  std::size_t threads = 1;
  std::string out_path = "-";  // "-" is stdout
  std::size_t ks_samples = 100000;
  bool timing = false;  // fill wall_ms; makes output timing-dependent
};

/// Field-by-field overrides from the command line.
struct ConfigOverrides {
  std::optional<std::string> experiment;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::string> out_path;
};

inline std::string default_algorithm(Experiment e) {
  switch (e) {
    case Experiment::kEfSweep: return "rr";
    case Experiment::kPropSweep: return "prop-auto";
    case Experiment::kEfxSweep: return "efx-auto";
    case Experiment::kAssignThreshold: return "greedy";
    case Experiment::kWormald: return "markov";
    case Experiment::kLemma4Ks: return "generative";
  }
  return {};
}

/// Checks the invariants and fills the preset's default algorithm.
inline void validate(ExperimentConfig& cfg) {
  const Experiment e = parse_experiment(cfg.experiment);
  if (cfg.n_values.empty()) throw ConfigError("n_values", "must list at least one n");
  for (auto n : cfg.n_values) {
    if (n == 0) throw ConfigError("n_values", "n must be >= 1");
  }
  const bool has_m = !cfg.m_values.empty();
  const bool has_ratio = !cfg.ratio_values.empty();
  if (has_m == has_ratio) throw ConfigError("m_values", "exactly one of m_values / ratio_values is required");
  for (double ratio : cfg.ratio_values) {
    if (!(ratio > 0.0) || !std::isfinite(ratio)) throw ConfigError("ratio_values", "ratios must be positive");
  }
  if (cfg.trials == 0) throw ConfigError("trials", "must be >= 1");
  if (cfg.threads == 0) throw ConfigError("threads", "must be >= 1");
  if (cfg.ks_samples == 0) throw ConfigError("ks_samples", "must be >= 1");
  try {
    parse_distribution(cfg.distribution);
  } catch (const std::exception& err) {
    throw ConfigError("distribution", err.what());
  }
  if (cfg.algorithm.empty()) cfg.algorithm = default_algorithm(e);
  const bool allocator_preset =
      e == Experiment::kEfSweep || e == Experiment::kPropSweep || e == Experiment::kEfxSweep;
  if (allocator_preset ? !parse_allocator(cfg.algorithm).has_value() : cfg.algorithm != default_algorithm(e)) {
    throw ConfigError("algorithm", "'" + cfg.algorithm + "' is not valid for " + cfg.experiment);
  }
}

namespace detail {

template <typename T>
T config_field(const nlohmann::json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& err) {
    throw ConfigError(key, err.what());
  }
}

}  // namespace detail

/// Loads a JSON config, applies overrides, validates. Unknown keys are errors.
inline ExperimentConfig parse_config(const nlohmann::json& doc, const ConfigOverrides& overrides = {}) {
  static const std::set<std::string> kKnown = {"experiment", "n_values", "m_values",   "ratio_values",
                                               "distribution", "algorithm", "trials",  "master_seed",
                                               "threads",    "out_path", "ks_samples", "timing"};
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kKnown.count(key)) throw ConfigError(key, "unknown key");
  }
  for (const char* key : {"experiment", "n_values", "trials", "master_seed"}) {
    if (!doc.contains(key) && !(std::string(key) == "experiment" && overrides.experiment) &&
        !(std::string(key) == "trials" && overrides.trials) &&
        !(std::string(key) == "master_seed" && overrides.seed)) {
      throw ConfigError(key, "missing required field");
    }
  }
  ExperimentConfig cfg;
  if (doc.contains("experiment")) cfg.experiment = detail::config_field<std::string>(doc, "experiment");
  cfg.n_values = detail::config_field<std::vector<std::size_t>>(doc, "n_values");
  if (doc.contains("m_values")) cfg.m_values = detail::config_field<std::vector<std::size_t>>(doc, "m_values");
  if (doc.contains("ratio_values")) {
    cfg.ratio_values = detail::config_field<std::vector<double>>(doc, "ratio_values");
  }
  if (doc.contains("m_values") && doc.contains("ratio_values")) {
    throw ConfigError("m_values", "m_values and ratio_values are mutually exclusive");
  }
  if (doc.contains("distribution")) cfg.distribution = detail::config_field<std::string>(doc, "distribution");
  if (doc.contains("algorithm")) cfg.algorithm = detail::config_field<std::string>(doc, "algorithm");
  if (doc.contains("trials")) cfg.trials = detail::config_field<std::size_t>(doc, "trials");
  if (doc.contains("master_seed")) cfg.master_seed = detail::config_field<std::uint64_t>(doc, "master_seed");
  if (doc.contains("threads")) cfg.threads = detail::config_field<std::size_t>(doc, "threads");
  if (doc.contains("out_path")) cfg.out_path = detail::config_field<std::string>(doc, "out_path");
  if (doc.contains("ks_samples")) cfg.ks_samples = detail::config_field<std::size_t>(doc, "ks_samples");
  if (doc.contains("timing")) cfg.timing = detail::config_field<bool>(doc, "timing");

  if (overrides.experiment) cfg.experiment = *overrides.experiment;
  if (overrides.trials) cfg.trials = *overrides.trials;
  if (overrides.seed) cfg.master_seed = *overrides.seed;
  if (overrides.threads) cfg.threads = *overrides.threads;
  if (overrides.out_path) cfg.out_path = *overrides.out_path;
  validate(cfg);
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path, const ConfigOverrides& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    throw ConfigError("config", std::string("malformed JSON: ") + err.what());
  }
  return parse_config(doc, overrides);
}

struct TrialOutcome {
  bool success = false;
  std::optional<double> statistic;
  bool fallback_used = false;
  std::int64_t wall_micros = 0;
};

struct ResultRow {
  std::string experiment;
  std::string algorithm;
  std::string distribution;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double p_hat = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  std::optional<double> mean_stat;
  std::size_t fallback_count = 0;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
};

struct Cell {
  std::size_t n;
  std::size_t m;
};

inline std::vector<Cell> expand_cells(const ExperimentConfig& cfg) {
  std::vector<Cell> cells;
  for (std::size_t n : cfg.n_values) {
    if (!cfg.m_values.empty()) {
      for (std::size_t m : cfg.m_values) cells.push_back({n, m});
    } else {
      for (double ratio : cfg.ratio_values) {
        cells.push_back({n, static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n)))});
      }
    }
  }
  return cells;
}

/// Agent 1's first-pick value: generative process vs real round-robin.
inline double lemma4_ks_statistic(std::size_t n, std::size_t m, const DistributionSpec& spec,
                                  std::size_t samples, RngStream& rng) {
  std::vector<double> generated(samples);
  std::vector<double> observed(samples);
  for (auto& v : generated) v = simulate_rr_generative(n, m, spec, rng).value(0, 0, 1);
  for (auto& v : observed) v = round_robin(sample_instance(n, m, spec, rng)).trace.value(0, 0, 1);
  return ks_two_sample(std::move(generated), std::move(observed));
}

inline constexpr double kWormaldTolerance = 0.02;
inline constexpr double kKsTolerance = 0.01;

namespace detail {

struct TrialContext {
  Experiment experiment;
  std::optional<AllocatorName> allocator;
  const DistributionSpec* spec;
  double alpha;
  std::size_t ks_samples;
  const std::map<std::size_t, std::vector<double>>* references;
};

inline TrialOutcome run_trial(const TrialContext& ctx, const Cell& cell, RngStream& rng) {
  TrialOutcome out;
  switch (ctx.experiment) {
    case Experiment::kEfSweep:
    case Experiment::kPropSweep:
    case Experiment::kEfxSweep: {
      const Instance inst = sample_instance(cell.n, cell.m, *ctx.spec, rng);
      const AllocatorResult result = run_allocator(*ctx.allocator, inst, ctx.alpha);
      out.fallback_used = result.fallback_used;
      if (result.allocation) {
        const FairnessReport report = fairness_report(inst, *result.allocation);
        out.success = ctx.experiment == Experiment::kEfSweep     ? report.envy_free
                      : ctx.experiment == Experiment::kPropSweep ? report.proportional
                                                                 : report.efx;
      }
      break;
    }
    case Experiment::kAssignThreshold: {
      const GreedyOutcome greedy = greedy_assignment(sample_profile(cell.n, cell.m, rng));
      out.success = greedy.assignment.has_value();
      if (cell.m > 0) {
        out.statistic = static_cast<double>(greedy.trajectory.max_y()) / static_cast<double>(cell.m);
      }
      break;
    }
    case Experiment::kWormald: {
      const TrajectoryRecord tr = simulate_markov(cell.m, rng);
      out.statistic = trajectory_deviation(tr, ctx.references->at(cell.m));
      out.success = *out.statistic <= kWormaldTolerance;
      break;
    }
    case Experiment::kLemma4Ks: {
      out.statistic = lemma4_ks_statistic(cell.n, cell.m, *ctx.spec, ctx.ks_samples, rng);
      out.success = *out.statistic <= kKsTolerance;
      break;
    }
  }
  return out;
}

}  // namespace detail

/// Runs every (n, m) cell; rows come back sorted by (n, m).
inline std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  validate(cfg);
  const Experiment experiment = parse_experiment(cfg.experiment);
  const DistributionSpec spec = parse_distribution(cfg.distribution);
  const std::vector<Cell> cells = expand_cells(cfg);

  for (const Cell& cell : cells) {
    if ((experiment == Experiment::kWormald || experiment == Experiment::kLemma4Ks) && cell.m == 0) {
      throw ConfigError("m_values", "this preset needs m >= 1");
    }
  }
  std::map<std::size_t, std::vector<double>> references;
  if (experiment == Experiment::kWormald) {
    for (const Cell& cell : cells) {
      if (!references.count(cell.m)) references.emplace(cell.m, ode_reference(cell.m));
    }
  }
  const detail::TrialContext ctx{experiment, parse_allocator(cfg.algorithm), &spec, spec.alpha(),
                                 cfg.ks_samples, &references};

  const std::size_t total = cells.size() * cfg.trials;
  std::vector<TrialOutcome> outcomes(total);
  std::vector<std::exception_ptr> errors(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const std::size_t c = task / cfg.trials;
      const std::size_t k = task % cfg.trials;
      RngStream rng(derive_seed(cfg.master_seed, {c, k}));
      const auto start = std::chrono::steady_clock::now();
      try {
        outcomes[task] = detail::run_trial(ctx, cells[c], rng);
      } catch (...) {
        errors[task] = std::current_exception();
      }
      outcomes[task].wall_micros = std::chrono::duration_cast<std::chrono::microseconds>(
                                       std::chrono::steady_clock::now() - start)
                                       .count();
    }
  };
  const std::size_t workers = std::min(cfg.threads, std::max<std::size_t>(total, 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& err : errors) {
    if (!err) continue;
    try {
      std::rethrow_exception(err);
    } catch (const PreconditionError& e) {
      throw ConfigError("algorithm", e.what());
    }
  }

  std::vector<ResultRow> rows;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    ResultRow row;
    row.experiment = cfg.experiment;
    row.algorithm = cfg.algorithm;
    row.distribution = spec.to_string();
    row.n = cells[c].n;
    row.m = cells[c].m;
    row.trials = cfg.trials;
    row.seed = cfg.master_seed;
    double stat_sum = 0.0;
    std::size_t stat_count = 0;
    std::int64_t micros = 0;
    for (std::size_t k = 0; k < cfg.trials; ++k) {
      const TrialOutcome& o = outcomes[c * cfg.trials + k];
      row.successes += o.success ? 1 : 0;
      row.fallback_count += o.fallback_used ? 1 : 0;
      if (o.statistic) {
        stat_sum += *o.statistic;
        ++stat_count;
      }
      micros += o.wall_micros;
    }
    row.p_hat = static_cast<double>(row.successes) / static_cast<double>(row.trials);
    const Interval ci = wilson_interval(row.successes, row.trials);
    row.ci95_low = ci.low;
    row.ci95_high = ci.high;
    if (stat_count > 0) row.mean_stat = stat_sum / static_cast<double>(stat_count);
    row.wall_ms = cfg.timing ? static_cast<double>(micros) / 1000.0 : 0.0;
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.experiment, a.n, a.m) < std::tie(b.experiment, b.n, b.m);
  });
  return rows;
}

inline constexpr const char* kCsvHeader =
    "experiment,algorithm,distribution,n,m,trials,successes,p_hat,ci95_low,ci95_high,"
    "mean_stat,fallback_count,seed,wall_ms";

namespace detail {

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char ch : text) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + '"';
}

}  // namespace detail

/// Header plus one LF-terminated line per row; reals at 6 significant digits.
inline void write_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << detail::csv_field(r.experiment) << ',' << detail::csv_field(r.algorithm) << ','
        << detail::csv_field(r.distribution) << ',' << r.n << ',' << r.m << ',' << r.trials << ','
        << r.successes << ',' << detail::format_real(r.p_hat) << ',' << detail::format_real(r.ci95_low) << ','
        << detail::format_real(r.ci95_high) << ',' << (r.mean_stat ? detail::format_real(*r.mean_stat) : "")
        << ',' << r.fallback_count << ',' << r.seed << ',' << detail::format_real(r.wall_ms) << '\n';
  }
}

inline std::string to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  write_csv(rows, out);
  return out.str();
}

/// Runs the experiment and writes CSV to cfg.out_path ("-" for stdout).
/// The file is opened before any trial runs so a bad path fails fast.
inline std::vector<ResultRow> run_and_write(const ExperimentConfig& cfg) {
  if (cfg.out_path == "-") {
    auto rows = run_experiment(cfg);
    write_csv(rows, std::cout);
    std::cout.flush();
    return rows;
  }
  std::ofstream file(cfg.out_path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write '" + cfg.out_path + "'");
  auto rows = run_experiment(cfg);
  write_csv(rows, file);
  file.flush();
  if (!file) throw IoError("failed writing '" + cfg.out_path + "'");
  return rows;
}

}  // namespace fairdiv
