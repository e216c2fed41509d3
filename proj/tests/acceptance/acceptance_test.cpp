// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Every Monte Carlo check runs from the fixed master seed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "fairdiv/fairdiv.hpp"
#include "support/brute.hpp"

using namespace fairdiv;

namespace {

constexpr std::uint64_t kSeed = 314159;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ExperimentConfig preset(const std::string& experiment, std::size_t n, std::vector<std::size_t> ms,
                        std::size_t trials) {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  cfg.n_values = {n};
  cfg.m_values = std::move(ms);
  cfg.trials = trials;
  cfg.master_seed = kSeed;
  cfg.threads = 1;
  return cfg;
}

// i does not envy other's bundle after removing any single item from it.
bool efx_towards(const Instance& inst, const Allocation& alloc, Agent i, Agent other) {
  const double own = bundle_utility(inst, i, alloc.bundle(i));
  const auto& theirs = alloc.bundle(other);
  for (std::size_t k = 0; k < theirs.size(); ++k) {
    double rest = 0.0;
    for (std::size_t l = 0; l < theirs.size(); ++l) {
      if (l != k) rest += inst(i, theirs[l]);
    }
    if (own < rest) return false;
  }
  return true;
}

Verdict assignment_phase_transition() {
  const auto start = std::chrono::steady_clock::now();
  const auto rows = run_experiment(preset("assign-threshold", 1000, {2400, 3000}, 200));
  const double elapsed = seconds_since(start);
  const double low = rows[0].p_hat, high = rows[1].p_hat;
  return {high >= 0.95 && low <= 0.05 && elapsed < 30.0,
          fmt("p(m=3000)=%.3f >= 0.95, p(m=2400)=%.3f <= 0.05, %.1fs < 30s", high, low, elapsed)};
}

Verdict peak_location() {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t m = 200000;
  double total = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    RngStream rng(derive_seed(kSeed, {2, k}));
    total += std::abs(static_cast<double>(simulate_markov(m, rng).max_y()) / m - 1.0 / std::numbers::e);
  }
  const double mean = total / 20.0;
  const double elapsed = seconds_since(start);
  return {mean <= 0.01 && elapsed < 10.0, fmt("mean |maxY/m - 1/e| = %.5f <= 0.01, %.2fs < 10s", mean, elapsed)};
}

Verdict ode_exactness() {
  const double z0 = ode_z(0.0);
  const auto peak = peak_stats();
  const double zs = ode_z(peak.s_star);
  const bool pass = std::abs(z0 - 0.5) <= 1e-12 && std::abs(zs - 1.0 / (2.0 * std::numbers::e)) <= 1e-9 &&
                    std::abs(peak.grid_max - 1.0 / (2.0 * std::numbers::e)) <= 1e-6;
  return {pass, fmt("z(0)=%.15g, |z(s*)-1/2e|=%.2e, |grid max y - 1/2e|=%.2e", z0,
                    std::abs(zs - 1.0 / (2.0 * std::numbers::e)), std::abs(peak.grid_max - peak.y_star))};
}

Verdict wormald_deviation() {
  const auto rows = run_experiment(preset("wormald", 1, {100000}, 100));
  return {rows[0].successes >= 95,
          fmt("%zu/100 runs with deviation <= 0.02 (mean deviation %.5f)", rows[0].successes, *rows[0].mean_stat)};
}

Verdict round_robin_envy_freeness() {
  const auto rows = run_experiment(preset("ef-sweep", 100, {150, 5000}, 200));
  const double low = rows[0].p_hat, high = rows[1].p_hat;
  return {high >= 0.9 && high - low >= 0.5, fmt("EF rate m=5000: %.3f >= 0.9; m=150: %.3f (gap %.3f >= 0.5)", high,
                                                 low, high - low)};
}

Verdict proportionality() {
  const auto rows = run_experiment(preset("prop-sweep", 200, {200, 250, 300, 350, 399, 400, 500}, 200));
  bool pass = true;
  std::string detail;
  for (const auto& r : rows) {
    pass = pass && r.p_hat >= 0.9;
    detail += fmt("m=%zu:%.3f ", r.m, r.p_hat);
  }
  return {pass, detail + "(each >= 0.9)"};
}

Verdict efx() {
  const auto rows = run_experiment(preset("efx-sweep", 200, {205, 250, 401, 1000}, 200));
  bool pass = true;
  std::string detail;
  for (const auto& r : rows) {
    pass = pass && r.p_hat >= 0.85;
    detail += fmt("m=%zu:%.3f(fallback %zu) ", r.m, r.p_hat, r.fallback_count);
  }
  return {pass, detail + "(each >= 0.85)"};
}

Verdict greedy_oracle_equivalence() {
  std::size_t agree = 0, exists = 0;
  const std::size_t total = 10000;
  for (std::uint64_t k = 0; k < total; ++k) {
    RngStream rng(derive_seed(kSeed, {8, k}));
    const std::size_t n = 1 + rng.below(4);
    const std::size_t m = 1 + rng.below(7);
    const auto profile = sample_profile(n, m, rng);
    const bool brute = oracle::exists_ef_assignment_bruteforce(profile).exists;
    agree += greedy_assignment(profile).assignment.has_value() == brute;
    exists += brute;
  }
  return {agree == total, fmt("%zu/%zu agree (%zu solvable)", agree, total, exists)};
}

Verdict structural_invariants() {
  const std::size_t total = 10000;
  const auto spec = DistributionSpec::uniform();
  std::size_t acyclic = 0, claim = 0, conservation = 0, ef1 = 0, prop = 0, prop_checked = 0;
  for (std::uint64_t k = 0; k < total; ++k) {
    RngStream rng(derive_seed(kSeed, {9, k}));
    const std::size_t n = 2 + rng.below(15);

    // Maximum-assignment envy graph (throws on a cycle).
    const auto inst_ma = sample_instance(n, n + rng.below(n), spec, rng);
    try {
      maximum_assignment_efx(inst_ma, max_assignment_threshold(n, 1.0));
      maximum_assignment_efx(inst_ma, 0.0);
      ++acyclic;
    } catch (const std::logic_error&) {
    }

    // Reversed last round: r-item agents are EFX towards (r+1)-item agents.
    const std::size_t m_rr = n + rng.below(5 * n);
    const auto inst_rr = sample_instance(n, m_rr, spec, rng);
    const auto alloc = *round_robin_reversed_last(inst_rr).result.allocation;
    const std::size_t q = m_rr % n;
    bool ok = true;
    for (Agent i = 0; i < n - q; ++i) {
      for (Agent other = n - q; other < n; ++other) ok = ok && efx_towards(inst_rr, alloc, i, other);
    }
    claim += ok;

    // Conservation identity on a greedy run and a Markov run.
    const auto greedy = greedy_assignment(sample_profile(n, n + rng.below(4 * n), rng)).trajectory;
    const auto markov = simulate_markov(1 + rng.below(2000), rng);
    conservation += greedy.satisfies_conservation() && markov.satisfies_conservation();

    // Round-robin EF1.
    const auto inst_ef1 = sample_instance(n, rng.below(6 * n), spec, rng);
    ef1 += fairness_report(inst_ef1, *round_robin(inst_ef1).result.allocation).ef1;

    // Two-stage non-NULL implies proportional.
    const auto inst_ts = sample_instance(n, n + rng.below(n + 1), spec, rng);
    const auto ts = two_stage_matching(inst_ts, proportional_threshold(n, 1.0));
    if (ts.allocation) {
      ++prop_checked;
      prop += fairness_report(inst_ts, *ts.allocation).proportional;
    }
  }
  const bool pass = acyclic == total && claim == total && conservation == total && ef1 == total && prop == prop_checked;
  return {pass, fmt("acyclic %zu/%zu, reversed-round EFX %zu/%zu, conservation %zu/%zu, EF1 %zu/%zu, "
                    "two-stage proportional %zu/%zu",
                    acyclic, total, claim, total, conservation, total, ef1, total, prop, prop_checked)};
}

Verdict distributional_equivalence() {
  auto cfg = preset("lemma4-ks", 5, {17}, 1);
  cfg.ks_samples = 100000;
  const auto rows = run_experiment(cfg);
  return {rows[0].successes == 1, fmt("KS = %.5f <= 0.01 at N = 10^5", *rows[0].mean_stat)};
}

Verdict matching_oracles() {
  double worst = 0.0;
  std::size_t feasibility_agree = 0;
  for (std::uint64_t k = 0; k < 1000; ++k) {
    RngStream rng(derive_seed(kSeed, {11, k}));
    std::vector<double> w(30);
    std::vector<char> allowed(30);
    for (auto& x : w) x = rng.uniform();
    for (auto& a : allowed) a = rng.uniform() < (k % 4 == 0 ? 0.35 : 0.85);
    const WeightedAssignmentProblem p(5, 6, w, allowed);
    const auto fast = max_weight_assignment(p);
    const auto brute = oracle::brute_max_weight(p);
    feasibility_agree += fast.has_value() == brute.has_value();
    if (fast && brute) worst = std::max(worst, std::abs(fast->total_weight - *brute));
  }
  std::size_t cardinality_agree = 0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    RngStream rng(derive_seed(kSeed, {12, k}));
    const auto g = testing::random_graph(1 + rng.below(7), 1 + rng.below(8), 0.1 + 0.5 * rng.uniform(), rng);
    const auto m = max_cardinality_matching(g);
    cardinality_agree += testing::is_valid_matching(g, m) && m.size() == testing::brute_max_matching(g);
  }
  return {feasibility_agree == 1000 && worst <= 1e-12 && cardinality_agree == 50,
          fmt("Hungarian: feasibility %zu/1000, max |diff| %.2e <= 1e-12; max-cardinality %zu/50", feasibility_agree,
              worst, cardinality_agree)};
}

Verdict reproducibility() {
  std::vector<ExperimentConfig> configs = {preset("efx-sweep", 30, {35, 64, 90}, 40),
                                           preset("assign-threshold", 200, {500, 600}, 40),
                                           preset("wormald", 1, {5000}, 20)};
  configs[0].distribution = "truncnorm:0.5,0.3";
  bool identical = true;
  std::size_t bytes = 0;
  for (auto cfg : configs) {
    cfg.threads = 1;
    const auto one = to_csv(run_experiment(cfg));
    cfg.threads = 8;
    const auto eight = to_csv(run_experiment(cfg));
    identical = identical && one == eight;
    bytes += one.size();
  }
  return {identical, fmt("3 presets, %zu CSV bytes, identical at 1 and 8 threads", bytes)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"1 assignment phase transition", assignment_phase_transition},
      {"2 peak location", peak_location},
      {"3 ODE exactness", ode_exactness},
      {"4 Wormald deviation", wormald_deviation},
      {"5 round-robin envy-freeness", round_robin_envy_freeness},
      {"6 proportionality", proportionality},
      {"7 EFX", efx},
      {"8 greedy-oracle equivalence", greedy_oracle_equivalence},
      {"9 structural invariants", structural_invariants},
      {"10 distributional equivalence", distributional_equivalence},
      {"11 matching oracle equivalence", matching_oracles},
      {"12 reproducibility", reproducibility},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& err) {
      v = {false, std::string("exception: ") + err.what()};
    }
    std::printf("%s criterion %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
