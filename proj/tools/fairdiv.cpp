// fairdiv command line: experiment sweeps, single allocations, the ODE table
// and brute-force cross-validation.
//
// Exit codes: 0 success, 1 oracle disagreement or internal error,
// 2 configuration error, 3 I/O error.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include "fairdiv/fairdiv.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

int cmd_run(const std::string& config_path, const fairdiv::ConfigOverrides& overrides) {
  const auto cfg = fairdiv::parse_config_file(config_path, overrides);
  fairdiv::run_and_write(cfg);
  return 0;
}

int cmd_alloc(std::size_t n, std::size_t m, const std::string& dist, const std::string& algo,
              std::uint64_t seed) {
  if (n == 0) throw fairdiv::ConfigError("n", "must be >= 1");
  const auto name = fairdiv::parse_allocator(algo);
  if (!name) throw fairdiv::ConfigError("algo", "unknown algorithm '" + algo + "'");
  fairdiv::DistributionSpec spec = fairdiv::DistributionSpec::uniform();
  try {
    spec = fairdiv::parse_distribution(dist);
  } catch (const fairdiv::PreconditionError& err) {
    throw fairdiv::ConfigError("dist", err.what());
  }
  fairdiv::RngStream rng(seed);
  const auto inst = fairdiv::sample_instance(n, m, spec, rng);
  fairdiv::AllocatorResult result;
  try {
    result = fairdiv::run_allocator(*name, inst, spec.alpha());
  } catch (const fairdiv::PreconditionError& err) {
    throw fairdiv::ConfigError("algo", err.what());
  }
  std::cout << fairdiv::alloc_document(inst, result).dump(2) << '\n';
  return 0;
}

int cmd_ode(std::size_t points) {
  if (points == 0) throw fairdiv::ConfigError("points", "must be >= 1");
  std::printf("s\tz\ty\n");
  for (std::size_t k = 0; k < points; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(points);
    const double z = fairdiv::ode_z(s);
    std::printf("%.10g\t%.10g\t%.10g\n", s, z, z * std::log(1.0 / (2.0 * z)));
  }
  return 0;
}

// Random tiny instances checked against the exhaustive oracles.
int cmd_oracle(const std::string& suite, std::size_t trials, std::uint64_t seed) {
  if (suite != "tiny") throw fairdiv::ConfigError("suite", "only the 'tiny' suite exists");
  if (trials == 0) throw fairdiv::ConfigError("trials", "must be >= 1");
  using namespace fairdiv;
  const auto spec = DistributionSpec::uniform();
  std::size_t greedy_bad = 0, hungarian_bad = 0, report_bad = 0, ef1_bad = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    RngStream rng(derive_seed(seed, k));
    const std::size_t n = 1 + rng.below(4);
    const std::size_t m = 1 + rng.below(7);

    const auto profile = sample_profile(n, m, rng);
    if (greedy_assignment(profile).assignment.has_value() !=
        oracle::exists_ef_assignment_bruteforce(profile).exists) {
      ++greedy_bad;
    }

    const std::size_t rows = 1 + rng.below(5);
    const std::size_t cols = rows + rng.below(3);
    std::vector<double> weights(rows * cols);
    std::vector<char> allowed(rows * cols);
    for (auto& w : weights) w = rng.uniform();
    for (auto& a : allowed) a = rng.uniform() < 0.7;
    const WeightedAssignmentProblem problem(rows, cols, weights, allowed);
    const auto fast = max_weight_assignment(problem);
    const auto brute = oracle::brute_max_weight(problem);
    if (fast.has_value() != brute.has_value() ||
        (fast && std::abs(fast->total_weight - *brute) > 1e-12)) {
      ++hungarian_bad;
    }

    const auto inst = sample_instance(n, m, spec, rng);
    std::vector<Bundle> bundles(n);
    for (Item j = 0; j < m; ++j) bundles[rng.below(n)].push_back(j);
    const auto report = fairness_report(inst, Allocation(bundles, m));
    if (report.envy_free != oracle::satisfies(inst, bundles, oracle::Criterion::kEnvyFree) ||
        report.efx != oracle::satisfies(inst, bundles, oracle::Criterion::kEfx) ||
        report.ef1 != oracle::satisfies(inst, bundles, oracle::Criterion::kEf1) ||
        report.proportional != oracle::satisfies(inst, bundles, oracle::Criterion::kProportional)) {
      ++report_bad;
    }
    if (!fairness_report(inst, *round_robin(inst).result.allocation).ef1) ++ef1_bad;
  }
  std::printf("check\ttrials\tdisagreements\n");
  std::printf("greedy-vs-bruteforce\t%zu\t%zu\n", trials, greedy_bad);
  std::printf("hungarian-vs-bruteforce\t%zu\t%zu\n", trials, hungarian_bad);
  std::printf("fairness-report-vs-definitions\t%zu\t%zu\n", trials, report_bad);
  std::printf("round-robin-ef1\t%zu\t%zu\n", trials, ef1_bad);
  return greedy_bad + hungarian_bad + report_bad + ef1_bad == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair division algorithms and Monte Carlo experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment preset from a JSON config, CSV out");
  std::string config_path;
  fairdiv::ConfigOverrides overrides;
  std::string experiment, out_path;
  std::size_t trials = 0, threads = 0;
  std::uint64_t seed = 0;
  run->add_option("--config", config_path, "JSON config file")->required();
  auto* opt_experiment = run->add_option("--experiment", experiment, "Preset name");
  auto* opt_trials = run->add_option("--trials", trials, "Trials per cell");
  auto* opt_seed = run->add_option("--seed", seed, "Master seed");
  auto* opt_threads = run->add_option("--threads", threads, "Worker threads");
  auto* opt_out = run->add_option("--out", out_path, "Output CSV path ('-' for stdout)");

  auto* alloc = app.add_subcommand("alloc", "Allocate one sampled instance, JSON to stdout");
  std::size_t alloc_n = 0, alloc_m = 0;
  std::string dist = "uniform", algo = "efx-auto";
  std::uint64_t alloc_seed = 1;
  alloc->add_option("--n", alloc_n, "Agents")->required();
  alloc->add_option("--m", alloc_m, "Items")->required();
  alloc->add_option("--dist", dist, "Distribution spec");
  alloc->add_option("--algo", algo, "rr | rr-rev | threshold | two-stage | efx-via-ef | max-assign | efx-auto | prop-auto");
  alloc->add_option("--seed", alloc_seed, "Seed");

  auto* ode = app.add_subcommand("ode", "Tabulate s, z(s), y(s) on a uniform grid of [0,1)");
  std::size_t points = 100;
  ode->add_option("--points", points, "Grid size");

  auto* check = app.add_subcommand("oracle", "Cross-validate fast algorithms against brute force");
  std::string suite = "tiny";
  std::size_t oracle_trials = 1000;
  std::uint64_t oracle_seed = 1;
  check->add_option("--suite", suite, "Suite name");
  check->add_option("--trials", oracle_trials, "Random instances");
  check->add_option("--seed", oracle_seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      if (*opt_experiment) overrides.experiment = experiment;
      if (*opt_trials) overrides.trials = trials;
      if (*opt_seed) overrides.seed = seed;
      if (*opt_threads) overrides.threads = threads;
      if (*opt_out) overrides.out_path = out_path;
      return cmd_run(config_path, overrides);
    }
    if (*alloc) return cmd_alloc(alloc_n, alloc_m, dist, algo, alloc_seed);
    if (*ode) return cmd_ode(points);
    if (*check) return cmd_oracle(suite, oracle_trials, oracle_seed);
  } catch (const fairdiv::ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return kExitConfig;
  } catch (const fairdiv::IoError& err) {
    std::cerr << "I/O error: " << err.what() << '\n';
    return kExitIo;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
