#include <gtest/gtest.h>

#include <cmath>

#include "fairdiv/allocators.hpp"
#include "fairdiv/oracle.hpp"
#include "fairdiv/stats.hpp"

using namespace fairdiv;

namespace {

const auto kUniform = DistributionSpec::uniform();

void expect_partition(const Allocation& alloc, std::size_t m, bool complete) {
  std::vector<int> seen(m, 0);
  for (const auto& b : alloc.bundles()) {
    for (Item j : b) ++seen[j];
  }
  for (Item j : alloc.unallocated()) ++seen[j];
  for (Item j = 0; j < m; ++j) ASSERT_EQ(seen[j], 1) << "item " << j;
  if (complete) {
    ASSERT_TRUE(alloc.complete());
  }
}

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

Instance random_instance(std::size_t n, std::size_t m, std::uint64_t seed) {
  RngStream rng(seed);
  return sample_instance(n, m, kUniform, rng);
}

}  // namespace

TEST(RoundRobin, SingleAgentTakesEverything) {
  const auto out = round_robin(Instance({{0.3, 0.1, 0.7}}));
  EXPECT_EQ(out.result.allocation->bundle(0), (Bundle{0, 1, 2}));
  EXPECT_EQ(out.result.algorithm_tag, tags::kRoundRobin);
}

TEST(RoundRobin, HandTrace) {
  const Instance inst({{0.9, 0.8, 0.3, 0.1}, {0.7, 0.6, 0.5, 0.2}});
  const auto out = round_robin(inst);
  EXPECT_EQ(out.result.allocation->bundle(0), (Bundle{0, 2}));
  EXPECT_EQ(out.result.allocation->bundle(1), (Bundle{1, 3}));
  const auto& picks = out.trace.picks();
  ASSERT_EQ(picks.size(), 4u);
  EXPECT_EQ(picks[2].round, 2u);
  EXPECT_EQ(picks[2].agent, 0u);
  EXPECT_EQ(picks[2].item, 2u);
  EXPECT_EQ(picks[2].value, 0.3);
  EXPECT_EQ(out.trace.value(1, 0, 2), 0.5);  // agent 1's value for agent 0's second item
  EXPECT_EQ(out.trace.received_count(1), 2u);
  EXPECT_THROW(out.trace.value(0, 0, 3), DomainError);
}

TEST(RoundRobin, TiesGoToLowestIndex) {
  const auto out = round_robin(Instance({{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}}));
  EXPECT_EQ(out.result.allocation->bundle(0), (Bundle{0, 2}));
  EXPECT_EQ(out.result.allocation->bundle(1), (Bundle{1}));
}

TEST(RoundRobin, PropertiesOnRandomInstances) {
  RngStream rng(51);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    const std::size_t m = rng.below(30);
    const auto inst = sample_instance(n, m, kUniform, rng);
    const auto out = round_robin(inst);
    const auto& alloc = *out.result.allocation;
    expect_partition(alloc, m, true);
    const auto report = fairness_report(inst, alloc);
    ASSERT_TRUE(report.ef1);
    const double first = bundle_utility(inst, 0, alloc.bundle(0));
    std::size_t smallest = m, largest = 0;
    for (Agent i = 0; i < n; ++i) {
      ASSERT_GE(first, bundle_utility(inst, 0, alloc.bundle(i)));
      smallest = std::min(smallest, alloc.bundle(i).size());
      largest = std::max(largest, alloc.bundle(i).size());
    }
    ASSERT_LE(largest - smallest, 1u);
    // Trace: each item picked once, per-agent values non-increasing.
    std::vector<double> last(n, 2.0);
    std::vector<char> picked(m, 0);
    for (const auto& p : out.trace.picks()) {
      ASSERT_FALSE(picked[p.item]);
      picked[p.item] = 1;
      ASSERT_LE(p.value, last[p.agent]);
      last[p.agent] = p.value;
    }
  }
}

TEST(RoundRobinReversedLast, OrderBookkeeping) {
  const Instance inst({{0.9, 0.8, 0.7, 0.6}, {0.9, 0.8, 0.7, 0.6}, {0.9, 0.8, 0.7, 0.6}});
  const auto out = round_robin_reversed_last(inst);
  std::vector<Agent> order;
  for (const auto& p : out.trace.picks()) order.push_back(p.agent);
  EXPECT_EQ(order, (std::vector<Agent>{0, 1, 2, 2}));
  EXPECT_EQ(out.result.allocation->bundle(2), (Bundle{2, 3}));
  EXPECT_EQ(out.result.diagnostics.at("r"), 1.0);
  EXPECT_EQ(out.result.diagnostics.at("q"), 1.0);
  EXPECT_EQ(out.result.algorithm_tag, tags::kReversedLastRound);
}

TEST(RoundRobinReversedLast, NoRemainderMatchesRoundRobin) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = random_instance(4, 12, seed);
    EXPECT_EQ(round_robin_reversed_last(inst).result.allocation->bundles(),
              round_robin(inst).result.allocation->bundles());
  }
}

TEST(RoundRobinReversedLast, ShortAgentsAreEfxTowardsLongAgents) {
  RngStream rng(52);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 2 + rng.below(7);
    const std::size_t m = n + rng.below(4 * n);
    const auto inst = sample_instance(n, m, kUniform, rng);
    const auto alloc = *round_robin_reversed_last(inst).result.allocation;
    expect_partition(alloc, m, true);
    const std::size_t q = m % n;
    for (Agent i = 0; i < n - q; ++i) {
      for (Agent other = n - q; other < n; ++other) ASSERT_TRUE(efx_towards(inst, alloc, i, other));
    }
  }
}

TEST(ThresholdMatching, Examples) {
  const Instance forced({{0.9, 0.85}, {0.95, 0.5}});
  const auto a = threshold_matching(forced, 0.8, {0, 1});
  ASSERT_TRUE(a);
  EXPECT_EQ(a->bundle(0), (Bundle{1}));
  EXPECT_EQ(a->bundle(1), (Bundle{0}));
  EXPECT_FALSE(threshold_matching(Instance({{0.9, 0.1}, {0.95, 0.2}}), 0.8, {0, 1}));
  EXPECT_THROW(threshold_matching(forced, 0.8, {0}), PreconditionError);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = random_instance(5, 9, seed);
    const auto alloc = threshold_matching(inst, 0.0, {8, 1, 2, 3, 4});
    ASSERT_TRUE(alloc);
    expect_partition(*alloc, 9, false);
  }
}

TEST(ThresholdMatching, MatchedValuesClearThreshold) {
  RngStream rng(53);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(10);
    const auto inst = sample_instance(n, n + 3, kUniform, rng);
    std::vector<Item> items(n);
    std::iota(items.begin(), items.end(), Item{3});
    const double tau = 0.5 * rng.uniform();
    if (const auto alloc = threshold_matching(inst, tau, items)) {
      for (Agent i = 0; i < n; ++i) {
        ASSERT_EQ(alloc->bundle(i).size(), 1u);
        ASSERT_GE(inst(i, alloc->bundle(i)[0]), tau);
      }
    }
  }
}

TEST(Thresholds, DefaultsAndClamping) {
  EXPECT_NEAR(proportional_threshold(200, 1.0), 1.0 - 1.1 * std::log2(200.0) / 200.0, 1e-15);
  EXPECT_NEAR(max_assignment_threshold(200, 1.0), 1.0 - 2.0 * std::log2(200.0) / 200.0, 1e-15);
  EXPECT_NEAR(balanced_item_threshold(200, 401, 1.0), 1.0 - 2.0 * std::log2(401.0) / 200.0, 1e-15);
  EXPECT_EQ(proportional_threshold(4, 0.1), 0.0);
  EXPECT_EQ(max_assignment_threshold(1, 1.0), 1.0);
}

TEST(TwoStageMatching, NobodyViolated) {
  const auto r = two_stage_matching(Instance({{0.9, 0.1, 0.05}, {0.1, 0.9, 0.05}}), 0.8);
  ASSERT_TRUE(r.allocation);
  EXPECT_EQ(r.allocation->bundle(0), (Bundle{0}));
  EXPECT_EQ(r.allocation->bundle(1), (Bundle{1}));
  EXPECT_EQ(r.diagnostics.at("violated"), 0.0);
}

TEST(TwoStageMatching, TooFewFixItems) {
  const auto r = two_stage_matching(Instance({{0.85, 0.8, 0.1}, {0.8, 0.85, 0.1}}), 0.8);
  EXPECT_FALSE(r.allocation);
  EXPECT_EQ(r.diagnostics.at("violated"), 2.0);
  EXPECT_EQ(r.diagnostics.at("failed_stage"), 2.0);
}

TEST(TwoStageMatching, SingleAgentFixedByExactlyEnough) {
  // 0.9 + 0.4 == 1.3 exactly in doubles, so the fix edge is present.
  const Instance inst({{0.9, 0.4}});
  const auto r = two_stage_matching(inst, 0.8);
  ASSERT_TRUE(r.allocation);
  EXPECT_EQ(r.allocation->bundle(0), (Bundle{0, 1}));
  EXPECT_TRUE(fairness_report(inst, *r.allocation).proportional);
}

TEST(TwoStageMatching, StageOneFailureAndPreconditions) {
  const auto r = two_stage_matching(Instance({{0.9, 0.1, 0.5}, {0.95, 0.2, 0.5}}), 0.8);
  EXPECT_FALSE(r.allocation);
  EXPECT_EQ(r.diagnostics.at("failed_stage"), 1.0);
  EXPECT_THROW(two_stage_matching(Instance({{0.5}, {0.5}}), 0.5), PreconditionError);
  EXPECT_THROW(two_stage_matching(Instance({{0.1, 0.2, 0.3}}), 0.5), PreconditionError);
}

TEST(TwoStageMatching, NonNullOutputIsProportional) {
  RngStream rng(54);
  int produced = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const std::size_t m = n + rng.below(n + 1);
    const auto inst = sample_instance(n, m, kUniform, rng);
    const double tau = trial % 2 == 0 ? proportional_threshold(n, 1.0) : 0.7 * rng.uniform();
    const auto r = two_stage_matching(inst, tau);
    if (!r.allocation) continue;
    ++produced;
    expect_partition(*r.allocation, m, false);
    ASSERT_TRUE(fairness_report(inst, *r.allocation).proportional);
  }
  EXPECT_GT(produced, 1000);
}

TEST(BalancedSubroutine, SingleRoundExample) {
  const Instance inst({{0.9, 0.2}, {0.3, 0.8}});
  const auto out = balanced_ef_subroutine(inst, {0, 1}, 1, 1.0);
  ASSERT_TRUE(out.allocation);
  EXPECT_EQ(out.allocation->bundle(0), (Bundle{0}));
  EXPECT_EQ(out.allocation->bundle(1), (Bundle{1}));
  EXPECT_TRUE(fairness_report(inst, *out.allocation).envy_free);
}

TEST(BalancedSubroutine, ReportsEnvyFailure) {
  // Both agents want the same two items most; someone must envy.
  const Instance inst({{0.9, 0.8, 0.1, 0.1}, {0.9, 0.8, 0.1, 0.1}});
  const auto out = balanced_ef_subroutine(inst, {0, 1, 2, 3}, 2, 1.0);
  EXPECT_FALSE(out.allocation);
  EXPECT_EQ(out.failure, "envy");
}

TEST(BalancedSubroutine, ReportsLowValueFailure) {
  // Envy-free diagonal, but every item sits below the floor 1 - 2*6/64.
  const std::size_t n = 64;
  std::vector<double> u(n * n, 0.05);
  for (Agent i = 0; i < n; ++i) u[i * n + i] = 0.5;
  const Instance inst(n, n, u);
  std::vector<Item> items(n);
  std::iota(items.begin(), items.end(), Item{0});
  const auto out = balanced_ef_subroutine(inst, items, 1, 1.0);
  EXPECT_FALSE(out.allocation);
  EXPECT_EQ(out.failure, "low-value");
}

TEST(BalancedSubroutine, Preconditions) {
  const Instance inst({{0.9, 0.2}, {0.3, 0.8}});
  EXPECT_THROW(balanced_ef_subroutine(inst, {0, 1}, 0, 1.0), PreconditionError);
  EXPECT_THROW(balanced_ef_subroutine(inst, {0}, 1, 1.0), PreconditionError);
}

TEST(BalancedSubroutine, SuccessfulOutputsAreBalancedEnvyFreeAndAboveFloor) {
  RngStream rng(55);
  int successes = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(20);
    const std::size_t r = 1 + rng.below(3);
    const auto inst = sample_instance(n, r * n + rng.below(n), kUniform, rng);
    std::vector<Item> items(r * n);
    std::iota(items.begin(), items.end(), Item{0});
    const auto out = balanced_ef_subroutine(inst, items, r, 1.0);
    if (!out.allocation) continue;
    ++successes;
    const double floor = balanced_item_threshold(n, inst.items(), 1.0);
    for (Agent i = 0; i < n; ++i) {
      ASSERT_EQ(out.allocation->bundle(i).size(), r);
      for (Item j : out.allocation->bundle(i)) ASSERT_GE(inst(i, j), floor);
    }
    ASSERT_TRUE(fairness_report(inst, *out.allocation).envy_free);
  }
  EXPECT_GT(successes, 0);
}

TEST(EfxViaEf, SizeBookkeeping) {
  const Instance inst({{0.9, 0.8, 0.1, 0.2, 0.5}, {0.1, 0.2, 0.9, 0.8, 0.5}});
  const auto r = efx_via_ef(inst);
  ASSERT_TRUE(r.allocation);
  EXPECT_EQ(r.allocation->bundle(0), (Bundle{0, 1}));
  EXPECT_EQ(r.allocation->bundle(1), (Bundle{2, 3, 4}));
  EXPECT_TRUE(fairness_report(inst, *r.allocation).efx);
  EXPECT_EQ(r.algorithm_tag, tags::kEfxViaEf);
}

TEST(EfxViaEf, NoRemainderIsSubroutineOutput) {
  const Instance inst({{0.9, 0.8, 0.1, 0.2}, {0.1, 0.2, 0.9, 0.8}});
  const auto r = efx_via_ef(inst);
  const auto sub = balanced_ef_subroutine(inst, {0, 1, 2, 3}, 2, 1.0);
  ASSERT_TRUE(r.allocation && sub.allocation);
  EXPECT_EQ(r.allocation->bundles(), sub.allocation->bundles());
}

TEST(EfxViaEf, PreconditionAndFailure) {
  EXPECT_THROW(efx_via_ef(Instance({{0.1, 0.2, 0.3}, {0.3, 0.2, 0.1}})), PreconditionError);
  const auto r = efx_via_ef(Instance({{0.9, 0.8, 0.1, 0.1}, {0.9, 0.8, 0.1, 0.1}}));
  EXPECT_FALSE(r.allocation);
  EXPECT_EQ(r.diagnostics.at("failed_envy"), 1.0);
}

// Floors frozen from tests/acceptance/calibration.md: 28 to 53 of 200 succeed,
// 26 to 52 are EFX, and every failure is envy.
TEST(EfxViaEf, CalibratedRateAtTwoHundredAgents) {
  std::size_t successes = 0, efx = 0, low_value = 0;
  for (std::uint64_t k = 0; k < 200; ++k) {
    RngStream rng(derive_seed(2026, k));
    const auto inst = sample_instance(200, 401, kUniform, rng);
    const auto r = efx_via_ef(inst);
    low_value += r.diagnostics.count("failed_low_value");
    if (!r.allocation) continue;
    ++successes;
    efx += fairness_report(inst, *r.allocation).efx;
  }
  EXPECT_GE(successes, 20u);
  EXPECT_GE(efx, 20u);
  EXPECT_LE(efx, successes);
  EXPECT_EQ(low_value, 0u);
}

TEST(MaximumAssignment, HandTrace) {
  const Instance inst({{0.9, 0.6, 0.3}, {0.7, 0.95, 0.4}});
  const auto r = maximum_assignment_efx(inst, 0.5);
  ASSERT_TRUE(r.allocation);
  EXPECT_EQ(r.allocation->bundle(0), (Bundle{0, 2}));
  EXPECT_EQ(r.allocation->bundle(1), (Bundle{1}));
  EXPECT_EQ(r.diagnostics.at("envy_edges"), 0.0);
}

TEST(MaximumAssignment, AllBelowThresholdIsNull) {
  EXPECT_FALSE(maximum_assignment_efx(Instance({{0.1, 0.2, 0.3}, {0.3, 0.2, 0.1}}), 0.5).allocation);
  EXPECT_THROW(maximum_assignment_efx(Instance({{0.1}, {0.2}}), 0.0), PreconditionError);
}

TEST(MaximumAssignment, EnvyGraphAcyclicAndOutputEfx) {
  RngStream rng(56);
  int produced = 0, efx = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const std::size_t m = n + rng.below(n);
    const auto inst = sample_instance(n, m, kUniform, rng);
    const double tau = trial % 2 == 0 ? max_assignment_threshold(n, 1.0) : rng.uniform() * 0.5;
    AllocatorResult r;
    ASSERT_NO_THROW(r = maximum_assignment_efx(inst, tau));  // throws on a cyclic envy graph
    if (!r.allocation) continue;
    ++produced;
    expect_partition(*r.allocation, m, true);
    efx += fairness_report(inst, *r.allocation).efx;
  }
  EXPECT_GT(produced, 5000);
  EXPECT_GT(efx, 0);
}

TEST(EfxDispatch, FewerItemsThanAgents) {
  RngStream rng(57);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = sample_instance(5, 3, kUniform, rng);
    const auto r = efx_dispatch(inst);
    ASSERT_TRUE(r.allocation);
    std::size_t singles = 0, empty = 0;
    for (const auto& b : r.allocation->bundles()) {
      singles += b.size() == 1;
      empty += b.empty();
    }
    EXPECT_EQ(singles, 3u);
    EXPECT_EQ(empty, 2u);
    EXPECT_TRUE(fairness_report(inst, *r.allocation).efx);
  }
}

TEST(EfxDispatch, CaseSplit) {
  EXPECT_EQ(remainder_cutoff(100), 7u);
  EXPECT_EQ(remainder_cutoff(1), 1u);
  EXPECT_EQ(remainder_cutoff(2), 1u);
  EXPECT_EQ(remainder_cutoff(200), 8u);

  const auto big_q = efx_dispatch(random_instance(100, 350, 1));
  EXPECT_EQ(big_q.algorithm_tag, tags::kReversedLastRound);
  EXPECT_FALSE(big_q.fallback_used);

  const auto r_one = efx_dispatch(random_instance(100, 103, 1));
  EXPECT_FALSE(r_one.fallback_used);
  EXPECT_EQ(r_one.algorithm_tag, tags::kMaximumAssignment);

  const auto r_two = efx_dispatch(random_instance(50, 103, 1));
  EXPECT_TRUE(r_two.algorithm_tag == tags::kEfxViaEf || r_two.fallback_used);
}

TEST(EfxDispatch, FallbackIsReversedRoundRobin) {
  // Identical agents: the balanced EF subroutine must fail on envy.
  const Instance inst({{0.9, 0.8, 0.1, 0.1, 0.3}, {0.9, 0.8, 0.1, 0.1, 0.3}});
  const auto r = efx_dispatch(inst);
  EXPECT_TRUE(r.fallback_used);
  EXPECT_EQ(r.algorithm_tag, tags::kReversedLastRound);
  EXPECT_EQ(r.allocation->bundles(), round_robin_reversed_last(inst).result.allocation->bundles());
  EXPECT_EQ(r.diagnostics.at("failed_envy"), 1.0);
}

TEST(EfxDispatch, AlwaysReturnsACompleteAllocation) {
  RngStream rng(58);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng.below(10);
    const std::size_t m = rng.below(5 * n);
    const auto inst = sample_instance(n, m, kUniform, rng);
    const auto r = efx_dispatch(inst);
    ASSERT_TRUE(r.allocation);
    expect_partition(*r.allocation, m, true);
  }
}

TEST(PropDispatch, Branches) {
  EXPECT_EQ(prop_dispatch(random_instance(10, 20, 2)).algorithm_tag, tags::kRoundRobin);
  EXPECT_EQ(prop_dispatch(random_instance(10, 19, 2)).algorithm_tag, tags::kTwoStageMatching);
  EXPECT_EQ(prop_dispatch(random_instance(10, 10, 2)).algorithm_tag, tags::kTwoStageMatching);
  const auto null = prop_dispatch(random_instance(10, 9, 2));
  EXPECT_FALSE(null.allocation);
  EXPECT_EQ(null.algorithm_tag, tags::kProportionalImpossible);
  // Brute force agrees that nothing is proportional when m < n and all values are positive.
  const Instance small({{0.3, 0.6}, {0.2, 0.7}, {0.5, 0.1}});
  EXPECT_FALSE(oracle::exists_fair_allocation(small, oracle::Criterion::kProportional).exists);
  EXPECT_FALSE(prop_dispatch(small).allocation);
}

TEST(Generative, SingleAgentPicksAreDecreasing) {
  RngStream rng(59);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto t = simulate_rr_generative(1, 2, kUniform, rng);
    ASSERT_GE(t.value(0, 0, 1), t.value(0, 0, 2));
  }
}

TEST(Generative, ValuesInUnitIntervalAndMissingEntriesAreNan) {
  RngStream rng(60);
  const auto t = simulate_rr_generative(5, 17, kUniform, rng);
  EXPECT_EQ(t.rounds(), 4u);
  for (Agent i = 0; i < 5; ++i) {
    for (Agent r = 0; r < 5; ++r) {
      for (std::size_t s = 1; s <= 4; ++s) {
        const double v = t.value(i, r, s);
        if (s == 4 && r >= 2) {
          EXPECT_TRUE(std::isnan(v));
        } else {
          EXPECT_GE(v, 0.0);
          EXPECT_LE(v, 1.0);
        }
      }
    }
  }
  EXPECT_THROW(t.value(0, 0, 5), DomainError);
  EXPECT_THROW(simulate_rr_generative(0, 3, kUniform, rng), PreconditionError);
}

// Entries of the generative tensor and of real round-robin runs share a law.
TEST(Generative, MatchesRoundRobinValueTensor) {
  const std::size_t n = 5, m = 17, trials = 20000;
  struct Entry {
    Agent i, receiver;
    std::size_t t;
  };
  const std::vector<Entry> entries = {{0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {4, 4, 1}, {2, 1, 2},
                                      {3, 3, 3}, {0, 4, 3}, {1, 1, 4}, {4, 0, 4}};
  for (const auto& spec : {kUniform, DistributionSpec::piecewise_linear({{0, 1.5}, {1, 0.5}})}) {
    std::vector<std::vector<double>> gen(entries.size()), real(entries.size());
    RngStream a(61), b(62);
    for (std::size_t k = 0; k < trials; ++k) {
      const auto tensor = simulate_rr_generative(n, m, spec, a);
      const auto trace = round_robin(sample_instance(n, m, spec, b)).trace;
      for (std::size_t e = 0; e < entries.size(); ++e) {
        gen[e].push_back(tensor.value(entries[e].i, entries[e].receiver, entries[e].t));
        real[e].push_back(trace.value(entries[e].i, entries[e].receiver, entries[e].t));
      }
    }
    for (std::size_t e = 0; e < entries.size(); ++e) {
      EXPECT_LE(ks_two_sample(gen[e], real[e]), 0.025)
          << spec.to_string() << " entry (" << entries[e].i << "," << entries[e].receiver << "," << entries[e].t << ")";
    }
  }
}
