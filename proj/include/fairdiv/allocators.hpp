#pragma once

// Allocation algorithms: round-robin and its reversed-last-round variant,
// threshold and two-stage matchings for proportionality, the EF-based and
// maximum-assignment EFX algorithms, the two case-splitting dispatchers, and
// the generative process that reproduces round-robin's value tensor.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fairdiv/distributions.hpp"
#include "fairdiv/errors.hpp"
#include "fairdiv/matching.hpp"
#include "fairdiv/model.hpp"
#include "fairdiv/rng.hpp"

namespace fairdiv {

namespace tags {
inline constexpr std::string_view kRoundRobin = "round-robin";
inline constexpr std::string_view kReversedLastRound = "reversed-last-round";
inline constexpr std::string_view kThresholdMatching = "threshold-matching";
inline constexpr std::string_view kTwoStageMatching = "two-stage-matching";
inline constexpr std::string_view kEfxViaEf = "efx-via-ef";
inline constexpr std::string_view kMaximumAssignment = "maximum-assignment";
inline constexpr std::string_view kProportionalImpossible = "pigeonhole-null";
}  // namespace tags

struct AllocatorResult {
  std::optional<Allocation> allocation;  // nullopt is the algorithm's NULL / FAILURE
  std::string algorithm_tag;
  bool fallback_used = false;
  std::map<std::string, double> diagnostics;
};

struct Pick {
  std::size_t round;  // 1-based
  Agent agent;
  Item item;
  double value;  // picker's utility for the item
};

/// Pick log plus the value tensor X[i][i'][t] = agent i's utility for the t-th
/// item received by agent i' (t is 1-based).
class RoundRobinTrace {
 public:
  RoundRobinTrace(const Instance& inst, std::vector<Pick> picks)
      : agents_(inst.agents()), picks_(std::move(picks)), received_(inst.agents()) {
    values_.resize(agents_ * picks_.size());
    for (std::size_t k = 0; k < picks_.size(); ++k) {
      received_[picks_[k].agent].push_back(k);
      for (Agent i = 0; i < agents_; ++i) values_[i * picks_.size() + k] = inst(i, picks_[k].item);
    }
  }

  const std::vector<Pick>& picks() const noexcept { return picks_; }

  std::size_t received_count(Agent i) const { return received_.at(i).size(); }

  double value(Agent i, Agent receiver, std::size_t t) const {
    const auto& got = received_.at(receiver);
    if (t == 0 || t > got.size()) throw DomainError("agent did not receive a t-th item");
    return values_.at(i * picks_.size() + got[t - 1]);
  }

 private:
  std::size_t agents_;
  std::vector<Pick> picks_;
  std::vector<std::vector<std::size_t>> received_;
  std::vector<double> values_;
};

struct RoundRobinOutcome {
  AllocatorResult result;
  RoundRobinTrace trace;
};

namespace detail {

/// Runs a fixed picking sequence; each pick takes the picker's favourite
/// remaining item (lowest index on ties). Preference lists are sorted lazily.
inline RoundRobinOutcome run_picking_sequence(const Instance& inst, const std::vector<Agent>& order,
                                              std::size_t agents_per_round, std::string_view tag) {
  const std::size_t n = inst.agents();
  const std::size_t m = inst.items();
  std::vector<std::vector<Item>> preference(n);
  std::vector<std::size_t> cursor(n, 0);
  std::vector<char> taken(m, 0);
  std::vector<Bundle> bundles(n);
  std::vector<Pick> picks;
  picks.reserve(order.size());

  for (std::size_t step = 0; step < order.size(); ++step) {
    const Agent i = order[step];
    auto& prefs = preference[i];
    if (prefs.empty()) {
      prefs.resize(m);
      std::iota(prefs.begin(), prefs.end(), Item{0});
      const auto row = inst.row(i);
      std::stable_sort(prefs.begin(), prefs.end(), [&](Item a, Item b) { return row[a] > row[b]; });
    }
    std::size_t& c = cursor[i];
    while (taken[prefs[c]]) ++c;
    const Item j = prefs[c];
    taken[j] = 1;
    bundles[i].push_back(j);
    picks.push_back({step / agents_per_round + 1, i, j, inst(i, j)});
  }
  AllocatorResult result{Allocation(std::move(bundles), m), std::string(tag), false, {}};
  return {std::move(result), RoundRobinTrace(inst, std::move(picks))};
}

inline double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace detail

/// Agents 1..n pick in turn until the items run out.
inline RoundRobinOutcome round_robin(const Instance& inst) {
  std::vector<Agent> order(inst.items());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k % inst.agents();
  return detail::run_picking_sequence(inst, order, inst.agents(), tags::kRoundRobin);
}

/// r = floor(m/n) ordinary rounds, then the q = m - nr leftover picks go to
/// agents n, n-1, ..., n-q+1 in that order.
inline RoundRobinOutcome round_robin_reversed_last(const Instance& inst) {
  const std::size_t n = inst.agents();
  const std::size_t m = inst.items();
  const std::size_t r = m / n;
  const std::size_t q = m - n * r;
  std::vector<Agent> order;
  order.reserve(m);
  for (std::size_t t = 0; t < r; ++t) {
    for (Agent i = 0; i < n; ++i) order.push_back(i);
  }
  for (std::size_t k = 0; k < q; ++k) order.push_back(n - 1 - k);
  auto outcome = detail::run_picking_sequence(inst, order, n, tags::kReversedLastRound);
  outcome.result.diagnostics["r"] = static_cast<double>(r);
  outcome.result.diagnostics["q"] = static_cast<double>(q);
  return outcome;
}

/// Perfect matching of agents to `items` using only edges with u_i(j) >= tau,
/// as singleton bundles; nullopt when none exists.
inline std::optional<Allocation> threshold_matching(const Instance& inst, double tau,
                                                    const std::vector<Item>& items) {
  const std::size_t n = inst.agents();
  if (items.size() != n) throw PreconditionError("threshold_matching needs exactly n items");
  for (Item j : items) {
    if (j >= inst.items()) throw DomainError("item out of range");
  }
  const auto graph = BipartiteGraph::from_predicate(
      n, n, [&](std::size_t i, std::size_t k) { return inst(i, items[k]) >= tau; });
  const Matching matching = max_cardinality_matching(graph);
  if (matching.size() < n) return std::nullopt;
  std::vector<Bundle> bundles(n);
  for (Agent i = 0; i < n; ++i) bundles[i] = {items[matching.left_to_right[i]]};
  return Allocation(std::move(bundles), inst.items());
}

/// 1 - 1.1 log2(n) / (alpha n), clamped to [0,1].
inline double proportional_threshold(std::size_t n, double alpha) {
  const double nn = static_cast<double>(n);
  return detail::clamp_unit(1.0 - 1.1 * std::log2(nn) / (alpha * nn));
}

/// 1 - 2 log2(n) / (alpha n), clamped to [0,1].
inline double max_assignment_threshold(std::size_t n, double alpha) {
  const double nn = static_cast<double>(n);
  return detail::clamp_unit(1.0 - 2.0 * std::log2(nn) / (alpha * nn));
}

/// Per-item value floor checked on the balanced EF subroutine:
/// 1 - 2 log2(m) / (alpha n), clamped to [0,1].
inline double balanced_item_threshold(std::size_t n, std::size_t m, double alpha) {
  return detail::clamp_unit(1.0 - 2.0 * std::log2(static_cast<double>(m)) / (alpha * static_cast<double>(n)));
}

/// Stage 1 matches the first n items above tau. Stage 2 gives each agent still
/// below their proportional share one extra item from the rest that lifts them
/// to it; NULL if either stage has no saturating matching.
inline AllocatorResult two_stage_matching(const Instance& inst, double tau) {
  const std::size_t n = inst.agents();
  const std::size_t m = inst.items();
  if (m < n || m > 2 * n) throw PreconditionError("two_stage_matching needs n <= m <= 2n");

  AllocatorResult result{std::nullopt, std::string(tags::kTwoStageMatching), false, {}};
  result.diagnostics["tau"] = tau;
  std::vector<Item> first(n);
  std::iota(first.begin(), first.end(), Item{0});
  auto stage_one = threshold_matching(inst, tau, first);
  if (!stage_one) {
    result.diagnostics["failed_stage"] = 1;
    return result;
  }

  std::vector<Agent> violated;
  std::vector<double> own(n);
  for (Agent i = 0; i < n; ++i) {
    own[i] = bundle_utility(inst, i, stage_one->bundle(i));
    if (own[i] < proportional_share(inst, i)) violated.push_back(i);
  }
  result.diagnostics["violated"] = static_cast<double>(violated.size());

  // Edge iff adding the item makes the agent's bundle proportional.
  const std::size_t spare = m - n;
  const auto fix_graph = BipartiteGraph::from_predicate(violated.size(), spare, [&](std::size_t v, std::size_t k) {
    const Agent i = violated[v];
    return own[i] + inst(i, n + k) >= proportional_share(inst, i);
  });
  std::vector<std::size_t> all_violated(violated.size());
  std::iota(all_violated.begin(), all_violated.end(), std::size_t{0});
  const auto fixed = saturating_matching(fix_graph, all_violated);
  if (std::holds_alternative<HallViolation>(fixed)) {
    result.diagnostics["failed_stage"] = 2;
    return result;
  }
  const auto& matching = std::get<Matching>(fixed);
  std::vector<Bundle> bundles = stage_one->bundles();
  for (std::size_t v = 0; v < violated.size(); ++v) {
    bundles[violated[v]].push_back(n + matching.left_to_right[v]);
  }
  result.allocation = Allocation(std::move(bundles), m);
  return result;
}

struct BalancedOutcome {
  std::optional<Allocation> allocation;  // nullopt on FAILURE
  std::string failure;                   // "envy" or "low-value" on FAILURE
};

/// r successive maximum-weight perfect assignments over `items`, then a
/// post-hoc check that the partial allocation is envy-free and that every
/// item is worth at least balanced_item_threshold to its owner.
inline BalancedOutcome balanced_ef_subroutine(const Instance& inst, const std::vector<Item>& items,
                                              std::size_t r, double alpha) {
  const std::size_t n = inst.agents();
  if (r == 0) throw PreconditionError("balanced_ef_subroutine needs r >= 1");
  if (items.size() != r * n) throw PreconditionError("balanced_ef_subroutine needs exactly r*n items");
  for (Item j : items) {
    if (j >= inst.items()) throw DomainError("item out of range");
  }

  std::vector<Item> remaining = items;
  std::vector<Bundle> bundles(n);
  for (std::size_t round = 0; round < r; ++round) {
    const std::size_t cols = remaining.size();
    std::vector<double> weights(n * cols);
    for (Agent i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < cols; ++c) weights[i * cols + c] = inst(i, remaining[c]);
    }
    const auto assignment = max_weight_assignment(WeightedAssignmentProblem(n, cols, std::move(weights)));
    if (!assignment) throw std::logic_error("complete bipartite assignment reported infeasible");
    std::vector<char> used(cols, 0);
    for (Agent i = 0; i < n; ++i) {
      bundles[i].push_back(remaining[assignment->row_to_col[i]]);
      used[assignment->row_to_col[i]] = 1;
    }
    std::vector<Item> next;
    next.reserve(cols - n);
    for (std::size_t c = 0; c < cols; ++c) {
      if (!used[c]) next.push_back(remaining[c]);
    }
    remaining = std::move(next);
  }

  Allocation allocation(std::move(bundles), inst.items());
  if (!fairness_report(inst, allocation).envy_free) return {std::nullopt, "envy"};
  const double floor = balanced_item_threshold(n, inst.items(), alpha);
  for (Agent i = 0; i < n; ++i) {
    for (Item j : allocation.bundle(i)) {
      if (inst(i, j) < floor) return {std::nullopt, "low-value"};
    }
  }
  return {std::move(allocation), {}};
}

/// Balanced EF allocation of the first r*n items, then the q leftovers go one
/// each to agents n-q+1, ..., n in ascending item order.
inline AllocatorResult efx_via_ef(const Instance& inst, double alpha = 1.0) {
  const std::size_t n = inst.agents();
  const std::size_t m = inst.items();
  const std::size_t r = m / n;
  if (r < 2) throw PreconditionError("efx_via_ef needs floor(m/n) >= 2");
  const std::size_t q = m - r * n;

  AllocatorResult result{std::nullopt, std::string(tags::kEfxViaEf), false, {}};
  std::vector<Item> first(r * n);
  std::iota(first.begin(), first.end(), Item{0});
  auto balanced = balanced_ef_subroutine(inst, first, r, alpha);
  if (!balanced.allocation) {
    result.diagnostics[balanced.failure == "envy" ? "failed_envy" : "failed_low_value"] = 1;
    return result;
  }
  std::vector<Bundle> bundles = balanced.allocation->bundles();
  for (std::size_t k = 0; k < q; ++k) bundles[n - q + k].push_back(r * n + k);
  result.allocation = Allocation(std::move(bundles), m);
  return result;
}

/// Max-weight assignment over edges with u_i(j) >= tau; the q unused items go
/// one each to the agents in the first q places of a topological order of the
/// envy graph, so an envied extra-item holder is never ahead of its envier.
inline AllocatorResult maximum_assignment_efx(const Instance& inst, double tau) {
  const std::size_t n = inst.agents();
  const std::size_t m = inst.items();
  if (m < n) throw PreconditionError("maximum_assignment_efx needs m >= n");

  AllocatorResult result{std::nullopt, std::string(tags::kMaximumAssignment), false, {}};
  result.diagnostics["tau"] = tau;
  std::vector<char> allowed(n * m);
  for (Agent i = 0; i < n; ++i) {
    for (Item j = 0; j < m; ++j) allowed[i * m + j] = inst(i, j) >= tau;
  }
  const auto psi = max_weight_assignment(WeightedAssignmentProblem(n, m, inst.utilities(), std::move(allowed)));
  if (!psi) return result;

  Digraph envy(n);
  std::size_t envy_edges = 0;
  for (Agent i = 0; i < n; ++i) {
    const double own = inst(i, psi->row_to_col[i]);
    for (Agent other = 0; other < n; ++other) {
      if (other != i && own < inst(i, psi->row_to_col[other])) {
        envy.add_edge(i, other);
        ++envy_edges;
      }
    }
  }
  result.diagnostics["envy_edges"] = static_cast<double>(envy_edges);
  const auto sorted = topological_order(envy);
  if (std::holds_alternative<DirectedCycle>(sorted)) {
    throw std::logic_error("envy graph of a maximum-weight assignment has a cycle");
  }
  const auto& position = std::get<TopologicalOrder>(sorted).position;

  std::vector<char> used(m, 0);
  for (Item j : psi->row_to_col) used[j] = 1;
  std::vector<Item> unused;
  for (Item j = 0; j < m; ++j) {
    if (!used[j]) unused.push_back(j);
  }
  std::vector<Bundle> bundles(n);
  for (Agent i = 0; i < n; ++i) {
    bundles[i].push_back(psi->row_to_col[i]);
    if (position[i] < unused.size()) bundles[i].push_back(unused[position[i]]);
  }
  result.allocation = Allocation(std::move(bundles), m);
  return result;
}

/// ceil(log2(max(n, 2))): remainders above this count as "large".
inline std::size_t remainder_cutoff(std::size_t n) {
  return static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(std::max<std::size_t>(n, 2)))));
}

/// EFX case split on r = floor(m/n) and q = m mod n; a NULL from the matching
/// based algorithms falls back to the reversed-last-round round-robin.
inline AllocatorResult efx_dispatch(const Instance& inst, double alpha = 1.0) {
  const std::size_t n = inst.agents();
  const std::size_t m = inst.items();
  if (m <= n) return round_robin(inst).result;  // one pass, at most one item each
  const std::size_t r = m / n;
  const std::size_t q = m - r * n;
  if (q > remainder_cutoff(n)) return round_robin_reversed_last(inst).result;

  AllocatorResult result = r >= 2 ? efx_via_ef(inst, alpha)
                                  : maximum_assignment_efx(inst, max_assignment_threshold(n, alpha));
  if (result.allocation) return result;
  AllocatorResult fallback = round_robin_reversed_last(inst).result;
  fallback.fallback_used = true;
  for (const auto& [key, value] : result.diagnostics) fallback.diagnostics[key] = value;
  return fallback;
}

/// Proportionality case split: round-robin for m >= 2n, two-stage matching for
/// n <= m < 2n, NULL for m < n (some agent must end up empty-handed).
inline AllocatorResult prop_dispatch(const Instance& inst, double alpha = 1.0) {
  const std::size_t n = inst.agents();
  const std::size_t m = inst.items();
  if (m >= 2 * n) return round_robin(inst).result;
  if (m >= n) return two_stage_matching(inst, proportional_threshold(n, alpha));
  return {std::nullopt, std::string(tags::kProportionalImpossible), false, {}};
}

/// Value tensor produced by the generative process; NaN where an entry does
/// not exist (agent received fewer than t items).
class GenerativeTensor {
 public:
  GenerativeTensor(std::size_t n, std::size_t rounds)
      : n_(n), rounds_(rounds), values_(n * n * rounds, std::numeric_limits<double>::quiet_NaN()) {}

  std::size_t agents() const noexcept { return n_; }
  std::size_t rounds() const noexcept { return rounds_; }

  /// Agent i's value for the t-th item received by `receiver` (t 1-based).
  double value(Agent i, Agent receiver, std::size_t t) const {
    if (t == 0 || t > rounds_) throw DomainError("round out of range");
    return values_.at(index(i, receiver, t));
  }

  void set(Agent i, Agent receiver, std::size_t t, double v) { values_.at(index(i, receiver, t)) = v; }

 private:
  std::size_t index(Agent i, Agent receiver, std::size_t t) const {
    return ((t - 1) * n_ + receiver) * n_ + i;
  }

  std::size_t n_;
  std::size_t rounds_;
  std::vector<double> values_;
};

/// Samples the round-robin value tensor without building an instance: in round
/// t, picker i's own value is the max of the k = m+1-(t-1)n-i remaining items
/// capped at their previous pick; everyone else's value for that item is a
/// plain draw capped at their latest pick.
inline GenerativeTensor simulate_rr_generative(std::size_t n, std::size_t m, const DistributionSpec& spec,
                                               RngStream& rng) {
  if (n == 0 || m == 0) throw PreconditionError("simulate_rr_generative needs n >= 1 and m >= 1");
  const std::size_t rounds = (m + n - 1) / n;
  GenerativeTensor tensor(n, rounds);
  std::vector<double> latest(n, 1.0);    // X^i_{t-1}, then X^i_t once i has picked
  auto draw = [&](std::size_t k, double cap) {
    const double u = rng.uniform();
    return cap > 0.0 ? conditional_max_from_uniform(spec, k, cap, u) : 0.0;
  };
  for (std::size_t t = 1; t <= rounds; ++t) {
    const std::size_t pickers = std::min(n, m - (t - 1) * n);
    std::vector<double> before = latest;  // X^i_{t-1} for every agent
    for (Agent i = 0; i < pickers; ++i) {
      const std::size_t k = m - (t - 1) * n - i;  // items left before this pick
      const double own = draw(k, before[i]);
      tensor.set(i, i, t, own);
      latest[i] = own;
      for (Agent other = 0; other < i; ++other) tensor.set(other, i, t, draw(1, latest[other]));
      for (Agent other = i + 1; other < n; ++other) tensor.set(other, i, t, draw(1, before[other]));
    }
  }
  return tensor;
}

}  // namespace fairdiv
