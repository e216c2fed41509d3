#pragma once

// Instances with additive utilities, allocations, assignments and the fairness
// predicates (EF, EF1, EFX, proportionality). Agents and items are 0-based.
// All fairness comparisons are exact on stored doubles.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairdiv/distributions.hpp"
#include "fairdiv/errors.hpp"
#include "fairdiv/rng.hpp"

namespace fairdiv {

using Agent = std::size_t;
using Item = std::size_t;
using Bundle = std::vector<Item>;

/// n agents x m items, utilities in [0,1], stored row-major.
class Instance {
 public:
  Instance(std::size_t n, std::size_t m, std::vector<double> utilities)
      : n_(n), m_(m), utilities_(std::move(utilities)) {
    if (n_ == 0) throw PreconditionError("an instance needs at least one agent");
    if (utilities_.size() != n_ * m_) throw PreconditionError("utility matrix must be n x m");
    for (double u : utilities_) {
      if (!(u >= 0.0 && u <= 1.0)) throw DomainError("utilities must lie in [0,1]");
    }
  }

  Instance(const std::vector<std::vector<double>>& rows)
      : Instance(rows.size(), rows.empty() ? 0 : rows.front().size(), flatten(rows)) {}

  std::size_t agents() const noexcept { return n_; }
  std::size_t items() const noexcept { return m_; }

  double operator()(Agent i, Item j) const noexcept { return utilities_[i * m_ + j]; }

  std::span<const double> row(Agent i) const noexcept {
    return {utilities_.data() + i * m_, m_};
  }

  const std::vector<double>& utilities() const noexcept { return utilities_; }

 private:
  static std::vector<double> flatten(const std::vector<std::vector<double>>& rows) {
    std::vector<double> flat;
    for (const auto& row : rows) {
      if (row.size() != rows.front().size()) throw PreconditionError("ragged utility matrix");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    return flat;
  }

  std::size_t n_;
  std::size_t m_;
  std::vector<double> utilities_;
};

/// Possibly partial allocation: disjoint bundles (kept sorted) plus the
/// unallocated remainder.
class Allocation {
 public:
  Allocation(std::vector<Bundle> bundles, std::size_t items) : bundles_(std::move(bundles)) {
    std::vector<char> seen(items, 0);
    for (auto& bundle : bundles_) {
      std::sort(bundle.begin(), bundle.end());
      for (Item j : bundle) {
        if (j >= items) throw DomainError("bundle item " + std::to_string(j) + " out of range");
        if (seen[j]) throw PreconditionError("item " + std::to_string(j) + " allocated twice");
        seen[j] = 1;
      }
    }
    for (Item j = 0; j < items; ++j) {
      if (!seen[j]) unallocated_.push_back(j);
    }
  }

  std::size_t agents() const noexcept { return bundles_.size(); }
  const std::vector<Bundle>& bundles() const noexcept { return bundles_; }
  const Bundle& bundle(Agent i) const { return bundles_.at(i); }
  const std::vector<Item>& unallocated() const noexcept { return unallocated_; }
  bool complete() const noexcept { return unallocated_.empty(); }

 private:
  std::vector<Bundle> bundles_;
  std::vector<Item> unallocated_;
};

inline constexpr Item kUnassigned = std::numeric_limits<Item>::max();

/// Injection agent -> item, kUnassigned for agents without an item.
class Assignment {
 public:
  explicit Assignment(std::vector<Item> assigned) : assigned_(std::move(assigned)) {
    std::vector<Item> used;
    for (Item j : assigned_) {
      if (j != kUnassigned) used.push_back(j);
    }
    std::sort(used.begin(), used.end());
    if (std::adjacent_find(used.begin(), used.end()) != used.end()) {
      throw PreconditionError("assignment maps two agents to the same item");
    }
  }

  std::size_t agents() const noexcept { return assigned_.size(); }
  Item operator[](Agent i) const { return assigned_.at(i); }
  const std::vector<Item>& items() const noexcept { return assigned_; }

  bool complete() const noexcept {
    return std::none_of(assigned_.begin(), assigned_.end(), [](Item j) { return j == kUnassigned; });
  }

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<Item> assigned_;
};

/// One strict ranking per agent, most preferred first.
class RankingProfile {
 public:
  RankingProfile(std::size_t items, std::vector<std::vector<Item>> orderings)
      : m_(items), orderings_(std::move(orderings)) {
    if (orderings_.empty()) throw PreconditionError("a profile needs at least one agent");
    std::vector<char> seen;
    for (const auto& order : orderings_) {
      if (order.size() != m_) throw PreconditionError("each ranking must list every item once");
      seen.assign(m_, 0);
      for (Item j : order) {
        if (j >= m_ || seen[j]) throw PreconditionError("ranking is not a permutation of the items");
        seen[j] = 1;
      }
    }
  }

  std::size_t agents() const noexcept { return orderings_.size(); }
  std::size_t items() const noexcept { return m_; }
  const std::vector<Item>& ranking(Agent i) const { return orderings_.at(i); }
  const std::vector<std::vector<Item>>& orderings() const noexcept { return orderings_; }

  /// position[j] = rank of item j for agent i (0 = favourite).
  std::vector<std::size_t> positions(Agent i) const {
    std::vector<std::size_t> position(m_);
    const auto& order = orderings_.at(i);
    for (std::size_t r = 0; r < m_; ++r) position[order[r]] = r;
    return position;
  }

 private:
  std::size_t m_;
  std::vector<std::vector<Item>> orderings_;
};

/// First violation found. `other` is unset for a pure proportionality failure;
/// `item` names an item whose removal does not kill the envy.
struct Witness {
  Agent agent;
  std::optional<Agent> other;
  std::optional<Item> item;

  friend bool operator==(const Witness&, const Witness&) = default;
};

struct FairnessReport {
  bool envy_free = true;
  bool ef1 = true;
  bool efx = true;
  bool proportional = true;
  std::optional<Witness> witness;
};

inline Instance sample_instance(std::size_t n, std::size_t m, const DistributionSpec& spec,
                                RngStream& rng) {
  std::vector<double> utilities(n * m);
  if (std::holds_alternative<UniformKind>(spec.kind())) {
    for (double& u : utilities) u = rng.uniform();
  } else {
    for (double& u : utilities) u = sample(spec, rng);
  }
  return Instance(n, m, std::move(utilities));
}

/// n independent uniformly random rankings by Fisher-Yates. Under a non-atomic
/// value distribution this is exactly the law of rankings_from_instance.
inline RankingProfile sample_profile(std::size_t n, std::size_t m, RngStream& rng) {
  std::vector<std::vector<Item>> orderings(n, std::vector<Item>(m));
  for (auto& order : orderings) {
    std::iota(order.begin(), order.end(), Item{0});
    for (std::size_t k = m; k > 1; --k) {
      std::swap(order[k - 1], order[rng.below(k)]);
    }
  }
  return RankingProfile(m, std::move(orderings));
}

/// Additive utility of agent i for a set of items, summed in the given order.
inline double bundle_utility(const Instance& inst, Agent i, std::span<const Item> bundle) {
  if (i >= inst.agents()) throw DomainError("agent out of range");
  double total = 0.0;
  for (Item j : bundle) {
    if (j >= inst.items()) throw DomainError("item " + std::to_string(j) + " out of range");
    total += inst(i, j);
  }
  return total;
}

/// u_i(M) over all m items in index order.
inline double total_utility(const Instance& inst, Agent i) {
  double total = 0.0;
  for (double u : inst.row(i)) total += u;
  return total;
}

/// u_i(M) / n, the proportional share.
inline double proportional_share(const Instance& inst, Agent i) {
  return total_utility(inst, i) / static_cast<double>(inst.agents());
}

namespace detail {

inline double sum_without(const Instance& inst, Agent i, const Bundle& bundle, std::size_t skip) {
  double total = 0.0;
  for (std::size_t k = 0; k < bundle.size(); ++k) {
    if (k != skip) total += inst(i, bundle[k]);
  }
  return total;
}

}  // namespace detail

inline FairnessReport fairness_report(const Instance& inst, const Allocation& alloc) {
  if (alloc.agents() != inst.agents()) throw PreconditionError("allocation has the wrong agent count");
  const std::size_t n = inst.agents();
  FairnessReport report;
  std::optional<Witness> proportional_witness;

  for (Agent i = 0; i < n; ++i) {
    const double own = bundle_utility(inst, i, alloc.bundle(i));
    if (!(own >= proportional_share(inst, i))) {
      report.proportional = false;
      if (!proportional_witness) proportional_witness = Witness{i, std::nullopt, std::nullopt};
    }
    for (Agent other = 0; other < n; ++other) {
      if (other == i) continue;
      const Bundle& theirs = alloc.bundle(other);
      if (own >= bundle_utility(inst, i, theirs)) continue;  // removals only shrink the sum

      report.envy_free = false;
      std::optional<Item> efx_breaker;
      bool some_removal_works = false;
      for (std::size_t k = 0; k < theirs.size(); ++k) {
        if (own >= detail::sum_without(inst, i, theirs, k)) {
          some_removal_works = true;
        } else if (!efx_breaker) {
          efx_breaker = theirs[k];
        }
      }
      if (efx_breaker) report.efx = false;
      if (!some_removal_works) report.ef1 = false;
      if (!report.witness) report.witness = Witness{i, other, efx_breaker};
    }
  }
  if (!report.witness) report.witness = proportional_witness;
  return report;
}

struct EfCheck {
  bool envy_free = true;
  std::optional<std::pair<Agent, Agent>> witness;  // (envious agent, envied agent)
};

/// Envy-freeness of a complete assignment under rankings: nobody ranks another
/// agent's item above their own.
inline EfCheck is_ef_assignment(const RankingProfile& profile, const Assignment& assignment) {
  if (assignment.agents() != profile.agents()) throw PreconditionError("assignment has the wrong agent count");
  if (!assignment.complete()) throw PreconditionError("every agent must be assigned");
  for (Agent i = 0; i < profile.agents(); ++i) {
    const auto position = profile.positions(i);
    for (Agent other = 0; other < profile.agents(); ++other) {
      if (other != i && position[assignment[other]] < position[assignment[i]]) {
        return {false, std::pair{i, other}};
      }
    }
  }
  return {};
}

inline EfCheck is_ef_assignment(const Instance& inst, const Assignment& assignment) {
  if (assignment.agents() != inst.agents()) throw PreconditionError("assignment has the wrong agent count");
  if (!assignment.complete()) throw PreconditionError("every agent must be assigned");
  for (Agent i = 0; i < inst.agents(); ++i) {
    for (Agent other = 0; other < inst.agents(); ++other) {
      if (other != i && inst(i, assignment[i]) < inst(i, assignment[other])) {
        return {false, std::pair{i, other}};
      }
    }
  }
  return {};
}

/// Sort each agent's items by utility, descending; ties go to the lower index.
inline RankingProfile rankings_from_instance(const Instance& inst) {
  std::vector<std::vector<Item>> orderings(inst.agents(), std::vector<Item>(inst.items()));
  for (Agent i = 0; i < inst.agents(); ++i) {
    auto& order = orderings[i];
    std::iota(order.begin(), order.end(), Item{0});
    const auto row = inst.row(i);
    std::stable_sort(order.begin(), order.end(), [&](Item a, Item b) { return row[a] > row[b]; });
  }
  return RankingProfile(inst.items(), std::move(orderings));
}

}  // namespace fairdiv
