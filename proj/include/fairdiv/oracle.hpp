#pragma once

// Exhaustive ground-truth checkers for tiny instances. They evaluate the
// fairness definitions literally and share no code with the fast paths.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairdiv/errors.hpp"
#include "fairdiv/matching.hpp"
#include "fairdiv/model.hpp"

namespace fairdiv::oracle {

enum class Criterion { kEnvyFree, kEfx, kEf1, kProportional };

inline Criterion parse_criterion(std::string_view name) {
  if (name == "ef") return Criterion::kEnvyFree;
  if (name == "efx") return Criterion::kEfx;
  if (name == "ef1") return Criterion::kEf1;
  if (name == "prop") return Criterion::kProportional;
  throw PreconditionError("unknown criterion '" + std::string(name) + "'");
}

inline constexpr double kMaxAllocations = 1e7;
inline constexpr double kMaxInjections = 1e6;
inline constexpr std::size_t kMaxWeightRows = 8;

namespace detail {

inline double subset_sum(const Instance& inst, Agent i, const std::vector<Item>& bundle,
                         std::size_t skip = std::numeric_limits<std::size_t>::max()) {
  double total = 0.0;
  for (std::size_t k = 0; k < bundle.size(); ++k) {
    if (k != skip) total += inst(i, bundle[k]);
  }
  return total;
}

}  // namespace detail

/// Literal evaluation of one criterion on a (possibly partial) allocation.
inline bool satisfies(const Instance& inst, const std::vector<Bundle>& bundles, Criterion c) {
  const std::size_t n = inst.agents();
  for (Agent i = 0; i < n; ++i) {
    const double own = detail::subset_sum(inst, i, bundles[i]);
    if (c == Criterion::kProportional) {
      double everything = 0.0;
      for (Item j = 0; j < inst.items(); ++j) everything += inst(i, j);
      if (!(own >= everything / static_cast<double>(n))) return false;
      continue;
    }
    for (Agent other = 0; other < n; ++other) {
      if (other == i) continue;
      const auto& theirs = bundles[other];
      switch (c) {
        case Criterion::kEnvyFree:
          if (!(own >= detail::subset_sum(inst, i, theirs))) return false;
          break;
        case Criterion::kEfx:
          for (std::size_t k = 0; k < theirs.size(); ++k) {
            if (!(own >= detail::subset_sum(inst, i, theirs, k))) return false;
          }
          break;
        case Criterion::kEf1: {
          bool ok = own >= detail::subset_sum(inst, i, theirs);
          for (std::size_t k = 0; k < theirs.size() && !ok; ++k) {
            ok = own >= detail::subset_sum(inst, i, theirs, k);
          }
          if (!ok) return false;
          break;
        }
        case Criterion::kProportional:
          break;
      }
    }
  }
  return true;
}

struct FairAllocationResult {
  bool exists = false;
  std::optional<std::vector<Bundle>> witness;
};

/// Enumerates all n^m complete allocations, item 1's owner most significant,
/// and returns the first that satisfies the criterion.
inline FairAllocationResult exists_fair_allocation(const Instance& inst, Criterion c) {
  const std::size_t n = inst.agents();
  const std::size_t m = inst.items();
  if (std::pow(static_cast<double>(n), static_cast<double>(m)) > kMaxAllocations) {
    throw SizeError("n^m exceeds 10^7 allocations");
  }
  std::vector<std::size_t> owner(m, 0);
  while (true) {
    std::vector<Bundle> bundles(n);
    for (Item j = 0; j < m; ++j) bundles[owner[j]].push_back(j);
    if (satisfies(inst, bundles, c)) return {true, std::move(bundles)};
    std::size_t pos = m;
    while (pos > 0 && owner[pos - 1] + 1 == n) owner[--pos] = 0;
    if (pos == 0) return {};
    ++owner[pos - 1];
  }
}

namespace detail {

/// Visits every injection of `rows` agents into `cols` items in lexicographic
/// order of (psi(1), ..., psi(n)); stops when `visit` returns true.
template <typename Visit>
bool for_each_injection(std::size_t rows, std::size_t cols, Visit&& visit) {
  std::vector<std::size_t> psi(rows);
  std::vector<char> used(cols, 0);
  auto rec = [&](auto&& self, std::size_t i) -> bool {
    if (i == rows) return visit(psi);
    for (std::size_t j = 0; j < cols; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      psi[i] = j;
      const bool stop = self(self, i + 1);
      used[j] = 0;
      if (stop) return true;
    }
    return false;
  };
  return rec(rec, 0);
}

inline double injection_count(std::size_t rows, std::size_t cols) {
  if (rows > cols) return 0.0;
  double count = 1.0;
  for (std::size_t k = 0; k < rows; ++k) count *= static_cast<double>(cols - k);
  return count;
}

}  // namespace detail

struct EfAssignmentResult {
  bool exists = false;
  std::optional<Assignment> witness;
};

inline EfAssignmentResult exists_ef_assignment_bruteforce(const RankingProfile& profile) {
  const std::size_t n = profile.agents();
  const std::size_t m = profile.items();
  if (detail::injection_count(n, m) > kMaxInjections) throw SizeError("m!/(m-n)! exceeds 10^6 injections");
  std::vector<std::vector<std::size_t>> position(n);
  for (Agent i = 0; i < n; ++i) position[i] = profile.positions(i);

  EfAssignmentResult result;
  detail::for_each_injection(n, m, [&](const std::vector<std::size_t>& psi) {
    for (Agent i = 0; i < n; ++i) {
      for (Agent other = 0; other < n; ++other) {
        if (position[i][psi[other]] < position[i][psi[i]]) return false;
      }
    }
    result = {true, Assignment(psi)};
    return true;
  });
  return result;
}

/// Best total weight over allowed injections; nullopt when none is feasible.
inline std::optional<double> brute_max_weight(const WeightedAssignmentProblem& p) {
  if (p.rows() > kMaxWeightRows) throw SizeError("brute_max_weight supports at most 8 rows");
  std::optional<double> best;
  detail::for_each_injection(p.rows(), p.cols(), [&](const std::vector<std::size_t>& psi) {
    double total = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
      if (!p.allowed(i, psi[i])) return false;
      total += p.weight(i, psi[i]);
    }
    if (!best || total > *best) best = total;
    return false;
  });
  return best;
}

}  // namespace fairdiv::oracle
