#pragma once

// Envy-free assignment (one item per agent): the greedy algorithm, the Markov
// chain its (X, Y) counts follow on random rankings, and the ODE limit
// 2z - z ln(2z) = 1 - s that the chain tracks.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <queue>
#include <vector>

#include "fairdiv/errors.hpp"
#include "fairdiv/model.hpp"
#include "fairdiv/rng.hpp"

namespace fairdiv {

/// X_t = valid items not held by anyone, Y_t = agents currently holding an
/// item, recorded from (m, 0) after every step. 2 X_t + Y_t = 2m - t.
struct TrajectoryRecord {
  std::size_t m = 0;
  std::vector<std::size_t> x;
  std::vector<std::size_t> y;

  std::size_t length() const noexcept { return x.empty() ? 0 : x.size() - 1; }

  std::size_t max_y() const noexcept {
    std::size_t best = 0;
    for (std::size_t v : y) best = std::max(best, v);
    return best;
  }

  /// Exact integer check of 2 X_t + Y_t = 2m - t at every recorded step.
  bool satisfies_conservation() const noexcept {
    for (std::size_t t = 0; t < x.size(); ++t) {
      if (2 * x[t] + y[t] + t != 2 * m) return false;
    }
    return true;
  }
};

struct GreedyOutcome {
  std::optional<Assignment> assignment;  // nullopt when no envy-free assignment exists
  TrajectoryRecord trajectory;
};

/// Repeatedly take the lowest-indexed agent without an item and look at their
/// favourite valid item: claim it if free, otherwise invalidate it and evict
/// its holder. Succeeds iff valid items remain once everyone holds one.
/// Per-agent cursors only move forward, so the total work is O(n m).
inline GreedyOutcome greedy_assignment(const RankingProfile& profile) {
  const std::size_t n = profile.agents();
  const std::size_t m = profile.items();
  std::vector<Item> holding(n, kUnassigned);
  std::vector<Agent> holder(m, kUnassigned);
  std::vector<char> valid(m, 1);
  std::vector<std::size_t> cursor(n, 0);
  std::priority_queue<Agent, std::vector<Agent>, std::greater<>> idle;
  for (Agent i = 0; i < n; ++i) idle.push(i);

  GreedyOutcome out;
  auto& tr = out.trajectory;
  tr.m = m;
  std::size_t x = m;
  std::size_t y = 0;
  tr.x.push_back(x);
  tr.y.push_back(y);

  while (!idle.empty() && x + y > 0) {
    const Agent i = idle.top();
    const auto& ranking = profile.ranking(i);
    std::size_t& c = cursor[i];
    while (!valid[ranking[c]]) ++c;
    const Item j = ranking[c];
    if (holder[j] != kUnassigned) {
      const Agent evicted = holder[j];
      holding[evicted] = kUnassigned;
      holder[j] = kUnassigned;
      valid[j] = 0;
      idle.push(evicted);
      --y;
    } else {
      idle.pop();
      holding[i] = j;
      holder[j] = i;
      --x;
      ++y;
    }
    tr.x.push_back(x);
    tr.y.push_back(y);
  }
  if (x + y > 0) out.assignment = Assignment(std::move(holding));
  return out;
}

/// Free-running chain for t = 0..2m: X drops by one with probability
/// X_t / (2m - t - X_t); Y follows from the conservation identity.
inline TrajectoryRecord simulate_markov(std::size_t m, RngStream& rng) {
  if (m == 0) throw PreconditionError("simulate_markov needs m >= 1");
  TrajectoryRecord tr;
  tr.m = m;
  tr.x.resize(2 * m + 1);
  tr.y.resize(2 * m + 1);
  std::size_t x = m;
  for (std::size_t t = 0; t <= 2 * m; ++t) {
    tr.x[t] = x;
    tr.y[t] = 2 * m - t - 2 * x;
    if (t == 2 * m) break;
    const std::size_t live = 2 * m - t - x;  // X_t + Y_t > 0 for t < 2m
    const double p = static_cast<double>(x) / static_cast<double>(live);
    if (rng.uniform() < p) --x;
  }
  return tr;
}

/// z(s): the root on (0, 1/2] of g(z) = 2z - z ln(2z) - (1 - s), which is
/// strictly increasing there. Bisection to an x-bracket of 1e-12.
inline double ode_z(double s) {
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("ode_z needs s in [0,1)");
  auto g = [s](double z) { return 2.0 * z - z * std::log(2.0 * z) - (1.0 - s); };
  double lo = 0.0;
  double hi = 0.5;
  if (g(hi) <= 0.0) return hi;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  // The bracket endpoint with the smaller residual.
  return (lo > 0.0 && std::abs(g(lo)) < std::abs(g(hi))) ? lo : hi;
}

/// y(s) = z ln(1 / (2z)), the limiting Y_t / 2m.
inline double ode_y(double s) {
  const double z = ode_z(s);
  return z * std::log(1.0 / (2.0 * z));
}

struct PeakStats {
  double s_star;
  double z_star;
  double y_star;
  double grid_max;  // max of y over a 10^4-point grid of [0,1)
  bool verified;    // |grid_max - y_star| <= 1e-6
};

/// Peak of y(s): s* = 1 - 3/(2e), z* = y* = 1/(2e).
inline PeakStats peak_stats() {
  constexpr double kE = std::numbers::e;
  PeakStats stats{1.0 - 3.0 / (2.0 * kE), 1.0 / (2.0 * kE), 1.0 / (2.0 * kE), 0.0, false};
  constexpr std::size_t kGrid = 10000;
  for (std::size_t k = 0; k < kGrid; ++k) {
    stats.grid_max = std::max(stats.grid_max, ode_y(static_cast<double>(k) / kGrid));
  }
  stats.verified = std::abs(stats.grid_max - stats.y_star) <= 1e-6;
  return stats;
}

/// 2m z(t / 2m) for t = 0..2m-1, reusable across trajectories of equal m.
inline std::vector<double> ode_reference(std::size_t m) {
  std::vector<double> curve(2 * m);
  const double steps = 2.0 * static_cast<double>(m);
  for (std::size_t t = 0; t < 2 * m; ++t) curve[t] = steps * ode_z(static_cast<double>(t) / steps);
  return curve;
}

/// max_t |X_t - 2m z(t/2m)| / m over t = 0..2m-1, against a precomputed curve.
inline double trajectory_deviation(const TrajectoryRecord& tr, const std::vector<double>& reference) {
  if (tr.m == 0 || tr.length() != 2 * tr.m) throw PreconditionError("trajectory must run for 2m steps");
  if (reference.size() != 2 * tr.m) throw PreconditionError("reference curve has the wrong length");
  double worst = 0.0;
  for (std::size_t t = 0; t < 2 * tr.m; ++t) {
    worst = std::max(worst, std::abs(static_cast<double>(tr.x[t]) - reference[t]));
  }
  return worst / static_cast<double>(tr.m);
}

inline double trajectory_deviation(const TrajectoryRecord& tr) {
  if (tr.m == 0 || tr.length() != 2 * tr.m) throw PreconditionError("trajectory must run for 2m steps");
  return trajectory_deviation(tr, ode_reference(tr.m));
}

}  // namespace fairdiv
