#pragma once

// Bipartite matching, max-weight assignment with forbidden edges, Hall
// witnesses and topological ordering. Every tie resolves to the lowest index.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "fairdiv/errors.hpp"

namespace fairdiv {

inline constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

class BipartiteGraph {
 public:
  BipartiteGraph(std::size_t left_size, std::size_t right_size,
                 const std::vector<std::pair<std::size_t, std::size_t>>& edges = {})
      : right_size_(right_size), adjacency_(left_size) {
    for (auto [l, r] : edges) add_edge(l, r);
    finalize();
  }

  std::size_t left_size() const noexcept { return adjacency_.size(); }
  std::size_t right_size() const noexcept { return right_size_; }

  /// Sorted, duplicate-free right neighbours of a left vertex.
  const std::vector<std::size_t>& neighbors(std::size_t left) const { return adjacency_.at(left); }

  std::size_t edge_count() const noexcept {
    std::size_t count = 0;
    for (const auto& adj : adjacency_) count += adj.size();
    return count;
  }

  bool has_edge(std::size_t l, std::size_t r) const {
    const auto& adj = adjacency_.at(l);
    return std::binary_search(adj.begin(), adj.end(), r);
  }

  /// Builds the graph from a predicate over all (left, right) pairs.
  template <typename Pred>
  static BipartiteGraph from_predicate(std::size_t left_size, std::size_t right_size, Pred&& keep) {
    BipartiteGraph g(left_size, right_size);
    for (std::size_t l = 0; l < left_size; ++l) {
      for (std::size_t r = 0; r < right_size; ++r) {
        if (keep(l, r)) g.adjacency_[l].push_back(r);
      }
    }
    return g;
  }

 private:
  void add_edge(std::size_t l, std::size_t r) {
    if (l >= adjacency_.size() || r >= right_size_) throw DomainError("edge endpoint out of range");
    adjacency_[l].push_back(r);
  }

  void finalize() {
    for (auto& adj : adjacency_) {
      std::sort(adj.begin(), adj.end());
      adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
  }

  std::size_t right_size_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

struct Matching {
  std::vector<std::size_t> left_to_right;  // kNone when unmatched
  std::vector<std::size_t> right_to_left;

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(std::count_if(left_to_right.begin(), left_to_right.end(),
                                                  [](std::size_t r) { return r != kNone; }));
  }

  std::vector<std::pair<std::size_t, std::size_t>> edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t l = 0; l < left_to_right.size(); ++l) {
      if (left_to_right[l] != kNone) out.emplace_back(l, left_to_right[l]);
    }
    return out;
  }
};

namespace detail {

/// Hopcroft-Karp restricted to the left vertices flagged in `active`.
class HopcroftKarp {
 public:
  HopcroftKarp(const BipartiteGraph& g, const std::vector<char>& active)
      : g_(g),
        active_(active),
        match_left_(g.left_size(), kNone),
        match_right_(g.right_size(), kNone),
        dist_(g.left_size()),
        next_edge_(g.left_size()) {}

  Matching run() {
    while (bfs()) {
      std::fill(next_edge_.begin(), next_edge_.end(), 0);
      for (std::size_t l = 0; l < g_.left_size(); ++l) {
        if (active_[l] && match_left_[l] == kNone) dfs(l);
      }
    }
    return {match_left_, match_right_};
  }

 private:
  static constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();

  bool bfs() {
    std::queue<std::size_t> queue;
    for (std::size_t l = 0; l < g_.left_size(); ++l) {
      if (active_[l] && match_left_[l] == kNone) {
        dist_[l] = 0;
        queue.push(l);
      } else {
        dist_[l] = kInf;
      }
    }
    bool found = false;
    while (!queue.empty()) {
      const std::size_t l = queue.front();
      queue.pop();
      for (std::size_t r : g_.neighbors(l)) {
        const std::size_t partner = match_right_[r];
        if (partner == kNone) {
          found = true;
        } else if (dist_[partner] == kInf) {
          dist_[partner] = dist_[l] + 1;
          queue.push(partner);
        }
      }
    }
    return found;
  }

  bool dfs(std::size_t l) {
    const auto& adj = g_.neighbors(l);
    for (std::size_t& k = next_edge_[l]; k < adj.size(); ++k) {
      const std::size_t r = adj[k];
      const std::size_t partner = match_right_[r];
      if (partner == kNone || (dist_[partner] == dist_[l] + 1 && dfs(partner))) {
        match_left_[l] = r;
        match_right_[r] = l;
        ++k;
        return true;
      }
    }
    dist_[l] = kInf;
    return false;
  }

  const BipartiteGraph& g_;
  const std::vector<char>& active_;
  std::vector<std::size_t> match_left_;
  std::vector<std::size_t> match_right_;
  std::vector<std::size_t> dist_;
  std::vector<std::size_t> next_edge_;
};

}  // namespace detail

/// Maximum-cardinality matching, O(E sqrt(V)).
inline Matching max_cardinality_matching(const BipartiteGraph& g) {
  const std::vector<char> all(g.left_size(), 1);
  return detail::HopcroftKarp(g, all).run();
}

/// Left subset S with |N(S)| < |S|.
struct HallViolation {
  std::vector<std::size_t> left_set;
  std::vector<std::size_t> neighborhood;
};

/// A matching covering every vertex in `left_subset`, or a Hall violator.
inline std::variant<Matching, HallViolation> saturating_matching(const BipartiteGraph& g,
                                                                  const std::vector<std::size_t>& left_subset) {
  std::vector<char> active(g.left_size(), 0);
  for (std::size_t l : left_subset) {
    if (l >= g.left_size()) throw DomainError("subset vertex out of range");
    active[l] = 1;
  }
  Matching matching = detail::HopcroftKarp(g, active).run();
  auto uncovered = std::find_if(left_subset.begin(), left_subset.end(),
                                [&](std::size_t l) { return matching.left_to_right[l] == kNone; });
  if (uncovered == left_subset.end()) return matching;

  // Left vertices reachable by alternating paths from an uncovered vertex: all
  // their neighbours are matched back into the set, so |N(S)| = |S| - 1.
  std::vector<char> in_set(g.left_size(), 0);
  std::vector<char> seen_right(g.right_size(), 0);
  std::queue<std::size_t> queue;
  in_set[*uncovered] = 1;
  queue.push(*uncovered);
  while (!queue.empty()) {
    const std::size_t l = queue.front();
    queue.pop();
    for (std::size_t r : g.neighbors(l)) {
      if (seen_right[r]) continue;
      seen_right[r] = 1;
      const std::size_t partner = matching.right_to_left[r];
      if (partner != kNone && !in_set[partner]) {
        in_set[partner] = 1;
        queue.push(partner);
      }
    }
  }
  HallViolation violation;
  for (std::size_t l = 0; l < g.left_size(); ++l) {
    if (in_set[l]) violation.left_set.push_back(l);
  }
  for (std::size_t r = 0; r < g.right_size(); ++r) {
    if (seen_right[r]) violation.neighborhood.push_back(r);
  }
  return violation;
}

/// n x m weights with an allowed-edge mask (n <= m), row-major.
class WeightedAssignmentProblem {
 public:
  WeightedAssignmentProblem(std::size_t rows, std::size_t cols, std::vector<double> weights,
                            std::vector<char> allowed)
      : rows_(rows), cols_(cols), weights_(std::move(weights)), allowed_(std::move(allowed)) {
    if (weights_.size() != rows_ * cols_ || allowed_.size() != rows_ * cols_) {
      throw PreconditionError("weights and mask must both be n x m");
    }
    for (std::size_t k = 0; k < weights_.size(); ++k) {
      if (allowed_[k] && !std::isfinite(weights_[k])) throw PreconditionError("allowed weights must be finite");
    }
  }

  WeightedAssignmentProblem(std::size_t rows, std::size_t cols, std::vector<double> weights)
      : WeightedAssignmentProblem(rows, cols, std::move(weights), std::vector<char>(rows * cols, 1)) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double weight(std::size_t i, std::size_t j) const noexcept { return weights_[i * cols_ + j]; }
  bool allowed(std::size_t i, std::size_t j) const noexcept { return allowed_[i * cols_ + j] != 0; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> weights_;
  std::vector<char> allowed_;
};

struct WeightedAssignment {
  std::vector<std::size_t> row_to_col;
  double total_weight = 0.0;
};

/// Maximum-weight assignment of every row to a distinct column over allowed
/// edges; nullopt when no row-saturating matching exists. Hungarian method
/// with potentials, O(n^2 m).
inline std::optional<WeightedAssignment> max_weight_assignment(const WeightedAssignmentProblem& p) {
  const std::size_t n = p.rows();
  const std::size_t m = p.cols();
  if (n > m) throw PreconditionError("max_weight_assignment needs rows <= cols");

  // Feasibility first, so forbidden edges never need a sentinel weight.
  const auto allowed_graph =
      BipartiteGraph::from_predicate(n, m, [&](std::size_t i, std::size_t j) { return p.allowed(i, j); });
  if (max_cardinality_matching(allowed_graph).size() < n) return std::nullopt;

  // Minimise cost = -weight. 1-based arrays; column 0 is the virtual root.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<std::size_t> owner(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        if (p.allowed(i0 - 1, j - 1)) {
          const double cur = -p.weight(i0 - 1, j - 1) - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 == 0) throw std::logic_error("Hungarian search found no augmenting column");
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  WeightedAssignment result;
  result.row_to_col.assign(n, kNone);
  for (std::size_t j = 1; j <= m; ++j) {
    if (owner[j] != 0) result.row_to_col[owner[j] - 1] = j - 1;
  }
  for (std::size_t i = 0; i < n; ++i) result.total_weight += p.weight(i, result.row_to_col[i]);
  return result;
}

class Digraph {
 public:
  Digraph(std::size_t vertices, std::vector<std::pair<std::size_t, std::size_t>> edges)
      : out_(vertices) {
    for (auto [a, b] : edges) {
      if (a >= vertices || b >= vertices) throw DomainError("digraph edge out of range");
      out_[a].push_back(b);
    }
    for (auto& adj : out_) {
      std::sort(adj.begin(), adj.end());
      adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
  }

  explicit Digraph(std::size_t vertices) : out_(vertices) {}

  std::size_t vertices() const noexcept { return out_.size(); }
  const std::vector<std::size_t>& successors(std::size_t v) const { return out_.at(v); }

  void add_edge(std::size_t a, std::size_t b) {
    if (a >= out_.size() || b >= out_.size()) throw DomainError("digraph edge out of range");
    out_[a].push_back(b);
  }

 private:
  std::vector<std::vector<std::size_t>> out_;
};

struct TopologicalOrder {
  std::vector<std::size_t> order;     // order[k] = k-th vertex
  std::vector<std::size_t> position;  // position[v] = index of v in order
};

/// Directed cycle v0 -> v1 -> ... -> v0, rotated to start at its smallest vertex.
struct DirectedCycle {
  std::vector<std::size_t> vertices;
};

/// Kahn's algorithm, smallest ready vertex first.
inline std::variant<TopologicalOrder, DirectedCycle> topological_order(const Digraph& d) {
  const std::size_t n = d.vertices();
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t w : d.successors(v)) ++indegree[w];
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  TopologicalOrder result;
  result.position.assign(n, kNone);
  while (!ready.empty()) {
    const std::size_t v = ready.top();
    ready.pop();
    result.position[v] = result.order.size();
    result.order.push_back(v);
    for (std::size_t w : d.successors(v)) {
      if (--indegree[w] == 0) ready.push(w);
    }
  }
  if (result.order.size() == n) return result;

  // Every leftover vertex has a leftover predecessor: walk backwards until a
  // vertex repeats.
  std::vector<std::size_t> predecessor(n, kNone);
  for (std::size_t v = 0; v < n; ++v) {
    if (result.position[v] != kNone) continue;
    for (std::size_t w : d.successors(v)) {
      if (result.position[w] == kNone && predecessor[w] == kNone) predecessor[w] = v;
    }
  }
  std::size_t start = 0;
  while (result.position[start] != kNone) ++start;
  std::vector<std::size_t> visit_step(n, kNone);
  std::vector<std::size_t> walk;
  std::size_t v = start;
  while (visit_step[v] == kNone) {
    visit_step[v] = walk.size();
    walk.push_back(v);
    v = predecessor[v];
  }
  std::vector<std::size_t> cycle(walk.begin() + static_cast<std::ptrdiff_t>(visit_step[v]), walk.end());
  std::reverse(cycle.begin(), cycle.end());
  std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
  return DirectedCycle{std::move(cycle)};
}

}  // namespace fairdiv
