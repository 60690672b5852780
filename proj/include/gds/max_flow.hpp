#pragma once

#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

#include "gds/scalar.hpp"

namespace gds {

/// Edmonds-Karp max-flow over an arbitrary ordered field. Shortest augmenting
/// paths keep the number of augmentations polynomial, so rational capacities
/// terminate with an exact answer.
template <Scalar T>
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes) : adjacency_(nodes) {}

  /// Returns the edge id; flow on it is read back with flow().
  std::size_t add_edge(std::size_t from, std::size_t to, const T& capacity) {
    const std::size_t id = edges_.size();
    edges_.push_back({to, capacity, T(0)});
    adjacency_[from].push_back(id);
    edges_.push_back({from, T(0), T(0)});
    adjacency_[to].push_back(id + 1);
    return id;
  }

  T run(std::size_t source, std::size_t sink) {
    T total = 0;
    std::vector<std::size_t> parent_edge(adjacency_.size());
    const std::size_t none = std::numeric_limits<std::size_t>::max();
    while (true) {
      std::fill(parent_edge.begin(), parent_edge.end(), none);
      std::queue<std::size_t> frontier;
      frontier.push(source);
      std::vector<bool> seen(adjacency_.size(), false);
      seen[source] = true;
      while (!frontier.empty() && !seen[sink]) {
        const std::size_t u = frontier.front();
        frontier.pop();
        for (std::size_t id : adjacency_[u]) {
          const Edge& e = edges_[id];
          if (seen[e.to] || !(e.capacity - e.flow > epsilon())) continue;
          seen[e.to] = true;
          parent_edge[e.to] = id;
          frontier.push(e.to);
        }
      }
      if (!seen[sink]) break;

      T push = edges_[parent_edge[sink]].capacity - edges_[parent_edge[sink]].flow;
      for (std::size_t v = sink; v != source; v = edges_[parent_edge[v] ^ 1].to) {
        const Edge& e = edges_[parent_edge[v]];
        push = min_of(push, T(e.capacity - e.flow));
      }
      for (std::size_t v = sink; v != source; v = edges_[parent_edge[v] ^ 1].to) {
        edges_[parent_edge[v]].flow += push;
        edges_[parent_edge[v] ^ 1].flow -= push;
      }
      total += push;
    }
    return total;
  }

  const T& flow(std::size_t edge_id) const { return edges_[edge_id].flow; }

  /// Nodes reachable from `source` in the residual graph (the source side of a
  /// minimum cut) after run().
  std::vector<bool> source_side(std::size_t source) const {
    std::vector<bool> seen(adjacency_.size(), false);
    std::queue<std::size_t> frontier;
    frontier.push(source);
    seen[source] = true;
    while (!frontier.empty()) {
      const std::size_t u = frontier.front();
      frontier.pop();
      for (std::size_t id : adjacency_[u]) {
        const Edge& e = edges_[id];
        if (!seen[e.to] && e.capacity - e.flow > epsilon()) {
          seen[e.to] = true;
          frontier.push(e.to);
        }
      }
    }
    return seen;
  }

 private:
  struct Edge {
    std::size_t to;
    T capacity;
    T flow;
  };

  static T epsilon() {
    if constexpr (scalar_traits<T>::exact) {
      return T(0);
    } else {
      return 1e-15;
    }
  }

  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

}  // namespace gds
