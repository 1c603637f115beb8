#pragma once

// Builders and brute-force oracles shared by the unit and acceptance suites.
// The oracles work from the raw uid/parent strings and never touch the index
// arrays a Cascade computes for itself.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "cascadekit/corpus.hpp"

namespace cascadekit::testing {

// Cascade from a parent vector: parents[i] is the parent index of node i
// (-1 for the root). Node uids are "n<i>"; times default to the index's depth.
inline Cascade from_parents(const std::vector<int>& parents, std::string id = "c",
                            Label label = Label::Unlabeled, std::vector<double> times = {}) {
  std::vector<CascadeNode> nodes;
  std::vector<double> depth(parents.size(), 0.0);
  for (std::size_t i = 0; i < parents.size(); ++i) {
    for (int j = parents[i]; j >= 0; j = parents[static_cast<std::size_t>(j)]) depth[i] += 1.0;
  }
  for (std::size_t i = 0; i < parents.size(); ++i) {
    CascadeNode n;
    n.uid = "n" + std::to_string(i);
    if (parents[i] >= 0) n.parent = "n" + std::to_string(parents[i]);
    n.t = times.empty() ? depth[i] : times[i];
    nodes.push_back(std::move(n));
  }
  return Cascade(std::move(id), label, std::move(nodes));
}

inline Cascade chain(std::size_t n, std::string id = "chain", Label label = Label::Unlabeled) {
  std::vector<int> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<int>(i) - 1;
  return from_parents(p, std::move(id), label);
}

// Center plus `leaves` leaves.
inline Cascade star(std::size_t leaves, std::string id = "star", Label label = Label::Unlabeled) {
  std::vector<int> p(leaves + 1, 0);
  p[0] = -1;
  return from_parents(p, std::move(id), label);
}

// Uniform random recursive tree on n nodes with shuffled node order, so the
// root is not always first in the list.
inline Cascade random_tree(std::size_t n, std::uint64_t seed, std::string id = "rand") {
  std::mt19937_64 rng(seed);
  std::vector<int> parent(n, -1);
  for (std::size_t i = 1; i < n; ++i) {
    parent[i] = static_cast<int>(std::uniform_int_distribution<std::size_t>(0, i - 1)(rng));
  }
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  // Node i of the tree is placed at slot perm[i].
  std::vector<int> shuffled(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    shuffled[perm[i]] = parent[i] < 0 ? -1 : static_cast<int>(perm[static_cast<std::size_t>(parent[i])]);
  }
  return from_parents(shuffled, std::move(id));
}

struct OracleMetrics {
  std::size_t depth = 0;
  std::size_t max_breadth = 0;
  std::size_t diameter = 0;
  double virality = 0.0;  // NaN-free only for n >= 2
};

// All-pairs BFS over the undirected tree rebuilt from uid strings.
inline OracleMetrics brute_force_metrics(const Cascade& c) {
  std::map<std::string, std::vector<std::string>> adj;
  std::string root;
  for (const auto& n : c.nodes()) {
    adj[n.uid];
    if (n.parent) {
      adj[n.uid].push_back(*n.parent);
      adj[*n.parent].push_back(n.uid);
    } else {
      root = n.uid;
    }
  }
  const auto bfs = [&](const std::string& from) {
    std::map<std::string, std::size_t> dist{{from, 0}};
    std::queue<std::string> q;
    q.push(from);
    while (!q.empty()) {
      const std::string u = q.front();
      q.pop();
      for (const auto& v : adj[u]) {
        if (!dist.count(v)) {
          dist[v] = dist[u] + 1;
          q.push(v);
        }
      }
    }
    return dist;
  };

  OracleMetrics m;
  std::map<std::size_t, std::size_t> width;
  for (const auto& [uid, d] : bfs(root)) {
    m.depth = std::max(m.depth, d);
    ++width[d];
  }
  for (const auto& [d, w] : width) m.max_breadth = std::max(m.max_breadth, w);
  double total = 0.0;
  for (const auto& [uid, unused] : adj) {
    for (const auto& [other, d] : bfs(uid)) {
      m.diameter = std::max(m.diameter, d);
      total += static_cast<double>(d);
    }
  }
  const double n = static_cast<double>(c.size());
  if (c.size() >= 2) m.virality = total / (n * (n - 1.0));
  return m;
}

}  // namespace cascadekit::testing
