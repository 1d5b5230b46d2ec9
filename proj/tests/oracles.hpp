// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations used only by tests. These stay
// deliberately naive (dense matrices, brute-force search) so they cannot
// share a bug with the library's sparse/incremental code paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "htscan/graph/dfg.hpp"
#include "htscan/graph/vocab.hpp"
#include "htscan/matrix.hpp"

namespace oracles {

using htscan::Matrix;
using htscan::graph::DataFlowGraph;
using htscan::graph::Edge;
using htscan::graph::Node;
using htscan::graph::NodeKind;
using htscan::graph::OpTag;

/// Dense-matrix GCN layer: explicitly materializes D^(-1/2)(A+I)D^(-1/2)
/// over the symmetrized edge set and multiplies with plain loops.
inline Matrix dense_gcn_oracle(const Matrix& x, const std::vector<Edge>& edges, const Matrix& w) {
  const std::size_t n = x.rows();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) a[i][i] = 1.0;
  for (const Edge& e : edges) {
    a[static_cast<std::size_t>(e.first)][static_cast<std::size_t>(e.second)] = 1.0;
    a[static_cast<std::size_t>(e.second)][static_cast<std::size_t>(e.first)] = 1.0;
  }
  std::vector<double> dinv(n);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < n; ++j) deg += a[i][j];
    dinv[i] = 1.0 / std::sqrt(deg);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] *= dinv[i] * dinv[j];

  Matrix ax(n, x.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t c = 0; c < x.cols(); ++c) ax(i, c) += a[i][j] * x(j, c);
  Matrix out(n, w.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < w.rows(); ++k)
      for (std::size_t c = 0; c < w.cols(); ++c) out(i, c) += ax(i, k) * w(k, c);
  for (double& v : out.data()) v = std::max(v, 0.0);
  return out;
}

/// Directed reachability set from one node, brute-force BFS.
inline std::set<int> bfs_reachable(std::size_t n, const std::vector<Edge>& edges, int from) {
  std::vector<std::vector<int>> adj(n);
  for (const Edge& e : edges) adj[static_cast<std::size_t>(e.first)].push_back(e.second);
  std::set<int> seen = {from};
  std::vector<int> queue = {from};
  while (!queue.empty()) {
    int v = queue.back();
    queue.pop_back();
    for (int next : adj[static_cast<std::size_t>(v)])
      if (seen.insert(next).second) queue.push_back(next);
  }
  return seen;
}

/// Sort-based top-k selection: the k highest scores, earlier index on ties.
inline std::set<int> topk_oracle(const std::vector<double>& scores, std::size_t k) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
  });
  return std::set<int>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
}

/// Weakly-connected component count by union-find.
inline int component_count_oracle(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  for (const Edge& e : edges) {
    int a = find(e.first), b = find(e.second);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
  std::set<int> roots;
  for (std::size_t i = 0; i < n; ++i) roots.insert(find(static_cast<int>(i)));
  return static_cast<int>(roots.size());
}

inline double fbeta_oracle(double p, double r, double beta) {
  double b2 = beta * beta;
  double denom = b2 * p + r;
  return denom == 0.0 ? 0.0 : (1.0 + b2) * p * r / denom;
}

/// Random netlist-shaped graph: signal/gate layers plus concat and
/// part-select detail nodes with their required child structure.
inline DataFlowGraph random_netlist_graph(std::mt19937_64& rng, int max_nodes) {
  auto rint = [&](int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    return d(rng);
  };
  DataFlowGraph g;
  g.dialect = htscan::graph::Dialect::Netlist;

  const int n_base = std::max(4, rint(4, std::max(4, max_nodes - 12)));
  auto add_node = [&](NodeKind kind, OpTag op) {
    Node node;
    node.kind = kind;
    node.op = op;
    node.name = "n" + std::to_string(g.nodes.size());
    g.nodes.push_back(node);
    return static_cast<int>(g.nodes.size()) - 1;
  };
  auto add_edge = [&](int a, int b) {
    for (const Edge& e : g.edges)
      if (e.first == a && e.second == b) return;
    g.edges.emplace_back(a, b);
  };

  static const OpTag gates[] = {OpTag::And, OpTag::Or, OpTag::Xor, OpTag::Nand,
                                OpTag::Nor, OpTag::Not, OpTag::Buf, OpTag::Dff};
  // layered DAG: each new node depends on up to two earlier nodes
  for (int i = 0; i < n_base; ++i) {
    bool is_signal = rint(0, 2) == 0;
    int id = is_signal ? add_node(NodeKind::Signal, OpTag::None)
                       : add_node(NodeKind::Operation, gates[static_cast<std::size_t>(rint(0, 7))]);
    if (id > 0) {
      int deps = rint(0, 2);
      for (int d = 0; d < deps; ++d) add_edge(id, rint(0, id - 1));
    }
  }
  // sprinkle concat nodes
  int n_concat = rint(1, 3);
  for (int i = 0; i < n_concat; ++i) {
    int id = add_node(NodeKind::Operation, OpTag::Concat);
    int kids = rint(2, 3);
    for (int d = 0; d < kids; ++d) add_edge(id, rint(0, n_base - 1));
    int parent = rint(0, n_base - 1);
    if (parent != id) add_edge(parent, id);
  }
  // sprinkle part-select nodes with [data, msb, lsb] children
  int n_ps = rint(1, 3);
  for (int i = 0; i < n_ps; ++i) {
    int id = add_node(NodeKind::Operation, OpTag::PartSelect);
    int data = rint(0, n_base - 1);
    int msb = add_node(NodeKind::Constant, OpTag::None);
    g.nodes.back().value = static_cast<std::uint64_t>(rint(4, 12));
    int lsb = add_node(NodeKind::Constant, OpTag::None);
    g.nodes.back().value = static_cast<std::uint64_t>(rint(0, 3));
    add_edge(id, data);
    add_edge(id, msb);
    add_edge(id, lsb);
    int parent = rint(0, n_base - 1);
    if (parent != id && parent != data) add_edge(parent, id);
  }
  return g;
}

}  // namespace oracles
