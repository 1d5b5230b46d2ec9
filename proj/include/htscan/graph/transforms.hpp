// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "htscan/errors.hpp"
#include "htscan/graph/dfg.hpp"
#include "htscan/graph/vocab.hpp"

namespace htscan::graph {

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);  // smaller id becomes the representative
    parent[static_cast<std::size_t>(b)] = a;
  }
};

/// Rebuilds a graph keeping only flagged nodes, with dense ids, deduplicated
/// edges and remapped roots. Node and edge order is preserved.
inline DataFlowGraph compact(const DataFlowGraph& g, const std::vector<bool>& keep) {
  DataFlowGraph out;
  out.dialect = g.dialect;
  out.infected = g.infected;
  std::vector<int> remap(g.nodes.size(), -1);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (!keep[i]) continue;
    remap[i] = static_cast<int>(out.nodes.size());
    out.nodes.push_back(g.nodes[i]);
  }
  std::set<Edge> seen;
  for (const Edge& e : g.edges) {
    int a = remap[static_cast<std::size_t>(e.first)];
    int b = remap[static_cast<std::size_t>(e.second)];
    if (a < 0 || b < 0) continue;
    Edge ne{a, b};
    if (seen.insert(ne).second) out.edges.push_back(ne);
  }
  for (int r : g.roots) {
    int nr = remap[static_cast<std::size_t>(r)];
    if (nr >= 0) out.roots.push_back(nr);
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// merge

/// Fuses per-signal graphs into one circuit graph: signal nodes are unified
/// by name, so a leaf naming another graph's root becomes that root. Feedback
/// leaves reconnect here, which is the only place cycles can appear.
inline DataFlowGraph merge(const std::vector<SignalDfg>& graphs) {
  if (graphs.empty()) raise(errc::empty_input, "merge of zero graphs");

  DataFlowGraph all;
  all.dialect = graphs.front().dialect;
  std::vector<int> root_ids;
  std::vector<Edge> raw_edges;
  for (const SignalDfg& g : graphs) {
    int offset = static_cast<int>(all.nodes.size());
    root_ids.push_back(offset);
    for (const Node& n : g.nodes) all.nodes.push_back(n);
    for (const Edge& e : g.edges) raw_edges.emplace_back(e.first + offset, e.second + offset);
  }

  detail::UnionFind uf(all.nodes.size());
  std::map<std::string, std::vector<int>> by_name;
  for (std::size_t i = 0; i < all.nodes.size(); ++i)
    if (all.nodes[i].kind == NodeKind::Signal) by_name[all.nodes[i].name].push_back(static_cast<int>(i));
  for (const auto& [_, ids] : by_name)
    for (std::size_t i = 1; i < ids.size(); ++i) uf.unite(ids[0], ids[i]);

  std::vector<bool> keep(all.nodes.size(), false);
  std::vector<int> remap(all.nodes.size(), -1);
  DataFlowGraph out;
  out.dialect = all.dialect;
  for (std::size_t i = 0; i < all.nodes.size(); ++i) {
    int rep = uf.find(static_cast<int>(i));
    if (remap[static_cast<std::size_t>(rep)] < 0) {
      remap[static_cast<std::size_t>(rep)] = static_cast<int>(out.nodes.size());
      out.nodes.push_back(all.nodes[static_cast<std::size_t>(rep)]);
    }
    remap[i] = remap[static_cast<std::size_t>(rep)];
    keep[i] = true;
  }
  std::set<Edge> seen;
  for (const Edge& e : raw_edges) {
    Edge ne{remap[static_cast<std::size_t>(e.first)], remap[static_cast<std::size_t>(e.second)]};
    if (seen.insert(ne).second) out.edges.push_back(ne);
  }
  std::set<int> root_seen;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    if (!graphs[gi].is_output) continue;
    int r = remap[static_cast<std::size_t>(root_ids[gi])];
    if (root_seen.insert(r).second) out.roots.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// trim

struct TrimStats {
  int removed_nodes = 0;
  bool had_root_component = true;
};

struct TrimResult {
  DataFlowGraph graph;
  TrimStats stats;
};

/// Keeps the largest weakly-connected component that contains a root, then
/// drops duplicate same-valued constants under one parent and collapses
/// single-parent signal-to-signal alias chains.
inline TrimResult trim(const DataFlowGraph& g) {
  TrimResult result;
  result.stats.removed_nodes = static_cast<int>(g.nodes.size());
  if (g.nodes.empty()) {
    result.graph.dialect = g.dialect;
    result.graph.infected = g.infected;
    result.stats.had_root_component = false;
    result.stats.removed_nodes = 0;
    return result;
  }

  detail::UnionFind uf(g.nodes.size());
  for (const Edge& e : g.edges) uf.unite(e.first, e.second);
  std::map<int, int> comp_size;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) ++comp_size[uf.find(static_cast<int>(i))];
  int best_comp = -1;
  int best_size = 0;
  for (int r : g.roots) {
    int c = uf.find(r);
    int sz = comp_size[c];
    if (sz > best_size || (sz == best_size && c < best_comp)) {
      best_comp = c;
      best_size = sz;
    }
  }
  if (best_comp < 0) {
    result.graph.dialect = g.dialect;
    result.graph.infected = g.infected;
    result.stats.had_root_component = false;
    return result;  // no roots: empty graph, flagged
  }

  std::vector<bool> keep(g.nodes.size(), false);
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    keep[i] = uf.find(static_cast<int>(i)) == best_comp;
  DataFlowGraph cur = detail::compact(g, keep);

  for (bool changed = true; changed;) {
    changed = false;

    // duplicate constants with identical value feeding the same parent
    {
      std::vector<std::vector<int>> adj = cur.out_adjacency();
      std::set<Edge> drop_edges;
      for (std::size_t p = 0; p < cur.nodes.size(); ++p) {
        // part-select bounds are positional operands, not redundancy
        if (cur.nodes[p].kind == NodeKind::Operation && cur.nodes[p].op == OpTag::PartSelect)
          continue;
        std::map<std::uint64_t, int> first_const;
        for (int c : adj[p]) {
          const Node& n = cur.nodes[static_cast<std::size_t>(c)];
          if (n.kind != NodeKind::Constant) continue;
          auto [it, fresh] = first_const.emplace(n.value, c);
          if (!fresh && it->second != c) drop_edges.insert({static_cast<int>(p), c});
        }
      }
      if (!drop_edges.empty()) {
        std::vector<Edge> kept;
        for (const Edge& e : cur.edges)
          if (!drop_edges.count(e)) kept.push_back(e);
        cur.edges = std::move(kept);
        std::vector<int> indeg = cur.in_degrees();
        std::vector<bool> k2(cur.nodes.size(), true);
        for (std::size_t i = 0; i < cur.nodes.size(); ++i)
          if (cur.nodes[i].kind == NodeKind::Constant && indeg[i] == 0) k2[i] = false;
        cur = detail::compact(cur, k2);
        changed = true;
      }
    }

    // alias chains: signal P whose only child is signal C (C not a root)
    {
      std::vector<std::vector<int>> adj = cur.out_adjacency();
      std::vector<int> indeg = cur.in_degrees();
      std::set<int> roots(cur.roots.begin(), cur.roots.end());
      int victim = -1, parent = -1;
      for (std::size_t p = 0; p < cur.nodes.size() && victim < 0; ++p) {
        if (cur.nodes[p].kind != NodeKind::Signal || adj[p].size() != 1) continue;
        int c = adj[p][0];
        const Node& cn = cur.nodes[static_cast<std::size_t>(c)];
        if (cn.kind != NodeKind::Signal || roots.count(c) || indeg[static_cast<std::size_t>(c)] != 1)
          continue;
        if (c == static_cast<int>(p)) continue;  // self-loop stays
        victim = c;
        parent = static_cast<int>(p);
      }
      if (victim >= 0) {
        std::vector<Edge> rewired;
        for (const Edge& e : cur.edges) {
          if (e.first == parent && e.second == victim) continue;
          if (e.first == victim)
            rewired.emplace_back(parent, e.second);
          else
            rewired.push_back(e);
        }
        cur.edges = std::move(rewired);
        std::vector<bool> k2(cur.nodes.size(), true);
        k2[static_cast<std::size_t>(victim)] = false;
        cur = detail::compact(cur, k2);
        changed = true;
      }
    }
  }

  result.stats.removed_nodes = static_cast<int>(g.nodes.size() - cur.nodes.size());
  result.graph = std::move(cur);
  return result;
}

// ---------------------------------------------------------------------------
// netlist graph optimization

struct OptimizeStats {
  int concat_removed = 0;
  int partselect_removed = 0;
};

struct OptimizeResult {
  DataFlowGraph graph;
  OptimizeStats stats;
};

/// Splices out concatenation and part-selection nodes: their parents connect
/// directly to the data operands, and part-select bound constants are dropped.
/// No other node kinds are touched.
inline OptimizeResult optimize_netlist(const DataFlowGraph& g) {
  OptimizeResult result;
  DataFlowGraph cur = g;

  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::vector<int>> adj = cur.out_adjacency();

    int target = -1;
    bool is_partselect = false;
    for (std::size_t i = 0; i < cur.nodes.size(); ++i) {
      const Node& n = cur.nodes[i];
      if (n.kind != NodeKind::Operation) continue;
      if (n.op == OpTag::PartSelect) {
        target = static_cast<int>(i);
        is_partselect = true;
        break;
      }
      if (n.op == OpTag::Concat && target < 0) target = static_cast<int>(i);
    }
    if (target < 0) break;

    const std::vector<int>& kids = adj[static_cast<std::size_t>(target)];
    std::vector<int> splice_to;
    std::vector<bool> keep(cur.nodes.size(), true);
    keep[static_cast<std::size_t>(target)] = false;

    if (is_partselect) {
      if (kids.size() != 3)
        raise(errc::malformed_part_select,
              "part-select node with " + std::to_string(kids.size()) + " children");
      splice_to = {kids[0]};
      // bound constants belong to the select; drop them unless shared
      std::vector<int> indeg = cur.in_degrees();
      for (int k : {kids[1], kids[2]}) {
        if (cur.nodes[static_cast<std::size_t>(k)].kind == NodeKind::Constant &&
            indeg[static_cast<std::size_t>(k)] == 1)
          keep[static_cast<std::size_t>(k)] = false;
      }
      ++result.stats.partselect_removed;
    } else {
      splice_to = kids;
      ++result.stats.concat_removed;
    }

    std::vector<Edge> rewired;
    for (const Edge& e : cur.edges) {
      if (e.second == target) {
        for (int s : splice_to) rewired.emplace_back(e.first, s);
      } else if (e.first == target) {
        continue;
      } else {
        rewired.push_back(e);
      }
    }
    cur.edges = std::move(rewired);
    cur = detail::compact(cur, keep);
    changed = true;
  }

  result.graph = std::move(cur);
  return result;
}

// ---------------------------------------------------------------------------
// tagging

struct NormalizeStats {
  int unknown_ops = 0;
};

struct NormalizeResult {
  DataFlowGraph graph;
  NormalizeStats stats;
};

/// Maps every node onto the 17-class netlist vocabulary. Signal classes come
/// from degree: no in-edges means input, no out-edges means output, everything
/// else is an intermediate signal.
inline NormalizeResult normalize_netlist(const DataFlowGraph& g) {
  NormalizeResult result;
  result.graph = g;
  std::vector<int> indeg = g.in_degrees();
  std::vector<int> outdeg = g.out_degrees();
  for (std::size_t i = 0; i < result.graph.nodes.size(); ++i) {
    Node& n = result.graph.nodes[i];
    switch (n.kind) {
      case NodeKind::Signal:
        if (indeg[i] == 0)
          n.tag = kNlInput;
        else if (outdeg[i] == 0)
          n.tag = kNlOutput;
        else
          n.tag = kNlIntermediate;
        break;
      case NodeKind::Constant:
        n.tag = kNlConstant;
        break;
      case NodeKind::Branch:
        n.tag = kNlBranch;
        break;
      case NodeKind::BranchCondition:
        n.tag = kNlBranchCondition;
        break;
      case NodeKind::Operation: {
        n.tag = netlist_op_class(n.op);
        if (n.tag == kNlUnknownOp) ++result.stats.unknown_ops;
        break;
      }
    }
  }
  return result;
}

/// Tags an RTL graph: operations by operation name, constants as constant,
/// signals by curated-name match with "general" as the fallback.
inline DataFlowGraph tag_rtl(const DataFlowGraph& g) {
  DataFlowGraph out = g;
  for (Node& n : out.nodes) {
    switch (n.kind) {
      case NodeKind::Signal:
        n.tag = rtl_name_index(n.name);
        break;
      case NodeKind::Constant:
        n.tag = kRtlConstantIndex;
        break;
      case NodeKind::Branch:
        n.tag = kRtlBranchIndex;
        break;
      case NodeKind::BranchCondition:
        n.tag = kRtlBranchConditionIndex;
        break;
      case NodeKind::Operation:
        n.tag = rtl_op_index(n.op);
        break;
    }
  }
  return out;
}

}  // namespace htscan::graph
