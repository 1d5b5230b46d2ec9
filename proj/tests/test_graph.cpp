// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "htscan/graph/features.hpp"
#include "htscan/graph/transforms.hpp"
#include "htscan/graph/vocab.hpp"
#include "oracles.hpp"

using namespace htscan;
using namespace htscan::graph;

namespace {

Node signal(const std::string& name) {
  Node n;
  n.kind = NodeKind::Signal;
  n.name = name;
  return n;
}

Node operation(OpTag op) {
  Node n;
  n.kind = NodeKind::Operation;
  n.op = op;
  return n;
}

Node constant(std::uint64_t v) {
  Node n;
  n.kind = NodeKind::Constant;
  n.name = std::to_string(v);
  n.value = v;
  return n;
}

SignalDfg xor_graph() {
  // y -> XOR -> {a, b}
  SignalDfg g;
  g.root_name = "y";
  g.is_output = true;
  g.nodes = {signal("y"), operation(OpTag::Xor), signal("a"), signal("b")};
  g.edges = {{0, 1}, {1, 2}, {1, 3}};
  return g;
}

SignalDfg not_graph() {
  // a -> NOT -> c
  SignalDfg g;
  g.root_name = "a";
  g.is_output = false;
  g.nodes = {signal("a"), operation(OpTag::Not), signal("c")};
  g.edges = {{0, 1}, {1, 2}};
  return g;
}

bool same_structure(const DataFlowGraph& a, const DataFlowGraph& b) {
  if (a.nodes.size() != b.nodes.size() || a.edges != b.edges || a.roots != b.roots) return false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    if (a.nodes[i].kind != b.nodes[i].kind || a.nodes[i].op != b.nodes[i].op ||
        a.nodes[i].name != b.nodes[i].name || a.nodes[i].tag != b.nodes[i].tag)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("merge unifies a leaf with the root of the same name") {
  DataFlowGraph m = merge({xor_graph(), not_graph()});
  CHECK(m.nodes.size() == 6);  // y, xor, a(unified), b, not, c
  int a_id = -1;
  for (std::size_t i = 0; i < m.nodes.size(); ++i)
    if (m.nodes[i].kind == NodeKind::Signal && m.nodes[i].name == "a") a_id = static_cast<int>(i);
  REQUIRE(a_id >= 0);
  int a_count = 0;
  for (const Node& n : m.nodes) a_count += (n.kind == NodeKind::Signal && n.name == "a") ? 1 : 0;
  CHECK(a_count == 1);
  bool xor_to_a = false, a_to_not = false;
  for (const Edge& e : m.edges) {
    if (m.nodes[static_cast<std::size_t>(e.first)].op == OpTag::Xor && e.second == a_id) xor_to_a = true;
    if (e.first == a_id && m.nodes[static_cast<std::size_t>(e.second)].op == OpTag::Not) a_to_not = true;
  }
  CHECK(xor_to_a);
  CHECK(a_to_not);
  REQUIRE(m.roots.size() == 1);
  CHECK(m.nodes[static_cast<std::size_t>(m.roots[0])].name == "y");
}

TEST_CASE("merging a single graph is the identity up to ids") {
  SignalDfg g = xor_graph();
  DataFlowGraph m = merge({g});
  CHECK(m.nodes.size() == g.nodes.size());
  CHECK(m.edges.size() == g.edges.size());
}

TEST_CASE("disjoint merge keeps components; count matches union-find oracle") {
  SignalDfg g1 = xor_graph();
  SignalDfg g2;
  g2.root_name = "p";
  g2.is_output = true;
  g2.nodes = {signal("p"), operation(OpTag::And), signal("q"), signal("r")};
  g2.edges = {{0, 1}, {1, 2}, {1, 3}};
  DataFlowGraph m = merge({g1, g2});
  CHECK(m.nodes.size() == 8);
  CHECK(oracles::component_count_oracle(m.nodes.size(), m.edges) == 2);
}

TEST_CASE("merge of zero graphs is an error") {
  CHECK_THROWS_AS(merge({}), error);
}

TEST_CASE("trim drops isolated nodes and keeps the root component") {
  DataFlowGraph m = merge({xor_graph()});
  m.nodes.push_back(constant(42));  // isolated
  TrimResult r = trim(m);
  CHECK(r.graph.nodes.size() == 4);
  CHECK(r.stats.removed_nodes == 1);
  CHECK(r.stats.had_root_component);
}

TEST_CASE("trim collapses alias chains while preserving reachability") {
  // y -> y_alias -> XOR -> {a, b}
  DataFlowGraph g;
  g.dialect = Dialect::Rtl;
  g.nodes = {signal("y"), signal("y_alias"), operation(OpTag::Xor), signal("a"), signal("b")};
  g.edges = {{0, 1}, {1, 2}, {2, 3}, {2, 4}};
  g.roots = {0};
  auto before = oracles::bfs_reachable(g.nodes.size(), g.edges, 0);
  CHECK(before.size() == 5);
  TrimResult r = trim(g);
  CHECK(r.graph.nodes.size() == 4);
  bool alias_gone = true;
  for (const Node& n : r.graph.nodes) alias_gone &= n.name != "y_alias";
  CHECK(alias_gone);
  // surviving nodes reach exactly what they reached before
  auto after = oracles::bfs_reachable(r.graph.nodes.size(), r.graph.edges, 0);
  CHECK(after.size() == 4);  // y, xor, a, b
}

TEST_CASE("trim removes duplicate constants under one parent") {
  DataFlowGraph g;
  g.nodes = {signal("y"), operation(OpTag::Plus), constant(3), constant(3)};
  g.edges = {{0, 1}, {1, 2}, {1, 3}};
  g.roots = {0};
  TrimResult r = trim(g);
  CHECK(r.graph.nodes.size() == 3);
}

TEST_CASE("trim is idempotent and keeps already-clean graphs") {
  DataFlowGraph m = merge({xor_graph(), not_graph()});
  DataFlowGraph once = trim(m).graph;
  DataFlowGraph twice = trim(once).graph;
  CHECK(same_structure(once, twice));
}

TEST_CASE("trim of a rootless graph returns empty with a flag") {
  SignalDfg g = xor_graph();
  g.is_output = false;
  DataFlowGraph m = merge({g});
  TrimResult r = trim(m);
  CHECK(r.graph.nodes.empty());
  CHECK_FALSE(r.stats.had_root_component);
}

TEST_CASE("optimize_netlist splices out a concat feeding a gate") {
  // Y -> OR -> concat -> {A, B}
  DataFlowGraph g;
  g.dialect = Dialect::Netlist;
  g.nodes = {signal("Y"), operation(OpTag::Or), operation(OpTag::Concat), signal("A"), signal("B")};
  g.edges = {{0, 1}, {1, 2}, {2, 3}, {2, 4}};
  g.roots = {0};
  OptimizeResult r = optimize_netlist(g);
  CHECK(r.stats.concat_removed == 1);
  CHECK(r.graph.nodes.size() == 4);
  bool or_to_a = false, or_to_b = false;
  for (const Edge& e : r.graph.edges) {
    const Node& from = r.graph.nodes[static_cast<std::size_t>(e.first)];
    const Node& to = r.graph.nodes[static_cast<std::size_t>(e.second)];
    if (from.op == OpTag::Or && to.name == "A") or_to_a = true;
    if (from.op == OpTag::Or && to.name == "B") or_to_b = true;
  }
  CHECK(or_to_a);
  CHECK(or_to_b);
}

TEST_CASE("optimize_netlist drops part-select bounds and keeps the data signal") {
  // B -> partselect -> {A, 10, 5}
  DataFlowGraph g;
  g.dialect = Dialect::Netlist;
  g.nodes = {signal("B"), operation(OpTag::PartSelect), signal("A"), constant(10), constant(5)};
  g.edges = {{0, 1}, {1, 2}, {1, 3}, {1, 4}};
  g.roots = {0};
  OptimizeResult r = optimize_netlist(g);
  CHECK(r.stats.partselect_removed == 1);
  REQUIRE(r.graph.nodes.size() == 2);
  CHECK(r.graph.nodes[0].name == "B");
  CHECK(r.graph.nodes[1].name == "A");
  REQUIRE(r.graph.edges.size() == 1);
  CHECK(r.graph.edges[0] == Edge{0, 1});
}

TEST_CASE("optimize_netlist leaves plain graphs unchanged") {
  DataFlowGraph g = merge({xor_graph()});
  g.dialect = Dialect::Netlist;
  OptimizeResult r = optimize_netlist(g);
  CHECK(same_structure(g, r.graph));
  CHECK(r.stats.concat_removed == 0);
  CHECK(r.stats.partselect_removed == 0);
}

TEST_CASE("optimize_netlist rejects malformed part-selects") {
  DataFlowGraph g;
  g.dialect = Dialect::Netlist;
  g.nodes = {signal("B"), operation(OpTag::PartSelect), signal("A")};
  g.edges = {{0, 1}, {1, 2}};
  g.roots = {0};
  CHECK_THROWS_MATCHES(optimize_netlist(g), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("MalformedPartSelect")));
}

TEST_CASE("optimize_netlist preserves signal reachability and is idempotent on random graphs") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    DataFlowGraph g = oracles::random_netlist_graph(rng, 60);
    OptimizeResult r = optimize_netlist(g);
    CHECK(r.graph.nodes.size() <= g.nodes.size());

    // map surviving signal nodes back to originals by name
    std::map<std::string, int> old_ids, new_ids;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
      if (g.nodes[i].kind == NodeKind::Signal) old_ids[g.nodes[i].name] = static_cast<int>(i);
    for (std::size_t i = 0; i < r.graph.nodes.size(); ++i)
      if (r.graph.nodes[i].kind == NodeKind::Signal)
        new_ids[r.graph.nodes[i].name] = static_cast<int>(i);
    for (const auto& [uname, uid] : new_ids) {
      auto before = oracles::bfs_reachable(g.nodes.size(), g.edges, old_ids.at(uname));
      auto after = oracles::bfs_reachable(r.graph.nodes.size(), r.graph.edges, uid);
      for (const auto& [vname, vid] : new_ids) {
        bool was = before.count(old_ids.at(vname)) > 0;
        bool is = after.count(vid) > 0;
        INFO("pair " << uname << " -> " << vname);
        CHECK(was == is);
      }
    }

    DataFlowGraph again = optimize_netlist(r.graph).graph;
    CHECK(same_structure(r.graph, again));
    for (const Node& n : again.nodes) {
      CHECK(n.op != OpTag::Concat);
      CHECK(n.op != OpTag::PartSelect);
    }
  }
}

TEST_CASE("normalize_netlist assigns degree-based signal classes") {
  // in-degree 0 -> input, out-degree 0 -> output, else intermediate
  DataFlowGraph g;
  g.dialect = Dialect::Netlist;
  g.nodes = {signal("s0"), operation(OpTag::And), signal("mid"), operation(OpTag::Or), signal("leafy")};
  g.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}};
  g.roots = {0};
  NormalizeResult r = normalize_netlist(g);
  CHECK(r.graph.nodes[0].tag == kNlInput);         // no in-edges
  CHECK(r.graph.nodes[2].tag == kNlIntermediate);  // both directions
  CHECK(r.graph.nodes[4].tag == kNlOutput);        // no out-edges
  CHECK(r.graph.nodes[1].tag == kNlAnd);
  CHECK(r.graph.nodes[3].tag == kNlOr);
  CHECK(r.stats.unknown_ops == 0);
}

TEST_CASE("normalize_netlist tags constants regardless of value and counts unknown ops") {
  DataFlowGraph g;
  g.dialect = Dialect::Netlist;
  g.nodes = {signal("y"), operation(OpTag::Plus), constant(3), constant(7)};
  g.edges = {{0, 1}, {1, 2}, {1, 3}};
  g.roots = {0};
  NormalizeResult r = normalize_netlist(g);
  CHECK(r.graph.nodes[2].tag == kNlConstant);
  CHECK(r.graph.nodes[3].tag == kNlConstant);
  CHECK(r.graph.nodes[1].tag == kNlUnknownOp);
  CHECK(r.stats.unknown_ops == 1);
}

TEST_CASE("AND gate class index is frozen") {
  CHECK(netlist_vocabulary()[kNlAnd] == "and");
  CHECK(netlist_op_class(OpTag::And) == 4);
  CHECK(netlist_vocabulary().size() == 17);
}

TEST_CASE("normalize_netlist is idempotent") {
  std::mt19937_64 rng(7);
  DataFlowGraph g = oracles::random_netlist_graph(rng, 40);
  DataFlowGraph once = normalize_netlist(optimize_netlist(g).graph).graph;
  DataFlowGraph twice = normalize_netlist(once).graph;
  CHECK(same_structure(once, twice));
}

TEST_CASE("tag_rtl uses curated names with general fallback") {
  DataFlowGraph g;
  g.dialect = Dialect::Rtl;
  g.nodes = {signal("sys_clock"), operation(OpTag::Xor), signal("zq9x"), constant(1)};
  g.edges = {{0, 1}, {1, 2}, {1, 3}};
  g.roots = {0};
  DataFlowGraph t = tag_rtl(g);
  CHECK(tag_label(Dialect::Rtl, t.nodes[0].tag) == "clock");
  CHECK(tag_label(Dialect::Rtl, t.nodes[1].tag) == "xor");
  CHECK(t.nodes[1].tag == 8);  // xor sits at index 8 of the frozen operation block
  CHECK(tag_label(Dialect::Rtl, t.nodes[2].tag) == "general");
  CHECK(t.nodes[2].tag == kRtlGeneralIndex);
  CHECK(t.nodes[3].tag == kRtlConstantIndex);
}

TEST_CASE("longest name match wins") {
  CHECK(tag_label(Dialect::Rtl, rtl_name_index("myclk")) == "clock");
  CHECK(tag_label(Dialect::Rtl, rtl_name_index("CLOCK_MAIN")) == "clock");
  // "counter" (7 chars) beats "count" and "cnt"
  CHECK(tag_label(Dialect::Rtl, rtl_name_index("the_counter")) == "counter");
  // "wren" beats "wr" and "en"
  CHECK(tag_label(Dialect::Rtl, rtl_name_index("ram_wren")) == "write_enable");
}

TEST_CASE("vocabularies have the pinned sizes and unique labels") {
  CHECK(rtl_vocabulary().size() == 300);
  CHECK(netlist_vocabulary().size() == 17);
  std::set<std::string> labels(rtl_vocabulary().begin(), rtl_vocabulary().end());
  CHECK(labels.size() == 300);
  CHECK(rtl_vocabulary()[26] == "branch");
  CHECK(rtl_vocabulary()[27] == "reduction_or");
  CHECK(rtl_vocabulary()[28] == "constant");
  CHECK(rtl_vocabulary()[299] == "general");
}

TEST_CASE("tag closure: normalized tags stay inside their vocabularies") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    DataFlowGraph g = oracles::random_netlist_graph(rng, 50);
    DataFlowGraph n = normalize_netlist(optimize_netlist(g).graph).graph;
    for (const Node& node : n.nodes) {
      CHECK(node.tag >= 0);
      CHECK(node.tag < 17);
    }
    g.dialect = Dialect::Rtl;
    DataFlowGraph t = tag_rtl(g);
    for (const Node& node : t.nodes) {
      CHECK(node.tag >= 0);
      CHECK(node.tag < 300);
    }
  }
}

TEST_CASE("encode_features builds one-hot rows") {
  DataFlowGraph g;
  g.dialect = Dialect::Netlist;
  g.nodes = {signal("i"), operation(OpTag::And), signal("o")};
  g.edges = {{0, 1}, {1, 2}};
  g.roots = {0};
  DataFlowGraph n = normalize_netlist(g).graph;
  Matrix x = encode_features(n);
  REQUIRE(x.rows() == 3);
  REQUIRE(x.cols() == 17);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double row_sum = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      row_sum += x(i, c);
      CHECK((x(i, c) == 0.0 || x(i, c) == 1.0));
    }
    CHECK(row_sum == 1.0);
  }

  DataFlowGraph rtl;
  rtl.dialect = Dialect::Rtl;
  rtl.nodes = {signal("clk_in")};
  rtl.roots = {0};
  Matrix xr = encode_features(tag_rtl(rtl));
  CHECK(xr.cols() == 300);
}

TEST_CASE("permuting nodes permutes feature rows identically") {
  DataFlowGraph g;
  g.dialect = Dialect::Netlist;
  g.nodes = {signal("a"), operation(OpTag::Xor), signal("b"), constant(1)};
  g.edges = {{0, 1}, {1, 2}, {1, 3}};
  g.roots = {0};
  DataFlowGraph n = normalize_netlist(g).graph;
  Matrix x = encode_features(n);

  std::vector<int> perm = {2, 0, 3, 1};  // new position of old node i
  DataFlowGraph p = n;
  for (std::size_t i = 0; i < n.nodes.size(); ++i)
    p.nodes[static_cast<std::size_t>(perm[i])] = n.nodes[i];
  p.edges.clear();
  for (const Edge& e : n.edges)
    p.edges.emplace_back(perm[static_cast<std::size_t>(e.first)],
                         perm[static_cast<std::size_t>(e.second)]);
  Matrix xp = encode_features(p);
  for (std::size_t i = 0; i < n.nodes.size(); ++i)
    for (std::size_t c = 0; c < x.cols(); ++c)
      CHECK(x(i, c) == xp(static_cast<std::size_t>(perm[i]), c));
}

TEST_CASE("encode_features rejects untagged graphs") {
  DataFlowGraph g;
  g.dialect = Dialect::Netlist;
  g.nodes = {signal("a")};
  CHECK_THROWS_MATCHES(encode_features(g), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("UntaggedNode")));
}
