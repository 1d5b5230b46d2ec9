// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "htscan/errors.hpp"
#include "htscan/verilog/source.hpp"

namespace htscan::graph {

using verilog::Dialect;

enum class NodeKind : std::uint8_t { Signal, Operation, Constant, Branch, BranchCondition };

inline const char* node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Signal: return "signal";
    case NodeKind::Operation: return "operation";
    case NodeKind::Constant: return "constant";
    case NodeKind::Branch: return "branch";
    case NodeKind::BranchCondition: return "branch_condition";
  }
  return "?";
}

/// Operation identity of an Operation node. RTL expression operators and
/// netlist gate/cell instances share one enum; the tagging passes map it onto
/// the dialect's vocabulary.
enum class OpTag : std::uint8_t {
  None = 0,
  // expression operators
  Plus, Minus, Times, Divide, Mod, Power,
  And, Or, Xor, Xnor, Not,
  LogAnd, LogOr, LogNot,
  Shl, Shr, SShl, SShr,
  Lt, Gt, Le, Ge, Eq, Ne, CaseEq, CaseNe,
  RedOr,
  // gate / cell instances
  Nand, Nor, Buf, Mux, Dff,
  // structural nodes
  Concat, PartSelect, BitSelect, Repeat, MultiDriver,
  UnknownCell,
};

inline const char* op_tag_name(OpTag t) {
  switch (t) {
    case OpTag::None: return "none";
    case OpTag::Plus: return "plus";
    case OpTag::Minus: return "minus";
    case OpTag::Times: return "times";
    case OpTag::Divide: return "divide";
    case OpTag::Mod: return "mod";
    case OpTag::Power: return "power";
    case OpTag::And: return "and";
    case OpTag::Or: return "or";
    case OpTag::Xor: return "xor";
    case OpTag::Xnor: return "xnor";
    case OpTag::Not: return "not";
    case OpTag::LogAnd: return "logical_and";
    case OpTag::LogOr: return "logical_or";
    case OpTag::LogNot: return "logical_not";
    case OpTag::Shl: return "shift_left";
    case OpTag::Shr: return "shift_right";
    case OpTag::SShl: return "arith_shift_left";
    case OpTag::SShr: return "arith_shift_right";
    case OpTag::Lt: return "less_than";
    case OpTag::Gt: return "greater_than";
    case OpTag::Le: return "less_equal";
    case OpTag::Ge: return "greater_equal";
    case OpTag::Eq: return "equal";
    case OpTag::Ne: return "not_equal";
    case OpTag::CaseEq: return "case_equal";
    case OpTag::CaseNe: return "case_not_equal";
    case OpTag::RedOr: return "reduction_or";
    case OpTag::Nand: return "nand";
    case OpTag::Nor: return "nor";
    case OpTag::Buf: return "buf";
    case OpTag::Mux: return "mux";
    case OpTag::Dff: return "dff";
    case OpTag::Concat: return "concat";
    case OpTag::PartSelect: return "partselect";
    case OpTag::BitSelect: return "bitselect";
    case OpTag::Repeat: return "repeat";
    case OpTag::MultiDriver: return "multidriver";
    case OpTag::UnknownCell: return "unknown_cell";
  }
  return "?";
}

struct Node {
  NodeKind kind = NodeKind::Signal;
  OpTag op = OpTag::None;     // Operation nodes
  std::string name;           // Signal name or constant lexeme
  std::uint64_t value = 0;    // Constant value
  std::int32_t tag = -1;      // vocabulary index; -1 until tagged
};

using Edge = std::pair<int, int>;  // (dependent, dependee)

/// Per-signal data-flow graph. Node 0 is the root (the analyzed signal);
/// edges point from a node to the nodes it depends on.
struct SignalDfg {
  std::string root_name;
  bool is_output = false;
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  Dialect dialect = Dialect::Rtl;
};

/// Whole-circuit data-flow graph produced by merging per-signal graphs.
struct DataFlowGraph {
  Dialect dialect = Dialect::Rtl;
  std::vector<Node> nodes;
  std::vector<Edge> edges;       // deduplicated, insertion-ordered
  std::vector<int> roots;        // output-signal node ids
  std::optional<bool> infected;  // dataset label, when known

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return edges.size(); }

  std::vector<std::vector<int>> out_adjacency() const {
    std::vector<std::vector<int>> adj(nodes.size());
    for (const Edge& e : edges) adj[static_cast<std::size_t>(e.first)].push_back(e.second);
    return adj;
  }

  std::vector<int> in_degrees() const {
    std::vector<int> deg(nodes.size(), 0);
    for (const Edge& e : edges) ++deg[static_cast<std::size_t>(e.second)];
    return deg;
  }

  std::vector<int> out_degrees() const {
    std::vector<int> deg(nodes.size(), 0);
    for (const Edge& e : edges) ++deg[static_cast<std::size_t>(e.first)];
    return deg;
  }
};

}  // namespace htscan::graph
