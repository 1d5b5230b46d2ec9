// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "htscan/errors.hpp"
#include "htscan/graph/dfg.hpp"
#include "htscan/graph/vocab.hpp"
#include "htscan/matrix.hpp"

namespace htscan::graph {

/// One-hot node feature matrix X^(0): |V| rows, vocabulary-width columns.
inline Matrix encode_features(const DataFlowGraph& g) {
  const int dim = feature_dim(g.dialect);
  Matrix x(g.nodes.size(), static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    int tag = g.nodes[i].tag;
    if (tag < 0 || tag >= dim)
      raise(errc::untagged_node, "node " + std::to_string(i) + " has no valid tag");
    x(i, static_cast<std::size_t>(tag)) = 1.0;
  }
  return x;
}

}  // namespace htscan::graph
