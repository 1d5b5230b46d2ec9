// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <set>
#include <vector>

#include "htscan/errors.hpp"
#include "htscan/graph/dfg.hpp"
#include "htscan/matrix.hpp"

namespace htscan::gnn {

using graph::Edge;

/// Symmetrically normalized adjacency with self-loops,
/// D^(-1/2) (A + I) D^(-1/2), stored as per-row sparse neighbor lists.
/// Message passing treats edges as undirected.
class NormAdjacency {
 public:
  NormAdjacency() = default;

  static NormAdjacency build(std::size_t n, const std::vector<Edge>& edges) {
    NormAdjacency a;
    a.n_ = n;
    std::vector<std::set<int>> nbr(n);
    for (std::size_t i = 0; i < n; ++i) nbr[i].insert(static_cast<int>(i));
    for (const Edge& e : edges) {
      nbr[static_cast<std::size_t>(e.first)].insert(e.second);
      nbr[static_cast<std::size_t>(e.second)].insert(e.first);
    }
    std::vector<double> inv_sqrt_deg(n);
    for (std::size_t i = 0; i < n; ++i)
      inv_sqrt_deg[i] = 1.0 / std::sqrt(static_cast<double>(nbr[i].size()));
    a.rows_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      a.rows_[i].reserve(nbr[i].size());
      for (int j : nbr[i])
        a.rows_[i].emplace_back(j, inv_sqrt_deg[i] * inv_sqrt_deg[static_cast<std::size_t>(j)]);
    }
    return a;
  }

  std::size_t size() const { return n_; }

  /// Y = Â_norm * X, sparse times dense. Symmetric, so this is its own
  /// transpose product.
  Matrix apply(const Matrix& x) const {
    if (x.rows() != n_) raise(errc::dimension_mismatch, "adjacency/feature row mismatch");
    Matrix y(n_, x.cols());
    for (std::size_t i = 0; i < n_; ++i) {
      double* yi = y.row(i);
      for (const auto& [j, w] : rows_[i]) {
        const double* xj = x.row(static_cast<std::size_t>(j));
        for (std::size_t c = 0; c < x.cols(); ++c) yi[c] += w * xj[c];
      }
    }
    return y;
  }

  const std::vector<std::pair<int, double>>& row(std::size_t i) const { return rows_[i]; }

 private:
  std::size_t n_ = 0;
  std::vector<std::vector<std::pair<int, double>>> rows_;
};

}  // namespace htscan::gnn
