// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "htscan/errors.hpp"
#include "htscan/gnn/adjacency.hpp"
#include "htscan/matrix.hpp"

namespace htscan::gnn {

inline constexpr double kProbClamp = 1e-12;

/// One graph-convolution layer: relu(Â_norm X W).
inline Matrix gcn_forward(const Matrix& x, const NormAdjacency& a, const Matrix& w) {
  Matrix out = relu(matmul(a.apply(x), w));
  if (!out.all_finite()) raise(errc::nonfinite_value, "gcn_forward produced non-finite values");
  return out;
}

/// Number of nodes kept by top-k filtering: ceil(pr * |V|), at least 1.
inline std::size_t pool_keep_count(double pr, std::size_t n) {
  std::size_t k = static_cast<std::size_t>(std::ceil(pr * static_cast<double>(n)));
  if (k < 1) k = 1;
  if (k > n) k = n;
  return k;
}

struct PoolResult {
  std::vector<double> scores;  // α for every node
  std::vector<int> kept;       // P, ascending node ids
  Matrix x;                    // gated embeddings of kept nodes
  std::vector<Edge> edges;     // A^pool: induced edges, reindexed to kept order
};

/// Self-attention top-k pooling: α from a 1-unit GCN-style scoring layer,
/// keep the k best nodes, gate their embeddings by tanh(α), restrict A.
inline PoolResult sag_pool(const Matrix& x_prop, const NormAdjacency& a,
                           const std::vector<Edge>& edges, const Matrix& score_w, double pr) {
  const std::size_t n = x_prop.rows();
  if (n == 0) raise(errc::empty_graph, "pooling an empty graph");
  Matrix alpha_m = matmul(a.apply(x_prop), score_w);
  if (alpha_m.cols() != 1) raise(errc::dimension_mismatch, "score layer must output 1 unit");

  PoolResult r;
  r.scores.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.scores[i] = alpha_m(i, 0);

  const std::size_t k = pool_keep_count(pr, n);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int l, int rr) {
    return r.scores[static_cast<std::size_t>(l)] > r.scores[static_cast<std::size_t>(rr)];
  });
  r.kept.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(r.kept.begin(), r.kept.end());

  std::vector<int> remap(n, -1);
  for (std::size_t i = 0; i < r.kept.size(); ++i)
    remap[static_cast<std::size_t>(r.kept[i])] = static_cast<int>(i);

  r.x = Matrix(k, x_prop.cols());
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t src = static_cast<std::size_t>(r.kept[i]);
    const double gate = std::tanh(r.scores[src]);
    const double* in = x_prop.row(src);
    double* out = r.x.row(i);
    for (std::size_t c = 0; c < x_prop.cols(); ++c) out[c] = in[c] * gate;
  }
  for (const Edge& e : edges) {
    int s = remap[static_cast<std::size_t>(e.first)];
    int d = remap[static_cast<std::size_t>(e.second)];
    if (s >= 0 && d >= 0) r.edges.emplace_back(s, d);
  }
  return r;
}

enum class Readout { Max, Mean, Sum };

inline const char* readout_name(Readout r) {
  switch (r) {
    case Readout::Max: return "max";
    case Readout::Mean: return "mean";
    case Readout::Sum: return "sum";
  }
  return "?";
}

/// Permutation-invariant aggregation of node embeddings into h_G.
inline std::vector<double> readout(const Matrix& x_pool, Readout mode) {
  if (x_pool.rows() == 0) raise(errc::empty_graph, "readout over zero nodes");
  std::vector<double> h(x_pool.cols(), 0.0);
  switch (mode) {
    case Readout::Max:
      for (std::size_t c = 0; c < x_pool.cols(); ++c) {
        double m = x_pool(0, c);
        for (std::size_t i = 1; i < x_pool.rows(); ++i) m = std::max(m, x_pool(i, c));
        h[c] = m;
      }
      break;
    case Readout::Sum:
    case Readout::Mean:
      for (std::size_t i = 0; i < x_pool.rows(); ++i)
        for (std::size_t c = 0; c < x_pool.cols(); ++c) h[c] += x_pool(i, c);
      if (mode == Readout::Mean)
        for (double& v : h) v /= static_cast<double>(x_pool.rows());
      break;
  }
  return h;
}

inline std::array<double, 2> softmax2(const std::array<double, 2>& logits) {
  double m = std::max(logits[0], logits[1]);
  double e0 = std::exp(logits[0] - m);
  double e1 = std::exp(logits[1] - m);
  double z = e0 + e1;
  return {e0 / z, e1 / z};
}

/// MLP head + softmax: ŷ[0] is the probability of the infected class.
inline std::array<double, 2> classify(const std::vector<double>& h, const Matrix& mlp_w,
                                      const std::array<double, 2>& mlp_b) {
  if (mlp_w.rows() != h.size() || mlp_w.cols() != 2)
    raise(errc::dimension_mismatch, "MLP weight shape");
  std::array<double, 2> logits = {mlp_b[0], mlp_b[1]};
  for (std::size_t i = 0; i < h.size(); ++i) {
    logits[0] += h[i] * mlp_w(i, 0);
    logits[1] += h[i] * mlp_w(i, 1);
  }
  return softmax2(logits);
}

/// H(Y, Ŷ) = −Σ y_i ln(ŷ_i), with probabilities clamped away from zero.
inline double cross_entropy(const std::array<double, 2>& y, const std::array<double, 2>& y_hat) {
  double loss = 0.0;
  for (std::size_t i = 0; i < 2; ++i)
    loss -= y[i] * std::log(std::max(y_hat[i], kProbClamp));
  return loss;
}

}  // namespace htscan::gnn
