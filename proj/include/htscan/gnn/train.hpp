// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "htscan/errors.hpp"
#include "htscan/gnn/adjacency.hpp"
#include "htscan/gnn/model.hpp"
#include "htscan/gnn/ops.hpp"
#include "htscan/graph/dfg.hpp"
#include "htscan/graph/features.hpp"
#include "htscan/matrix.hpp"

namespace htscan::gnn {

/// One graph prepared for the network: normalized adjacency, raw edges for
/// pooling restriction, input features and (for training) the label.
struct GraphSample {
  NormAdjacency adj;
  std::vector<Edge> edges;
  Matrix x0;
  bool infected = false;

  static GraphSample from_graph(const graph::DataFlowGraph& g, const Matrix& features,
                                bool infected_label) {
    GraphSample s;
    s.adj = NormAdjacency::build(g.nodes.size(), g.edges);
    s.edges = g.edges;
    s.x0 = features;
    s.infected = infected_label;
    return s;
  }
};

/// Class ordering follows the detector contract: index 0 is HT-infected.
inline std::array<double, 2> one_hot_label(bool infected) {
  return infected ? std::array<double, 2>{1.0, 0.0} : std::array<double, 2>{0.0, 1.0};
}

struct ForwardTrace {
  std::vector<Matrix> m;      // M_l = Â X_l
  std::vector<Matrix> s;      // S_l = M_l W_l (pre-activation)
  std::vector<Matrix> x;      // X_0 .. X_L (post activation / dropout)
  std::vector<Matrix> mask;   // dropout masks, empty at inference
  Matrix score_m;             // Â X_prop
  std::vector<double> alpha;
  std::vector<int> kept;
  Matrix x_pool;
  std::vector<double> h;
  std::vector<std::size_t> argmax_rows;  // per feature dim, for max readout
  std::array<double, 2> probs = {0.0, 0.0};
};

/// Full forward pass. With `rng` given, dropout masks are drawn and recorded
/// in the trace; inference runs with dropout disabled.
inline std::array<double, 2> forward_pass(const ModelParams& model, const GraphSample& sample,
                                          ForwardTrace& t, std::mt19937_64* rng) {
  if (sample.x0.cols() != model.input_dim())
    raise(errc::dimension_mismatch,
          "feature dim " + std::to_string(sample.x0.cols()) + " vs model input " +
              std::to_string(model.input_dim()));
  if (sample.x0.rows() == 0) raise(errc::empty_graph, "graph has no nodes");

  const double p = model.dropout_rate;
  t.x.clear();
  t.m.clear();
  t.s.clear();
  t.mask.clear();
  t.x.push_back(sample.x0);
  for (const Matrix& w : model.layers) {
    Matrix m = sample.adj.apply(t.x.back());
    Matrix s = matmul(m, w);
    Matrix x = relu(s);
    if (rng && p > 0.0) {
      Matrix mask(x.rows(), x.cols());
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const double scale = 1.0 / (1.0 - p);
      for (std::size_t i = 0; i < x.data().size(); ++i) {
        bool keep = u(*rng) >= p;
        mask.data()[i] = keep ? 1.0 : 0.0;
        x.data()[i] *= keep ? scale : 0.0;
      }
      t.mask.push_back(std::move(mask));
    }
    t.m.push_back(std::move(m));
    t.s.push_back(std::move(s));
    t.x.push_back(std::move(x));
  }
  if (!t.x.back().all_finite()) raise(errc::nonfinite_value, "non-finite activations");

  const Matrix& x_prop = t.x.back();
  t.score_m = sample.adj.apply(x_prop);
  Matrix alpha_m = matmul(t.score_m, model.score_w);
  t.alpha.resize(alpha_m.rows());
  for (std::size_t i = 0; i < alpha_m.rows(); ++i) t.alpha[i] = alpha_m(i, 0);

  const std::size_t n = x_prop.rows();
  const std::size_t k = pool_keep_count(model.pooling_ratio, n);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return t.alpha[static_cast<std::size_t>(a)] > t.alpha[static_cast<std::size_t>(b)];
  });
  t.kept.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(t.kept.begin(), t.kept.end());

  t.x_pool = Matrix(k, x_prop.cols());
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t i = static_cast<std::size_t>(t.kept[r]);
    const double gate = std::tanh(t.alpha[i]);
    for (std::size_t c = 0; c < x_prop.cols(); ++c) t.x_pool(r, c) = x_prop(i, c) * gate;
  }

  t.h.assign(x_prop.cols(), 0.0);
  t.argmax_rows.assign(x_prop.cols(), 0);
  switch (model.readout) {
    case Readout::Max:
      for (std::size_t c = 0; c < t.x_pool.cols(); ++c) {
        double best = t.x_pool(0, c);
        std::size_t best_r = 0;
        for (std::size_t r = 1; r < t.x_pool.rows(); ++r) {
          if (t.x_pool(r, c) > best) {
            best = t.x_pool(r, c);
            best_r = r;
          }
        }
        t.h[c] = best;
        t.argmax_rows[c] = best_r;
      }
      break;
    case Readout::Sum:
    case Readout::Mean:
      for (std::size_t r = 0; r < t.x_pool.rows(); ++r)
        for (std::size_t c = 0; c < t.x_pool.cols(); ++c) t.h[c] += t.x_pool(r, c);
      if (model.readout == Readout::Mean)
        for (double& v : t.h) v /= static_cast<double>(t.x_pool.rows());
      break;
  }

  t.probs = classify(t.h, model.mlp_w, model.mlp_b);
  return t.probs;
}

struct Gradients {
  std::vector<Matrix> layers;
  Matrix score_w;
  Matrix mlp_w;
  std::array<double, 2> mlp_b = {0.0, 0.0};

  static Gradients zeros_like(const ModelParams& m) {
    Gradients g;
    for (const Matrix& w : m.layers) g.layers.emplace_back(w.rows(), w.cols());
    g.score_w = Matrix(m.score_w.rows(), m.score_w.cols());
    g.mlp_w = Matrix(m.mlp_w.rows(), m.mlp_w.cols());
    return g;
  }

  void add(const Gradients& o) {
    for (std::size_t l = 0; l < layers.size(); ++l)
      for (std::size_t i = 0; i < layers[l].data().size(); ++i)
        layers[l].data()[i] += o.layers[l].data()[i];
    for (std::size_t i = 0; i < score_w.data().size(); ++i)
      score_w.data()[i] += o.score_w.data()[i];
    for (std::size_t i = 0; i < mlp_w.data().size(); ++i) mlp_w.data()[i] += o.mlp_w.data()[i];
    mlp_b[0] += o.mlp_b[0];
    mlp_b[1] += o.mlp_b[1];
  }

  bool all_finite() const {
    for (const Matrix& m : layers)
      if (!m.all_finite()) return false;
    return score_w.all_finite() && mlp_w.all_finite() && std::isfinite(mlp_b[0]) &&
           std::isfinite(mlp_b[1]);
  }
};

/// Exact reverse-mode gradients of the cross-entropy loss for one graph.
/// Top-k selection is constant during backward; the gradient reaches the
/// score layer through the tanh gating of the kept nodes.
inline Gradients backward_pass(const ModelParams& model, const GraphSample& sample,
                               const ForwardTrace& t) {
  Gradients g = Gradients::zeros_like(model);
  const std::array<double, 2> y = one_hot_label(sample.infected);
  const std::array<double, 2> dlogits = {t.probs[0] - y[0], t.probs[1] - y[1]};

  const std::size_t hdim = t.h.size();
  std::vector<double> dh(hdim, 0.0);
  for (std::size_t i = 0; i < hdim; ++i) {
    g.mlp_w(i, 0) += t.h[i] * dlogits[0];
    g.mlp_w(i, 1) += t.h[i] * dlogits[1];
    dh[i] = model.mlp_w(i, 0) * dlogits[0] + model.mlp_w(i, 1) * dlogits[1];
  }
  g.mlp_b[0] += dlogits[0];
  g.mlp_b[1] += dlogits[1];

  Matrix dx_pool(t.x_pool.rows(), t.x_pool.cols());
  switch (model.readout) {
    case Readout::Max:
      for (std::size_t c = 0; c < hdim; ++c) dx_pool(t.argmax_rows[c], c) = dh[c];
      break;
    case Readout::Sum:
      for (std::size_t r = 0; r < dx_pool.rows(); ++r)
        for (std::size_t c = 0; c < hdim; ++c) dx_pool(r, c) = dh[c];
      break;
    case Readout::Mean: {
      const double inv = 1.0 / static_cast<double>(dx_pool.rows());
      for (std::size_t r = 0; r < dx_pool.rows(); ++r)
        for (std::size_t c = 0; c < hdim; ++c) dx_pool(r, c) = dh[c] * inv;
      break;
    }
  }

  const Matrix& x_prop = t.x.back();
  Matrix dx_prop(x_prop.rows(), x_prop.cols());
  Matrix dalpha(x_prop.rows(), 1);
  for (std::size_t r = 0; r < t.kept.size(); ++r) {
    const std::size_t i = static_cast<std::size_t>(t.kept[r]);
    const double gate = std::tanh(t.alpha[i]);
    double dot = 0.0;
    for (std::size_t c = 0; c < x_prop.cols(); ++c) {
      dx_prop(i, c) += dx_pool(r, c) * gate;
      dot += dx_pool(r, c) * x_prop(i, c);
    }
    dalpha(i, 0) = dot * (1.0 - gate * gate);
  }

  // score layer: alpha = (Â X_prop) w_s
  g.score_w = matmul_tn(t.score_m, dalpha);
  Matrix d_score_in = matmul_nt(dalpha, model.score_w);  // |V| x H
  Matrix d_from_score = sample.adj.apply(d_score_in);
  for (std::size_t i = 0; i < dx_prop.data().size(); ++i)
    dx_prop.data()[i] += d_from_score.data()[i];

  // GCN layers in reverse
  Matrix grad = std::move(dx_prop);
  const double p = model.dropout_rate;
  const bool dropped = !t.mask.empty();
  for (std::size_t li = model.layers.size(); li-- > 0;) {
    if (dropped) {
      const Matrix& mask = t.mask[li];
      const double scale = 1.0 / (1.0 - p);
      for (std::size_t i = 0; i < grad.data().size(); ++i)
        grad.data()[i] *= mask.data()[i] * scale;
    }
    grad = relu_backward(grad, t.s[li]);
    Matrix dw = matmul_tn(t.m[li], grad);
    for (std::size_t i = 0; i < dw.data().size(); ++i) g.layers[li].data()[i] += dw.data()[i];
    if (li > 0) grad = sample.adj.apply(matmul_nt(grad, model.layers[li]));
  }

  if (!g.all_finite()) raise(errc::nonfinite_gradient, "non-finite gradients");
  return g;
}

/// Loss of one sample without touching model state (dropout off).
inline double sample_loss(const ModelParams& model, const GraphSample& s) {
  ForwardTrace t;
  std::array<double, 2> probs = forward_pass(model, s, t, nullptr);
  return cross_entropy(one_hot_label(s.infected), probs);
}

struct Prediction {
  bool infected = false;
  std::array<double, 2> probs = {0.0, 0.0};
};

/// Deterministic inference: dropout disabled, ties resolve to infected.
inline Prediction predict(const ModelParams& model, const GraphSample& s) {
  ForwardTrace t;
  std::array<double, 2> probs = forward_pass(model, s, t, nullptr);
  Prediction p;
  p.probs = probs;
  p.infected = probs[0] >= probs[1];
  return p;
}

inline Prediction predict(const ModelParams& model, const graph::DataFlowGraph& g) {
  Matrix features = graph::encode_features(g);
  return predict(model, GraphSample::from_graph(g, features, false));
}

/// Mini-batch SGD over the sample set. Deterministic for a fixed seed: the
/// epoch shuffle, dropout draws and accumulation order are all sequenced.
inline std::vector<double> train(ModelParams& model, const std::vector<GraphSample>& samples,
                                 const TrainConfig& cfg) {
  if (samples.empty()) raise(errc::empty_dataset, "training set is empty");
  if (cfg.epochs <= 0 || cfg.batch_size < 1 || cfg.learning_rate < 0.0)
    raise(errc::dimension_mismatch, "bad training configuration");
  model.dropout_rate = cfg.dropout_rate;

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(cfg.epochs));

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t pos = 0;
    while (pos < order.size()) {
      const std::size_t batch_end = std::min(order.size(), pos + static_cast<std::size_t>(cfg.batch_size));
      Gradients acc = Gradients::zeros_like(model);
      const double inv_batch = 1.0 / static_cast<double>(batch_end - pos);
      for (std::size_t bi = pos; bi < batch_end; ++bi) {
        const GraphSample& s = samples[order[bi]];
        ForwardTrace t;
        std::array<double, 2> probs = forward_pass(model, s, t, &rng);
        epoch_loss += cross_entropy(one_hot_label(s.infected), probs);
        acc.add(backward_pass(model, s, t));
      }
      const double step = cfg.learning_rate * inv_batch;
      for (std::size_t l = 0; l < model.layers.size(); ++l)
        for (std::size_t i = 0; i < model.layers[l].data().size(); ++i)
          model.layers[l].data()[i] -= step * acc.layers[l].data()[i];
      for (std::size_t i = 0; i < model.score_w.data().size(); ++i)
        model.score_w.data()[i] -= step * acc.score_w.data()[i];
      for (std::size_t i = 0; i < model.mlp_w.data().size(); ++i)
        model.mlp_w.data()[i] -= step * acc.mlp_w.data()[i];
      model.mlp_b[0] -= step * acc.mlp_b[0];
      model.mlp_b[1] -= step * acc.mlp_b[1];
      pos = batch_end;
    }
    history.push_back(epoch_loss / static_cast<double>(samples.size()));
  }
  return history;
}

inline std::string loss_history_csv(const std::vector<double>& history) {
  std::ostringstream os;
  os << "epoch,mean_loss\n";
  os.precision(17);
  for (std::size_t i = 0; i < history.size(); ++i) os << i << "," << history[i] << "\n";
  return os.str();
}

}  // namespace htscan::gnn
