// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "htscan/errors.hpp"
#include "htscan/gnn/ops.hpp"
#include "htscan/graph/vocab.hpp"
#include "htscan/matrix.hpp"

namespace htscan::gnn {

using graph::Dialect;

struct TrainConfig {
  int epochs = 200;
  int batch_size = 4;
  double learning_rate = 0.001;
  std::uint64_t seed = 1;
  double dropout_rate = 0.5;
};

/// All trainable state plus the hyperparameters a checkpoint must carry.
struct ModelParams {
  Dialect dialect = Dialect::Rtl;
  int vocab_version = graph::kVocabVersion;
  std::vector<Matrix> layers;  // GCN weights W^(l)
  Matrix score_w;              // pooling score layer, H x 1
  double pooling_ratio = 0.8;
  Matrix mlp_w;                // H x 2
  std::array<double, 2> mlp_b = {0.0, 0.0};
  Readout readout = Readout::Max;
  double dropout_rate = 0.5;

  std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().rows(); }
  std::size_t hidden_dim() const { return layers.empty() ? 0 : layers.back().cols(); }
};

namespace detail {

inline Matrix glorot(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double gain = 1.0) {
  double bound = gain * std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = dist(rng);
  return m;
}

}  // namespace detail

/// Builds a model with seeded Glorot-uniform weights. Two layers get a
/// sparsity-corrected gain: the input layer sees one-hot rows (a single
/// active input instead of fan_in dense ones) and the scoring layer must
/// produce O(1) coefficients before the tanh gate, or plain gradient
/// descent stalls with the forward signal crushed to ~1e-3.
inline ModelParams make_model(Dialect dialect, int num_layers, int hidden_units,
                              double pooling_ratio, Readout readout, double dropout_rate,
                              std::uint64_t seed) {
  if (num_layers < 1) raise(errc::dimension_mismatch, "model needs at least one GCN layer");
  ModelParams m;
  m.dialect = dialect;
  m.pooling_ratio = pooling_ratio;
  m.readout = readout;
  m.dropout_rate = dropout_rate;
  std::mt19937_64 rng(seed);
  std::size_t in_dim = static_cast<std::size_t>(graph::feature_dim(dialect));
  const std::size_t h = static_cast<std::size_t>(hidden_units);
  for (int l = 0; l < num_layers; ++l) {
    double gain = l == 0 ? std::sqrt(static_cast<double>(in_dim)) : 1.0;
    m.layers.push_back(detail::glorot(in_dim, h, rng, gain));
    in_dim = h;
  }
  m.score_w = detail::glorot(h, 1, rng, std::sqrt(static_cast<double>(h)));
  m.mlp_w = detail::glorot(h, 2, rng);
  m.mlp_b = {0.0, 0.0};
  return m;
}

/// RTL defaults: 2 GCN layers x 200 hidden units, pool ratio 0.8, max readout.
inline ModelParams rtl_default_model(std::uint64_t seed) {
  return make_model(Dialect::Rtl, 2, 200, 0.8, Readout::Max, 0.5, seed);
}

/// Netlist defaults: 3 GCN layers x 55 hidden units, pool ratio 0.6.
inline ModelParams netlist_default_model(std::uint64_t seed) {
  return make_model(Dialect::Netlist, 3, 55, 0.6, Readout::Max, 0.5, seed);
}

// ---------------------------------------------------------------------------
// checkpoint format "HTM1"

inline constexpr char kModelMagic[4] = {'H', 'T', 'M', '1'};

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

inline void put_f64(std::vector<std::uint8_t>& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xFF));
}

inline void put_matrix(std::vector<std::uint8_t>& out, const Matrix& m) {
  for (double v : m.data()) put_f64(out, v);
}

struct ModelReader {
  const std::vector<std::uint8_t>& buf;
  std::size_t pos = 0;

  std::uint8_t byte() {
    if (pos >= buf.size()) raise(errc::corrupt_file, "truncated model file");
    return buf[pos++];
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte()) << (8 * i);
    return v;
  }
  double f64() {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(byte()) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }
  Matrix matrix(std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (double& v : m.data()) v = f64();
    return m;
  }
};

}  // namespace detail

inline std::vector<std::uint8_t> save_model(const ModelParams& m) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kModelMagic, kModelMagic + 4);
  out.push_back(m.dialect == Dialect::Rtl ? 0 : 1);
  detail::put_u32(out, static_cast<std::uint32_t>(m.vocab_version));
  detail::put_u32(out, static_cast<std::uint32_t>(m.layers.size()));
  detail::put_u32(out, static_cast<std::uint32_t>(m.input_dim()));
  for (const Matrix& w : m.layers) detail::put_u32(out, static_cast<std::uint32_t>(w.cols()));
  detail::put_f64(out, m.pooling_ratio);
  out.push_back(static_cast<std::uint8_t>(m.readout));
  detail::put_f64(out, m.dropout_rate);
  for (const Matrix& w : m.layers) detail::put_matrix(out, w);
  detail::put_matrix(out, m.score_w);
  detail::put_matrix(out, m.mlp_w);
  detail::put_f64(out, m.mlp_b[0]);
  detail::put_f64(out, m.mlp_b[1]);
  return out;
}

inline ModelParams load_model(const std::vector<std::uint8_t>& bytes) {
  detail::ModelReader r{bytes};
  for (char c : kModelMagic)
    if (r.byte() != static_cast<std::uint8_t>(c)) raise(errc::corrupt_file, "bad model magic");
  ModelParams m;
  std::uint8_t d = r.byte();
  if (d > 1) raise(errc::corrupt_file, "bad dialect byte");
  m.dialect = d == 0 ? Dialect::Rtl : Dialect::Netlist;
  m.vocab_version = static_cast<int>(r.u32());
  if (m.vocab_version != graph::kVocabVersion)
    raise(errc::version_mismatch,
          "model vocabulary version " + std::to_string(m.vocab_version) + ", expected " +
              std::to_string(graph::kVocabVersion));
  std::uint32_t n_layers = r.u32();
  if (n_layers == 0 || n_layers > 64) raise(errc::corrupt_file, "implausible layer count");
  std::uint32_t in_dim = r.u32();
  std::vector<std::uint32_t> outs(n_layers);
  for (std::uint32_t& o : outs) o = r.u32();
  m.pooling_ratio = r.f64();
  std::uint8_t ro = r.byte();
  if (ro > 2) raise(errc::corrupt_file, "bad readout byte");
  m.readout = static_cast<Readout>(ro);
  m.dropout_rate = r.f64();
  std::uint32_t cur = in_dim;
  for (std::uint32_t o : outs) {
    m.layers.push_back(r.matrix(cur, o));
    cur = o;
  }
  m.score_w = r.matrix(cur, 1);
  m.mlp_w = r.matrix(cur, 2);
  m.mlp_b[0] = r.f64();
  m.mlp_b[1] = r.f64();
  if (r.pos != bytes.size()) raise(errc::corrupt_file, "trailing bytes in model file");
  return m;
}

inline void save_model_file(const ModelParams& m, const std::string& path) {
  std::vector<std::uint8_t> bytes = save_model(m);
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(errc::corrupt_file, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline ModelParams load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::corrupt_file, "cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return load_model(bytes);
}

}  // namespace htscan::gnn
