// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "htscan/gnn/model.hpp"
#include "htscan/gnn/train.hpp"

using namespace htscan;
using namespace htscan::gnn;
using htscan::graph::Edge;

namespace {

GraphSample line_sample(std::size_t n, std::size_t dim, bool infected, std::uint64_t seed) {
  GraphSample s;
  for (std::size_t i = 0; i + 1 < n; ++i) s.edges.emplace_back(static_cast<int>(i), static_cast<int>(i + 1));
  s.adj = NormAdjacency::build(n, s.edges);
  s.x0 = Matrix(n, dim);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, dim - 1);
  for (std::size_t i = 0; i < n; ++i) s.x0(i, pick(rng)) = 1.0;
  s.infected = infected;
  return s;
}

ModelParams tiny_model(std::uint64_t seed, double dropout = 0.0) {
  ModelParams m = make_model(graph::Dialect::Rtl, 2, 6, 0.8, Readout::Max, dropout, seed);
  std::mt19937_64 rng(seed + 1);
  m.layers[0] = detail::glorot(8, 6, rng);
  m.layers[1] = detail::glorot(6, 6, rng);
  m.score_w = detail::glorot(6, 1, rng);
  m.mlp_w = detail::glorot(6, 2, rng);
  return m;
}

}  // namespace

TEST_CASE("zero learning rate leaves parameters untouched") {
  ModelParams m = tiny_model(3);
  ModelParams before = m;
  std::vector<GraphSample> data = {line_sample(5, 8, true, 1), line_sample(6, 8, false, 2)};
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.batch_size = 2;
  cfg.learning_rate = 0.0;
  cfg.seed = 9;
  cfg.dropout_rate = 0.5;
  train(m, data, cfg);
  for (std::size_t l = 0; l < m.layers.size(); ++l) CHECK(m.layers[l] == before.layers[l]);
  CHECK(m.score_w == before.score_w);
  CHECK(m.mlp_w == before.mlp_w);
  CHECK(m.mlp_b == before.mlp_b);
}

TEST_CASE("a memorized sample is predicted with its own label") {
  ModelParams m = tiny_model(11);
  std::vector<GraphSample> data = {line_sample(5, 8, true, 21), line_sample(7, 8, false, 22)};
  TrainConfig cfg;
  cfg.epochs = 500;
  cfg.batch_size = 2;
  cfg.learning_rate = 0.05;
  cfg.seed = 5;
  cfg.dropout_rate = 0.0;
  std::vector<double> history = train(m, data, cfg);
  REQUIRE(history.size() == 500);
  CHECK(history.back() < 0.1);
  CHECK(history.back() < history.front());
  CHECK(predict(m, data[0]).infected);
  CHECK_FALSE(predict(m, data[1]).infected);
}

TEST_CASE("training is bitwise deterministic for a fixed seed") {
  std::vector<GraphSample> data = {line_sample(5, 8, true, 31), line_sample(6, 8, false, 32),
                                   line_sample(7, 8, true, 33), line_sample(4, 8, false, 34)};
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.batch_size = 3;
  cfg.learning_rate = 0.01;
  cfg.seed = 77;
  cfg.dropout_rate = 0.5;
  ModelParams m1 = tiny_model(13);
  ModelParams m2 = tiny_model(13);
  std::vector<double> h1 = train(m1, data, cfg);
  std::vector<double> h2 = train(m2, data, cfg);
  CHECK(h1 == h2);
  for (std::size_t l = 0; l < m1.layers.size(); ++l) CHECK(m1.layers[l] == m2.layers[l]);
}

TEST_CASE("training an empty dataset is an error") {
  ModelParams m = tiny_model(1);
  TrainConfig cfg;
  CHECK_THROWS_MATCHES(train(m, {}, cfg), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("EmptyDataset")));
}

TEST_CASE("inference succeeds on a one-node graph") {
  ModelParams m = tiny_model(2);
  GraphSample s = line_sample(1, 8, false, 4);
  Prediction p = predict(m, s);
  CHECK(p.probs[0] + p.probs[1] == Catch::Approx(1.0));
}

TEST_CASE("inference with mismatched feature width is rejected") {
  ModelParams m = tiny_model(2);
  GraphSample s = line_sample(4, 5, false, 4);
  CHECK_THROWS_MATCHES(predict(m, s), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("DimensionMismatch")));
}

TEST_CASE("checkpoint round-trips every parameter and hyperparameter") {
  ModelParams m = netlist_default_model(99);
  m.mlp_b = {0.25, -0.5};
  auto bytes = save_model(m);
  ModelParams r = load_model(bytes);
  CHECK(r.dialect == m.dialect);
  CHECK(r.vocab_version == m.vocab_version);
  REQUIRE(r.layers.size() == m.layers.size());
  for (std::size_t l = 0; l < m.layers.size(); ++l) CHECK(r.layers[l] == m.layers[l]);
  CHECK(r.score_w == m.score_w);
  CHECK(r.mlp_w == m.mlp_w);
  CHECK(r.mlp_b == m.mlp_b);
  CHECK(r.pooling_ratio == m.pooling_ratio);
  CHECK(r.readout == m.readout);
  CHECK(r.dropout_rate == m.dropout_rate);
}

TEST_CASE("model files with a different vocabulary version are rejected") {
  ModelParams m = rtl_default_model(5);
  m.vocab_version = graph::kVocabVersion + 1;
  auto bytes = save_model(m);
  CHECK_THROWS_MATCHES(load_model(bytes), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("VersionMismatch")));
}

TEST_CASE("truncated model files are rejected") {
  auto bytes = save_model(netlist_default_model(1));
  bytes.resize(bytes.size() - 17);
  CHECK_THROWS_MATCHES(load_model(bytes), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("CorruptFile")));
}

TEST_CASE("default architectures match the reference settings") {
  ModelParams rtl = rtl_default_model(1);
  CHECK(rtl.layers.size() == 2);
  CHECK(rtl.layers[0].rows() == 300);
  CHECK(rtl.layers[0].cols() == 200);
  CHECK(rtl.layers[1].cols() == 200);
  CHECK(rtl.mlp_w.rows() == 200);
  CHECK(rtl.mlp_w.cols() == 2);
  CHECK(rtl.pooling_ratio == 0.8);
  CHECK(rtl.readout == Readout::Max);

  ModelParams nl = netlist_default_model(1);
  CHECK(nl.layers.size() == 3);
  CHECK(nl.layers[0].rows() == 17);
  CHECK(nl.layers[0].cols() == 55);
  CHECK(nl.pooling_ratio == 0.6);
}

TEST_CASE("loss history exports as epoch,mean_loss CSV") {
  std::string csv = loss_history_csv({0.5, 0.25});
  CHECK(csv.find("epoch,mean_loss\n") == 0);
  CHECK(csv.find("0,0.5") != std::string::npos);
  CHECK(csv.find("1,0.25") != std::string::npos);
}
