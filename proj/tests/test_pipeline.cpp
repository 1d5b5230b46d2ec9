// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "htscan/pipeline/experiment.hpp"
#include "htscan/pipeline/ingest.hpp"
#include "htscan/pipeline/loo.hpp"
#include "htscan/pipeline/metrics.hpp"
#include "htscan/pipeline/synth.hpp"
#include "oracles.hpp"

using namespace htscan;
using namespace htscan::pipeline;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("htscan_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("manifest io round-trips and rejects bad labels") {
  TempDir tmp("manifest");
  std::vector<CorpusEntry> entries = {{"a1", "counter", true, "a1.v"},
                                      {"b1", "lfsr", false, "b1.v"}};
  write_manifest(entries, tmp.path / "m.tsv");
  auto back = read_manifest(tmp.path / "m.tsv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].id == "a1");
  CHECK(back[0].infected);
  CHECK(back[1].family == "lfsr");
  CHECK_FALSE(back[1].infected);

  std::ofstream bad(tmp.path / "bad.tsv");
  bad << "x\tfam\tmaybe\tx.v\n";
  bad.close();
  CHECK_THROWS_AS(read_manifest(tmp.path / "bad.tsv"), error);
  CHECK_THROWS_MATCHES(read_manifest(tmp.path / "missing.tsv"), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("ManifestMissing")));
}

TEST_CASE("leave-one-out split holds out exactly one family") {
  std::vector<CorpusEntry> corpus = {{"a1", "A", true, "x"}, {"a2", "A", false, "x"},
                                     {"b1", "B", true, "x"}, {"c1", "C", false, "x"}};
  LooSplit split = loo_split(corpus, "A");
  CHECK(split.test.size() == 2);
  CHECK(split.train.size() == 2);
  for (const CorpusEntry& e : split.test) CHECK(e.family == "A");
  for (const CorpusEntry& e : split.train) CHECK(e.family != "A");
  // id disjointness
  for (const CorpusEntry& te : split.test)
    for (const CorpusEntry& tr : split.train) CHECK(te.id != tr.id);
  CHECK_THROWS_MATCHES(loo_split(corpus, "Z"), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("UnknownFamily")));
}

TEST_CASE("holding out each family covers every entry exactly once") {
  SynthOptions opts;
  opts.seed = 12;
  opts.n_free = 7;
  opts.n_infected = 8;
  std::vector<SynthDesign> designs = synthesize_designs(opts, Dialect::Rtl);
  std::vector<CorpusEntry> corpus;
  for (const SynthDesign& d : designs) corpus.push_back({d.id, d.family, d.infected, d.id + ".v"});
  std::map<std::string, int> seen_as_test;
  for (const std::string& fam : corpus_families(corpus)) {
    LooSplit split = loo_split(corpus, fam);
    CHECK(split.train.size() + split.test.size() == corpus.size());
    for (const CorpusEntry& e : split.test) ++seen_as_test[e.id];
  }
  CHECK(seen_as_test.size() == corpus.size());
  for (const auto& [id, n] : seen_as_test) CHECK(n == 1);
}

TEST_CASE("f-beta matches the paper's headline arithmetic") {
  double f1 = f_beta_score(0.92, 0.97, 1.0);
  CHECK(f1 == Catch::Approx(2.0 * 0.92 * 0.97 / (0.92 + 0.97)).epsilon(1e-12));
  CHECK(f1 == Catch::Approx(0.944).margin(5e-4));  // reported as 94%
  CHECK(f_beta_score(0.0, 0.0, 1.0) == 0.0);
  CHECK(f_beta_score(0.5, 1.0, 1.0) == Catch::Approx(oracles::fbeta_oracle(0.5, 1.0, 1.0)));
  CHECK(f_beta_score(0.9, 0.6, 2.0) == Catch::Approx(oracles::fbeta_oracle(0.9, 0.6, 2.0)));
}

TEST_CASE("evaluate counts and identities") {
  // an untrained symmetric model classifies by tie-break; use a trained pair
  gnn::ModelParams m = gnn::make_model(Dialect::Netlist, 1, 4, 1.0, gnn::Readout::Max, 0.0, 3);
  std::vector<gnn::GraphSample> data;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 6; ++i) {
    graph::DataFlowGraph g = oracles::random_netlist_graph(rng, 30);
    g = graph::normalize_netlist(graph::optimize_netlist(g).graph).graph;
    data.push_back(gnn::GraphSample::from_graph(g, graph::encode_features(g), i % 2 == 0));
  }
  EvalReport rep = evaluate(m, data, 1.0);
  int infected = 0, free_count = 0;
  for (const auto& s : data) (s.infected ? infected : free_count)++;
  CHECK(rep.counts.tp + rep.counts.fn == infected);
  CHECK(rep.counts.fp + rep.counts.tn == free_count);
  // recomputation identity
  if (rep.counts.tp + rep.counts.fp > 0) {
    double p = double(rep.counts.tp) / (rep.counts.tp + rep.counts.fp);
    CHECK(std::abs(p - rep.precision) < 1e-12);
  }
  if (rep.counts.tp + rep.counts.fn > 0) {
    double r = double(rep.counts.tp) / (rep.counts.tp + rep.counts.fn);
    CHECK(std::abs(r - rep.recall) < 1e-12);
  }
  CHECK(std::abs(rep.f_beta - oracles::fbeta_oracle(rep.precision, rep.recall, 1.0)) < 1e-12);
}

TEST_CASE("all-infected predictions on a balanced fold give R=1, P=0.5") {
  FoldCounts c{/*tp=*/3, /*fn=*/0, /*fp=*/3, /*tn=*/0};
  double p = double(c.tp) / (c.tp + c.fp);
  double r = double(c.tp) / (c.tp + c.fn);
  CHECK(p == 0.5);
  CHECK(r == 1.0);
  CHECK(f_beta_score(p, r, 1.0) == Catch::Approx(2.0 / 3.0));
}

TEST_CASE("corpus synthesis is byte-deterministic per seed") {
  SynthOptions opts;
  opts.seed = 42;
  opts.n_free = 5;
  opts.n_infected = 5;
  for (Dialect d : {Dialect::Rtl, Dialect::Netlist}) {
    auto a = synthesize_designs(opts, d);
    auto b = synthesize_designs(opts, d);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].id == b[i].id);
      CHECK(a[i].text == b[i].text);
    }
    SynthOptions other = opts;
    other.seed = 43;
    auto c = synthesize_designs(other, d);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i) any_diff |= a[i].text != c[i].text;
    CHECK(any_diff);
  }
}

TEST_CASE("ten designs across five families with balanced labels") {
  SynthOptions opts;
  opts.seed = 2;
  opts.n_free = 5;
  opts.n_infected = 5;
  TempDir tmp("synth");
  SynthResult r = synthesize_corpus(opts, Dialect::Rtl, tmp.path);
  CHECK(r.entries.size() == 10);
  int infected = 0;
  std::set<std::string> fams;
  for (const CorpusEntry& e : r.entries) {
    infected += e.infected ? 1 : 0;
    fams.insert(e.family);
    CHECK(fs::exists(tmp.path / e.path));
  }
  CHECK(infected == 5);
  CHECK(fams.size() >= 3);
  CHECK(fs::exists(r.manifest_path));
}

TEST_CASE("infected designs differ from their base by the marked region") {
  SynthOptions opts;
  opts.seed = 77;
  opts.n_free = 2;
  opts.n_infected = 6;
  for (Dialect d : {Dialect::Rtl, Dialect::Netlist}) {
    for (const SynthDesign& des : synthesize_designs(opts, d)) {
      if (!des.infected) continue;
      REQUIRE_FALSE(des.base_text.empty());
      CHECK(des.text != des.base_text);
      REQUIRE(des.trojan.inserted_first > 0);
      REQUIRE(des.trojan.inserted_last >= des.trojan.inserted_first);
      // removing the marked region recovers the base up to the payload
      // splice on at most two output drivers
      auto split_lines = [](const std::string& text) {
        std::vector<std::string> out;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) out.push_back(line);
        return out;
      };
      std::vector<std::string> lines = split_lines(des.text);
      std::vector<std::string> base_lines = split_lines(des.base_text);
      REQUIRE(des.trojan.inserted_last <= static_cast<int>(lines.size()));
      std::multiset<std::string> remaining;
      for (int ln = 1; ln <= static_cast<int>(lines.size()); ++ln)
        if (ln < des.trojan.inserted_first || ln > des.trojan.inserted_last)
          remaining.insert(lines[static_cast<std::size_t>(ln - 1)]);
      std::multiset<std::string> base_set(base_lines.begin(), base_lines.end());
      std::vector<std::string> sym_diff;
      std::set_symmetric_difference(remaining.begin(), remaining.end(), base_set.begin(),
                                    base_set.end(), std::back_inserter(sym_diff));
      INFO(des.id << ": " << sym_diff.size() << " lines differ outside the marked region");
      CHECK(sym_diff.size() <= 4);
      // the region itself contributes genuinely new logic
      int fresh = 0;
      for (int ln = des.trojan.inserted_first; ln <= des.trojan.inserted_last; ++ln)
        if (!base_set.count(lines[static_cast<std::size_t>(ln - 1)])) ++fresh;
      CHECK(fresh >= 3);
      CHECK((des.trojan.trigger == "time_bomb" || des.trojan.trigger == "cheat_code"));
      CHECK((des.trojan.payload == "leak" || des.trojan.payload == "deny"));
    }
  }
}

TEST_CASE("ingest tolerates broken entries and reports them") {
  TempDir tmp("ingest");
  SynthOptions opts;
  opts.seed = 5;
  opts.n_free = 2;
  opts.n_infected = 1;
  SynthResult corpus = synthesize_corpus(opts, Dialect::Rtl, tmp.path);
  // add one syntactically broken design
  std::ofstream bad(tmp.path / "broken.v");
  bad << "module broken (y);\n output y;\n assign y = ;\nendmodule\n";
  bad.close();
  std::vector<CorpusEntry> entries = corpus.entries;
  entries.push_back({"broken", "counter", false, "broken.v"});

  IngestReport rep = ingest(entries, Dialect::Rtl, tmp.path, tmp.path / "graphs");
  CHECK(rep.ok_count() == 3);
  CHECK(rep.error_count() == 1);
  bool broken_reported = false;
  for (const IngestRecord& r : rep.records)
    if (r.id == "broken" && !r.ok && r.error.find("SyntaxError") != std::string::npos)
      broken_reported = true;
  CHECK(broken_reported);
  // graphs exist for the good ones and carry RTL feature width
  for (const IngestRecord& r : rep.records) {
    if (!r.ok) continue;
    auto [g, features] = graph::load_graph_file(r.graph_path);
    CHECK(g.dialect == Dialect::Rtl);
    CHECK(features.cols() == 300);
    CHECK(g.infected.has_value());
  }
}

TEST_CASE("netlist ingest produces 17-wide features") {
  TempDir tmp("ingest_nl");
  SynthOptions opts;
  opts.seed = 6;
  opts.n_free = 1;
  opts.n_infected = 1;
  SynthResult corpus = synthesize_corpus(opts, Dialect::Netlist, tmp.path);
  IngestReport rep = ingest(corpus.entries, Dialect::Netlist, tmp.path, tmp.path / "graphs");
  REQUIRE(rep.error_count() == 0);
  for (const IngestRecord& r : rep.records) {
    auto [g, features] = graph::load_graph_file(r.graph_path);
    CHECK(g.dialect == Dialect::Netlist);
    CHECK(features.cols() == 17);
    CHECK(g.nodes.size() > 10);
  }
}

TEST_CASE("netlist optimization shrinks the synthetic corpus graphs") {
  SynthOptions opts;
  opts.seed = 8;
  opts.n_free = 5;
  opts.n_infected = 5;
  double before_total = 0.0, after_total = 0.0;
  for (const SynthDesign& d : synthesize_designs(opts, Dialect::Netlist)) {
    auto unit = verilog::preprocess({{d.id + ".v", d.text}}, Dialect::Netlist);
    auto ast = verilog::parse(unit);
    auto flat = verilog::flatten(ast);
    std::vector<graph::SignalDfg> per_signal;
    for (const std::string& s : verilog::list_signals(flat))
      per_signal.push_back(verilog::analyze_dataflow(flat, s));
    graph::DataFlowGraph trimmed = graph::trim(graph::merge(per_signal)).graph;
    graph::OptimizeResult opt = graph::optimize_netlist(trimmed);
    before_total += static_cast<double>(trimmed.nodes.size());
    after_total += static_cast<double>(opt.graph.nodes.size());
    CHECK(opt.graph.nodes.size() <= trimmed.nodes.size());
  }
  INFO("mean reduction " << (1.0 - after_total / before_total) * 100.0 << "%");
  CHECK(after_total < before_total);  // the direction the optimization must move
}

TEST_CASE("experiment config parses key-value text with dialect defaults") {
  ExperimentConfig cfg = parse_config_text(
      "dialect = netlist\nmanifest = m.tsv\nepochs = 10\nseed = 4\npooling_ratio = 1.0\n# comment\n",
      "/tmp");
  CHECK(cfg.dialect == Dialect::Netlist);
  CHECK(cfg.layers == 3);
  CHECK(cfg.hidden_units == 55);
  CHECK(cfg.batch_size == 2);
  CHECK(cfg.pooling_ratio == 1.0);
  CHECK(cfg.epochs == 10);
  CHECK(cfg.seed == 4);
  CHECK(cfg.manifest == "/tmp/m.tsv");

  ExperimentConfig rtl = parse_config_text("dialect = rtl\nmanifest = x\n", "");
  CHECK(rtl.layers == 2);
  CHECK(rtl.hidden_units == 200);
  CHECK(rtl.pooling_ratio == 0.8);
  CHECK(rtl.batch_size == 4);

  CHECK_THROWS_AS(parse_config_text("bogus_key = 1\n", ""), error);
}

TEST_CASE("tiny experiment runs fold-per-family and is deterministic") {
  TempDir tmp("exp");
  SynthOptions opts;
  opts.seed = 31;
  opts.n_free = 5;
  opts.n_infected = 5;
  synthesize_corpus(opts, Dialect::Netlist, tmp.path);

  ExperimentConfig cfg;
  cfg.dialect = Dialect::Netlist;
  cfg.manifest = (tmp.path / "manifest.tsv").string();
  cfg.graph_dir = (tmp.path / "graphs").string();
  cfg.apply_dialect_defaults();
  cfg.epochs = 5;
  cfg.repeats = 1;
  cfg.seed = 3;

  nlohmann::json r1 = run_experiment(cfg);
  CHECK(r1["folds"].size() == 5);  // five families, one repeat
  for (const auto& fold : r1["folds"]) {
    REQUIRE(fold.contains("metrics"));
    CHECK(fold["test_size"].get<int>() == 2);
  }
  nlohmann::json r2 = run_experiment(cfg);
  CHECK(strip_timing(r1) == strip_timing(r2));
  CHECK(strip_timing(r1).dump() == strip_timing(r2).dump());
  // timing keys are actually stripped
  CHECK(strip_timing(r1)["folds"][0].contains("train_seconds") == false);
}
