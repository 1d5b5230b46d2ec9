// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "htscan/errors.hpp"
#include "htscan/gnn/model.hpp"
#include "htscan/gnn/train.hpp"
#include "htscan/graph/serialize.hpp"
#include "htscan/pipeline/ingest.hpp"
#include "htscan/pipeline/loo.hpp"
#include "htscan/pipeline/manifest.hpp"
#include "htscan/pipeline/metrics.hpp"

namespace htscan::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

/// Experiment configuration, read from a plain key = value file.
/// Model hyperparameters default per dialect to the reference settings.
struct ExperimentConfig {
  Dialect dialect = Dialect::Rtl;
  std::string manifest;
  std::string graph_dir;
  int layers = 0;          // 0: dialect default
  int hidden_units = 0;    // 0: dialect default
  double pooling_ratio = -1.0;
  gnn::Readout readout = gnn::Readout::Max;
  double dropout = 0.5;
  int epochs = 200;
  int batch_size = 0;  // 0: dialect default
  double learning_rate = 0.001;
  int repeats = 5;
  std::uint64_t seed = 1;
  double beta = 1.0;

  void apply_dialect_defaults() {
    if (layers == 0) layers = dialect == Dialect::Rtl ? 2 : 3;
    if (hidden_units == 0) hidden_units = dialect == Dialect::Rtl ? 200 : 55;
    if (pooling_ratio < 0.0) pooling_ratio = dialect == Dialect::Rtl ? 0.8 : 0.6;
    if (batch_size == 0) batch_size = dialect == Dialect::Rtl ? 4 : 2;
  }
};

inline ExperimentConfig parse_config_text(const std::string& text, const fs::path& base_dir) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path.string() : (base_dir / path).string();
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      std::size_t b = s.find_first_not_of(" \t\r\"");
      if (b == std::string::npos) return std::string();
      std::size_t e = s.find_last_not_of(" \t\r\"");
      return s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    try {
      if (key == "dialect") {
        if (val == "rtl") cfg.dialect = Dialect::Rtl;
        else if (val == "netlist") cfg.dialect = Dialect::Netlist;
        else raise(errc::manifest_missing, "dialect must be rtl or netlist");
      } else if (key == "manifest") cfg.manifest = resolve(val);
      else if (key == "graph_dir") cfg.graph_dir = resolve(val);
      else if (key == "layers") cfg.layers = std::stoi(val);
      else if (key == "hidden_units") cfg.hidden_units = std::stoi(val);
      else if (key == "pooling_ratio") cfg.pooling_ratio = std::stod(val);
      else if (key == "dropout") cfg.dropout = std::stod(val);
      else if (key == "epochs") cfg.epochs = std::stoi(val);
      else if (key == "batch_size") cfg.batch_size = std::stoi(val);
      else if (key == "learning_rate") cfg.learning_rate = std::stod(val);
      else if (key == "repeats") cfg.repeats = std::stoi(val);
      else if (key == "seed") cfg.seed = std::stoull(val);
      else if (key == "beta") cfg.beta = std::stod(val);
      else if (key == "readout") {
        if (val == "max") cfg.readout = gnn::Readout::Max;
        else if (val == "mean") cfg.readout = gnn::Readout::Mean;
        else if (val == "sum") cfg.readout = gnn::Readout::Sum;
        else raise(errc::manifest_missing, "readout must be max, mean or sum");
      } else {
        raise(errc::manifest_missing, "unknown config key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      raise(errc::manifest_missing,
            "bad value for '" + key + "' on config line " + std::to_string(lineno));
    }
  }
  cfg.apply_dialect_defaults();
  return cfg;
}

inline ExperimentConfig read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) raise(errc::manifest_missing, "cannot open config '" + path.string() + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config_text(text, path.parent_path());
}

/// Loads (ingesting on demand) the serialized graph of every corpus entry.
struct LoadedCorpus {
  std::vector<CorpusEntry> entries;                 // entries with usable graphs
  std::map<std::string, gnn::GraphSample> samples;  // by id
  json ingest_errors = json::array();
};

inline LoadedCorpus load_corpus(const ExperimentConfig& cfg) {
  fs::path manifest_path(cfg.manifest);
  std::vector<CorpusEntry> entries = read_manifest(manifest_path);
  if (entries.empty()) raise(errc::empty_dataset, "manifest has no entries");
  fs::path base_dir = manifest_path.parent_path();
  fs::path graph_dir = cfg.graph_dir.empty() ? base_dir / "graphs" : fs::path(cfg.graph_dir);

  bool complete = true;
  for (const CorpusEntry& e : entries)
    if (!fs::exists(graph_dir / (e.id + ".htg"))) complete = false;

  LoadedCorpus corpus;
  if (!complete) {
    IngestReport rep = ingest(entries, cfg.dialect, base_dir, graph_dir);
    for (const IngestRecord& r : rep.records) {
      if (!r.ok) {
        json err;
        err["id"] = r.id;
        err["error"] = r.error;
        corpus.ingest_errors.push_back(err);
      }
    }
  }
  for (const CorpusEntry& e : entries) {
    fs::path gp = graph_dir / (e.id + ".htg");
    if (!fs::exists(gp)) continue;
    auto [g, features] = graph::load_graph_file(gp.string());
    corpus.samples.emplace(e.id, gnn::GraphSample::from_graph(g, features, e.infected));
    corpus.entries.push_back(e);
  }
  if (corpus.entries.empty()) raise(errc::empty_dataset, "no usable graphs in corpus");
  return corpus;
}

inline json eval_report_json(const EvalReport& rep) {
  json j;
  j["tp"] = rep.counts.tp;
  j["fn"] = rep.counts.fn;
  j["fp"] = rep.counts.fp;
  j["tn"] = rep.counts.tn;
  j["precision"] = rep.precision;
  j["recall"] = rep.recall;
  j["f_beta"] = rep.f_beta;
  j["precision_undefined"] = rep.precision_undefined;
  j["recall_undefined"] = rep.recall_undefined;
  j["f_undefined"] = rep.f_undefined;
  j["detect_ms_per_sample"] = rep.detect_ms_per_sample;
  return j;
}

/// Full leave-one-family-out experiment: for every repeat and family, train
/// on the remaining families and evaluate on the held-out one. Seeds derive
/// from the config seed, so reports are reproducible bit for bit (timing
/// fields aside).
inline json run_experiment(const ExperimentConfig& cfg) {
  auto t_start = std::chrono::steady_clock::now();
  LoadedCorpus corpus = load_corpus(cfg);
  std::vector<std::string> families = corpus_families(corpus.entries);

  json report;
  report["config"] = {{"dialect", verilog::dialect_name(cfg.dialect)},
                      {"layers", cfg.layers},
                      {"hidden_units", cfg.hidden_units},
                      {"pooling_ratio", cfg.pooling_ratio},
                      {"readout", gnn::readout_name(cfg.readout)},
                      {"dropout", cfg.dropout},
                      {"epochs", cfg.epochs},
                      {"batch_size", cfg.batch_size},
                      {"learning_rate", cfg.learning_rate},
                      {"repeats", cfg.repeats},
                      {"seed", cfg.seed},
                      {"beta", cfg.beta},
                      {"corpus_size", corpus.entries.size()},
                      {"families", families}};
  report["ingest_errors"] = corpus.ingest_errors;
  report["folds"] = json::array();

  double sum_p = 0.0, sum_r = 0.0, sum_f = 0.0, sum_ms = 0.0;
  int n_folds = 0;
  for (int rep = 0; rep < cfg.repeats; ++rep) {
    for (std::size_t fi = 0; fi < families.size(); ++fi) {
      const std::string& family = families[fi];
      std::uint64_t fold_seed =
          cfg.seed + 7919ULL * (static_cast<std::uint64_t>(rep) * families.size() + fi);
      json fold;
      fold["family"] = family;
      fold["repeat"] = rep;
      fold["seed"] = fold_seed;
      try {
        LooSplit split = loo_split(corpus.entries, family);
        std::vector<gnn::GraphSample> train_set, test_set;
        for (const CorpusEntry& e : split.train) train_set.push_back(corpus.samples.at(e.id));
        for (const CorpusEntry& e : split.test) test_set.push_back(corpus.samples.at(e.id));

        gnn::ModelParams model =
            gnn::make_model(cfg.dialect, cfg.layers, cfg.hidden_units, cfg.pooling_ratio,
                            cfg.readout, cfg.dropout, fold_seed);
        gnn::TrainConfig tc;
        tc.epochs = cfg.epochs;
        tc.batch_size = cfg.batch_size;
        tc.learning_rate = cfg.learning_rate;
        tc.seed = fold_seed + 1;
        tc.dropout_rate = cfg.dropout;
        auto t0 = std::chrono::steady_clock::now();
        std::vector<double> history = gnn::train(model, train_set, tc);
        double train_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        EvalReport er = evaluate(model, test_set, cfg.beta);
        fold["train_size"] = train_set.size();
        fold["test_size"] = test_set.size();
        fold["final_train_loss"] = history.empty() ? 0.0 : history.back();
        fold["metrics"] = eval_report_json(er);
        fold["train_seconds"] = train_s;
        sum_p += er.precision;
        sum_r += er.recall;
        sum_f += er.f_beta;
        sum_ms += er.detect_ms_per_sample;
        ++n_folds;
      } catch (const std::exception& e) {
        fold["error"] = e.what();
      }
      report["folds"].push_back(fold);
    }
  }
  json agg;
  agg["folds"] = n_folds;
  agg["mean_precision"] = n_folds ? sum_p / n_folds : 0.0;
  agg["mean_recall"] = n_folds ? sum_r / n_folds : 0.0;
  agg["mean_f_beta"] = n_folds ? sum_f / n_folds : 0.0;
  agg["mean_detect_ms_per_sample"] = n_folds ? sum_ms / n_folds : 0.0;
  report["aggregate"] = agg;
  report["total_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

/// Removes wall-clock fields so two reports can be compared for determinism.
inline json strip_timing(const json& j) {
  if (j.is_object()) {
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      if (key == "train_seconds" || key == "total_seconds" || key == "detect_ms_per_sample" ||
          key == "mean_detect_ms_per_sample")
        continue;
      out[key] = strip_timing(it.value());
    }
    return out;
  }
  if (j.is_array()) {
    json out = json::array();
    for (const json& v : j) out.push_back(strip_timing(v));
    return out;
  }
  return j;
}

/// Trains one model on the whole corpus (no hold-out), for the train command.
struct FullTrainResult {
  gnn::ModelParams model;
  std::vector<double> history;
};

inline FullTrainResult train_full(const ExperimentConfig& cfg) {
  LoadedCorpus corpus = load_corpus(cfg);
  std::vector<gnn::GraphSample> all;
  for (const CorpusEntry& e : corpus.entries) all.push_back(corpus.samples.at(e.id));
  FullTrainResult r{gnn::make_model(cfg.dialect, cfg.layers, cfg.hidden_units, cfg.pooling_ratio,
                                    cfg.readout, cfg.dropout, cfg.seed),
                    {}};
  gnn::TrainConfig tc;
  tc.epochs = cfg.epochs;
  tc.batch_size = cfg.batch_size;
  tc.learning_rate = cfg.learning_rate;
  tc.seed = cfg.seed + 1;
  tc.dropout_rate = cfg.dropout;
  r.history = gnn::train(r.model, all, tc);
  return r;
}

}  // namespace htscan::pipeline
