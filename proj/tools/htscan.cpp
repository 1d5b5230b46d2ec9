// SPDX-License-Identifier: Apache-2.0
//
// htscan: hardware-trojan detection on Verilog data-flow graphs.
// Subcommands: synth-corpus, extract, train, detect, eval.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "htscan/gnn/model.hpp"
#include "htscan/gnn/train.hpp"
#include "htscan/graph/serialize.hpp"
#include "htscan/pipeline/experiment.hpp"
#include "htscan/pipeline/ingest.hpp"
#include "htscan/pipeline/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace htscan;

namespace {

int cmd_synth_corpus(std::uint64_t seed, int n_free, int n_infected, const std::string& out) {
  pipeline::SynthOptions opts;
  opts.seed = seed;
  opts.n_free = n_free;
  opts.n_infected = n_infected;
  fs::path out_dir(out);
  auto rtl = pipeline::synthesize_corpus(opts, verilog::Dialect::Rtl, out_dir / "rtl");
  auto nl = pipeline::synthesize_corpus(opts, verilog::Dialect::Netlist, out_dir / "netlist");
  std::cout << "wrote " << rtl.entries.size() << " RTL designs to " << (out_dir / "rtl").string()
            << "\n";
  std::cout << "wrote " << nl.entries.size() << " netlist designs to "
            << (out_dir / "netlist").string() << "\n";
  return 0;
}

int cmd_extract(const std::string& dialect_str, const std::string& manifest,
                const std::string& out, bool json_export) {
  verilog::Dialect dialect =
      dialect_str == "netlist" ? verilog::Dialect::Netlist : verilog::Dialect::Rtl;
  fs::path manifest_path(manifest);
  std::vector<pipeline::CorpusEntry> entries = pipeline::read_manifest(manifest_path);
  pipeline::IngestReport report =
      pipeline::ingest(entries, dialect, manifest_path.parent_path(), out);
  for (const pipeline::IngestRecord& r : report.records) {
    if (r.ok) {
      std::cout << r.id << ": " << r.nodes << " nodes, " << r.edges << " edges -> " << r.graph_path
                << "\n";
      if (json_export) {
        auto [g, features] = graph::load_graph_file(r.graph_path);
        (void)features;
        std::ofstream js(fs::path(r.graph_path).replace_extension(".json"));
        js << graph::graph_to_json(g);
      }
    } else {
      std::cout << r.id << ": ERROR " << r.error << "\n";
    }
  }
  std::cout << report.ok_count() << " ok, " << report.error_count() << " failed\n";
  return report.ok_count() > 0 ? 0 : 1;
}

int cmd_train(const std::string& config, const std::string& out) {
  pipeline::ExperimentConfig cfg = pipeline::read_config(config);
  pipeline::FullTrainResult r = pipeline::train_full(cfg);
  gnn::save_model_file(r.model, out);
  fs::path loss_path = fs::path(out).replace_extension(".loss.csv");
  std::ofstream loss(loss_path);
  loss << gnn::loss_history_csv(r.history);
  std::cout << "model written to " << out << " (final mean loss "
            << (r.history.empty() ? 0.0 : r.history.back()) << ")\n";
  std::cout << "loss history written to " << loss_path.string() << "\n";
  return 0;
}

int cmd_detect(const std::string& model_path, const std::string& design) {
  gnn::ModelParams model = gnn::load_model_file(model_path);
  auto t0 = std::chrono::steady_clock::now();
  graph::DataFlowGraph g =
      pipeline::extract_graph(pipeline::load_sources(design), model.dialect);
  gnn::Prediction pred = gnn::predict(model, g);
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  json verdict;
  verdict["design"] = design;
  verdict["dialect"] = verilog::dialect_name(model.dialect);
  verdict["label"] = pred.infected ? "infected" : "free";
  verdict["p_infected"] = pred.probs[0];
  verdict["p_free"] = pred.probs[1];
  verdict["nodes"] = g.nodes.size();
  verdict["detect_ms"] = ms;
  std::cout << verdict.dump(2) << "\n";
  return pred.infected ? 2 : 0;
}

int cmd_eval(const std::string& config, const std::string& report_path) {
  pipeline::ExperimentConfig cfg = pipeline::read_config(config);
  json report = pipeline::run_experiment(cfg);
  std::ofstream out(report_path);
  if (!out) {
    std::cerr << "cannot write report to " << report_path << "\n";
    return 1;
  }
  out << report.dump(2) << "\n";
  for (const json& fold : report["folds"]) {
    if (fold.contains("error")) {
      std::cout << "fold " << fold["family"].get<std::string>() << " repeat " << fold["repeat"]
                << ": ERROR " << fold["error"].get<std::string>() << "\n";
      continue;
    }
    const json& m = fold["metrics"];
    std::cout << "fold " << fold["family"].get<std::string>() << " repeat " << fold["repeat"]
              << ": P=" << m["precision"].get<double>() << " R=" << m["recall"].get<double>()
              << " F=" << m["f_beta"].get<double>() << "\n";
  }
  const json& agg = report["aggregate"];
  std::cout << "aggregate over " << agg["folds"] << " folds: P=" << agg["mean_precision"]
            << " R=" << agg["mean_recall"] << " F=" << agg["mean_f_beta"] << "\n";
  std::cout << "report written to " << report_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Golden-reference-free hardware-trojan detector for Verilog designs"};
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth-corpus", "Generate a synthetic labeled corpus");
  std::uint64_t seed = 1;
  int n_free = 20, n_infected = 20;
  std::string synth_out;
  synth->add_option("--seed", seed, "RNG seed");
  synth->add_option("--free", n_free, "number of HT-free designs")->required();
  synth->add_option("--infected", n_infected, "number of HT-infected designs")->required();
  synth->add_option("--out", synth_out, "output directory")->required();

  auto* extract = app.add_subcommand("extract", "Convert Verilog designs to data-flow graphs");
  std::string dialect = "rtl", manifest, extract_out;
  bool json_export = false;
  extract->add_option("--dialect", dialect, "rtl or netlist")
      ->check(CLI::IsMember({"rtl", "netlist"}))
      ->required();
  extract->add_option("--manifest", manifest, "TSV manifest: id, family, label, path")->required();
  extract->add_option("--out", extract_out, "output directory for .htg graphs")->required();
  extract->add_flag("--json", json_export, "also write human-readable JSON exports");

  auto* train = app.add_subcommand("train", "Train a detector on a corpus");
  std::string train_config, train_out;
  train->add_option("--config", train_config, "experiment config file")->required();
  train->add_option("--out", train_out, "model checkpoint path")->required();

  auto* detect = app.add_subcommand("detect", "Classify one design");
  std::string model_path, design_path;
  detect->add_option("--model", model_path, "model checkpoint")->required();
  detect->add_option("design", design_path, "Verilog file or directory")->required();

  auto* eval = app.add_subcommand("eval", "Leave-one-family-out evaluation");
  std::string eval_config, report_path;
  eval->add_option("--config", eval_config, "experiment config file")->required();
  eval->add_option("--report", report_path, "output report JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return cmd_synth_corpus(seed, n_free, n_infected, synth_out);
    if (extract->parsed()) return cmd_extract(dialect, manifest, extract_out, json_export);
    if (train->parsed()) return cmd_train(train_config, train_out);
    if (detect->parsed()) return cmd_detect(model_path, design_path);
    if (eval->parsed()) return cmd_eval(eval_config, report_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
