// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "htscan/errors.hpp"
#include "htscan/graph/serialize.hpp"
#include "htscan/graph/transforms.hpp"
#include "htscan/pipeline/manifest.hpp"
#include "htscan/verilog/dataflow.hpp"
#include "htscan/verilog/parser.hpp"
#include "htscan/verilog/preprocess.hpp"

namespace htscan::pipeline {

namespace fs = std::filesystem;
using graph::DataFlowGraph;
using verilog::Dialect;

inline std::string read_text_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) raise(errc::unresolved_include, "cannot read '" + p.string() + "'");
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

/// Loads one design's source set: a single file, or every *.v in a directory.
inline std::vector<verilog::SourceFile> load_sources(const fs::path& path) {
  std::vector<verilog::SourceFile> files;
  if (fs::is_directory(path)) {
    std::vector<fs::path> names;
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ".v") names.push_back(entry.path());
    std::sort(names.begin(), names.end());
    for (const fs::path& p : names) files.push_back({p.string(), read_text_file(p)});
  } else {
    files.push_back({path.string(), read_text_file(path)});
  }
  if (files.empty()) raise(errc::empty_input, "no Verilog files at '" + path.string() + "'");
  return files;
}

/// Full frontend + graph pipeline for one design:
/// preprocess -> parse -> flatten -> per-signal analysis -> merge -> trim ->
/// dialect-specific optimization/tagging. The result is ready to encode.
inline DataFlowGraph extract_graph(const std::vector<verilog::SourceFile>& files,
                                   Dialect dialect) {
  verilog::SourceUnit unit = verilog::preprocess(files, dialect);
  verilog::DesignAst ast = verilog::parse(unit);
  verilog::DesignAst flat = verilog::flatten(ast);
  std::vector<std::string> signals = verilog::list_signals(flat);
  if (signals.empty()) raise(errc::empty_graph, "design drives no signals");
  std::vector<graph::SignalDfg> per_signal;
  per_signal.reserve(signals.size());
  for (const std::string& s : signals) per_signal.push_back(verilog::analyze_dataflow(flat, s));
  DataFlowGraph merged = graph::merge(per_signal);
  DataFlowGraph trimmed = graph::trim(merged).graph;
  if (dialect == Dialect::Netlist) {
    DataFlowGraph optimized = graph::optimize_netlist(trimmed).graph;
    return graph::normalize_netlist(optimized).graph;
  }
  return graph::tag_rtl(trimmed);
}

struct IngestRecord {
  std::string id;
  bool ok = false;
  std::string graph_path;
  std::string error;
  std::size_t nodes = 0;
  std::size_t edges = 0;
};

struct IngestReport {
  std::vector<IngestRecord> records;

  int ok_count() const {
    int n = 0;
    for (const IngestRecord& r : records) n += r.ok ? 1 : 0;
    return n;
  }
  int error_count() const { return static_cast<int>(records.size()) - ok_count(); }
};

/// Converts every manifest entry to a serialized graph under out_dir.
/// Per-entry failures are collected in the report; the batch continues.
inline IngestReport ingest(const std::vector<CorpusEntry>& entries, Dialect dialect,
                           const fs::path& base_dir, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  IngestReport report;
  for (const CorpusEntry& e : entries) {
    IngestRecord rec;
    rec.id = e.id;
    try {
      fs::path src = fs::path(e.path).is_absolute() ? fs::path(e.path) : base_dir / e.path;
      DataFlowGraph g = extract_graph(load_sources(src), dialect);
      g.infected = e.infected;
      fs::path out_path = out_dir / (e.id + ".htg");
      graph::save_graph_file(g, out_path.string());
      rec.ok = true;
      rec.graph_path = out_path.string();
      rec.nodes = g.nodes.size();
      rec.edges = g.edges.size();
    } catch (const error& err) {
      rec.error = err.what();
    } catch (const std::exception& err) {
      rec.error = err.what();
    }
    report.records.push_back(std::move(rec));
  }
  return report;
}

}  // namespace htscan::pipeline
