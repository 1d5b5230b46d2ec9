// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "htscan/errors.hpp"
#include "htscan/graph/dfg.hpp"
#include "htscan/graph/features.hpp"
#include "htscan/graph/vocab.hpp"
#include "htscan/matrix.hpp"

namespace htscan::graph {

namespace detail {

inline void write_varint(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (;;) {
    std::uint8_t b = v & 0x7F;
    v >>= 7;
    if (v != 0) b |= 0x80;
    out.push_back(b);
    if (v == 0) return;
  }
}

struct ByteReader {
  const std::vector<std::uint8_t>& buf;
  std::size_t pos = 0;

  std::uint8_t byte() {
    if (pos >= buf.size()) raise(errc::corrupt_file, "truncated graph file");
    return buf[pos++];
  }

  std::uint64_t varint() {
    std::uint64_t v = 0;
    int shift = 0;
    for (;;) {
      std::uint8_t b = byte();
      v |= static_cast<std::uint64_t>(b & 0x7F) << shift;
      if (!(b & 0x80)) return v;
      shift += 7;
      if (shift >= 64) raise(errc::corrupt_file, "varint overflow");
    }
  }
};

}  // namespace detail

inline constexpr char kGraphMagic[4] = {'H', 'T', 'G', '1'};

/// Serializes a tagged graph: magic, dialect, vocabulary version, |V|, |E|, D,
/// node tags, edge pairs, and a trailing label byte when the label is known.
inline std::vector<std::uint8_t> save_graph(const DataFlowGraph& g) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kGraphMagic, kGraphMagic + 4);
  out.push_back(g.dialect == Dialect::Rtl ? 0 : 1);
  detail::write_varint(out, kVocabVersion);
  detail::write_varint(out, g.nodes.size());
  detail::write_varint(out, g.edges.size());
  const int dim = feature_dim(g.dialect);
  detail::write_varint(out, static_cast<std::uint64_t>(dim));
  for (const Node& n : g.nodes) {
    if (n.tag < 0 || n.tag >= dim)
      raise(errc::untagged_node, "cannot serialize an untagged graph");
    detail::write_varint(out, static_cast<std::uint64_t>(n.tag));
  }
  for (const Edge& e : g.edges) {
    detail::write_varint(out, static_cast<std::uint64_t>(e.first));
    detail::write_varint(out, static_cast<std::uint64_t>(e.second));
  }
  if (g.infected.has_value()) out.push_back(*g.infected ? 1 : 0);
  return out;
}

/// Reads a graph file back. Node kinds derive from tags; roots are recovered
/// as the in-degree-0 signal nodes.
inline std::pair<DataFlowGraph, Matrix> load_graph(const std::vector<std::uint8_t>& bytes) {
  detail::ByteReader r{bytes};
  for (char m : kGraphMagic)
    if (r.byte() != static_cast<std::uint8_t>(m)) raise(errc::corrupt_file, "bad magic");
  std::uint8_t dialect_byte = r.byte();
  if (dialect_byte > 1) raise(errc::corrupt_file, "bad dialect byte");
  DataFlowGraph g;
  g.dialect = dialect_byte == 0 ? Dialect::Rtl : Dialect::Netlist;
  std::uint64_t version = r.varint();
  if (version != kVocabVersion)
    raise(errc::version_mismatch, "graph file vocabulary version " + std::to_string(version) +
                                      ", expected " + std::to_string(kVocabVersion));
  std::uint64_t nv = r.varint();
  std::uint64_t ne = r.varint();
  std::uint64_t dim = r.varint();
  if (dim != static_cast<std::uint64_t>(feature_dim(g.dialect)))
    raise(errc::corrupt_file, "feature dim does not match dialect");
  g.nodes.reserve(nv);
  for (std::uint64_t i = 0; i < nv; ++i) {
    std::uint64_t tag = r.varint();
    if (tag >= dim) raise(errc::corrupt_file, "tag index out of range");
    Node n;
    n.tag = static_cast<std::int32_t>(tag);
    n.kind = kind_for_tag(g.dialect, n.tag);
    g.nodes.push_back(n);
  }
  for (std::uint64_t i = 0; i < ne; ++i) {
    std::uint64_t a = r.varint();
    std::uint64_t b = r.varint();
    if (a >= nv || b >= nv) raise(errc::corrupt_file, "edge endpoint out of range");
    g.edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
  }
  if (r.pos < bytes.size()) {
    std::uint8_t label = r.byte();
    if (label > 1) raise(errc::corrupt_file, "bad label byte");
    g.infected = label == 1;
  }
  if (r.pos != bytes.size()) raise(errc::corrupt_file, "trailing bytes");
  std::vector<int> indeg = g.in_degrees();
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (g.nodes[i].kind == NodeKind::Signal && indeg[i] == 0) g.roots.push_back(static_cast<int>(i));
  Matrix features = encode_features(g);
  return {std::move(g), std::move(features)};
}

inline void save_graph_file(const DataFlowGraph& g, const std::string& path) {
  std::vector<std::uint8_t> bytes = save_graph(g);
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(errc::corrupt_file, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline std::pair<DataFlowGraph, Matrix> load_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::corrupt_file, "cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return load_graph(bytes);
}

/// Human-readable export: nodes[{id,tag,kind}], edges[[s,d]], label.
inline std::string graph_to_json(const DataFlowGraph& g) {
  nlohmann::json j;
  j["dialect"] = dialect_name(g.dialect);
  j["vocab_version"] = kVocabVersion;
  j["nodes"] = nlohmann::json::array();
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const Node& n = g.nodes[i];
    nlohmann::json nj;
    nj["id"] = i;
    nj["tag"] = n.tag >= 0 ? tag_label(g.dialect, n.tag) : "untagged";
    nj["kind"] = node_kind_name(n.kind);
    j["nodes"].push_back(nj);
  }
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : g.edges) j["edges"].push_back({e.first, e.second});
  if (g.infected.has_value())
    j["label"] = *g.infected ? "infected" : "free";
  else
    j["label"] = nullptr;
  return j.dump(2) + "\n";
}

}  // namespace htscan::graph
