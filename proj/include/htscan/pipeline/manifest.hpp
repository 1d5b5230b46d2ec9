// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "htscan/errors.hpp"

namespace htscan::pipeline {

struct CorpusEntry {
  std::string id;
  std::string family;
  bool infected = false;
  std::string path;  // Verilog source (file or directory), relative to the manifest
};

inline std::vector<CorpusEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(errc::manifest_missing, "cannot open manifest '" + path.string() + "'");
  std::vector<CorpusEntry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    CorpusEntry e;
    std::string label;
    if (!std::getline(ls, e.id, '\t') || !std::getline(ls, e.family, '\t') ||
        !std::getline(ls, label, '\t') || !std::getline(ls, e.path, '\t'))
      raise(errc::manifest_missing,
            "manifest line " + std::to_string(lineno) + " needs id<TAB>family<TAB>label<TAB>path");
    if (label == "infected")
      e.infected = true;
    else if (label == "free")
      e.infected = false;
    else
      raise(errc::manifest_missing, "manifest line " + std::to_string(lineno) +
                                        ": label must be 'infected' or 'free', got '" + label + "'");
    if (e.id.empty() || e.family.empty() || e.path.empty())
      raise(errc::manifest_missing, "manifest line " + std::to_string(lineno) + " has empty fields");
    entries.push_back(std::move(e));
  }
  return entries;
}

inline void write_manifest(const std::vector<CorpusEntry>& entries,
                           const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) raise(errc::manifest_missing, "cannot write manifest '" + path.string() + "'");
  for (const CorpusEntry& e : entries)
    out << e.id << '\t' << e.family << '\t' << (e.infected ? "infected" : "free") << '\t' << e.path
        << '\n';
}

}  // namespace htscan::pipeline
