// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <string>
#include <vector>

#include "htscan/errors.hpp"
#include "htscan/pipeline/manifest.hpp"

namespace htscan::pipeline {

struct LooSplit {
  std::vector<CorpusEntry> train;
  std::vector<CorpusEntry> test;
};

/// Leave-one-family-out: every entry of the held-out base circuit (both
/// labels) goes to test; everything else trains.
inline LooSplit loo_split(const std::vector<CorpusEntry>& corpus,
                          const std::string& held_out_family) {
  LooSplit split;
  bool found = false;
  for (const CorpusEntry& e : corpus) {
    if (e.family == held_out_family) {
      found = true;
      split.test.push_back(e);
    } else {
      split.train.push_back(e);
    }
  }
  if (!found) raise(errc::unknown_family, "family '" + held_out_family + "' not in corpus");
  return split;
}

inline std::vector<std::string> corpus_families(const std::vector<CorpusEntry>& corpus) {
  std::vector<std::string> fams;
  std::set<std::string> seen;
  for (const CorpusEntry& e : corpus)
    if (seen.insert(e.family).second) fams.push_back(e.family);
  return fams;
}

}  // namespace htscan::pipeline
