// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace htscan::verilog {

enum class Dialect { Rtl, Netlist };

inline const char* dialect_name(Dialect d) { return d == Dialect::Rtl ? "rtl" : "netlist"; }

/// One raw input file (path is used for `include resolution and diagnostics).
struct SourceFile {
  std::string path;
  std::string text;
};

/// Maps a line range of the preprocessed text back to the file it came from.
struct OriginSpan {
  std::string path;
  int first_line = 0;  // 1-based, inclusive, in SourceUnit::text
  int last_line = 0;   // inclusive
};

/// Record of an identifier rewritten by the sanitizer.
struct Rename {
  std::string original;
  std::string sanitized;
};

/// Preprocessed design: one flattened text with all module bodies present,
/// comments stripped, directives expanded and identifiers sanitized.
struct SourceUnit {
  std::string text;
  std::vector<OriginSpan> origin;
  std::vector<Rename> renames;
  Dialect dialect = Dialect::Rtl;
};

}  // namespace htscan::verilog
