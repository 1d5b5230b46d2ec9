// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace htscan {

enum class errc {
  empty_input,
  unresolved_include,
  duplicate_module,
  syntax_error,
  unsupported_construct,
  unknown_signal,
  malformed_part_select,
  untagged_node,
  corrupt_file,
  version_mismatch,
  dimension_mismatch,
  nonfinite_value,
  nonfinite_gradient,
  empty_graph,
  empty_dataset,
  unknown_family,
  manifest_missing,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::empty_input: return "EmptyInput";
    case errc::unresolved_include: return "UnresolvedInclude";
    case errc::duplicate_module: return "DuplicateModule";
    case errc::syntax_error: return "SyntaxError";
    case errc::unsupported_construct: return "UnsupportedConstruct";
    case errc::unknown_signal: return "UnknownSignal";
    case errc::malformed_part_select: return "MalformedPartSelect";
    case errc::untagged_node: return "UntaggedNode";
    case errc::corrupt_file: return "CorruptFile";
    case errc::version_mismatch: return "VersionMismatch";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::nonfinite_value: return "NonfiniteValue";
    case errc::nonfinite_gradient: return "NonfiniteGradient";
    case errc::empty_graph: return "EmptyGraph";
    case errc::empty_dataset: return "EmptyDataset";
    case errc::unknown_family: return "UnknownFamily";
    case errc::manifest_missing: return "ManifestMissing";
  }
  return "Error";
}

/// Library-wide exception: a stable error code plus a human-readable message.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& msg) { throw error(code, msg); }

}  // namespace htscan
