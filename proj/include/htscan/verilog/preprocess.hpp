// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "htscan/errors.hpp"
#include "htscan/verilog/lexer.hpp"
#include "htscan/verilog/source.hpp"

namespace htscan::verilog {

namespace detail {

inline std::string strip_comments(const std::string& src) {
  std::string out;
  out.reserve(src.size());
  enum { Code, Line, Block, Str } state = Code;
  for (std::size_t i = 0; i < src.size(); ++i) {
    char c = src[i];
    char n = i + 1 < src.size() ? src[i + 1] : '\0';
    switch (state) {
      case Code:
        if (c == '/' && n == '/') {
          state = Line;
          ++i;
        } else if (c == '/' && n == '*') {
          state = Block;
          ++i;
        } else if (c == '"') {
          state = Str;
          out += c;
        } else {
          out += c;
        }
        break;
      case Line:
        if (c == '\n') {
          state = Code;
          out += c;
        }
        break;
      case Block:
        if (c == '*' && n == '/') {
          state = Code;
          ++i;
        } else if (c == '\n') {
          out += c;  // keep line numbering
        }
        break;
      case Str:
        if (c == '\\' && n != '\0') {
          out += c;
          out += n;
          ++i;
        } else {
          out += c;
          if (c == '"') state = Code;
        }
        break;
    }
  }
  return out;
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string basename_of(const std::string& path) {
  std::size_t pos = path.find_last_of("/\\");
  return pos == std::string::npos ? path : path.substr(pos + 1);
}

inline std::uint32_t fnv1a(const std::string& s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

inline std::string hex8(std::uint32_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(8, '0');
  for (int i = 7; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return s;
}

}  // namespace detail

/// Preprocessor state shared across the file set: `define environment plus the
/// expanded output segments with their file of origin.
class Preprocessor {
 public:
  explicit Preprocessor(const std::vector<SourceFile>& files) : files_(files) {
    for (const SourceFile& f : files_) {
      by_path_[f.path] = &f;
      by_base_[detail::basename_of(f.path)] = &f;
    }
  }

  SourceUnit run(Dialect dialect) {
    if (files_.empty()) raise(errc::empty_input, "no input files");
    bool any = false;
    for (const SourceFile& f : files_)
      if (detail::trim(f.text) != "") any = true;
    if (!any) raise(errc::empty_input, "all input files are empty");

    for (const SourceFile& f : files_)
      if (!consumed_.count(f.path)) process_file(f);

    SourceUnit unit;
    unit.dialect = dialect;
    std::ostringstream text;
    int line = 1;
    for (const Segment& seg : segments_) {
      int nlines = 1 + static_cast<int>(std::count(seg.text.begin(), seg.text.end(), '\n'));
      if (!seg.text.empty() && seg.text.back() == '\n') --nlines;
      if (nlines > 0) {
        unit.origin.push_back(OriginSpan{seg.path, line, line + nlines - 1});
        line += nlines;
      }
      text << seg.text;
    }
    unit.text = sanitize(text.str(), unit.renames);
    check_duplicate_modules(unit.text);
    return unit;
  }

 private:
  struct Segment {
    std::string path;
    std::string text;
  };

  void process_file(const SourceFile& f) {
    if (include_stack_.count(f.path))
      raise(errc::unresolved_include, "recursive include of '" + f.path + "'");
    include_stack_.insert(f.path);
    std::string clean = detail::strip_comments(f.text);

    std::istringstream in(clean);
    std::string line;
    std::ostringstream chunk;
    std::vector<bool> cond{true};
    auto active = [&] { return std::all_of(cond.begin(), cond.end(), [](bool b) { return b; }); };
    auto flush = [&] {
      segments_.push_back(Segment{f.path, chunk.str()});
      chunk.str("");
    };

    while (std::getline(in, line)) {
      std::string t = detail::trim(line);
      if (!t.empty() && t[0] == '`') {
        std::size_t i = 1;
        std::string word;
        while (i < t.size() && (std::isalnum(static_cast<unsigned char>(t[i])) || t[i] == '_'))
          word += t[i++];
        std::string rest = detail::trim(t.substr(i));
        if (word == "define") {
          if (active()) handle_define(rest);
          chunk << "\n";
          continue;
        }
        if (word == "undef") {
          if (active()) macros_.erase(rest);
          chunk << "\n";
          continue;
        }
        if (word == "ifdef" || word == "ifndef") {
          bool defined = macros_.count(rest) > 0;
          cond.push_back(word == "ifdef" ? defined : !defined);
          chunk << "\n";
          continue;
        }
        if (word == "else") {
          if (cond.size() < 2) raise(errc::syntax_error, "`else without `ifdef in " + f.path);
          cond.back() = !cond.back();
          chunk << "\n";
          continue;
        }
        if (word == "endif") {
          if (cond.size() < 2) raise(errc::syntax_error, "`endif without `ifdef in " + f.path);
          cond.pop_back();
          chunk << "\n";
          continue;
        }
        if (word == "include") {
          if (active()) {
            std::string name = parse_include_name(rest, f.path);
            const SourceFile* inc = lookup(name);
            if (!inc)
              raise(errc::unresolved_include,
                    "'" + name + "' included from '" + f.path + "' is not in the file set");
            consumed_.insert(inc->path);
            flush();
            process_file(*inc);
          }
          chunk << "\n";
          continue;
        }
        if (word == "timescale" || word == "default_nettype" || word == "resetall" ||
            word == "celldefine" || word == "endcelldefine") {
          chunk << "\n";
          continue;
        }
        if (macros_.count(word)) {
          // macro usage at start of line falls through to normal expansion
        } else {
          raise(errc::unsupported_construct, "compiler directive `" + word + " in " + f.path);
        }
      }
      if (active()) {
        chunk << expand_macros(line, f.path) << "\n";
      } else {
        chunk << "\n";
      }
    }
    if (cond.size() != 1) raise(errc::syntax_error, "unterminated `ifdef in " + f.path);
    flush();
    include_stack_.erase(f.path);
  }

  void handle_define(const std::string& rest) {
    std::size_t i = 0;
    std::string name;
    while (i < rest.size() && (std::isalnum(static_cast<unsigned char>(rest[i])) || rest[i] == '_'))
      name += rest[i++];
    if (name.empty()) raise(errc::syntax_error, "`define without a name");
    if (i < rest.size() && rest[i] == '(')
      raise(errc::unsupported_construct, "function-like macro `" + name);
    macros_[name] = detail::trim(rest.substr(i));
  }

  std::string parse_include_name(const std::string& rest, const std::string& from) {
    std::size_t a = rest.find('"');
    std::size_t b = rest.rfind('"');
    if (a == std::string::npos || b <= a)
      raise(errc::syntax_error, "malformed `include in " + from);
    return rest.substr(a + 1, b - a - 1);
  }

  const SourceFile* lookup(const std::string& name) const {
    auto it = by_path_.find(name);
    if (it != by_path_.end()) return it->second;
    auto jt = by_base_.find(detail::basename_of(name));
    if (jt != by_base_.end()) return jt->second;
    return nullptr;
  }

  std::string expand_macros(const std::string& line, const std::string& from) const {
    std::string cur = line;
    for (int round = 0; round < 8; ++round) {
      std::size_t tick = cur.find('`');
      if (tick == std::string::npos) return cur;
      std::string out;
      std::size_t pos = 0;
      bool changed = false;
      while (pos < cur.size()) {
        if (cur[pos] != '`') {
          out += cur[pos++];
          continue;
        }
        std::size_t i = pos + 1;
        std::string name;
        while (i < cur.size() && (std::isalnum(static_cast<unsigned char>(cur[i])) || cur[i] == '_'))
          name += cur[i++];
        auto it = macros_.find(name);
        if (it == macros_.end())
          raise(errc::syntax_error, "undefined macro `" + name + " in " + from);
        out += it->second;
        pos = i;
        changed = true;
      }
      cur = out;
      if (!changed) return cur;
    }
    raise(errc::syntax_error, "macro expansion did not settle in " + from);
  }

  /// Rewrites invalid identifiers: digit-leading names get a '_' prefix and
  /// escaped identifiers become esc_<hash>. Line structure is preserved.
  std::string sanitize(const std::string& text, std::vector<Rename>& renames) {
    std::string out;
    out.reserve(text.size());
    std::set<std::string> recorded;
    auto record = [&](const std::string& orig, const std::string& repl) {
      if (!recorded.count(orig)) {
        recorded.insert(orig);
        renames.push_back(Rename{orig, repl});
      }
    };
    std::size_t i = 0;
    while (i < text.size()) {
      char c = text[i];
      if (c == '"') {  // string literal
        out += c;
        ++i;
        while (i < text.size() && text[i] != '"') {
          if (text[i] == '\\' && i + 1 < text.size()) out += text[i++];
          out += text[i++];
        }
        if (i < text.size()) out += text[i++];
        continue;
      }
      if (c == '\\') {  // escaped identifier up to whitespace
        std::size_t j = i + 1;
        std::string name;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])))
          name += text[j++];
        std::string repl = "esc_" + detail::hex8(detail::fnv1a(name));
        record("\\" + name, repl);
        out += repl;
        i = j;
        continue;
      }
      if (detail::is_digit(c)) {
        std::size_t j = i;
        std::string tok;
        while (j < text.size() && (detail::is_digit(text[j]) || text[j] == '_')) tok += text[j++];
        // based literal: <size>'<base><digits>
        std::size_t k = j;
        while (k < text.size() && (text[k] == ' ' || text[k] == '\t')) ++k;
        if (k < text.size() && text[k] == '\'') {
          out += text.substr(i, j - i);
          i = j;
          continue;
        }
        if (j < text.size() && (std::isalpha(static_cast<unsigned char>(text[j])) || text[j] == '$')) {
          // digit-leading identifier
          while (j < text.size() &&
                 (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
                  text[j] == '$'))
            tok += text[j++];
          record(tok, "_" + tok);
          out += "_" + tok;
          i = j;
          continue;
        }
        out += tok;
        i = j;
        continue;
      }
      if (detail::ident_start(c)) {  // ordinary identifier or keyword: pass through
        std::size_t j = i;
        while (j < text.size() && detail::ident_char(text[j])) ++j;
        out += text.substr(i, j - i);
        i = j;
        continue;
      }
      out += c;
      ++i;
    }
    return out;
  }

  void check_duplicate_modules(const std::string& text) const {
    Lexer lex(text);
    std::vector<Token> toks = lex.tokenize();
    std::set<std::string> seen;
    for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
      if (toks[i].kind == TokKind::Ident && toks[i].text == "module" &&
          toks[i + 1].kind == TokKind::Ident) {
        const std::string& name = toks[i + 1].text;
        if (seen.count(name))
          raise(errc::duplicate_module, "module '" + name + "' declared more than once");
        seen.insert(name);
      }
    }
  }

  const std::vector<SourceFile>& files_;
  std::map<std::string, const SourceFile*> by_path_;
  std::map<std::string, const SourceFile*> by_base_;
  std::map<std::string, std::string> macros_;
  std::set<std::string> include_stack_;
  std::set<std::string> consumed_;
  std::vector<Segment> segments_;
};

/// Combines the file set into one preprocessed unit: comments stripped,
/// directives expanded from the provided files only, identifiers sanitized.
inline SourceUnit preprocess(const std::vector<SourceFile>& files, Dialect dialect) {
  Preprocessor pp(files);
  return pp.run(dialect);
}

}  // namespace htscan::verilog
