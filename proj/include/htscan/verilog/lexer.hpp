// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "htscan/errors.hpp"

namespace htscan::verilog {

enum class TokKind { Ident, Number, String, Punct, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;          // exact lexeme (numbers keep their source spelling)
  std::uint64_t value = 0;   // numeric value for Number tokens (x/z digits read as 0)
  int line = 1;
  int col = 1;
};

namespace detail {

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

inline int base_radix(char b) {
  switch (std::tolower(static_cast<unsigned char>(b))) {
    case 'b': return 2;
    case 'o': return 8;
    case 'd': return 10;
    case 'h': return 16;
  }
  return 0;
}

inline int digit_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c == 'x' || c == 'z' || c == '?') return 0;  // unknown bits read as 0
  return -1;
}

}  // namespace detail

/// Tokenizes the supported Verilog subset. Comments and (* attributes *) are
/// skipped. A '.' directly between identifier characters is treated as part of
/// the identifier so hierarchical names produced by flattening stay one token;
/// a '.' elsewhere (named port connections) is its own punct token.
class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  std::vector<Token> tokenize() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      if (pos_ >= src_.size()) break;
      out.push_back(scan_token());
    }
    out.push_back(Token{TokKind::End, "", 0, line_, col_});
    return out;
  }

 private:
  char peek(std::size_t off = 0) const {
    return pos_ + off < src_.size() ? src_[pos_ + off] : '\0';
  }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_trivia() {
    for (;;) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        advance();
        advance();
        while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
        if (pos_ >= src_.size()) raise(errc::syntax_error, "unterminated block comment");
        advance();
        advance();
      } else if (c == '(' && peek(1) == '*' && peek(2) != ')') {
        // synthesis attribute instance, ignored
        advance();
        advance();
        while (pos_ < src_.size() && !(peek() == '*' && peek(1) == ')')) advance();
        if (pos_ >= src_.size()) raise(errc::syntax_error, "unterminated attribute");
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  Token scan_token() {
    int line = line_, col = col_;
    char c = peek();
    if (c == '\\') return scan_escaped_ident(line, col);
    if (detail::ident_start(c)) return scan_ident(line, col);
    if (detail::is_digit(c) || (c == '\'' && detail::base_radix(peek(1)) != 0))
      return scan_number(line, col);
    if (c == '"') return scan_string(line, col);
    return scan_punct(line, col);
  }

  Token scan_ident(int line, int col) {
    std::string s;
    s += advance();
    for (;;) {
      while (detail::ident_char(peek())) s += advance();
      // hierarchical-name continuation: ident '.' ident with no whitespace
      if (peek() == '.' && detail::ident_start(peek(1))) {
        s += advance();
        continue;
      }
      break;
    }
    // a digit-leading suffix like `1wire` never reaches here; see scan_number
    return Token{TokKind::Ident, s, 0, line, col};
  }

  Token scan_escaped_ident(int line, int col) {
    advance();  // backslash
    std::string s;
    while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(peek()))) s += advance();
    if (s.empty()) raise(errc::syntax_error, "empty escaped identifier");
    Token t{TokKind::Ident, "\\" + s, 0, line, col};
    return t;
  }

  Token scan_number(int line, int col) {
    std::string s;
    std::uint64_t size_part = 0;
    bool any = false;
    while (detail::is_digit(peek()) || peek() == '_') {
      char c = advance();
      s += c;
      if (c != '_') {
        size_part = size_part * 10 + static_cast<std::uint64_t>(c - '0');
        any = true;
      }
    }
    if (peek() == '\'') {
      std::size_t save_pos = pos_;
      int save_line = line_, save_col = col_;
      std::string based = s;
      based += advance();  // '
      if (peek() == 's' || peek() == 'S') based += advance();
      int radix = detail::base_radix(peek());
      if (radix == 0) {
        // not a based literal after all (e.g. a stray tick); rewind
        pos_ = save_pos;
        line_ = save_line;
        col_ = save_col;
      } else {
        based += advance();
        std::uint64_t v = 0;
        bool digits = false;
        for (;;) {
          char c = peek();
          if (c == '_') {
            based += advance();
            continue;
          }
          int dv = detail::digit_value(c);
          if (dv < 0 || (radix == 10 && !(detail::is_digit(c) || c == 'x' || c == 'z' ||
                                          c == 'X' || c == 'Z'))) {
            break;
          }
          if (radix != 16 && dv >= radix && detail::digit_value(c) != 0) break;
          based += advance();
          v = v * static_cast<std::uint64_t>(radix) + static_cast<std::uint64_t>(dv);
          digits = true;
        }
        if (!digits) raise(errc::syntax_error, "based literal without digits at line " +
                                                    std::to_string(line));
        return Token{TokKind::Number, based, v, line, col};
      }
    }
    if (!any) raise(errc::syntax_error, "malformed number at line " + std::to_string(line));
    // digit-leading identifier (invalid Verilog, handled by the sanitizer): 1wire
    if (detail::ident_start(peek())) {
      while (detail::ident_char(peek())) s += advance();
      return Token{TokKind::Ident, s, 0, line, col};
    }
    return Token{TokKind::Number, s, size_part, line, col};
  }

  Token scan_string(int line, int col) {
    std::string s;
    s += advance();  // opening quote
    while (pos_ < src_.size() && peek() != '"') {
      if (peek() == '\\') s += advance();
      s += advance();
    }
    if (pos_ >= src_.size()) raise(errc::syntax_error, "unterminated string");
    s += advance();
    return Token{TokKind::String, s, 0, line, col};
  }

  Token scan_punct(int line, int col) {
    static const char* three[] = {"<<<", ">>>", "===", "!=="};
    static const char* two[] = {"~^", "^~", "<<", ">>", "<=", ">=", "==", "!=",
                                "&&", "||", "**", "~&", "~|"};
    for (const char* p : three) {
      if (src_.compare(pos_, 3, p) == 0) {
        advance(); advance(); advance();
        return Token{TokKind::Punct, p, 0, line, col};
      }
    }
    for (const char* p : two) {
      if (src_.compare(pos_, 2, p) == 0) {
        advance(); advance();
        return Token{TokKind::Punct, p, 0, line, col};
      }
    }
    char c = advance();
    return Token{TokKind::Punct, std::string(1, c), 0, line, col};
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace htscan::verilog
