// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "htscan/errors.hpp"
#include "htscan/verilog/ast.hpp"
#include "htscan/verilog/lexer.hpp"
#include "htscan/verilog/source.hpp"

namespace htscan::verilog {

namespace detail {

inline const std::set<std::string>& keywords() {
  static const std::set<std::string> kw = {
      "module", "endmodule", "input", "output", "inout", "wire", "reg", "parameter",
      "localparam", "assign", "always", "begin", "end", "if", "else", "case", "casez",
      "casex", "endcase", "default", "posedge", "negedge", "or", "and", "nand", "nor",
      "xor", "xnor", "not", "buf", "initial", "generate", "endgenerate", "function",
      "endfunction", "task", "endtask", "integer", "real", "genvar", "for", "while",
      "repeat", "forever", "wait", "fork", "join", "signed", "tri", "supply0", "supply1",
      "deassign", "force", "release", "defparam", "event", "specify", "endspecify",
  };
  return kw;
}

inline const std::set<std::string>& gate_names() {
  static const std::set<std::string> g = {"and", "or", "nand", "nor", "xor", "xnor", "not", "buf"};
  return g;
}

}  // namespace detail

/// Recursive-descent parser for the supported synthesizable subset.
/// Constructs outside the subset raise UnsupportedConstruct naming the
/// construct; malformed input raises SyntaxError with line/column.
class Parser {
 public:
  explicit Parser(const std::string& text, Dialect dialect = Dialect::Rtl)
      : dialect_(dialect) {
    Lexer lex(text);
    toks_ = lex.tokenize();
  }

  DesignAst parse_design() {
    DesignAst ast;
    ast.dialect = dialect_;
    while (!at_end()) {
      if (is_ident("module")) {
        ast.modules.push_back(parse_module());
      } else if (cur().kind == TokKind::Punct && cur().text == "`") {
        err_unsupported("unexpanded compiler directive");
      } else {
        err_syntax("expected 'module', got '" + cur().text + "'");
      }
    }
    for (Module& m : ast.modules) materialize_implicit_nets(m);
    return ast;
  }

 private:
  // --- token helpers -------------------------------------------------------

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t off = 1) const {
    std::size_t i = pos_ + off;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at_end() const { return cur().kind == TokKind::End; }

  bool is_ident(const char* s) const { return cur().kind == TokKind::Ident && cur().text == s; }
  bool is_punct(const char* s) const { return cur().kind == TokKind::Punct && cur().text == s; }

  Token take() { return toks_[pos_++]; }

  Token expect_ident() {
    if (cur().kind != TokKind::Ident) err_syntax("expected identifier, got '" + cur().text + "'");
    if (detail::keywords().count(cur().text))
      err_syntax("expected identifier, got keyword '" + cur().text + "'");
    return take();
  }

  Token expect_kw(const char* kw) {
    if (!is_ident(kw)) err_syntax(std::string("expected '") + kw + "', got '" + cur().text + "'");
    return take();
  }

  Token expect_punct(const char* p) {
    if (!is_punct(p)) err_syntax(std::string("expected '") + p + "', got '" + cur().text + "'");
    return take();
  }

  [[noreturn]] void err_syntax(const std::string& msg) const {
    raise(errc::syntax_error,
          msg + " at line " + std::to_string(cur().line) + ", col " + std::to_string(cur().col));
  }

  [[noreturn]] void err_unsupported(const std::string& what) const {
    raise(errc::unsupported_construct,
          what + " at line " + std::to_string(cur().line));
  }

  // --- module level --------------------------------------------------------

  Module parse_module() {
    Module m;
    m.line = cur().line;
    expect_kw("module");
    m.name = expect_ident().text;
    if (is_punct("#")) {
      take();
      expect_punct("(");
      parse_param_decl_list(m);
      expect_punct(")");
    }
    if (is_punct("(")) {
      take();
      if (!is_punct(")")) parse_port_list(m);
      expect_punct(")");
    }
    expect_punct(";");
    while (!is_ident("endmodule")) {
      if (at_end()) err_syntax("missing 'endmodule'");
      parse_item(m);
    }
    take();  // endmodule
    return m;
  }

  void parse_param_decl_list(Module& m) {
    for (;;) {
      expect_kw("parameter");
      skip_optional_range_and_signed();
      for (;;) {
        ParamDecl p;
        p.line = cur().line;
        p.name = expect_ident().text;
        expect_punct("=");
        p.value = parse_expr();
        m.items.emplace_back(p);
        if (is_punct(",") && peek().kind == TokKind::Ident && peek().text != "parameter") {
          take();
          continue;
        }
        break;
      }
      if (is_punct(",")) {
        take();
        continue;
      }
      break;
    }
  }

  void parse_port_list(Module& m) {
    if (is_ident("input") || is_ident("output") || is_ident("inout")) {
      parse_ansi_ports(m);
    } else {
      for (;;) {
        m.port_order.push_back(expect_ident().text);
        if (is_punct(",")) {
          take();
          continue;
        }
        break;
      }
    }
  }

  void parse_ansi_ports(Module& m) {
    PortDir dir = PortDir::Input;
    bool is_reg = false;
    std::optional<Range> range;
    for (;;) {
      if (is_ident("input") || is_ident("output") || is_ident("inout")) {
        std::string d = take().text;
        dir = d == "input" ? PortDir::Input : (d == "output" ? PortDir::Output : PortDir::Inout);
        is_reg = false;
        range.reset();
        if (is_ident("reg")) {
          take();
          is_reg = true;
        }
        if (is_ident("wire")) take();
        if (is_ident("signed")) take();
        if (is_punct("[")) range = parse_range();
      }
      PortDecl p;
      p.line = cur().line;
      p.dir = dir;
      p.is_reg = is_reg;
      p.range = range;
      p.name = expect_ident().text;
      m.port_order.push_back(p.name);
      m.items.emplace_back(p);
      if (is_punct(",")) {
        take();
        continue;
      }
      break;
    }
  }

  Range parse_range() {
    expect_punct("[");
    Range r;
    r.msb = parse_expr();
    expect_punct(":");
    r.lsb = parse_expr();
    expect_punct("]");
    return r;
  }

  void skip_optional_range_and_signed() {
    if (is_ident("signed")) take();
    if (is_punct("[")) parse_range();
  }

  void parse_item(Module& m) {
    if (cur().kind != TokKind::Ident) err_syntax("unexpected '" + cur().text + "'");
    const std::string& w = cur().text;

    if (w == "input" || w == "output" || w == "inout") return parse_port_decl(m);
    if (w == "wire" || w == "reg") return parse_net_decl(m);
    if (w == "parameter" || w == "localparam") return parse_param_item(m);
    if (w == "assign") return parse_cont_assign(m);
    if (w == "always") return parse_always(m);
    if (detail::gate_names().count(w)) return parse_gate_inst(m);

    if (w == "initial") err_unsupported("initial block");
    if (w == "generate" || w == "genvar") err_unsupported("generate construct");
    if (w == "function" || w == "task") err_unsupported(w + " declaration");
    if (w == "integer" || w == "real") err_unsupported(w + " declaration");
    if (w == "defparam") err_unsupported("defparam override");
    if (w == "specify") err_unsupported("specify block");
    if (w == "tri" || w == "supply0" || w == "supply1") err_unsupported(w + " net type");
    if (detail::keywords().count(w)) err_unsupported("'" + w + "' construct");

    return parse_cell_inst(m);
  }

  void parse_port_decl(Module& m) {
    std::string d = take().text;
    PortDir dir = d == "input" ? PortDir::Input : (d == "output" ? PortDir::Output : PortDir::Inout);
    bool is_reg = false;
    if (is_ident("reg")) {
      take();
      is_reg = true;
    }
    if (is_ident("wire")) take();
    if (is_ident("signed")) take();
    std::optional<Range> range;
    if (is_punct("[")) range = parse_range();
    for (;;) {
      PortDecl p;
      p.line = cur().line;
      p.dir = dir;
      p.is_reg = is_reg;
      p.range = range;
      p.name = expect_ident().text;
      m.items.emplace_back(p);
      if (is_punct(",")) {
        take();
        continue;
      }
      break;
    }
    expect_punct(";");
  }

  void parse_net_decl(Module& m) {
    bool is_reg = take().text == "reg";
    if (is_ident("signed")) take();
    std::optional<Range> range;
    if (is_punct("[")) range = parse_range();
    for (;;) {
      NetDecl n;
      n.line = cur().line;
      n.is_reg = is_reg;
      n.range = range;
      n.name = expect_ident().text;
      if (is_punct("[")) err_unsupported("memory array declaration");
      if (is_punct("=")) {
        take();
        n.init = parse_expr();
      }
      m.items.emplace_back(n);
      if (is_punct(",")) {
        take();
        continue;
      }
      break;
    }
    expect_punct(";");
  }

  void parse_param_item(Module& m) {
    bool local = take().text == "localparam";
    skip_optional_range_and_signed();
    for (;;) {
      ParamDecl p;
      p.line = cur().line;
      p.local = local;
      p.name = expect_ident().text;
      expect_punct("=");
      p.value = parse_expr();
      m.items.emplace_back(p);
      if (is_punct(",")) {
        take();
        continue;
      }
      break;
    }
    expect_punct(";");
  }

  void parse_cont_assign(Module& m) {
    take();  // assign
    if (is_punct("#")) err_unsupported("assignment delay");
    for (;;) {
      ContAssign a;
      a.line = cur().line;
      a.lhs = parse_lvalue();
      expect_punct("=");
      a.rhs = parse_expr();
      m.items.emplace_back(a);
      if (is_punct(",")) {
        take();
        continue;
      }
      break;
    }
    expect_punct(";");
  }

  void parse_always(Module& m) {
    AlwaysBlock b;
    b.line = cur().line;
    take();  // always
    if (!is_punct("@")) err_unsupported("always without event control");
    take();
    if (is_punct("*")) {
      take();
      b.star = true;
    } else {
      expect_punct("(");
      if (is_punct("*")) {
        take();
        b.star = true;
      } else {
        for (;;) {
          EventExpr ev;
          if (is_ident("posedge")) {
            take();
            ev.edge = EventExpr::Edge::Pos;
          } else if (is_ident("negedge")) {
            take();
            ev.edge = EventExpr::Edge::Neg;
          }
          ev.sig = parse_expr();
          b.events.push_back(ev);
          if (is_ident("or") || is_punct(",")) {
            take();
            continue;
          }
          break;
        }
      }
      expect_punct(")");
    }
    b.body = parse_stmt();
    m.items.emplace_back(b);
  }

  StmtPtr parse_stmt() {
    if (is_punct("#")) err_unsupported("delay control");
    if (is_punct("@")) err_unsupported("event control inside statement");
    if (is_punct(";")) {
      take();
      auto s = std::make_shared<Stmt>();
      s->kind = Stmt::Kind::Null;
      return s;
    }
    if (is_ident("begin")) return parse_block();
    if (is_ident("if")) return parse_if();
    if (is_ident("case")) return parse_case();
    if (is_ident("casez") || is_ident("casex")) err_unsupported(cur().text + " statement");
    if (is_ident("for") || is_ident("while") || is_ident("repeat") || is_ident("forever"))
      err_unsupported(cur().text + " loop");
    if (is_ident("fork")) err_unsupported("fork/join");
    if (cur().kind == TokKind::Ident && !cur().text.empty() && cur().text[0] == '$')
      err_unsupported("system task call");
    return parse_assign_stmt();
  }

  StmtPtr parse_block() {
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::Block;
    s->line = cur().line;
    expect_kw("begin");
    if (is_punct(":")) {  // named block
      take();
      expect_ident();
    }
    while (!is_ident("end")) {
      if (at_end()) err_syntax("missing 'end'");
      s->body.push_back(parse_stmt());
    }
    take();
    return s;
  }

  StmtPtr parse_if() {
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::If;
    s->line = cur().line;
    take();  // if
    expect_punct("(");
    s->cond = parse_expr();
    expect_punct(")");
    s->then_branch = parse_stmt();
    if (is_ident("else")) {
      take();
      s->else_branch = parse_stmt();
    }
    return s;
  }

  StmtPtr parse_case() {
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::Case;
    s->line = cur().line;
    take();  // case
    expect_punct("(");
    s->case_expr = parse_expr();
    expect_punct(")");
    while (!is_ident("endcase")) {
      if (at_end()) err_syntax("missing 'endcase'");
      CaseItem item;
      if (is_ident("default")) {
        take();
        item.is_default = true;
        if (is_punct(":")) take();
      } else {
        for (;;) {
          item.labels.push_back(parse_expr());
          if (is_punct(",")) {
            take();
            continue;
          }
          break;
        }
        expect_punct(":");
      }
      item.body = parse_stmt();
      s->items.push_back(item);
    }
    take();
    return s;
  }

  StmtPtr parse_assign_stmt() {
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::Assign;
    s->line = cur().line;
    s->lhs = parse_lvalue();
    if (is_punct("<=")) {
      take();
      s->nonblocking = true;
    } else {
      expect_punct("=");
    }
    if (is_punct("#")) err_unsupported("intra-assignment delay");
    s->rhs = parse_expr();
    expect_punct(";");
    return s;
  }

  ExprPtr parse_lvalue() {
    if (is_punct("{")) return parse_concat();
    ExprPtr e = parse_indexed_ident();
    return e;
  }

  // --- gate / cell instantiation -------------------------------------------

  void parse_gate_inst(Module& m) {
    GateInst g;
    g.line = cur().line;
    g.gate = take().text;
    if (cur().kind == TokKind::Ident && !detail::keywords().count(cur().text)) {
      g.inst_name = take().text;
      if (is_punct("[")) err_unsupported("gate instance array");
    }
    expect_punct("(");
    for (;;) {
      g.conns.push_back(parse_expr());
      if (is_punct(",")) {
        take();
        continue;
      }
      break;
    }
    expect_punct(")");
    expect_punct(";");
    if (g.conns.size() < 2) err_syntax("gate instance needs at least 2 terminals");
    m.items.emplace_back(g);
  }

  void parse_cell_inst(Module& m) {
    CellInst c;
    c.line = cur().line;
    c.cell = expect_ident().text;
    if (is_punct("#")) {
      take();
      expect_punct("(");
      for (;;) {
        if (is_punct(".")) {
          take();
          std::string pname = expect_ident().text;
          expect_punct("(");
          ExprPtr v = parse_expr();
          expect_punct(")");
          c.param_overrides.emplace_back(pname, v);
        } else {
          c.param_overrides.emplace_back("", parse_expr());
        }
        if (is_punct(",")) {
          take();
          continue;
        }
        break;
      }
      expect_punct(")");
    }
    c.inst_name = expect_ident().text;
    if (is_punct("[")) err_unsupported("instance array");
    expect_punct("(");
    if (!is_punct(")")) {
      if (is_punct(".")) {
        for (;;) {
          expect_punct(".");
          std::string pname = expect_ident().text;
          expect_punct("(");
          ExprPtr v;
          if (!is_punct(")")) v = parse_expr();
          expect_punct(")");
          c.named.emplace_back(pname, v);
          if (is_punct(",")) {
            take();
            continue;
          }
          break;
        }
      } else {
        for (;;) {
          c.positional.push_back(parse_expr());
          if (is_punct(",")) {
            take();
            continue;
          }
          break;
        }
      }
    }
    expect_punct(")");
    expect_punct(";");
    m.items.emplace_back(c);
  }

  // --- expressions ----------------------------------------------------------

  ExprPtr parse_expr() { return parse_ternary(); }

  ExprPtr parse_ternary() {
    ExprPtr c = parse_binary(0);
    if (is_punct("?")) {
      int line = cur().line;
      take();
      ExprPtr t = parse_expr();
      expect_punct(":");
      ExprPtr f = parse_expr();
      return Expr::ternary(c, t, f, line);
    }
    return c;
  }

  struct OpLevel {
    const char* tok;
    BinaryOp op;
  };

  // levels from loosest to tightest binding
  static const std::vector<std::vector<OpLevel>>& levels() {
    static const std::vector<std::vector<OpLevel>> ls = {
        {{"||", BinaryOp::LogOr}},
        {{"&&", BinaryOp::LogAnd}},
        {{"|", BinaryOp::BitOr}},
        {{"^", BinaryOp::BitXor}, {"~^", BinaryOp::BitXnor}, {"^~", BinaryOp::BitXnor}},
        {{"&", BinaryOp::BitAnd}},
        {{"==", BinaryOp::Eq}, {"!=", BinaryOp::Ne}, {"===", BinaryOp::CaseEq}, {"!==", BinaryOp::CaseNe}},
        {{"<", BinaryOp::Lt}, {">", BinaryOp::Gt}, {"<=", BinaryOp::Le}, {">=", BinaryOp::Ge}},
        {{"<<", BinaryOp::Shl}, {">>", BinaryOp::Shr}, {"<<<", BinaryOp::SShl}, {">>>", BinaryOp::SShr}},
        {{"+", BinaryOp::Plus}, {"-", BinaryOp::Minus}},
        {{"*", BinaryOp::Times}, {"/", BinaryOp::Divide}, {"%", BinaryOp::Mod}},
        {{"**", BinaryOp::Power}},
    };
    return ls;
  }

  ExprPtr parse_binary(std::size_t level) {
    if (level >= levels().size()) return parse_unary();
    ExprPtr lhs = parse_binary(level + 1);
    for (;;) {
      const OpLevel* match = nullptr;
      if (cur().kind == TokKind::Punct) {
        for (const OpLevel& o : levels()[level]) {
          if (cur().text == o.tok) {
            match = &o;
            break;
          }
        }
      }
      if (!match) return lhs;
      int line = cur().line;
      take();
      ExprPtr rhs = parse_binary(level + 1);
      lhs = Expr::binary(match->op, lhs, rhs, line);
    }
  }

  ExprPtr parse_unary() {
    int line = cur().line;
    if (cur().kind == TokKind::Punct) {
      const std::string& t = cur().text;
      UnaryOp op;
      bool matched = true;
      if (t == "+") op = UnaryOp::Plus;
      else if (t == "-") op = UnaryOp::Minus;
      else if (t == "!") op = UnaryOp::LogNot;
      else if (t == "~") op = UnaryOp::BitNot;
      else if (t == "&") op = UnaryOp::RedAnd;
      else if (t == "|") op = UnaryOp::RedOr;
      else if (t == "^") op = UnaryOp::RedXor;
      else if (t == "~&") op = UnaryOp::RedNand;
      else if (t == "~|") op = UnaryOp::RedNor;
      else if (t == "~^" || t == "^~") op = UnaryOp::RedXnor;
      else matched = false;
      if (matched) {
        take();
        return Expr::unary(op, parse_unary(), line);
      }
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    int line = cur().line;
    if (cur().kind == TokKind::Number) {
      Token t = take();
      return Expr::number(t.text, t.value, line);
    }
    if (is_punct("(")) {
      take();
      ExprPtr e = parse_expr();
      expect_punct(")");
      return e;
    }
    if (is_punct("{")) return parse_concat();
    if (cur().kind == TokKind::Ident) {
      if (detail::keywords().count(cur().text))
        err_syntax("unexpected keyword '" + cur().text + "' in expression");
      if (cur().text[0] == '$') err_unsupported("system function call");
      return parse_indexed_ident();
    }
    if (cur().kind == TokKind::String) err_unsupported("string literal in expression");
    err_syntax("unexpected '" + cur().text + "' in expression");
  }

  ExprPtr parse_indexed_ident() {
    Token id = expect_ident();
    ExprPtr e = Expr::ident(id.text, id.line);
    while (is_punct("[")) {
      int line = cur().line;
      take();
      ExprPtr first = parse_expr();
      if (is_punct(":")) {
        take();
        ExprPtr lsb = parse_expr();
        expect_punct("]");
        e = Expr::make(Expr::Kind::PartSelect, {e, first, lsb}, line);
      } else if (is_punct("+") || is_punct("-")) {
        err_unsupported("indexed part-select");
      } else {
        expect_punct("]");
        e = Expr::make(Expr::Kind::BitSelect, {e, first}, line);
      }
    }
    return e;
  }

  ExprPtr parse_concat() {
    int line = cur().line;
    expect_punct("{");
    ExprPtr first = parse_expr();
    if (is_punct("{")) {
      // replication {N{expr}}
      take();
      ExprPtr inner = parse_expr();
      if (is_punct(",")) err_unsupported("multi-operand replication");
      expect_punct("}");
      expect_punct("}");
      return Expr::make(Expr::Kind::Repeat, {first, inner}, line);
    }
    std::vector<ExprPtr> parts = {first};
    while (is_punct(",")) {
      take();
      parts.push_back(parse_expr());
    }
    expect_punct("}");
    if (parts.size() == 1) return parts[0];
    return Expr::make(Expr::Kind::Concat, std::move(parts), line);
  }

  // --- implicit nets ---------------------------------------------------------

  /// Referenced-but-undeclared names become implicit 1-bit wires, appended in
  /// first-reference order so every identifier in the AST has a declaration.
  void materialize_implicit_nets(Module& m) {
    std::set<std::string> declared;
    for (const ModuleItem& it : m.items) {
      if (auto* p = std::get_if<PortDecl>(&it)) declared.insert(p->name);
      else if (auto* n = std::get_if<NetDecl>(&it)) declared.insert(n->name);
      else if (auto* pa = std::get_if<ParamDecl>(&it)) declared.insert(pa->name);
    }
    std::vector<std::string> missing;
    std::set<std::string> seen;
    auto note = [&](const std::string& name) {
      if (!declared.count(name) && !seen.count(name)) {
        seen.insert(name);
        missing.push_back(name);
      }
    };
    for (const ModuleItem& it : m.items) {
      if (auto* a = std::get_if<ContAssign>(&it)) {
        collect_idents(a->lhs, note);
        collect_idents(a->rhs, note);
      } else if (auto* b = std::get_if<AlwaysBlock>(&it)) {
        for (const EventExpr& ev : b->events) collect_idents(ev.sig, note);
        collect_stmt_idents(b->body, note);
      } else if (auto* g = std::get_if<GateInst>(&it)) {
        for (const ExprPtr& e : g->conns) collect_idents(e, note);
      } else if (auto* c = std::get_if<CellInst>(&it)) {
        for (const auto& [_, e] : c->named) collect_idents(e, note);
        for (const ExprPtr& e : c->positional) collect_idents(e, note);
      } else if (auto* n = std::get_if<NetDecl>(&it)) {
        collect_idents(n->init, note);
      }
    }
    for (const std::string& name : missing) {
      NetDecl n;
      n.name = name;
      n.implicit = true;
      m.items.emplace_back(n);
    }
  }

  template <typename F>
  static void collect_idents(const ExprPtr& e, F&& f) {
    if (!e) return;
    if (e->kind == Expr::Kind::Ident) f(e->name);
    for (const ExprPtr& a : e->args) collect_idents(a, f);
  }

  template <typename F>
  static void collect_stmt_idents(const StmtPtr& s, F&& f) {
    if (!s) return;
    collect_idents(s->cond, f);
    collect_idents(s->case_expr, f);
    collect_idents(s->lhs, f);
    collect_idents(s->rhs, f);
    for (const StmtPtr& c : s->body) collect_stmt_idents(c, f);
    collect_stmt_idents(s->then_branch, f);
    collect_stmt_idents(s->else_branch, f);
    for (const CaseItem& it : s->items) {
      for (const ExprPtr& l : it.labels) collect_idents(l, f);
      collect_stmt_idents(it.body, f);
    }
  }

  Dialect dialect_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

/// Parses a preprocessed unit into a design AST.
inline DesignAst parse(const SourceUnit& unit) {
  Parser p(unit.text, unit.dialect);
  return p.parse_design();
}

}  // namespace htscan::verilog
