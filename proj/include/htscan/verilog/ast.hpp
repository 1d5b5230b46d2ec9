// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "htscan/verilog/source.hpp"

namespace htscan::verilog {

enum class UnaryOp { Plus, Minus, LogNot, BitNot, RedAnd, RedOr, RedXor, RedNand, RedNor, RedXnor };

enum class BinaryOp {
  Plus, Minus, Times, Divide, Mod, Power,
  BitAnd, BitOr, BitXor, BitXnor,
  LogAnd, LogOr,
  Shl, Shr, SShl, SShr,
  Lt, Gt, Le, Ge, Eq, Ne, CaseEq, CaseNe,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Expression tree node. One struct with a kind discriminator keeps printing,
/// comparison and rewriting straightforward.
struct Expr {
  enum class Kind { Number, Ident, Unary, Binary, Ternary, BitSelect, PartSelect, Concat, Repeat };

  Kind kind;
  std::string lexeme;        // Number: exact source spelling
  std::uint64_t value = 0;   // Number: numeric value (x/z bits as 0)
  std::string name;          // Ident
  UnaryOp uop = UnaryOp::Plus;
  BinaryOp bop = BinaryOp::Plus;
  // Unary: [operand]; Binary: [lhs,rhs]; Ternary: [cond,then,else];
  // BitSelect: [base,index]; PartSelect: [base,msb,lsb];
  // Concat: operands; Repeat: [count,operand]
  std::vector<ExprPtr> args;
  int line = 0;

  static ExprPtr number(std::string lex, std::uint64_t v, int line = 0) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Number;
    e->lexeme = std::move(lex);
    e->value = v;
    e->line = line;
    return e;
  }
  static ExprPtr ident(std::string n, int line = 0) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Ident;
    e->name = std::move(n);
    e->line = line;
    return e;
  }
  static ExprPtr unary(UnaryOp op, ExprPtr a, int line = 0) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Unary;
    e->uop = op;
    e->args = {std::move(a)};
    e->line = line;
    return e;
  }
  static ExprPtr binary(BinaryOp op, ExprPtr l, ExprPtr r, int line = 0) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Binary;
    e->bop = op;
    e->args = {std::move(l), std::move(r)};
    e->line = line;
    return e;
  }
  static ExprPtr ternary(ExprPtr c, ExprPtr t, ExprPtr f, int line = 0) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Ternary;
    e->args = {std::move(c), std::move(t), std::move(f)};
    e->line = line;
    return e;
  }
  static ExprPtr make(Kind k, std::vector<ExprPtr> args, int line = 0) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->args = std::move(args);
    e->line = line;
    return e;
  }
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct CaseItem {
  std::vector<ExprPtr> labels;  // empty for default
  StmtPtr body;                 // may be null (empty statement)
  bool is_default = false;
};

struct Stmt {
  enum class Kind { Block, If, Case, Assign, Null };

  Kind kind = Kind::Null;
  std::vector<StmtPtr> body;  // Block
  ExprPtr cond;               // If
  StmtPtr then_branch;        // If
  StmtPtr else_branch;        // If (may be null)
  ExprPtr case_expr;          // Case
  std::vector<CaseItem> items;
  ExprPtr lhs;                // Assign
  ExprPtr rhs;
  bool nonblocking = false;
  int line = 0;
};

enum class PortDir { Input, Output, Inout };

struct Range {
  ExprPtr msb;
  ExprPtr lsb;
};

struct PortDecl {
  PortDir dir = PortDir::Input;
  std::optional<Range> range;
  std::string name;
  bool is_reg = false;
  int line = 0;
};

struct NetDecl {
  bool is_reg = false;
  std::optional<Range> range;
  std::string name;
  ExprPtr init;  // wire w = expr;
  bool implicit = false;
  int line = 0;
};

struct ParamDecl {
  std::string name;
  ExprPtr value;
  bool local = false;
  int line = 0;
};

struct ContAssign {
  ExprPtr lhs;
  ExprPtr rhs;
  int line = 0;
};

struct EventExpr {
  enum class Edge { Pos, Neg, Any };
  Edge edge = Edge::Any;
  ExprPtr sig;
};

struct AlwaysBlock {
  bool star = false;  // always @(*)
  std::vector<EventExpr> events;
  StmtPtr body;
  int line = 0;
};

/// Primitive gate instantiation: and/or/nand/nor/xor/xnor/not/buf.
/// conns[0] is the output terminal.
struct GateInst {
  std::string gate;
  std::string inst_name;  // may be empty
  std::vector<ExprPtr> conns;
  int line = 0;
};

/// Instantiation of a user module or a named generic cell.
struct CellInst {
  std::string cell;
  std::string inst_name;
  std::vector<std::pair<std::string, ExprPtr>> named;  // .port(expr); expr may be null (open)
  std::vector<ExprPtr> positional;
  std::vector<std::pair<std::string, ExprPtr>> param_overrides;  // named or ("",expr) positional
  int line = 0;
};

using ModuleItem = std::variant<PortDecl, NetDecl, ParamDecl, ContAssign, AlwaysBlock, GateInst, CellInst>;

struct Module {
  std::string name;
  std::vector<std::string> port_order;  // header list
  std::vector<ModuleItem> items;        // declaration order preserved
  int line = 0;
};

struct DesignAst {
  std::vector<Module> modules;
  Dialect dialect = Dialect::Rtl;
};

// ---------------------------------------------------------------------------
// structural equality (whitespace-free comparison for the round-trip check)

inline bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Number:
      if (a->lexeme != b->lexeme || a->value != b->value) return false;
      break;
    case Expr::Kind::Ident:
      if (a->name != b->name) return false;
      break;
    case Expr::Kind::Unary:
      if (a->uop != b->uop) return false;
      break;
    case Expr::Kind::Binary:
      if (a->bop != b->bop) return false;
      break;
    default:
      break;
  }
  if (a->args.size() != b->args.size()) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!expr_equal(a->args[i], b->args[i])) return false;
  return true;
}

inline bool stmt_equal(const StmtPtr& a, const StmtPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Stmt::Kind::Block: {
      if (a->body.size() != b->body.size()) return false;
      for (std::size_t i = 0; i < a->body.size(); ++i)
        if (!stmt_equal(a->body[i], b->body[i])) return false;
      return true;
    }
    case Stmt::Kind::If:
      return expr_equal(a->cond, b->cond) && stmt_equal(a->then_branch, b->then_branch) &&
             stmt_equal(a->else_branch, b->else_branch);
    case Stmt::Kind::Case: {
      if (!expr_equal(a->case_expr, b->case_expr) || a->items.size() != b->items.size())
        return false;
      for (std::size_t i = 0; i < a->items.size(); ++i) {
        const auto& x = a->items[i];
        const auto& y = b->items[i];
        if (x.is_default != y.is_default || x.labels.size() != y.labels.size()) return false;
        for (std::size_t j = 0; j < x.labels.size(); ++j)
          if (!expr_equal(x.labels[j], y.labels[j])) return false;
        if (!stmt_equal(x.body, y.body)) return false;
      }
      return true;
    }
    case Stmt::Kind::Assign:
      return a->nonblocking == b->nonblocking && expr_equal(a->lhs, b->lhs) &&
             expr_equal(a->rhs, b->rhs);
    case Stmt::Kind::Null:
      return true;
  }
  return false;
}

inline bool range_equal(const std::optional<Range>& a, const std::optional<Range>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return expr_equal(a->msb, b->msb) && expr_equal(a->lsb, b->lsb);
}

inline bool item_equal(const ModuleItem& a, const ModuleItem& b) {
  if (a.index() != b.index()) return false;
  if (auto* pa = std::get_if<PortDecl>(&a)) {
    auto* pb = std::get_if<PortDecl>(&b);
    return pa->dir == pb->dir && pa->name == pb->name && pa->is_reg == pb->is_reg &&
           range_equal(pa->range, pb->range);
  }
  if (auto* na = std::get_if<NetDecl>(&a)) {
    auto* nb = std::get_if<NetDecl>(&b);
    return na->is_reg == nb->is_reg && na->name == nb->name &&
           range_equal(na->range, nb->range) && expr_equal(na->init, nb->init);
  }
  if (auto* pa = std::get_if<ParamDecl>(&a)) {
    auto* pb = std::get_if<ParamDecl>(&b);
    return pa->name == pb->name && pa->local == pb->local && expr_equal(pa->value, pb->value);
  }
  if (auto* ca = std::get_if<ContAssign>(&a)) {
    auto* cb = std::get_if<ContAssign>(&b);
    return expr_equal(ca->lhs, cb->lhs) && expr_equal(ca->rhs, cb->rhs);
  }
  if (auto* aa = std::get_if<AlwaysBlock>(&a)) {
    auto* ab = std::get_if<AlwaysBlock>(&b);
    if (aa->star != ab->star || aa->events.size() != ab->events.size()) return false;
    for (std::size_t i = 0; i < aa->events.size(); ++i) {
      if (aa->events[i].edge != ab->events[i].edge) return false;
      if (!expr_equal(aa->events[i].sig, ab->events[i].sig)) return false;
    }
    return stmt_equal(aa->body, ab->body);
  }
  if (auto* ga = std::get_if<GateInst>(&a)) {
    auto* gb = std::get_if<GateInst>(&b);
    if (ga->gate != gb->gate || ga->inst_name != gb->inst_name ||
        ga->conns.size() != gb->conns.size())
      return false;
    for (std::size_t i = 0; i < ga->conns.size(); ++i)
      if (!expr_equal(ga->conns[i], gb->conns[i])) return false;
    return true;
  }
  if (auto* ca = std::get_if<CellInst>(&a)) {
    auto* cb = std::get_if<CellInst>(&b);
    if (ca->cell != cb->cell || ca->inst_name != cb->inst_name ||
        ca->named.size() != cb->named.size() || ca->positional.size() != cb->positional.size() ||
        ca->param_overrides.size() != cb->param_overrides.size())
      return false;
    for (std::size_t i = 0; i < ca->named.size(); ++i) {
      if (ca->named[i].first != cb->named[i].first) return false;
      if (!expr_equal(ca->named[i].second, cb->named[i].second)) return false;
    }
    for (std::size_t i = 0; i < ca->positional.size(); ++i)
      if (!expr_equal(ca->positional[i], cb->positional[i])) return false;
    for (std::size_t i = 0; i < ca->param_overrides.size(); ++i) {
      if (ca->param_overrides[i].first != cb->param_overrides[i].first) return false;
      if (!expr_equal(ca->param_overrides[i].second, cb->param_overrides[i].second)) return false;
    }
    return true;
  }
  return false;
}

inline bool ast_equal(const DesignAst& a, const DesignAst& b) {
  if (a.modules.size() != b.modules.size()) return false;
  for (std::size_t m = 0; m < a.modules.size(); ++m) {
    const Module& x = a.modules[m];
    const Module& y = b.modules[m];
    if (x.name != y.name || x.port_order != y.port_order || x.items.size() != y.items.size())
      return false;
    for (std::size_t i = 0; i < x.items.size(); ++i)
      if (!item_equal(x.items[i], y.items[i])) return false;
  }
  return true;
}

}  // namespace htscan::verilog
