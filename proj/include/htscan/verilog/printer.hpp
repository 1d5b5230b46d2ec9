// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <sstream>
#include <string>

#include "htscan/verilog/ast.hpp"

namespace htscan::verilog {

namespace detail {

inline const char* unary_op_text(UnaryOp op) {
  switch (op) {
    case UnaryOp::Plus: return "+";
    case UnaryOp::Minus: return "-";
    case UnaryOp::LogNot: return "!";
    case UnaryOp::BitNot: return "~";
    case UnaryOp::RedAnd: return "&";
    case UnaryOp::RedOr: return "|";
    case UnaryOp::RedXor: return "^";
    case UnaryOp::RedNand: return "~&";
    case UnaryOp::RedNor: return "~|";
    case UnaryOp::RedXnor: return "~^";
  }
  return "?";
}

inline const char* binary_op_text(BinaryOp op) {
  switch (op) {
    case BinaryOp::Plus: return "+";
    case BinaryOp::Minus: return "-";
    case BinaryOp::Times: return "*";
    case BinaryOp::Divide: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Power: return "**";
    case BinaryOp::BitAnd: return "&";
    case BinaryOp::BitOr: return "|";
    case BinaryOp::BitXor: return "^";
    case BinaryOp::BitXnor: return "~^";
    case BinaryOp::LogAnd: return "&&";
    case BinaryOp::LogOr: return "||";
    case BinaryOp::Shl: return "<<";
    case BinaryOp::Shr: return ">>";
    case BinaryOp::SShl: return "<<<";
    case BinaryOp::SShr: return ">>>";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::CaseEq: return "===";
    case BinaryOp::CaseNe: return "!==";
  }
  return "?";
}

// escaped identifiers need the trailing separator to stay lexable
inline std::string print_name(const std::string& n) {
  if (!n.empty() && n[0] == '\\') return n + " ";
  return n;
}

}  // namespace detail

/// Prints an expression with explicit parentheses around compound operands,
/// so the output reparses to a structurally identical tree.
inline void print_expr(std::ostream& os, const ExprPtr& e) {
  if (!e) {
    os << "/*null*/";
    return;
  }
  switch (e->kind) {
    case Expr::Kind::Number:
      os << e->lexeme;
      break;
    case Expr::Kind::Ident:
      os << detail::print_name(e->name);
      break;
    case Expr::Kind::Unary:
      os << detail::unary_op_text(e->uop) << "(";
      print_expr(os, e->args[0]);
      os << ")";
      break;
    case Expr::Kind::Binary:
      os << "(";
      print_expr(os, e->args[0]);
      os << " " << detail::binary_op_text(e->bop) << " ";
      print_expr(os, e->args[1]);
      os << ")";
      break;
    case Expr::Kind::Ternary:
      os << "(";
      print_expr(os, e->args[0]);
      os << " ? ";
      print_expr(os, e->args[1]);
      os << " : ";
      print_expr(os, e->args[2]);
      os << ")";
      break;
    case Expr::Kind::BitSelect:
      print_expr(os, e->args[0]);
      os << "[";
      print_expr(os, e->args[1]);
      os << "]";
      break;
    case Expr::Kind::PartSelect:
      print_expr(os, e->args[0]);
      os << "[";
      print_expr(os, e->args[1]);
      os << ":";
      print_expr(os, e->args[2]);
      os << "]";
      break;
    case Expr::Kind::Concat: {
      os << "{";
      for (std::size_t i = 0; i < e->args.size(); ++i) {
        if (i) os << ", ";
        print_expr(os, e->args[i]);
      }
      os << "}";
      break;
    }
    case Expr::Kind::Repeat:
      os << "{";
      print_expr(os, e->args[0]);
      os << "{";
      print_expr(os, e->args[1]);
      os << "}}";
      break;
  }
}

inline std::string expr_to_string(const ExprPtr& e) {
  std::ostringstream os;
  print_expr(os, e);
  return os.str();
}

inline void print_stmt(std::ostream& os, const StmtPtr& s, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (!s || s->kind == Stmt::Kind::Null) {
    os << pad << ";\n";
    return;
  }
  switch (s->kind) {
    case Stmt::Kind::Block:
      os << pad << "begin\n";
      for (const StmtPtr& c : s->body) print_stmt(os, c, indent + 1);
      os << pad << "end\n";
      break;
    case Stmt::Kind::If:
      os << pad << "if (";
      print_expr(os, s->cond);
      os << ")\n";
      print_stmt(os, s->then_branch, indent + 1);
      if (s->else_branch) {
        os << pad << "else\n";
        print_stmt(os, s->else_branch, indent + 1);
      }
      break;
    case Stmt::Kind::Case:
      os << pad << "case (";
      print_expr(os, s->case_expr);
      os << ")\n";
      for (const CaseItem& item : s->items) {
        os << pad << "  ";
        if (item.is_default) {
          os << "default:";
        } else {
          for (std::size_t i = 0; i < item.labels.size(); ++i) {
            if (i) os << ", ";
            print_expr(os, item.labels[i]);
          }
          os << ":";
        }
        os << "\n";
        print_stmt(os, item.body, indent + 2);
      }
      os << pad << "endcase\n";
      break;
    case Stmt::Kind::Assign:
      os << pad;
      print_expr(os, s->lhs);
      os << (s->nonblocking ? " <= " : " = ");
      print_expr(os, s->rhs);
      os << ";\n";
      break;
    case Stmt::Kind::Null:
      break;
  }
}

inline void print_module(std::ostream& os, const Module& m) {
  os << "module " << detail::print_name(m.name) << " (";
  for (std::size_t i = 0; i < m.port_order.size(); ++i) {
    if (i) os << ", ";
    os << detail::print_name(m.port_order[i]);
  }
  os << ");\n";
  for (const ModuleItem& item : m.items) {
    if (auto* p = std::get_if<PortDecl>(&item)) {
      os << "  "
         << (p->dir == PortDir::Input ? "input" : (p->dir == PortDir::Output ? "output" : "inout"));
      if (p->is_reg) os << " reg";
      if (p->range) {
        os << " [";
        print_expr(os, p->range->msb);
        os << ":";
        print_expr(os, p->range->lsb);
        os << "]";
      }
      os << " " << detail::print_name(p->name) << ";\n";
    } else if (auto* n = std::get_if<NetDecl>(&item)) {
      os << "  " << (n->is_reg ? "reg" : "wire");
      if (n->range) {
        os << " [";
        print_expr(os, n->range->msb);
        os << ":";
        print_expr(os, n->range->lsb);
        os << "]";
      }
      os << " " << detail::print_name(n->name);
      if (n->init) {
        os << " = ";
        print_expr(os, n->init);
      }
      os << ";\n";
    } else if (auto* pa = std::get_if<ParamDecl>(&item)) {
      os << "  " << (pa->local ? "localparam" : "parameter") << " "
         << detail::print_name(pa->name) << " = ";
      print_expr(os, pa->value);
      os << ";\n";
    } else if (auto* a = std::get_if<ContAssign>(&item)) {
      os << "  assign ";
      print_expr(os, a->lhs);
      os << " = ";
      print_expr(os, a->rhs);
      os << ";\n";
    } else if (auto* b = std::get_if<AlwaysBlock>(&item)) {
      os << "  always @(";
      if (b->star) {
        os << "*";
      } else {
        for (std::size_t i = 0; i < b->events.size(); ++i) {
          if (i) os << " or ";
          if (b->events[i].edge == EventExpr::Edge::Pos) os << "posedge ";
          if (b->events[i].edge == EventExpr::Edge::Neg) os << "negedge ";
          print_expr(os, b->events[i].sig);
        }
      }
      os << ")\n";
      print_stmt(os, b->body, 2);
    } else if (auto* g = std::get_if<GateInst>(&item)) {
      os << "  " << g->gate;
      if (!g->inst_name.empty()) os << " " << detail::print_name(g->inst_name);
      os << " (";
      for (std::size_t i = 0; i < g->conns.size(); ++i) {
        if (i) os << ", ";
        print_expr(os, g->conns[i]);
      }
      os << ");\n";
    } else if (auto* c = std::get_if<CellInst>(&item)) {
      os << "  " << detail::print_name(c->cell);
      if (!c->param_overrides.empty()) {
        os << " #(";
        for (std::size_t i = 0; i < c->param_overrides.size(); ++i) {
          if (i) os << ", ";
          const auto& [name, val] = c->param_overrides[i];
          if (!name.empty()) {
            os << "." << name << "(";
            print_expr(os, val);
            os << ")";
          } else {
            print_expr(os, val);
          }
        }
        os << ")";
      }
      os << " " << detail::print_name(c->inst_name) << " (";
      bool first = true;
      for (const auto& [name, val] : c->named) {
        if (!first) os << ", ";
        first = false;
        os << "." << name << "(";
        if (val) print_expr(os, val);
        os << ")";
      }
      for (const ExprPtr& e : c->positional) {
        if (!first) os << ", ";
        first = false;
        print_expr(os, e);
      }
      os << ");\n";
    }
  }
  os << "endmodule\n";
}

inline std::string print_design(const DesignAst& ast) {
  std::ostringstream os;
  for (std::size_t i = 0; i < ast.modules.size(); ++i) {
    if (i) os << "\n";
    print_module(os, ast.modules[i]);
  }
  return os.str();
}

}  // namespace htscan::verilog
