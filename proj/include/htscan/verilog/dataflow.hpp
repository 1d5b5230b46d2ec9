// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "htscan/errors.hpp"
#include "htscan/graph/dfg.hpp"
#include "htscan/verilog/ast.hpp"

namespace htscan::verilog {

using graph::NodeKind;
using graph::OpTag;
using graph::SignalDfg;

namespace detail {

inline OpTag unary_op_tag(UnaryOp op) {
  switch (op) {
    case UnaryOp::Plus: return OpTag::Plus;
    case UnaryOp::Minus: return OpTag::Minus;
    case UnaryOp::LogNot: return OpTag::LogNot;
    case UnaryOp::BitNot: return OpTag::Not;
    case UnaryOp::RedAnd: return OpTag::And;
    case UnaryOp::RedOr: return OpTag::RedOr;
    case UnaryOp::RedXor: return OpTag::Xor;
    case UnaryOp::RedNand: return OpTag::Nand;
    case UnaryOp::RedNor: return OpTag::Nor;
    case UnaryOp::RedXnor: return OpTag::Xnor;
  }
  return OpTag::None;
}

inline OpTag binary_op_tag(BinaryOp op) {
  switch (op) {
    case BinaryOp::Plus: return OpTag::Plus;
    case BinaryOp::Minus: return OpTag::Minus;
    case BinaryOp::Times: return OpTag::Times;
    case BinaryOp::Divide: return OpTag::Divide;
    case BinaryOp::Mod: return OpTag::Mod;
    case BinaryOp::Power: return OpTag::Power;
    case BinaryOp::BitAnd: return OpTag::And;
    case BinaryOp::BitOr: return OpTag::Or;
    case BinaryOp::BitXor: return OpTag::Xor;
    case BinaryOp::BitXnor: return OpTag::Xnor;
    case BinaryOp::LogAnd: return OpTag::LogAnd;
    case BinaryOp::LogOr: return OpTag::LogOr;
    case BinaryOp::Shl: return OpTag::Shl;
    case BinaryOp::Shr: return OpTag::Shr;
    case BinaryOp::SShl: return OpTag::SShl;
    case BinaryOp::SShr: return OpTag::SShr;
    case BinaryOp::Lt: return OpTag::Lt;
    case BinaryOp::Gt: return OpTag::Gt;
    case BinaryOp::Le: return OpTag::Le;
    case BinaryOp::Ge: return OpTag::Ge;
    case BinaryOp::Eq: return OpTag::Eq;
    case BinaryOp::Ne: return OpTag::Ne;
    case BinaryOp::CaseEq: return OpTag::CaseEq;
    case BinaryOp::CaseNe: return OpTag::CaseNe;
  }
  return OpTag::None;
}

inline OpTag gate_op_tag(const std::string& g) {
  if (g == "and") return OpTag::And;
  if (g == "or") return OpTag::Or;
  if (g == "nand") return OpTag::Nand;
  if (g == "nor") return OpTag::Nor;
  if (g == "xor") return OpTag::Xor;
  if (g == "xnor") return OpTag::Xnor;
  if (g == "not") return OpTag::Not;
  if (g == "buf") return OpTag::Buf;
  return OpTag::UnknownCell;
}

inline std::string lowercase(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

/// Library-cell classification by name. Synthesized netlists use generic cell
/// names like DFF, MUX2, AND2X1; match the operation by prefix/substring.
inline OpTag cell_op_tag(const std::string& cell) {
  std::string c = lowercase(cell);
  if (c.find("dff") != std::string::npos || c.find("latch") != std::string::npos ||
      c.find("flop") != std::string::npos)
    return OpTag::Dff;
  if (c.find("mux") != std::string::npos) return OpTag::Mux;
  if (c.rfind("nand", 0) == 0) return OpTag::Nand;
  if (c.rfind("nor", 0) == 0) return OpTag::Nor;
  if (c.rfind("xnor", 0) == 0) return OpTag::Xnor;
  if (c.rfind("xor", 0) == 0) return OpTag::Xor;
  if (c.rfind("and", 0) == 0) return OpTag::And;
  if (c.rfind("or", 0) == 0) return OpTag::Or;
  if (c.rfind("not", 0) == 0 || c.rfind("inv", 0) == 0) return OpTag::Not;
  if (c.rfind("buf", 0) == 0) return OpTag::Buf;
  return OpTag::UnknownCell;
}

/// Port names conventionally used as cell outputs.
inline bool is_cell_output_port(const std::string& port) {
  static const std::set<std::string> outs = {"Q",  "QN", "Y", "Z",  "O",
                                             "OUT", "SUM", "COUT", "DOUT"};
  return outs.count(port) > 0;
}

inline void lhs_bases(const ExprPtr& e, std::vector<std::string>& out) {
  if (!e) return;
  switch (e->kind) {
    case Expr::Kind::Ident:
      out.push_back(e->name);
      break;
    case Expr::Kind::BitSelect:
    case Expr::Kind::PartSelect:
      lhs_bases(e->args[0], out);
      break;
    case Expr::Kind::Concat:
      for (const ExprPtr& a : e->args) lhs_bases(a, out);
      break;
    default:
      break;
  }
}

// --- constant folding -------------------------------------------------------

inline ExprPtr fold_expr(const ExprPtr& e) {
  if (!e) return e;
  std::vector<ExprPtr> args;
  args.reserve(e->args.size());
  bool changed = false;
  for (const ExprPtr& a : e->args) {
    ExprPtr f = fold_expr(a);
    changed |= (f != a);
    args.push_back(f);
  }
  auto num = [](std::uint64_t v, int line) { return Expr::number(std::to_string(v), v, line); };
  if (e->kind == Expr::Kind::Binary && args[0]->kind == Expr::Kind::Number &&
      args[1]->kind == Expr::Kind::Number) {
    std::uint64_t a = args[0]->value, b = args[1]->value;
    bool ok = true;
    std::uint64_t v = 0;
    switch (e->bop) {
      case BinaryOp::Plus: v = a + b; break;
      case BinaryOp::Minus: v = a - b; break;
      case BinaryOp::Times: v = a * b; break;
      case BinaryOp::Divide: ok = b != 0; v = ok ? a / b : 0; break;
      case BinaryOp::Mod: ok = b != 0; v = ok ? a % b : 0; break;
      case BinaryOp::Shl:
      case BinaryOp::SShl: ok = b < 64; v = ok ? (a << b) : 0; break;
      case BinaryOp::Shr:
      case BinaryOp::SShr: ok = b < 64; v = ok ? (a >> b) : 0; break;
      case BinaryOp::BitAnd: v = a & b; break;
      case BinaryOp::BitOr: v = a | b; break;
      case BinaryOp::BitXor: v = a ^ b; break;
      case BinaryOp::Lt: v = a < b; break;
      case BinaryOp::Gt: v = a > b; break;
      case BinaryOp::Le: v = a <= b; break;
      case BinaryOp::Ge: v = a >= b; break;
      case BinaryOp::Eq:
      case BinaryOp::CaseEq: v = a == b; break;
      case BinaryOp::Ne:
      case BinaryOp::CaseNe: v = a != b; break;
      case BinaryOp::LogAnd: v = (a != 0) && (b != 0); break;
      case BinaryOp::LogOr: v = (a != 0) || (b != 0); break;
      default: ok = false; break;  // power and width-dependent ops stay symbolic
    }
    if (ok) return num(v, e->line);
  }
  if (e->kind == Expr::Kind::Unary && args[0]->kind == Expr::Kind::Number) {
    std::uint64_t a = args[0]->value;
    if (e->uop == UnaryOp::Plus) return args[0];
    if (e->uop == UnaryOp::LogNot) return num(a == 0 ? 1 : 0, e->line);
  }
  if (e->kind == Expr::Kind::Ternary && args[0]->kind == Expr::Kind::Number)
    return args[0]->value != 0 ? args[1] : args[2];
  if (!changed) return e;
  auto out = std::make_shared<Expr>(*e);
  out->args = std::move(args);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// flattening

namespace detail {

using ParamEnv = std::map<std::string, ExprPtr>;

inline ExprPtr rewrite_expr(const ExprPtr& e, const std::string& prefix, const ParamEnv& params) {
  if (!e) return e;
  if (e->kind == Expr::Kind::Ident) {
    auto it = params.find(e->name);
    if (it != params.end()) return it->second;
    if (prefix.empty()) return e;
    return Expr::ident(prefix + e->name, e->line);
  }
  std::vector<ExprPtr> args;
  args.reserve(e->args.size());
  bool changed = false;
  for (const ExprPtr& a : e->args) {
    ExprPtr r = rewrite_expr(a, prefix, params);
    changed |= (r != a);
    args.push_back(r);
  }
  if (!changed) return e;
  auto out = std::make_shared<Expr>(*e);
  out->args = std::move(args);
  return out;
}

inline StmtPtr rewrite_stmt(const StmtPtr& s, const std::string& prefix, const ParamEnv& params) {
  if (!s) return s;
  auto out = std::make_shared<Stmt>(*s);
  out->cond = rewrite_expr(s->cond, prefix, params);
  out->case_expr = rewrite_expr(s->case_expr, prefix, params);
  out->lhs = rewrite_expr(s->lhs, prefix, params);
  out->rhs = rewrite_expr(s->rhs, prefix, params);
  out->then_branch = rewrite_stmt(s->then_branch, prefix, params);
  out->else_branch = rewrite_stmt(s->else_branch, prefix, params);
  out->body.clear();
  for (const StmtPtr& c : s->body) out->body.push_back(rewrite_stmt(c, prefix, params));
  out->items.clear();
  for (const CaseItem& it : s->items) {
    CaseItem ni;
    ni.is_default = it.is_default;
    for (const ExprPtr& l : it.labels) ni.labels.push_back(rewrite_expr(l, prefix, params));
    ni.body = rewrite_stmt(it.body, prefix, params);
    out->items.push_back(ni);
  }
  return out;
}

struct Flattener {
  const DesignAst& ast;
  std::map<std::string, const Module*> by_name;
  int depth = 0;

  explicit Flattener(const DesignAst& a) : ast(a) {
    for (const Module& m : a.modules) {
      if (by_name.count(m.name))
        raise(errc::duplicate_module, "module '" + m.name + "' declared more than once");
      by_name[m.name] = &m;
    }
  }

  const Module& pick_top() const {
    std::set<std::string> instantiated;
    for (const Module& m : ast.modules)
      for (const ModuleItem& it : m.items)
        if (auto* c = std::get_if<CellInst>(&it))
          if (by_name.count(c->cell) && c->cell != m.name) instantiated.insert(c->cell);
    for (const Module& m : ast.modules)
      if (!instantiated.count(m.name)) return m;
    raise(errc::unsupported_construct, "recursive module hierarchy has no top");
  }

  ParamEnv collect_params(const Module& m, const std::string& prefix, const ParamEnv& overrides) {
    ParamEnv env;
    for (const ModuleItem& it : m.items) {
      if (auto* p = std::get_if<ParamDecl>(&it)) {
        auto ov = overrides.find(p->name);
        ExprPtr v = (ov != overrides.end() && !p->local)
                        ? ov->second
                        : rewrite_expr(p->value, prefix, env);
        env[p->name] = fold_expr(v);
      }
    }
    return env;
  }

  void inline_module(const Module& m, const std::string& prefix, const ParamEnv& overrides,
                     Module& out) {
    if (++depth > 64) raise(errc::unsupported_construct, "instantiation depth exceeds 64");
    ParamEnv params = collect_params(m, prefix, overrides);

    auto rw = [&](const ExprPtr& e) { return fold_expr(rewrite_expr(e, prefix, params)); };
    auto rw_range = [&](const std::optional<Range>& r) -> std::optional<Range> {
      if (!r) return std::nullopt;
      return Range{rw(r->msb), rw(r->lsb)};
    };

    for (const ModuleItem& it : m.items) {
      if (std::get_if<ParamDecl>(&it)) continue;  // substituted away
      if (auto* p = std::get_if<PortDecl>(&it)) {
        if (prefix.empty()) {
          PortDecl np = *p;
          np.range = rw_range(p->range);
          out.items.emplace_back(np);
        } else {
          NetDecl n;
          n.is_reg = p->is_reg;
          n.range = rw_range(p->range);
          n.name = prefix + p->name;
          n.line = p->line;
          out.items.emplace_back(n);
        }
        continue;
      }
      if (auto* n = std::get_if<NetDecl>(&it)) {
        NetDecl nn = *n;
        nn.name = prefix + n->name;
        nn.range = rw_range(n->range);
        nn.init = rw(n->init);
        out.items.emplace_back(nn);
        continue;
      }
      if (auto* a = std::get_if<ContAssign>(&it)) {
        ContAssign na;
        na.line = a->line;
        na.lhs = rw(a->lhs);
        na.rhs = rw(a->rhs);
        out.items.emplace_back(na);
        continue;
      }
      if (auto* b = std::get_if<AlwaysBlock>(&it)) {
        AlwaysBlock nb;
        nb.line = b->line;
        nb.star = b->star;
        for (const EventExpr& ev : b->events)
          nb.events.push_back(EventExpr{ev.edge, rw(ev.sig)});
        nb.body = rewrite_stmt(b->body, prefix, params);
        out.items.emplace_back(nb);
        continue;
      }
      if (auto* g = std::get_if<GateInst>(&it)) {
        GateInst ng = *g;
        ng.inst_name = g->inst_name.empty() ? "" : prefix + g->inst_name;
        ng.conns.clear();
        for (const ExprPtr& e : g->conns) ng.conns.push_back(rw(e));
        out.items.emplace_back(ng);
        continue;
      }
      if (auto* c = std::get_if<CellInst>(&it)) {
        auto sub = by_name.find(c->cell);
        if (sub == by_name.end() || c->cell == m.name) {
          CellInst nc = *c;
          nc.inst_name = prefix + c->inst_name;
          nc.named.clear();
          for (const auto& [port, e] : c->named) nc.named.emplace_back(port, rw(e));
          nc.positional.clear();
          for (const ExprPtr& e : c->positional) nc.positional.push_back(rw(e));
          nc.param_overrides.clear();
          for (const auto& [pn, e] : c->param_overrides) nc.param_overrides.emplace_back(pn, rw(e));
          out.items.emplace_back(nc);
          continue;
        }
        // user-module instance: substitute parameters and splice the body in
        const Module& child = *sub->second;
        std::string child_prefix = prefix + c->inst_name + ".";

        std::vector<std::string> child_params;
        for (const ModuleItem& cit : child.items)
          if (auto* pd = std::get_if<ParamDecl>(&cit))
            if (!pd->local) child_params.push_back(pd->name);
        ParamEnv child_overrides;
        std::size_t pos_idx = 0;
        for (const auto& [pn, e] : c->param_overrides) {
          ExprPtr v = rw(e);
          if (!pn.empty()) {
            child_overrides[pn] = v;
          } else if (pos_idx < child_params.size()) {
            child_overrides[child_params[pos_idx++]] = v;
          }
        }

        // bridge assigns between connection expressions and prefixed ports
        std::map<std::string, PortDir> port_dirs;
        for (const ModuleItem& cit : child.items)
          if (auto* pd = std::get_if<PortDecl>(&cit)) port_dirs[pd->name] = pd->dir;
        auto bridge = [&](const std::string& port, const ExprPtr& conn) {
          if (!conn) return;
          auto dir = port_dirs.find(port);
          if (dir == port_dirs.end())
            raise(errc::syntax_error,
                  "connection to unknown port '" + port + "' of module '" + child.name + "'");
          ContAssign a;
          if (dir->second == PortDir::Input) {
            a.lhs = Expr::ident(child_prefix + port);
            a.rhs = rw(conn);
          } else {
            a.lhs = rw(conn);
            a.rhs = Expr::ident(child_prefix + port);
          }
          out.items.emplace_back(a);
        };
        if (!c->named.empty()) {
          for (const auto& [port, e] : c->named) bridge(port, e);
        } else {
          if (c->positional.size() > child.port_order.size())
            raise(errc::syntax_error, "too many connections for module '" + child.name + "'");
          for (std::size_t i = 0; i < c->positional.size(); ++i)
            bridge(child.port_order[i], c->positional[i]);
        }
        inline_module(child, child_prefix, child_overrides, out);
        continue;
      }
    }
    --depth;
  }
};

}  // namespace detail

/// Fully inlines the module hierarchy into a single module. Instance-local
/// names are prefixed "inst.name"; parameters are substituted and folded.
/// Instances of modules not declared in the design are kept as library cells.
inline DesignAst flatten(const DesignAst& ast) {
  if (ast.modules.empty()) raise(errc::empty_input, "design has no modules");
  detail::Flattener fl(ast);
  const Module& top = fl.pick_top();
  Module out;
  out.name = top.name;
  out.port_order = top.port_order;
  out.line = top.line;
  fl.inline_module(top, "", {}, out);
  DesignAst result;
  result.dialect = ast.dialect;
  result.modules.push_back(std::move(out));
  return result;
}

// ---------------------------------------------------------------------------
// symbolic per-signal dataflow

namespace detail {

struct DfVal;
using DfP = std::shared_ptr<const DfVal>;

struct DfVal {
  enum class K { Const, Signal, Op, Branch };
  K k = K::Signal;
  std::string text;  // Const lexeme
  std::uint64_t value = 0;
  std::string name;  // Signal
  OpTag op = OpTag::None;
  std::vector<DfP> kids;  // Op operands
  DfP cond, tval, eval;   // Branch; tval/eval may be null (implicit hold)

  static DfP constant(std::string lex, std::uint64_t v) {
    auto d = std::make_shared<DfVal>();
    d->k = K::Const;
    d->text = std::move(lex);
    d->value = v;
    return d;
  }
  static DfP signal(std::string n) {
    auto d = std::make_shared<DfVal>();
    d->k = K::Signal;
    d->name = std::move(n);
    return d;
  }
  static DfP operation(OpTag op, std::vector<DfP> kids) {
    auto d = std::make_shared<DfVal>();
    d->k = K::Op;
    d->op = op;
    d->kids = std::move(kids);
    return d;
  }
  static DfP branch(DfP cond, DfP t, DfP e) {
    auto d = std::make_shared<DfVal>();
    d->k = K::Branch;
    d->cond = std::move(cond);
    d->tval = std::move(t);
    d->eval = std::move(e);
    return d;
  }
};

using Env = std::map<std::string, DfP>;

/// Converts an expression to a dataflow value. When `env` is given (blocking
/// context), identifiers assigned earlier in the block resolve to their
/// current symbolic value; otherwise they stay signal leaves.
inline DfP to_dfval(const ExprPtr& e, const Env* env) {
  switch (e->kind) {
    case Expr::Kind::Number:
      return DfVal::constant(e->lexeme, e->value);
    case Expr::Kind::Ident: {
      if (env) {
        auto it = env->find(e->name);
        if (it != env->end()) return it->second;
      }
      return DfVal::signal(e->name);
    }
    case Expr::Kind::Unary:
      return DfVal::operation(unary_op_tag(e->uop), {to_dfval(e->args[0], env)});
    case Expr::Kind::Binary:
      return DfVal::operation(binary_op_tag(e->bop),
                              {to_dfval(e->args[0], env), to_dfval(e->args[1], env)});
    case Expr::Kind::Ternary:
      return DfVal::branch(to_dfval(e->args[0], env), to_dfval(e->args[1], env),
                           to_dfval(e->args[2], env));
    case Expr::Kind::BitSelect:
      return DfVal::operation(OpTag::BitSelect,
                              {to_dfval(e->args[0], env), to_dfval(e->args[1], env)});
    case Expr::Kind::PartSelect:
      return DfVal::operation(OpTag::PartSelect,
                              {to_dfval(e->args[0], env), to_dfval(e->args[1], env),
                               to_dfval(e->args[2], env)});
    case Expr::Kind::Concat: {
      std::vector<DfP> kids;
      for (const ExprPtr& a : e->args) kids.push_back(to_dfval(a, env));
      return DfVal::operation(OpTag::Concat, std::move(kids));
    }
    case Expr::Kind::Repeat:
      return DfVal::operation(OpTag::Repeat,
                              {to_dfval(e->args[0], env), to_dfval(e->args[1], env)});
  }
  return DfVal::signal("?");
}

inline void walk_stmt(const StmtPtr& s, Env& env);

inline void merge_branch(Env& env, const DfP& cond, const Env& then_env, const Env& else_env) {
  std::set<std::string> keys;
  for (const auto& [k, _] : then_env) keys.insert(k);
  for (const auto& [k, _] : else_env) keys.insert(k);
  for (const std::string& k : keys) {
    DfP prior;
    auto p = env.find(k);
    if (p != env.end()) prior = p->second;
    auto ti = then_env.find(k);
    auto ei = else_env.find(k);
    DfP tv = ti != then_env.end() ? ti->second : prior;
    DfP ev = ei != else_env.end() ? ei->second : prior;
    if (tv == ev) {
      if (tv) env[k] = tv;
      continue;
    }
    env[k] = DfVal::branch(cond, tv, ev);
  }
}

inline void walk_stmt(const StmtPtr& s, Env& env) {
  if (!s) return;
  switch (s->kind) {
    case Stmt::Kind::Null:
      return;
    case Stmt::Kind::Block:
      for (const StmtPtr& c : s->body) walk_stmt(c, env);
      return;
    case Stmt::Kind::Assign: {
      std::vector<std::string> bases;
      lhs_bases(s->lhs, bases);
      DfP val = to_dfval(s->rhs, s->nonblocking ? nullptr : &env);
      for (const std::string& b : bases) env[b] = val;
      return;
    }
    case Stmt::Kind::If: {
      DfP cond = to_dfval(s->cond, &env);
      Env then_env = env;
      walk_stmt(s->then_branch, then_env);
      Env else_env = env;
      if (s->else_branch) walk_stmt(s->else_branch, else_env);
      Env then_delta, else_delta;
      for (const auto& [k, v] : then_env)
        if (!env.count(k) || env[k] != v) then_delta[k] = v;
      for (const auto& [k, v] : else_env)
        if (!env.count(k) || env[k] != v) else_delta[k] = v;
      merge_branch(env, cond, then_delta, else_delta);
      return;
    }
    case Stmt::Kind::Case: {
      DfP sel = to_dfval(s->case_expr, &env);
      // desugar to a chain of branches, last item innermost
      struct ItemVal {
        DfP cond;  // null for default
        Env delta;
      };
      std::vector<ItemVal> vals;
      for (const CaseItem& item : s->items) {
        Env item_env = env;
        walk_stmt(item.body, item_env);
        ItemVal iv;
        for (const auto& [k, v] : item_env)
          if (!env.count(k) || env.at(k) != v) iv.delta[k] = v;
        if (!item.is_default) {
          DfP c;
          for (const ExprPtr& label : item.labels) {
            DfP eq = DfVal::operation(OpTag::Eq, {sel, to_dfval(label, &env)});
            c = c ? DfVal::operation(OpTag::LogOr, {c, eq}) : eq;
          }
          iv.cond = c;
        }
        vals.push_back(std::move(iv));
      }
      std::set<std::string> keys;
      for (const ItemVal& iv : vals)
        for (const auto& [k, _] : iv.delta) keys.insert(k);
      for (const std::string& k : keys) {
        DfP prior;
        auto p = env.find(k);
        if (p != env.end()) prior = p->second;
        DfP acc = prior;
        bool has_default = false;
        for (const ItemVal& iv : vals)
          if (!iv.cond) {
            auto it = iv.delta.find(k);
            acc = it != iv.delta.end() ? it->second : prior;
            has_default = true;
          }
        if (!has_default) acc = prior;
        for (auto rit = vals.rbegin(); rit != vals.rend(); ++rit) {
          if (!rit->cond) continue;
          auto it = rit->delta.find(k);
          DfP tv = it != rit->delta.end() ? it->second : prior;
          if (tv == acc && tv) continue;
          acc = DfVal::branch(rit->cond, tv, acc);
        }
        if (acc) env[k] = acc;
      }
      return;
    }
  }
}

/// Builds a rooted SignalDfg from symbolic driver values. Signal leaves are
/// shared by name; the root's own name maps to a separate feedback leaf.
struct DfgBuilder {
  SignalDfg g;
  std::map<std::string, int> leaves;
  std::map<const DfVal*, int> memo;  // one node per distinct symbolic value

  explicit DfgBuilder(const std::string& root, bool is_output, Dialect dialect) {
    g.root_name = root;
    g.is_output = is_output;
    g.dialect = dialect;
    graph::Node n;
    n.kind = NodeKind::Signal;
    n.name = root;
    g.nodes.push_back(n);
  }

  int add_node(NodeKind kind, OpTag op, std::string name, std::uint64_t value = 0) {
    graph::Node n;
    n.kind = kind;
    n.op = op;
    n.name = std::move(name);
    n.value = value;
    g.nodes.push_back(n);
    return static_cast<int>(g.nodes.size()) - 1;
  }

  void add_edge(int a, int b) {
    for (const graph::Edge& e : g.edges)
      if (e.first == a && e.second == b) return;
    g.edges.emplace_back(a, b);
  }

  int emit(const DfP& v) {
    auto hit = memo.find(v.get());
    if (hit != memo.end()) return hit->second;
    int id = 0;
    switch (v->k) {
      case DfVal::K::Const:
        id = add_node(NodeKind::Constant, OpTag::None, v->text, v->value);
        break;
      case DfVal::K::Signal: {
        auto it = leaves.find(v->name);
        if (it != leaves.end()) return it->second;
        id = add_node(NodeKind::Signal, OpTag::None, v->name);
        leaves[v->name] = id;
        break;
      }
      case DfVal::K::Op: {
        id = add_node(NodeKind::Operation, v->op, "");
        memo[v.get()] = id;
        for (const DfP& kid : v->kids) add_edge(id, emit(kid));
        return id;
      }
      case DfVal::K::Branch: {
        id = add_node(NodeKind::Branch, OpTag::None, "");
        memo[v.get()] = id;
        int bc = add_node(NodeKind::BranchCondition, OpTag::None, "");
        add_edge(id, bc);
        add_edge(bc, emit(v->cond));
        if (v->tval) add_edge(id, emit(v->tval));
        if (v->eval) add_edge(id, emit(v->eval));
        return id;
      }
    }
    memo[v.get()] = id;
    return id;
  }
};

struct SignalInfo {
  bool declared = false;
  bool is_output = false;
  bool is_reg = false;
  bool is_input = false;
};

inline std::map<std::string, SignalInfo> signal_table(const Module& m) {
  std::map<std::string, SignalInfo> table;
  for (const ModuleItem& it : m.items) {
    if (auto* p = std::get_if<PortDecl>(&it)) {
      SignalInfo& s = table[p->name];
      s.declared = true;
      s.is_output = p->dir != PortDir::Input;
      s.is_input = p->dir == PortDir::Input;
      s.is_reg |= p->is_reg;
    } else if (auto* n = std::get_if<NetDecl>(&it)) {
      SignalInfo& s = table[n->name];
      s.declared = true;
      s.is_reg |= n->is_reg;
    }
  }
  return table;
}

/// Collects every driver of `signal` in module item order.
inline std::vector<DfP> collect_drivers(const Module& m, const std::string& signal) {
  std::vector<DfP> drivers;
  for (const ModuleItem& it : m.items) {
    if (auto* n = std::get_if<NetDecl>(&it)) {
      if (n->name == signal && n->init) drivers.push_back(to_dfval(n->init, nullptr));
    } else if (auto* a = std::get_if<ContAssign>(&it)) {
      std::vector<std::string> bases;
      lhs_bases(a->lhs, bases);
      for (const std::string& b : bases)
        if (b == signal) {
          drivers.push_back(to_dfval(a->rhs, nullptr));
          break;
        }
    } else if (auto* b = std::get_if<AlwaysBlock>(&it)) {
      Env env;
      walk_stmt(b->body, env);
      auto v = env.find(signal);
      if (v != env.end()) drivers.push_back(v->second);
    } else if (auto* g = std::get_if<GateInst>(&it)) {
      std::vector<std::string> bases;
      lhs_bases(g->conns[0], bases);
      bool hits = false;
      for (const std::string& bb : bases) hits |= (bb == signal);
      if (hits) {
        std::vector<DfP> kids;
        for (std::size_t i = 1; i < g->conns.size(); ++i)
          kids.push_back(to_dfval(g->conns[i], nullptr));
        drivers.push_back(DfVal::operation(gate_op_tag(g->gate), std::move(kids)));
      }
    } else if (auto* c = std::get_if<CellInst>(&it)) {
      OpTag tag = cell_op_tag(c->cell);
      std::vector<DfP> inputs;
      std::vector<const ExprPtr*> outputs;
      if (!c->named.empty()) {
        for (const auto& [port, e] : c->named) {
          if (!e) continue;
          if (is_cell_output_port(port))
            outputs.push_back(&e);
          else
            inputs.push_back(to_dfval(e, nullptr));
        }
      } else if (!c->positional.empty()) {
        outputs.push_back(&c->positional[0]);
        for (std::size_t i = 1; i < c->positional.size(); ++i)
          inputs.push_back(to_dfval(c->positional[i], nullptr));
      }
      for (const ExprPtr* out : outputs) {
        std::vector<std::string> bases;
        lhs_bases(*out, bases);
        bool hits = false;
        for (const std::string& bb : bases) hits |= (bb == signal);
        if (hits) drivers.push_back(DfVal::operation(tag, inputs));
      }
    }
  }
  return drivers;
}

}  // namespace detail

/// Lists all assignable signals of the flattened design in declaration order:
/// regs, driven wires and output ports.
inline std::vector<std::string> list_signals(const DesignAst& ast) {
  DesignAst flat = ast.modules.size() == 1 ? ast : flatten(ast);
  const Module& m = flat.modules.front();

  std::set<std::string> driven;
  for (const ModuleItem& it : m.items) {
    std::vector<std::string> bases;
    if (auto* a = std::get_if<ContAssign>(&it)) {
      detail::lhs_bases(a->lhs, bases);
    } else if (auto* b = std::get_if<AlwaysBlock>(&it)) {
      detail::Env env;
      detail::walk_stmt(b->body, env);
      for (const auto& [k, _] : env) bases.push_back(k);
    } else if (auto* g = std::get_if<GateInst>(&it)) {
      detail::lhs_bases(g->conns[0], bases);
    } else if (auto* c = std::get_if<CellInst>(&it)) {
      if (!c->named.empty()) {
        for (const auto& [port, e] : c->named)
          if (e && detail::is_cell_output_port(port)) detail::lhs_bases(e, bases);
      } else if (!c->positional.empty()) {
        detail::lhs_bases(c->positional[0], bases);
      }
    } else if (auto* n = std::get_if<NetDecl>(&it)) {
      if (n->init) bases.push_back(n->name);
    }
    driven.insert(bases.begin(), bases.end());
  }

  std::vector<std::string> out;
  std::set<std::string> listed;
  auto consider = [&](const std::string& name, bool is_reg, bool is_output, bool is_input) {
    if (is_input || listed.count(name)) return;
    if (is_reg || is_output || driven.count(name)) {
      listed.insert(name);
      out.push_back(name);
    }
  };
  for (const ModuleItem& it : m.items) {
    if (auto* p = std::get_if<PortDecl>(&it))
      consider(p->name, p->is_reg, p->dir != PortDir::Input, p->dir == PortDir::Input);
    else if (auto* n = std::get_if<NetDecl>(&it))
      consider(n->name, n->is_reg, false, false);
  }
  return out;
}

/// Builds the rooted data-flow graph of one signal (§ per-signal extraction).
/// Conditional assignment becomes branch/branch-condition nodes; sequential
/// feedback reappears as a leaf so each per-signal graph stays acyclic.
inline SignalDfg analyze_dataflow(const DesignAst& ast, const std::string& signal) {
  DesignAst flat = ast.modules.size() == 1 ? ast : flatten(ast);
  const Module& m = flat.modules.front();

  auto table = detail::signal_table(m);
  auto info = table.find(signal);
  if (info == table.end() || !info->second.declared)
    raise(errc::unknown_signal, "signal '" + signal + "' is not declared");

  std::vector<detail::DfP> drivers = detail::collect_drivers(m, signal);
  detail::DfgBuilder b(signal, info->second.is_output, flat.dialect);
  if (drivers.size() == 1) {
    b.add_edge(0, b.emit(drivers[0]));
  } else if (drivers.size() > 1) {
    int md = b.add_node(NodeKind::Operation, OpTag::MultiDriver, "");
    b.add_edge(0, md);
    for (const detail::DfP& d : drivers) b.add_edge(md, b.emit(d));
  }
  return b.g;
}

}  // namespace verilog
