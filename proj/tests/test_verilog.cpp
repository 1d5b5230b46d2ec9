// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "htscan/verilog/parser.hpp"
#include "htscan/verilog/preprocess.hpp"
#include "htscan/verilog/printer.hpp"

using namespace htscan;
using namespace htscan::verilog;

namespace {

SourceUnit pp(std::vector<SourceFile> files, Dialect d = Dialect::Rtl) {
  return preprocess(std::move(files), d);
}

int count_modules(const std::string& text) {
  Lexer lex(text);
  auto toks = lex.tokenize();
  int n = 0;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i)
    if (toks[i].kind == TokKind::Ident && toks[i].text == "module") ++n;
  return n;
}

}  // namespace

TEST_CASE("preprocess combines files and keeps all module bodies") {
  SourceUnit unit = pp({{"top.v", "module top (y);\n output y;\n sub u1 (y);\nendmodule\n"},
                        {"sub.v", "module sub (o);\n output o;\n assign o = 1'b0;\nendmodule\n"}});
  CHECK(unit.text.find("module top") != std::string::npos);
  CHECK(unit.text.find("module sub") != std::string::npos);
  CHECK(count_modules(unit.text) == 2);
  REQUIRE(unit.origin.size() >= 2);
  for (const OriginSpan& span : unit.origin) {
    CHECK(span.first_line >= 1);
    CHECK(span.last_line <= static_cast<int>(std::count(unit.text.begin(), unit.text.end(), '\n')) + 1);
  }
}

TEST_CASE("preprocess sanitizes digit-leading identifiers and records the rename") {
  SourceUnit unit = pp({{"a.v", "module m (x);\n output x;\n wire 1wire;\n assign x = 1wire;\nendmodule\n"}});
  CHECK(unit.text.find("_1wire") != std::string::npos);
  CHECK(unit.text.find(" 1wire") == std::string::npos);
  bool recorded = false;
  for (const Rename& r : unit.renames)
    if (r.original == "1wire" && r.sanitized == "_1wire") recorded = true;
  CHECK(recorded);
}

TEST_CASE("preprocess normalizes escaped identifiers deterministically") {
  std::string src = "module m (x);\n output x;\n wire \\foo$bar ;\n assign x = \\foo$bar ;\nendmodule\n";
  SourceUnit a = pp({{"a.v", src}});
  SourceUnit b = pp({{"a.v", src}});
  CHECK(a.text == b.text);
  CHECK(a.text.find("esc_") != std::string::npos);
  CHECK(a.text.find('\\') == std::string::npos);
  REQUIRE_FALSE(a.renames.empty());
}

TEST_CASE("self-contained module survives modulo comment removal") {
  std::string src = "module m (a, y);\n input a; // in\n output y;\n /* block */ assign y = a;\nendmodule\n";
  SourceUnit unit = pp({{"m.v", src}});
  CHECK(unit.text.find("//") == std::string::npos);
  CHECK(unit.text.find("/*") == std::string::npos);
  CHECK(unit.text.find("assign y = a;") != std::string::npos);
  CHECK(count_modules(unit.text) == 1);
}

TEST_CASE("preprocess expands include and define from the file set") {
  SourceUnit unit = pp({{"top.v", "`include \"defs.vh\"\nmodule m (y);\n output y;\n assign y = `ZERO;\nendmodule\n"},
                        {"defs.vh", "`define ZERO 1'b0\n"}});
  CHECK(unit.text.find("1'b0") != std::string::npos);
  CHECK(unit.text.find("`ZERO") == std::string::npos);
  CHECK(count_modules(unit.text) == 1);
}

TEST_CASE("preprocess honors ifdef/else/endif") {
  std::string src =
      "`define FAST\nmodule m (y);\n output y;\n`ifdef FAST\n assign y = 1'b1;\n`else\n assign y = 1'b0;\n`endif\nendmodule\n";
  SourceUnit unit = pp({{"m.v", src}});
  CHECK(unit.text.find("1'b1") != std::string::npos);
  CHECK(unit.text.find("1'b0") == std::string::npos);
}

TEST_CASE("preprocess error paths") {
  CHECK_THROWS_MATCHES(pp({}), error, Catch::Matchers::MessageMatches(
                                          Catch::Matchers::ContainsSubstring("EmptyInput")));
  CHECK_THROWS_MATCHES(pp({{"a.v", "`include \"missing.vh\"\nmodule m (); endmodule\n"}}), error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("UnresolvedInclude")));
  CHECK_THROWS_MATCHES(pp({{"a.v", "module m (); endmodule\n"}, {"b.v", "module m (); endmodule\n"}}),
                       error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("DuplicateModule")));
}

TEST_CASE("preprocess never changes the module declaration count") {
  std::vector<std::string> sources = {
      "module a (); endmodule\nmodule b (); endmodule\n",
      "// comment\nmodule one (x);\n input x;\nendmodule\n",
  };
  for (const std::string& src : sources) {
    int before = count_modules(src);
    SourceUnit unit = pp({{"f.v", src}});
    CHECK(count_modules(unit.text) == before);
  }
}

TEST_CASE("parser handles the smallest continuous assign") {
  SourceUnit unit = pp({{"m.v", "module m (y, a, b);\n output y;\n input a;\n input b;\n assign y = a & b;\nendmodule\n"}});
  DesignAst ast = parse(unit);
  REQUIRE(ast.modules.size() == 1);
  const Module& m = ast.modules[0];
  const ContAssign* assign = nullptr;
  for (const ModuleItem& it : m.items)
    if (auto* a = std::get_if<ContAssign>(&it)) assign = a;
  REQUIRE(assign != nullptr);
  CHECK(assign->lhs->kind == Expr::Kind::Ident);
  CHECK(assign->lhs->name == "y");
  REQUIRE(assign->rhs->kind == Expr::Kind::Binary);
  CHECK(assign->rhs->bop == BinaryOp::BitAnd);
  CHECK(assign->rhs->args[0]->name == "a");
  CHECK(assign->rhs->args[1]->name == "b");
}

TEST_CASE("parser handles a trigger-style always block") {
  SourceUnit unit = pp({{"m.v", R"(
module trig (clk, en, cnt);
  input clk;
  input en;
  output [7:0] cnt;
  reg [7:0] cnt;
  always @(posedge clk)
    if (en) cnt <= cnt + 8'd1;
endmodule
)"}});
  DesignAst ast = parse(unit);
  const Module& m = ast.modules[0];
  const AlwaysBlock* blk = nullptr;
  for (const ModuleItem& it : m.items)
    if (auto* b = std::get_if<AlwaysBlock>(&it)) blk = b;
  REQUIRE(blk != nullptr);
  REQUIRE(blk->events.size() == 1);
  CHECK(blk->events[0].edge == EventExpr::Edge::Pos);
  REQUIRE(blk->body->kind == Stmt::Kind::If);
  REQUIRE(blk->body->then_branch->kind == Stmt::Kind::Assign);
  CHECK(blk->body->then_branch->nonblocking);
  CHECK_FALSE(blk->body->else_branch);
}

TEST_CASE("parser handles primitive gate instantiation") {
  SourceUnit unit = pp({{"m.v", "module m (y, a, b);\n output y;\n input a;\n input b;\n and g1 (y, a, b);\nendmodule\n"}});
  DesignAst ast = parse(unit);
  const GateInst* gate = nullptr;
  for (const ModuleItem& it : ast.modules[0].items)
    if (auto* g = std::get_if<GateInst>(&it)) gate = g;
  REQUIRE(gate != nullptr);
  CHECK(gate->gate == "and");
  CHECK(gate->inst_name == "g1");
  REQUIRE(gate->conns.size() == 3);
  CHECK(gate->conns[0]->name == "y");
  CHECK(gate->conns[1]->name == "a");
  CHECK(gate->conns[2]->name == "b");
}

TEST_CASE("parser reports syntax errors with position") {
  SourceUnit unit;
  unit.text = "module m (y);\n output y;\n assign y = ;\nendmodule\n";
  try {
    parse(unit);
    FAIL("expected SyntaxError");
  } catch (const error& e) {
    CHECK(e.code() == errc::syntax_error);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("parser names unsupported constructs") {
  auto expect_unsupported = [](const std::string& body, const std::string& what) {
    SourceUnit unit;
    unit.text = "module m ();\n" + body + "\nendmodule\n";
    try {
      parse(unit);
      FAIL("expected UnsupportedConstruct for " + what);
    } catch (const error& e) {
      CHECK(e.code() == errc::unsupported_construct);
      CHECK(std::string(e.what()).find(what) != std::string::npos);
    }
  };
  expect_unsupported(" initial begin end", "initial");
  expect_unsupported(" generate endgenerate", "generate");
  expect_unsupported(" reg [7:0] mem [0:3];", "memory");
  expect_unsupported(" always @(posedge clk) #5 q <= 1'b1;", "delay");
}

TEST_CASE("parse/print round-trip is structurally stable") {
  std::vector<std::string> sources = {
      R"(module a (y, a, b);
  output y;
  input a;
  input b;
  assign y = (a ^ b) | ~(a & b);
endmodule
)",
      R"(module c (clk, rst, d, q, sel);
  input clk;
  input rst;
  input [3:0] d;
  input [1:0] sel;
  output reg [3:0] q;
  always @(posedge clk or negedge rst) begin
    if (!rst) q <= 4'd0;
    else begin
      case (sel)
        2'd0: q <= d;
        2'd1, 2'd2: q <= {d[2:0], d[3]};
        default: q <= q - 4'b0001;
      endcase
    end
  end
endmodule
)",
      R"(module g (y, z, a, b, c);
  output y;
  output z;
  input a;
  input b;
  input c;
  wire t;
  nand u1 (t, a, b);
  xor (y, t, c);
  CELLX2 #(.K(3)) u2 (.A(a), .Y(z));
endmodule
)",
      R"(module m (o, i);
  output [7:0] o;
  input [7:0] i;
  assign o = i[3] ? {4'hF, i[3:0]} : {2{i[7:4]}};
endmodule
)",
  };
  for (const std::string& src : sources) {
    SourceUnit unit;
    unit.text = src;
    DesignAst first = parse(unit);
    SourceUnit printed;
    printed.text = print_design(first);
    DesignAst second = parse(printed);
    INFO(printed.text);
    CHECK(ast_equal(first, second));
    SourceUnit printed2;
    printed2.text = print_design(second);
    CHECK(printed.text == printed2.text);
  }
}
