// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "htscan/errors.hpp"
#include "htscan/pipeline/manifest.hpp"
#include "htscan/verilog/source.hpp"

namespace htscan::pipeline {

using verilog::Dialect;

struct SynthOptions {
  std::uint64_t seed = 1;
  int n_free = 20;
  int n_infected = 20;
};

struct TrojanInfo {
  std::string trigger;  // "time_bomb" | "cheat_code"
  std::string payload;  // "leak" | "deny"
  int inserted_first = 0;  // 1-based line span of the injected region
  int inserted_last = 0;
};

struct SynthDesign {
  std::string id;
  std::string family;
  bool infected = false;
  std::string text;
  std::string base_text;  // clean counterpart of an infected design
  TrojanInfo trojan;
};

namespace detail {

inline int rint(std::mt19937_64& rng, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  return d(rng);
}

inline std::uint64_t rbits(std::mt19937_64& rng, int width) {
  std::uniform_int_distribution<std::uint64_t> d(0, width >= 64 ? ~0ULL : ((1ULL << width) - 1));
  std::uint64_t v = d(rng);
  if (width >= 2) v |= 1ULL << (width - 1);  // keep magic constants wide
  return v;
}

inline std::string hexlit(int width, std::uint64_t v) {
  std::ostringstream os;
  os << width << "'h" << std::hex << v;
  return os.str();
}

inline std::string declit(int width, std::uint64_t v) {
  return std::to_string(width) + "'d" + std::to_string(v);
}

/// Internal-net name pool shared by clean logic and injected logic, so names
/// never separate the classes.
inline std::string pool_name(std::mt19937_64& rng, int& counter, const char* suffix) {
  static const char* stems[] = {"tmp", "aux", "sr", "chk", "acc", "px", "dl", "mx", "wv", "kq"};
  return std::string(stems[rint(rng, 0, 9)]) + std::to_string(counter++) + suffix;
}

// ---------------------------------------------------------------------------
// RTL templates

struct RtlTemplate {
  std::string name;
  std::vector<std::string> ports;
  std::vector<std::string> decls;
  std::vector<std::string> logic;
  std::vector<std::pair<std::string, std::string>> out_assigns;  // out -> expression
  std::map<std::string, int> out_width;
  std::vector<std::pair<std::string, int>> cheat_buses;  // (input bus, width)
  std::vector<std::pair<std::string, int>> leak_nets;    // (internal net, width)
  int name_counter = 0;

  std::vector<std::string> render_lines(const std::vector<std::string>& extra_decls,
                                        const std::vector<std::string>& extra_logic,
                                        int* inserted_first, int* inserted_last) const {
    std::vector<std::string> lines;
    std::string head = "module " + name + " (";
    for (std::size_t i = 0; i < ports.size(); ++i) {
      if (i) head += ", ";
      head += ports[i];
    }
    head += ");";
    lines.push_back(head);
    for (const std::string& d : decls) lines.push_back("  " + d);
    for (const std::string& l : logic) lines.push_back("  " + l);
    if (!extra_decls.empty() || !extra_logic.empty()) {
      if (inserted_first) *inserted_first = static_cast<int>(lines.size()) + 1;
      for (const std::string& d : extra_decls) lines.push_back("  " + d);
      for (const std::string& l : extra_logic) lines.push_back("  " + l);
      if (inserted_last) *inserted_last = static_cast<int>(lines.size());
    }
    for (const auto& [out, expr] : out_assigns)
      lines.push_back("  assign " + out + " = " + expr + ";");
    lines.push_back("endmodule");
    return lines;
  }

  std::string render() const {
    std::vector<std::string> lines = render_lines({}, {}, nullptr, nullptr);
    std::string text;
    for (const std::string& l : lines) text += l + "\n";
    return text;
  }
};

inline RtlTemplate rtl_counter(std::mt19937_64& rng, const std::string& mod_name) {
  RtlTemplate t;
  t.name = mod_name;
  int w = rint(rng, 6, 10);
  std::uint64_t limit = static_cast<std::uint64_t>(rint(rng, 20, (1 << (w - 1)) - 1));
  bool wrap_to_start = rint(rng, 0, 1) == 1;
  bool prescale = rint(rng, 0, 1) == 1;

  t.ports = {"clk", "rst", "en", "start_in", "count", "tick"};
  t.decls = {"input clk;", "input rst;", "input en;",
             "input [" + std::to_string(w - 1) + ":0] start_in;",
             "output [" + std::to_string(w - 1) + ":0] count;", "output tick;",
             "reg [" + std::to_string(w - 1) + ":0] cnt_r;", "reg tick_r;"};
  t.cheat_buses.emplace_back("start_in", w);
  t.leak_nets.emplace_back("cnt_r", w);
  std::string wrap = wrap_to_start ? "start_in" : declit(w, 0);

  std::vector<std::string> body = {
      "always @(posedge clk) begin",
      "  if (rst) begin",
      "    cnt_r <= " + declit(w, 0) + ";",
      "    tick_r <= 1'b0;",
      "  end else begin",
      "    if (en) begin",
      "      if (cnt_r == " + declit(w, limit) + ") begin",
      "        cnt_r <= " + wrap + ";",
      "        tick_r <= 1'b1;",
      "      end else begin",
      "        cnt_r <= cnt_r + " + declit(w, 1) + ";",
      "        tick_r <= 1'b0;",
      "      end",
      "    end",
      "  end",
      "end"};
  t.logic = body;

  if (prescale) {
    int pw = rint(rng, 3, 5);
    t.decls.push_back("reg [" + std::to_string(pw - 1) + ":0] pre_r;");
    t.decls.push_back("wire step_w;");
    t.logic.push_back("always @(posedge clk) begin");
    t.logic.push_back("  if (rst) pre_r <= " + declit(pw, 0) + ";");
    t.logic.push_back("  else pre_r <= pre_r + " + declit(pw, 1) + ";");
    t.logic.push_back("end");
    t.out_assigns.emplace_back("step_w", "(pre_r == " + declit(pw, (1ULL << pw) - 1) + ")");
    t.leak_nets.emplace_back("pre_r", pw);
  }
  t.out_assigns.emplace_back("count", "cnt_r");
  t.out_assigns.emplace_back("tick", "tick_r");
  t.out_width["count"] = w;
  t.out_width["tick"] = 1;
  return t;
}

inline RtlTemplate rtl_shift(std::mt19937_64& rng, const std::string& mod_name) {
  RtlTemplate t;
  t.name = mod_name;
  int w = rint(rng, 6, 12);
  bool msb_first = rint(rng, 0, 1) == 1;
  bool parity = rint(rng, 0, 1) == 1;
  int cw = 4;

  t.ports = {"clk", "rst", "load", "din", "sin", "sout", "busy"};
  t.decls = {"input clk;", "input rst;", "input load;",
             "input [" + std::to_string(w - 1) + ":0] din;", "input sin;", "output sout;",
             "output busy;",
             "reg [" + std::to_string(w - 1) + ":0] sh_r;",
             "reg [" + std::to_string(cw - 1) + ":0] bit_r;"};
  t.cheat_buses.emplace_back("din", w);
  t.leak_nets.emplace_back("sh_r", w);

  std::string shifted = msb_first
                            ? "{sh_r[" + std::to_string(w - 2) + ":0], sin}"
                            : "{sin, sh_r[" + std::to_string(w - 1) + ":1]}";
  t.logic = {"always @(posedge clk) begin",
             "  if (rst) begin",
             "    sh_r <= " + declit(w, 0) + ";",
             "    bit_r <= " + declit(cw, 0) + ";",
             "  end else begin",
             "    if (load) begin",
             "      sh_r <= din;",
             "      bit_r <= " + declit(cw, static_cast<std::uint64_t>(w)) + ";",
             "    end else begin",
             "      if (bit_r != " + declit(cw, 0) + ") begin",
             "        sh_r <= " + shifted + ";",
             "        bit_r <= bit_r - " + declit(cw, 1) + ";",
             "      end",
             "    end",
             "  end",
             "end"};
  t.out_assigns.emplace_back("sout", msb_first ? "sh_r[" + std::to_string(w - 1) + "]" : "sh_r[0]");
  t.out_assigns.emplace_back("busy", "(bit_r != " + declit(cw, 0) + ")");
  t.out_width["sout"] = 1;
  t.out_width["busy"] = 1;
  if (parity) {
    t.ports.push_back("par");
    t.decls.push_back("output par;");
    t.out_assigns.emplace_back("par", "^sh_r");
    t.out_width["par"] = 1;
  }
  return t;
}

inline RtlTemplate rtl_lfsr(std::mt19937_64& rng, const std::string& mod_name) {
  RtlTemplate t;
  t.name = mod_name;
  int w = rint(rng, 8, 16);
  int dw = rint(rng, 4, 8);
  int ntaps = rint(rng, 2, 3);
  std::uint64_t init = rbits(rng, w) | 1;

  t.ports = {"clk", "rst", "en", "din", "dout", "stream"};
  t.decls = {"input clk;", "input rst;", "input en;",
             "input [" + std::to_string(dw - 1) + ":0] din;",
             "output [" + std::to_string(dw - 1) + ":0] dout;", "output stream;",
             "reg [" + std::to_string(w - 1) + ":0] lfsr_r;", "wire fb_w;"};
  t.cheat_buses.emplace_back("din", dw);
  t.leak_nets.emplace_back("lfsr_r", w);

  std::string fb = "lfsr_r[" + std::to_string(w - 1) + "]";
  std::vector<int> taps;
  for (int i = 0; i < ntaps; ++i) {
    int tap = rint(rng, 0, w - 2);
    fb += " ^ lfsr_r[" + std::to_string(tap) + "]";
  }
  t.out_assigns.emplace_back("fb_w", fb);
  t.logic = {"always @(posedge clk) begin",
             "  if (rst) lfsr_r <= " + hexlit(w, init) + ";",
             "  else begin",
             "    if (en) lfsr_r <= {lfsr_r[" + std::to_string(w - 2) + ":0], fb_w};",
             "  end",
             "end"};
  t.out_assigns.emplace_back("dout",
                             "din ^ lfsr_r[" + std::to_string(dw - 1) + ":0]");
  t.out_assigns.emplace_back("stream", "lfsr_r[0]");
  t.out_width["dout"] = dw;
  t.out_width["stream"] = 1;
  return t;
}

inline RtlTemplate rtl_fsm(std::mt19937_64& rng, const std::string& mod_name) {
  RtlTemplate t;
  t.name = mod_name;
  int cmd_w = rint(rng, 4, 8);
  bool third_grant = rint(rng, 0, 1) == 1;

  t.ports = {"clk", "rst", "req_a", "req_b", "halt_in", "cmd_in", "grant_a", "grant_b", "busy"};
  t.decls = {"input clk;", "input rst;", "input req_a;", "input req_b;", "input halt_in;",
             "input [" + std::to_string(cmd_w - 1) + ":0] cmd_in;",
             "output grant_a;", "output grant_b;", "output busy;",
             "reg [1:0] state_r;", "wire any_w;"};
  t.cheat_buses.emplace_back("cmd_in", cmd_w);
  t.leak_nets.emplace_back("state_r", 2);
  t.out_assigns.emplace_back("any_w", "|cmd_in");

  t.logic = {"always @(posedge clk) begin",
             "  if (rst) state_r <= 2'd0;",
             "  else begin",
             "    case (state_r)",
             "      2'd0:",
             "        if (req_a) state_r <= 2'd1;",
             "        else begin",
             "          if (req_b) state_r <= 2'd2;",
             "        end",
             "      2'd1:",
             "        if (halt_in) state_r <= 2'd3;",
             "      2'd2:",
             "        if (halt_in | any_w) state_r <= 2'd3;",
             "      default:",
             "        state_r <= 2'd0;",
             "    endcase",
             "  end",
             "end"};
  t.out_assigns.emplace_back("grant_a", "(state_r == 2'd1)");
  t.out_assigns.emplace_back("grant_b", "(state_r == 2'd2)");
  t.out_assigns.emplace_back("busy", "(state_r != 2'd0)");
  t.out_width["grant_a"] = 1;
  t.out_width["grant_b"] = 1;
  t.out_width["busy"] = 1;
  if (third_grant) {
    t.ports.push_back("idle_out");
    t.decls.push_back("output idle_out;");
    t.out_assigns.emplace_back("idle_out", "(state_r == 2'd0) & ~req_a");
    t.out_width["idle_out"] = 1;
  }
  return t;
}

inline RtlTemplate rtl_alu(std::mt19937_64& rng, const std::string& mod_name) {
  RtlTemplate t;
  t.name = mod_name;
  int w = rint(rng, 6, 10);
  bool has_carry = rint(rng, 0, 1) == 1;

  t.ports = {"clk", "rst", "op_in", "a_in", "b_in", "res_out", "zero_out"};
  t.decls = {"input clk;", "input rst;", "input [1:0] op_in;",
             "input [" + std::to_string(w - 1) + ":0] a_in;",
             "input [" + std::to_string(w - 1) + ":0] b_in;",
             "output [" + std::to_string(w - 1) + ":0] res_out;", "output zero_out;",
             "reg [" + std::to_string(w - 1) + ":0] res_r;",
             "reg [" + std::to_string(w - 1) + ":0] hold_r;"};
  t.cheat_buses.emplace_back("a_in", w);
  t.leak_nets.emplace_back("hold_r", w);

  t.logic = {"always @(*) begin",
             "  case (op_in)",
             "    2'd0:",
             "      res_r = a_in + b_in;",
             "    2'd1:",
             "      res_r = a_in - b_in;",
             "    2'd2:",
             "      res_r = a_in & b_in;",
             "    default:",
             "      res_r = a_in ^ b_in;",
             "  endcase",
             "end",
             "always @(posedge clk) begin",
             "  if (rst) hold_r <= " + declit(w, 0) + ";",
             "  else hold_r <= res_r;",
             "end"};
  t.out_assigns.emplace_back("res_out", "hold_r");
  t.out_assigns.emplace_back("zero_out", "(hold_r == " + declit(w, 0) + ")");
  t.out_width["res_out"] = w;
  t.out_width["zero_out"] = 1;
  if (has_carry) {
    t.ports.push_back("odd_out");
    t.decls.push_back("output odd_out;");
    t.out_assigns.emplace_back("odd_out", "hold_r[0]");
    t.out_width["odd_out"] = 1;
  }
  return t;
}

inline RtlTemplate make_rtl_template(const std::string& family, std::mt19937_64& rng,
                                     const std::string& mod_name) {
  if (family == "counter") return rtl_counter(rng, mod_name);
  if (family == "shift") return rtl_shift(rng, mod_name);
  if (family == "lfsr") return rtl_lfsr(rng, mod_name);
  if (family == "fsm") return rtl_fsm(rng, mod_name);
  return rtl_alu(rng, mod_name);
}

/// Injects a trigger block and rewires up to two output assigns with the
/// payload. Returns the infected text plus region bookkeeping.
inline SynthDesign inject_rtl_trojan(const RtlTemplate& clean, std::mt19937_64& rng,
                                     const std::string& trigger, const std::string& payload) {
  RtlTemplate t = clean;
  int nc = 100;  // trojan-local name counter, distinct suffix range
  std::string fire = pool_name(rng, nc, "_q");
  std::vector<std::string> decls;
  std::vector<std::string> logic;

  if (trigger == "time_bomb") {
    int tw = rint(rng, 12, 20);
    std::string cnt = pool_name(rng, nc, "_q");
    std::uint64_t magic = rbits(rng, tw);
    decls = {"reg [" + std::to_string(tw - 1) + ":0] " + cnt + ";", "reg " + fire + ";"};
    logic = {"always @(posedge clk) begin",
             "  if (rst) begin",
             "    " + cnt + " <= " + declit(tw, 0) + ";",
             "    " + fire + " <= 1'b0;",
             "  end else begin",
             "    " + cnt + " <= " + cnt + " + " + declit(tw, 1) + ";",
             "    if (" + cnt + " == " + declit(tw, magic) + ") " + fire + " <= 1'b1;",
             "  end",
             "end"};
  } else {  // cheat_code
    const auto& [bus, bw] = clean.cheat_buses.front();
    std::string hit = pool_name(rng, nc, "_w");
    std::uint64_t magic = rbits(rng, bw);
    bool two_stage = rint(rng, 0, 1) == 1;
    decls = {"reg " + fire + ";", "wire " + hit + ";"};
    if (two_stage) {
      std::string armed = pool_name(rng, nc, "_q");
      std::uint64_t magic2 = rbits(rng, bw);
      decls.push_back("reg " + armed + ";");
      logic = {"assign " + hit + " = (" + bus + " == " + hexlit(bw, magic) + ");",
               "always @(posedge clk) begin",
               "  if (rst) begin",
               "    " + armed + " <= 1'b0;",
               "    " + fire + " <= 1'b0;",
               "  end else begin",
               "    if (" + bus + " == " + hexlit(bw, magic2) + ") " + armed + " <= 1'b1;",
               "    if (" + armed + " & " + hit + ") " + fire + " <= 1'b1;",
               "  end",
               "end"};
    } else {
      logic = {"assign " + hit + " = (" + bus + " == " + hexlit(bw, magic) + ");",
               "always @(posedge clk) begin",
               "  if (rst) " + fire + " <= 1'b0;",
               "  else begin",
               "    if (" + hit + ") " + fire + " <= 1'b1;",
               "  end",
               "end"};
    }
  }

  // payload: rewrite the last (and, when present, first) real output assign
  std::vector<std::size_t> targets;
  for (std::size_t i = t.out_assigns.size(); i-- > 0;) {
    if (t.out_width.count(t.out_assigns[i].first)) targets.push_back(i);
    if (targets.size() == 2) break;
  }
  const auto& [leak_net, leak_w] = clean.leak_nets.front();
  for (std::size_t ti : targets) {
    auto& [out, expr] = t.out_assigns[ti];
    int w = t.out_width[out];
    std::string orig = "(" + expr + ")";
    if (payload == "deny") {
      expr = fire + " ? " + declit(w, 0) + " : " + orig;
    } else {  // leak
      std::string leak_expr = w == 1 ? leak_net + "[" + std::to_string(rint(rng, 0, leak_w - 1)) + "]"
                                     : leak_net;
      expr = orig + " ^ (" + fire + " ? " + leak_expr + " : " + declit(w, 0) + ")";
    }
  }

  SynthDesign d;
  d.trojan.trigger = trigger;
  d.trojan.payload = payload;
  std::vector<std::string> lines =
      t.render_lines(decls, logic, &d.trojan.inserted_first, &d.trojan.inserted_last);
  for (const std::string& l : lines) d.text += l + "\n";
  d.base_text = clean.render();
  return d;
}

// ---------------------------------------------------------------------------
// netlist templates

struct NlTemplate {
  std::string name;
  std::vector<std::string> ports;
  std::vector<std::string> decls;
  std::vector<std::string> body;
  std::vector<std::pair<std::string, std::string>> out_bufs;  // out pin <- internal wire
  std::vector<std::string> input_bits;                        // scalar inputs for cheat patterns
  std::vector<std::string> leak_wires;
  int gate_seq = 0;

  std::string g() { return "g" + std::to_string(gate_seq++); }

  void gate(const std::string& kind, const std::string& out, const std::string& a,
            const std::string& b = "") {
    std::string line = kind + " " + g() + " (" + out + ", " + a;
    if (!b.empty()) line += ", " + b;
    line += ");";
    body.push_back(line);
  }

  void dffr(const std::string& d, const std::string& q) {
    body.push_back("DFFR " + g() + " (.C(clk), .R(rst), .D(" + d + "), .Q(" + q + "));");
  }

  void mux2(const std::string& a, const std::string& b, const std::string& s,
            const std::string& y) {
    body.push_back("MUX2 " + g() + " (.A(" + a + "), .B(" + b + "), .S(" + s + "), .Y(" + y + "));");
  }

  void wire(const std::string& n) { decls.push_back("wire " + n + ";"); }

  /// AND-tree reduction of a set of wires; returns the tree output.
  std::string and_tree(const std::vector<std::string>& in, const std::string& stem) {
    std::vector<std::string> level = in;
    int idx = 0;
    while (level.size() > 1) {
      std::vector<std::string> next;
      for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
        std::string o = stem + std::to_string(idx++);
        wire(o);
        gate("and", o, level[i], level[i + 1]);
        next.push_back(o);
      }
      if (level.size() % 2) next.push_back(level.back());
      level = next;
    }
    return level.front();
  }

  std::vector<std::string> render_lines(const std::vector<std::string>& extra_decls,
                                        const std::vector<std::string>& extra_body,
                                        int* inserted_first, int* inserted_last) const {
    std::vector<std::string> lines;
    std::string head = "module " + name + " (";
    for (std::size_t i = 0; i < ports.size(); ++i) {
      if (i) head += ", ";
      head += ports[i];
    }
    head += ");";
    lines.push_back(head);
    for (const std::string& d : decls) lines.push_back("  " + d);
    for (const std::string& b : body) lines.push_back("  " + b);
    if (!extra_decls.empty() || !extra_body.empty()) {
      if (inserted_first) *inserted_first = static_cast<int>(lines.size()) + 1;
      for (const std::string& d : extra_decls) lines.push_back("  " + d);
      for (const std::string& b : extra_body) lines.push_back("  " + b);
      if (inserted_last) *inserted_last = static_cast<int>(lines.size());
    }
    for (const auto& [out, w] : out_bufs) lines.push_back("  buf (" + out + ", " + w + ");");
    lines.push_back("endmodule");
    return lines;
  }

  std::string render() const {
    std::string text;
    for (const std::string& l : render_lines({}, {}, nullptr, nullptr)) text += l + "\n";
    return text;
  }
};

/// Adds a bus built from existing wires plus a part-select tap, the detail
/// the netlist optimizer later removes.
inline void add_bus_texture(NlTemplate& t, std::mt19937_64& rng, const std::vector<std::string>& bits,
                            const std::string& user_wire) {
  int n = static_cast<int>(bits.size());
  if (n < 3) return;
  std::string bus = "bus" + std::to_string(t.gate_seq) + "_w";
  std::string tap = "tap" + std::to_string(t.gate_seq) + "_w";
  t.decls.push_back("wire [" + std::to_string(n - 1) + ":0] " + bus + ";");
  t.decls.push_back("wire [1:0] " + tap + ";");
  std::string cat = "{";
  for (int i = n - 1; i >= 0; --i) {
    cat += bits[static_cast<std::size_t>(i)];
    if (i) cat += ", ";
  }
  cat += "}";
  t.body.push_back("assign " + bus + " = " + cat + ";");
  int lo = rint(rng, 0, n - 2);
  t.body.push_back("assign " + tap + " = " + bus + "[" + std::to_string(lo + 1) + ":" +
                   std::to_string(lo) + "];");
  t.wire(user_wire);
  t.gate("or", user_wire, tap + "[1]", tap + "[0]");
}

/// Gate-level ripple counter with a terminal-count tick.
inline NlTemplate nl_counter(std::mt19937_64& rng, const std::string& mod_name) {
  NlTemplate t;
  t.name = mod_name;
  int w = rint(rng, 3, 5);
  t.ports = {"clk", "rst", "en", "tick"};
  t.decls = {"input clk;", "input rst;", "input en;", "output tick;"};
  std::vector<std::string> q(w), d(w), carry(w);
  for (int i = 0; i < w; ++i) {
    q[i] = "q" + std::to_string(i) + "_w";
    d[i] = "d" + std::to_string(i) + "_w";
    t.wire(q[i]);
    t.wire(d[i]);
  }
  t.input_bits = {"en"};
  std::string c = "en";
  for (int i = 0; i < w; ++i) {
    t.gate("xor", d[i], q[i], c);
    if (i + 1 < w) {
      carry[i] = "c" + std::to_string(i) + "_w";
      t.wire(carry[i]);
      t.gate("and", carry[i], q[i], c);
      c = carry[i];
    }
    t.dffr(d[i], q[i]);
  }
  for (int i = 0; i < w; ++i) t.leak_wires.push_back(q[i]);
  std::string tick_w = "tick_w";
  t.wire(tick_w);
  std::string top = t.and_tree(std::vector<std::string>(q.begin(), q.end()), "ta");
  t.gate("buf", tick_w, top);
  t.out_bufs.emplace_back("tick", tick_w);
  add_bus_texture(t, rng, q, "spill_w");
  if (rint(rng, 0, 1) == 1) {
    t.ports.push_back("msb_out");
    t.decls.push_back("output msb_out;");
    t.out_bufs.emplace_back("msb_out", q[static_cast<std::size_t>(w - 1)]);
  }
  return t;
}

/// Gate-level shift register with load muxes.
inline NlTemplate nl_shift(std::mt19937_64& rng, const std::string& mod_name) {
  NlTemplate t;
  t.name = mod_name;
  int w = rint(rng, 4, 6);
  t.ports = {"clk", "rst", "load", "sin"};
  t.decls = {"input clk;", "input rst;", "input load;", "input sin;"};
  std::vector<std::string> q(w), d(w), din(w);
  for (int i = 0; i < w; ++i) {
    std::string pin = "p" + std::to_string(i) + "_in";
    t.ports.push_back(pin);
    t.decls.push_back("input " + pin + ";");
    din[i] = pin;
    t.input_bits.push_back(pin);
  }
  for (int i = 0; i < w; ++i) {
    q[i] = "s" + std::to_string(i) + "_w";
    d[i] = "sd" + std::to_string(i) + "_w";
    t.wire(q[i]);
    t.wire(d[i]);
  }
  for (int i = 0; i < w; ++i) {
    std::string prev = i == 0 ? "sin" : q[static_cast<std::size_t>(i - 1)];
    t.mux2(prev, din[static_cast<std::size_t>(i)], "load", d[i]);
    t.dffr(d[i], q[i]);
    t.leak_wires.push_back(q[i]);
  }
  t.ports.push_back("sout");
  t.decls.push_back("output sout;");
  t.out_bufs.emplace_back("sout", q[static_cast<std::size_t>(w - 1)]);
  std::string par = "par_w";
  t.wire(par);
  t.gate("xor", par, q[0], q[1]);
  t.ports.push_back("par_out");
  t.decls.push_back("output par_out;");
  t.out_bufs.emplace_back("par_out", par);
  add_bus_texture(t, rng, q, "swp_w");
  return t;
}

/// Gate-level Fibonacci LFSR plus a data scrambler bit.
inline NlTemplate nl_lfsr(std::mt19937_64& rng, const std::string& mod_name) {
  NlTemplate t;
  t.name = mod_name;
  int w = rint(rng, 4, 7);
  t.ports = {"clk", "rst", "din", "dout", "stream"};
  t.decls = {"input clk;", "input rst;", "input din;", "output dout;", "output stream;"};
  t.input_bits = {"din"};
  std::vector<std::string> q(w);
  for (int i = 0; i < w; ++i) {
    q[i] = "r" + std::to_string(i) + "_w";
    t.wire(q[i]);
    t.leak_wires.push_back(q[i]);
  }
  std::string fb = "fb_w";
  t.wire(fb);
  int tap = rint(rng, 0, w - 2);
  t.gate("xnor", fb, q[static_cast<std::size_t>(w - 1)], q[static_cast<std::size_t>(tap)]);
  for (int i = 0; i < w; ++i) t.dffr(i == 0 ? fb : q[static_cast<std::size_t>(i - 1)], q[i]);
  std::string mix = "mix_w";
  t.wire(mix);
  t.gate("xor", mix, "din", q[static_cast<std::size_t>(w - 1)]);
  t.out_bufs.emplace_back("dout", mix);
  t.out_bufs.emplace_back("stream", q[0]);
  add_bus_texture(t, rng, q, "mask_w");
  return t;
}

/// Gate-level two-bit state machine with decoded outputs.
inline NlTemplate nl_fsm(std::mt19937_64& rng, const std::string& mod_name) {
  NlTemplate t;
  t.name = mod_name;
  t.ports = {"clk", "rst", "req_a", "req_b", "halt_in", "grant_a", "grant_b"};
  t.decls = {"input clk;", "input rst;", "input req_a;", "input req_b;", "input halt_in;",
             "output grant_a;", "output grant_b;"};
  t.input_bits = {"req_a", "req_b", "halt_in"};
  for (const char* wn : {"s0_w", "s1_w", "ns0_w", "ns1_w", "n_s0_w", "n_s1_w", "idle_w",
                         "go_a_w", "go_b_w", "hold0_w", "hold1_w"})
    t.wire(wn);
  t.gate("not", "n_s0_w", "s0_w");
  t.gate("not", "n_s1_w", "s1_w");
  t.gate("and", "idle_w", "n_s0_w", "n_s1_w");
  t.gate("and", "go_a_w", "idle_w", "req_a");
  t.gate("and", "go_b_w", "idle_w", "req_b");
  t.gate("and", "hold0_w", "s0_w", "halt_in");
  t.gate("and", "hold1_w", "s1_w", "halt_in");
  t.gate("or", "ns0_w", "go_a_w", "hold0_w");
  t.gate("or", "ns1_w", "go_b_w", "hold1_w");
  t.dffr("ns0_w", "s0_w");
  t.dffr("ns1_w", "s1_w");
  t.leak_wires = {"s0_w", "s1_w"};
  std::string ga = "ga_w", gb = "gb_w";
  t.wire(ga);
  t.wire(gb);
  t.gate("and", ga, "s0_w", "n_s1_w");
  t.gate("and", gb, "s1_w", "n_s0_w");
  t.out_bufs.emplace_back("grant_a", ga);
  t.out_bufs.emplace_back("grant_b", gb);
  if (rint(rng, 0, 1) == 1) {
    t.ports.push_back("busy_out");
    t.decls.push_back("output busy_out;");
    std::string any = "anys_w";
    t.wire(any);
    t.gate("or", any, "s0_w", "s1_w");
    t.out_bufs.emplace_back("busy_out", any);
  }
  add_bus_texture(t, rng, {"s0_w", "s1_w", "ns0_w", "ns1_w"}, "obsv_w");
  return t;
}

/// Gate-level ripple adder with an operation mux and zero flag.
inline NlTemplate nl_alu(std::mt19937_64& rng, const std::string& mod_name) {
  NlTemplate t;
  t.name = mod_name;
  int w = rint(rng, 2, 3);
  t.ports = {"clk", "rst", "sel_op"};
  t.decls = {"input clk;", "input rst;", "input sel_op;"};
  std::vector<std::string> a(w), b(w), sum(w), res(w), q(w);
  for (int i = 0; i < w; ++i) {
    a[i] = "a" + std::to_string(i) + "_in";
    b[i] = "b" + std::to_string(i) + "_in";
    t.ports.push_back(a[i]);
    t.ports.push_back(b[i]);
    t.decls.push_back("input " + a[i] + ";");
    t.decls.push_back("input " + b[i] + ";");
    t.input_bits.push_back(a[i]);
    t.input_bits.push_back(b[i]);
  }
  std::string carry = "";
  for (int i = 0; i < w; ++i) {
    sum[i] = "sum" + std::to_string(i) + "_w";
    t.wire(sum[i]);
    if (carry.empty()) {
      t.gate("xor", sum[i], a[i], b[i]);
      carry = "cy" + std::to_string(i) + "_w";
      t.wire(carry);
      t.gate("and", carry, a[i], b[i]);
    } else {
      std::string ps = "ps" + std::to_string(i) + "_w";
      std::string g1 = "cg" + std::to_string(i) + "_w";
      std::string g2 = "cp" + std::to_string(i) + "_w";
      std::string nc = "cyx" + std::to_string(i) + "_w";
      for (const std::string& x : {ps, g1, g2, nc}) t.wire(x);
      t.gate("xor", ps, a[i], b[i]);
      t.gate("xor", sum[i], ps, carry);
      t.gate("and", g1, a[i], b[i]);
      t.gate("and", g2, ps, carry);
      t.gate("or", nc, g1, g2);
      carry = nc;
    }
  }
  for (int i = 0; i < w; ++i) {
    std::string xw = "xo" + std::to_string(i) + "_w";
    t.wire(xw);
    t.gate("xor", xw, a[i], b[i]);
    res[i] = "res" + std::to_string(i) + "_w";
    t.wire(res[i]);
    t.mux2(sum[i], xw, "sel_op", res[i]);
    q[i] = "rq" + std::to_string(i) + "_w";
    t.wire(q[i]);
    t.dffr(res[i], q[i]);
    t.leak_wires.push_back(q[i]);
    std::string out = "r" + std::to_string(i) + "_out";
    t.ports.push_back(out);
    t.decls.push_back("output " + out + ";");
    t.out_bufs.emplace_back(out, q[i]);
  }
  std::string nz = "nz_w", zero = "zero_w";
  t.wire(nz);
  t.wire(zero);
  if (w == 2) {
    t.gate("or", nz, q[0], q[1]);
  } else {
    std::string t01 = "nz01_w";
    t.wire(t01);
    t.gate("or", t01, q[0], q[1]);
    t.gate("or", nz, t01, q[2]);
  }
  t.gate("not", zero, nz);
  t.ports.push_back("zero_out");
  t.decls.push_back("output zero_out;");
  t.out_bufs.emplace_back("zero_out", zero);
  add_bus_texture(t, rng, sum, "chain_w");
  return t;
}

inline NlTemplate make_nl_template(const std::string& family, std::mt19937_64& rng,
                                   const std::string& mod_name) {
  if (family == "counter") return nl_counter(rng, mod_name);
  if (family == "shift") return nl_shift(rng, mod_name);
  if (family == "lfsr") return nl_lfsr(rng, mod_name);
  if (family == "fsm") return nl_fsm(rng, mod_name);
  return nl_alu(rng, mod_name);
}

/// Gate-level trigger + payload injection: a DFF counter chain or an
/// XNOR-tree pattern matcher, a self-latching fire bit, and a payload gate
/// spliced into one or two output buffers.
inline SynthDesign inject_nl_trojan(const NlTemplate& clean, std::mt19937_64& rng,
                                    const std::string& trigger, const std::string& payload) {
  NlTemplate t = clean;
  std::vector<std::string> decls;
  std::vector<std::string> body;
  auto wire = [&](const std::string& n) { decls.push_back("wire " + n + ";"); };
  int gs = 900;  // trojan gate names in their own range
  auto g = [&]() { return "g" + std::to_string(gs++); };
  auto gate = [&](const std::string& kind, const std::string& out, const std::string& a,
                  const std::string& b = "") {
    std::string line = kind + " " + g() + " (" + out + ", " + a;
    if (!b.empty()) line += ", " + b;
    line += ");";
    body.push_back(line);
  };

  std::string hit;
  if (trigger == "time_bomb") {
    int cw = rint(rng, 3, 4);
    std::vector<std::string> tq(static_cast<std::size_t>(cw));
    std::string c;
    for (int i = 0; i < cw; ++i) {
      tq[static_cast<std::size_t>(i)] = "tb" + std::to_string(i) + "_w";
      wire(tq[static_cast<std::size_t>(i)]);
    }
    for (int i = 0; i < cw; ++i) {
      std::string d = "tbd" + std::to_string(i) + "_w";
      wire(d);
      if (i == 0) {
        gate("not", d, tq[0]);
        c = tq[0];
      } else {
        gate("xor", d, tq[static_cast<std::size_t>(i)], c);
        if (i + 1 < cw) {
          std::string nc = "tbc" + std::to_string(i) + "_w";
          wire(nc);
          gate("and", nc, tq[static_cast<std::size_t>(i)], c);
          c = nc;
        }
      }
      body.push_back("DFFR " + g() + " (.C(clk), .R(rst), .D(tbd" + std::to_string(i) +
                     "_w), .Q(tb" + std::to_string(i) + "_w));");
    }
    std::vector<std::string> level = tq;
    int ai = 0;
    while (level.size() > 1) {
      std::vector<std::string> next;
      for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
        std::string o = "tba" + std::to_string(ai++) + "_w";
        wire(o);
        gate("and", o, level[i], level[i + 1]);
        next.push_back(o);
      }
      if (level.size() % 2) next.push_back(level.back());
      level = next;
    }
    hit = level.front();
  } else {  // cheat_code over available input pins
    std::vector<std::string> bits = clean.input_bits;
    int use = std::min<int>(static_cast<int>(bits.size()), rint(rng, 3, 5));
    std::vector<std::string> match;
    for (int i = 0; i < use; ++i) {
      std::string m = "cc" + std::to_string(i) + "_w";
      wire(m);
      bool want_one = rint(rng, 0, 1) == 1;
      gate("xnor", m, bits[static_cast<std::size_t>(i)], want_one ? "1'b1" : "1'b0");
      match.push_back(m);
    }
    std::vector<std::string> level = match;
    int ai = 0;
    while (level.size() > 1) {
      std::vector<std::string> next;
      for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
        std::string o = "cca" + std::to_string(ai++) + "_w";
        wire(o);
        gate("and", o, level[i], level[i + 1]);
        next.push_back(o);
      }
      if (level.size() % 2) next.push_back(level.back());
      level = next;
    }
    hit = level.front();
  }

  std::string fire = "fr_w", fired = "frd_w";
  wire(fire);
  wire(fired);
  gate("or", fired, fire, hit);
  body.push_back("DFFR " + g() + " (.C(clk), .R(rst), .D(frd_w), .Q(fr_w));");

  SynthDesign d;
  d.trojan.trigger = trigger;
  d.trojan.payload = payload;

  // payload splice on up to two output buffers
  std::size_t n_payload = std::min<std::size_t>(2, t.out_bufs.size());
  std::string nfire = "nfr_w";
  if (payload == "deny") wire(nfire);
  std::string leak_and = "lk_w";
  if (payload == "leak") {
    wire(leak_and);
    gate("and", leak_and, fire, clean.leak_wires.front());
  } else {
    gate("not", nfire, fire);
  }
  std::vector<std::pair<std::string, std::string>> payload_gates;
  for (std::size_t i = 0; i < n_payload; ++i) {
    std::size_t idx = t.out_bufs.size() - 1 - i;
    auto& [out, w] = t.out_bufs[idx];
    if (payload == "deny")
      payload_gates.emplace_back(out, "and " + g() + " (" + out + ", " + w + ", " + nfire + ");");
    else
      payload_gates.emplace_back(out, "xor " + g() + " (" + out + ", " + w + ", " + leak_and + ");");
  }
  // rewritten buffer lines replace the plain ones
  std::vector<std::pair<std::string, std::string>> new_bufs;
  for (const auto& [out, w] : t.out_bufs) {
    bool patched = false;
    for (const auto& [pout, line] : payload_gates) {
      if (pout == out) {
        body.push_back(line);
        patched = true;
      }
    }
    if (!patched) new_bufs.emplace_back(out, w);
  }
  t.out_bufs = new_bufs;

  std::vector<std::string> lines =
      t.render_lines(decls, body, &d.trojan.inserted_first, &d.trojan.inserted_last);
  for (const std::string& l : lines) d.text += l + "\n";
  d.base_text = clean.render();
  return d;
}

}  // namespace detail

inline const std::vector<std::string>& corpus_family_names() {
  static const std::vector<std::string> f = {"counter", "shift", "lfsr", "fsm", "alu"};
  return f;
}

/// Deterministically generates the design set: parameterized clean designs
/// round-robin across the five families, plus infected variants cycling
/// through the trigger/payload combinations.
inline std::vector<SynthDesign> synthesize_designs(const SynthOptions& opts, Dialect dialect) {
  if (opts.n_free < 1 || opts.n_infected < 1)
    raise(errc::empty_input, "need at least one free and one infected design");
  std::mt19937_64 rng(opts.seed ^ (dialect == Dialect::Rtl ? 0x72746cULL : 0x6e6cULL));
  const auto& families = corpus_family_names();
  std::vector<SynthDesign> designs;

  int seq = 0;
  for (int i = 0; i < opts.n_free; ++i) {
    const std::string& family = families[static_cast<std::size_t>(i) % families.size()];
    std::string id = family + "_" + std::to_string(seq++);
    SynthDesign d;
    d.id = id;
    d.family = family;
    d.infected = false;
    if (dialect == Dialect::Rtl)
      d.text = detail::make_rtl_template(family, rng, id).render();
    else
      d.text = detail::make_nl_template(family, rng, id).render();
    designs.push_back(std::move(d));
  }
  static const char* kTriggers[] = {"time_bomb", "cheat_code"};
  static const char* kPayloads[] = {"leak", "deny"};
  for (int i = 0; i < opts.n_infected; ++i) {
    const std::string& family = families[static_cast<std::size_t>(i) % families.size()];
    std::string id = family + "_" + std::to_string(seq++);
    const std::string trigger = kTriggers[i % 2];
    const std::string payload = kPayloads[(i / 2) % 2];
    SynthDesign d;
    if (dialect == Dialect::Rtl) {
      detail::RtlTemplate base = detail::make_rtl_template(family, rng, id);
      d = detail::inject_rtl_trojan(base, rng, trigger, payload);
    } else {
      detail::NlTemplate base = detail::make_nl_template(family, rng, id);
      d = detail::inject_nl_trojan(base, rng, trigger, payload);
    }
    d.id = id;
    d.family = family;
    d.infected = true;
    designs.push_back(std::move(d));
  }
  return designs;
}

struct SynthResult {
  std::vector<CorpusEntry> entries;
  std::filesystem::path manifest_path;
};

/// Writes the generated corpus: one .v per design, manifest.tsv, and per-design
/// metadata (trojan region and clean base) under meta/.
inline SynthResult synthesize_corpus(const SynthOptions& opts, Dialect dialect,
                                     const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  fs::create_directories(out_dir / "meta");
  std::vector<SynthDesign> designs = synthesize_designs(opts, dialect);
  SynthResult result;
  for (const SynthDesign& d : designs) {
    std::string fname = d.id + ".v";
    {
      std::ofstream out(out_dir / fname);
      out << d.text;
    }
    nlohmann::json meta;
    meta["id"] = d.id;
    meta["family"] = d.family;
    meta["label"] = d.infected ? "infected" : "free";
    if (d.infected) {
      meta["trigger"] = d.trojan.trigger;
      meta["payload"] = d.trojan.payload;
      meta["inserted_first_line"] = d.trojan.inserted_first;
      meta["inserted_last_line"] = d.trojan.inserted_last;
      meta["base_text"] = d.base_text;
    }
    {
      std::ofstream out(out_dir / "meta" / (d.id + ".json"));
      out << meta.dump(2) << "\n";
    }
    result.entries.push_back(CorpusEntry{d.id, d.family, d.infected, fname});
  }
  result.manifest_path = out_dir / "manifest.tsv";
  write_manifest(result.entries, result.manifest_path);
  return result;
}

}  // namespace htscan::pipeline
