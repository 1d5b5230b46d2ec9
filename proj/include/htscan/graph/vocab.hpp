// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <string>
#include <vector>

#include "htscan/errors.hpp"
#include "htscan/graph/dfg.hpp"

namespace htscan::graph {

/// Version byte written into graph and model files. Bump on any vocabulary
/// change; readers reject files with a different version.
inline constexpr int kVocabVersion = 1;

inline constexpr int kRtlFeatureDim = 300;
inline constexpr int kNetlistFeatureDim = 17;

// --- netlist vocabulary (17 classes) ----------------------------------------

enum NetlistClass : int {
  kNlInput = 0,
  kNlOutput = 1,
  kNlIntermediate = 2,
  kNlConstant = 3,
  kNlAnd = 4,
  kNlOr = 5,
  kNlNand = 6,
  kNlNor = 7,
  kNlXor = 8,
  kNlXnor = 9,
  kNlNot = 10,
  kNlBuf = 11,
  kNlMux = 12,
  kNlDff = 13,
  kNlBranch = 14,
  kNlBranchCondition = 15,
  kNlUnknownOp = 16,
};

inline const std::vector<std::string>& netlist_vocabulary() {
  static const std::vector<std::string> v = {
      "input", "output", "intermediate_signal", "constant", "and", "or", "nand", "nor",
      "xor", "xnor", "not", "buf", "mux", "dff", "branch", "branch_condition", "unknown_op"};
  return v;
}

/// Gate class for an operation in a normalized netlist graph.
inline int netlist_op_class(OpTag op) {
  switch (op) {
    case OpTag::And:
    case OpTag::LogAnd: return kNlAnd;
    case OpTag::Or:
    case OpTag::LogOr: return kNlOr;
    case OpTag::Nand: return kNlNand;
    case OpTag::Nor: return kNlNor;
    case OpTag::Xor: return kNlXor;
    case OpTag::Xnor: return kNlXnor;
    case OpTag::Not:
    case OpTag::LogNot: return kNlNot;
    case OpTag::Buf: return kNlBuf;
    case OpTag::Mux: return kNlMux;
    case OpTag::Dff: return kNlDff;
    default: return kNlUnknownOp;
  }
}

// --- RTL vocabulary (300 entries) --------------------------------------------
//
// Layout: [0,27] operation tags, 28 constant, [29,35] structural tags,
// [36,298] curated signal-name tags, 299 the catch-all "general".

inline constexpr int kRtlOpCount = 28;
inline constexpr int kRtlConstantIndex = 28;
inline constexpr int kRtlBranchConditionIndex = 29;
inline constexpr int kRtlConcatIndex = 30;
inline constexpr int kRtlPartSelectIndex = 31;
inline constexpr int kRtlBitSelectIndex = 32;
inline constexpr int kRtlRepeatIndex = 33;
inline constexpr int kRtlMultiDriverIndex = 34;
inline constexpr int kRtlUnknownOpIndex = 35;
inline constexpr int kRtlFirstNameIndex = 36;
inline constexpr int kRtlGeneralIndex = 299;
inline constexpr int kRtlBranchIndex = 26;  // "?:" within the 28 operation tags

struct NameEntry {
  std::string tag;
  std::vector<std::string> patterns;  // lowercase substrings matched against signal names
};

/// Curated semantic signal-name tags, in frozen vocabulary order. Unused
/// reserved slots pad the vocabulary to its fixed width.
inline const std::vector<NameEntry>& curated_name_entries() {
  static const std::vector<NameEntry> entries = [] {
    std::vector<NameEntry> e = {
        {"clock", {"clk", "clock"}},
        {"reset", {"rst", "reset", "clear"}},
        {"enable", {"en", "enable", "ena"}},
        {"data", {"data", "dat"}},
        {"data_in", {"din", "data_in", "indata"}},
        {"data_out", {"dout", "data_out", "outdata"}},
        {"address", {"addr", "address", "adr"}},
        {"key", {"key"}},
        {"state", {"state", "fsm"}},
        {"counter", {"cnt", "count", "counter", "ctr"}},
        {"valid", {"valid", "vld"}},
        {"ready", {"ready", "rdy"}},
        {"request", {"req", "request"}},
        {"acknowledge", {"ack", "acknowledge"}},
        {"grant", {"grant", "gnt"}},
        {"busy", {"busy"}},
        {"done", {"done"}},
        {"start", {"start"}},
        {"stop", {"stop"}},
        {"load", {"load"}},
        {"shift", {"shift", "shft"}},
        {"mode", {"mode"}},
        {"select", {"sel", "select"}},
        {"mux_sel", {"mux"}},
        {"flag", {"flag"}},
        {"error", {"err", "error"}},
        {"interrupt", {"irq", "interrupt", "intr"}},
        {"mask", {"mask", "msk"}},
        {"control", {"ctrl", "control", "ctl"}},
        {"status", {"status", "stat"}},
        {"config", {"cfg", "config", "conf"}},
        {"write", {"wr", "write"}},
        {"read", {"rd", "read"}},
        {"write_enable", {"we", "wen", "wren"}},
        {"read_enable", {"ren", "rden"}},
        {"output_enable", {"oe", "oen"}},
        {"chip_enable", {"ce", "cen"}},
        {"chip_select", {"cs", "csn"}},
        {"strobe", {"stb", "strobe"}},
        {"sync", {"sync"}},
        {"async", {"async"}},
        {"fifo", {"fifo"}},
        {"full", {"full"}},
        {"empty", {"empty"}},
        {"push", {"push"}},
        {"pop", {"pop"}},
        {"head", {"head"}},
        {"tail", {"tail"}},
        {"pointer", {"ptr", "pointer"}},
        {"index", {"idx", "index"}},
        {"offset", {"offset", "ofs"}},
        {"base", {"base"}},
        {"limit", {"limit", "lim"}},
        {"size", {"size"}},
        {"length", {"len", "length"}},
        {"width", {"width"}},
        {"depth", {"depth"}},
        {"transmit", {"tx", "xmit", "transmit"}},
        {"receive", {"rx", "recv", "receive"}},
        {"serial", {"serial", "ser"}},
        {"parallel", {"parallel"}},
        {"bit_sig", {"bit"}},
        {"byte_sig", {"byte"}},
        {"word", {"word"}},
        {"frame", {"frame"}},
        {"packet", {"pkt", "packet"}},
        {"header", {"header", "hdr"}},
        {"payload", {"payload"}},
        {"crc", {"crc"}},
        {"parity", {"parity"}},
        {"checksum", {"checksum", "chksum"}},
        {"hash", {"hash"}},
        {"seed", {"seed"}},
        {"random", {"rand", "random"}},
        {"lfsr", {"lfsr", "prbs"}},
        {"nonce", {"nonce"}},
        {"cipher", {"cipher"}},
        {"plaintext", {"plain"}},
        {"encrypt", {"encrypt", "enc"}},
        {"decrypt", {"decrypt"}},
        {"round", {"round"}},
        {"sbox", {"sbox"}},
        {"permute", {"perm", "permute"}},
        {"expand", {"expand"}},
        {"compress", {"compress"}},
        {"sign", {"sign"}},
        {"verify", {"verify"}},
        {"auth", {"auth"}},
        {"token", {"token"}},
        {"secret", {"secret"}},
        {"password", {"pwd", "password", "passwd"}},
        {"user", {"user"}},
        {"tag_sig", {"tag"}},
        {"cache", {"cache"}},
        {"memory", {"mem", "memory"}},
        {"ram", {"ram"}},
        {"rom", {"rom"}},
        {"register", {"reg"}},
        {"buffer", {"buf", "buffer"}},
        {"queue", {"queue"}},
        {"stack", {"stack"}},
        {"alu", {"alu"}},
        {"program_counter", {"pc"}},
        {"opcode", {"opcode", "opc"}},
        {"instruction", {"instr", "insn", "instruction"}},
        {"fetch", {"fetch"}},
        {"decode", {"decode"}},
        {"execute", {"exec", "execute"}},
        {"writeback", {"writeback", "wb"}},
        {"stall", {"stall"}},
        {"flush", {"flush"}},
        {"jump", {"jump", "jmp"}},
        {"call", {"call"}},
        {"return_sig", {"ret", "return"}},
        {"trap", {"trap"}},
        {"exception", {"exception", "exc"}},
        {"vector", {"vec", "vector"}},
        {"scan", {"scan"}},
        {"test", {"test", "tst"}},
        {"debug", {"dbg", "debug"}},
        {"trigger", {"trig", "trigger"}},
        {"sample", {"sample", "smp"}},
        {"capture", {"capture"}},
        {"update", {"update", "upd"}},
        {"hold", {"hold"}},
        {"latch", {"latch"}},
        {"flop", {"flop", "dff"}},
        {"gate", {"gate"}},
        {"net", {"net"}},
        {"wire_sig", {"wire"}},
        {"node", {"node"}},
        {"port", {"port"}},
        {"pin", {"pin"}},
        {"pad", {"pad"}},
        {"bus", {"bus"}},
        {"channel", {"chan", "channel"}},
        {"lane", {"lane"}},
        {"link", {"link"}},
        {"phy", {"phy"}},
        {"mac", {"mac"}},
        {"uart", {"uart"}},
        {"spi", {"spi"}},
        {"i2c", {"i2c", "iic"}},
        {"usb", {"usb"}},
        {"pci", {"pci"}},
        {"ddr", {"ddr"}},
        {"dma", {"dma"}},
        {"timer", {"timer", "tmr"}},
        {"tick", {"tick"}},
        {"pulse", {"pulse"}},
        {"pwm", {"pwm"}},
        {"duty", {"duty"}},
        {"frequency", {"freq", "frequency"}},
        {"period", {"period"}},
        {"phase", {"phase"}},
        {"delay", {"delay", "dly"}},
        {"edge", {"edge"}},
        {"rise", {"rise", "rising"}},
        {"fall", {"fall", "falling"}},
        {"level", {"level", "lvl"}},
        {"high", {"high"}},
        {"low", {"low"}},
        {"minimum", {"min"}},
        {"maximum", {"max"}},
        {"sum", {"sum"}},
        {"product", {"prod", "product"}},
        {"accumulator", {"acc", "accum"}},
        {"multiplier", {"mult", "mul"}},
        {"divider", {"div", "quot"}},
        {"remainder", {"rem", "remainder"}},
        {"absolute", {"abs"}},
        {"negate", {"neg"}},
        {"invert", {"inv"}},
        {"compare", {"cmp", "compare"}},
        {"match", {"match"}},
        {"hit", {"hit"}},
        {"miss", {"miss"}},
        {"carry", {"carry"}},
        {"overflow", {"overflow", "ovf"}},
        {"zero", {"zero"}},
        {"msb", {"msb"}},
        {"lsb", {"lsb"}},
        {"temp", {"tmp", "temp"}},
        {"aux", {"aux"}},
        {"spare", {"spare"}},
        {"dummy", {"dummy"}},
        {"result", {"res", "result"}},
        {"input_sig", {"input"}},
        {"output_sig", {"output"}},
        {"supply", {"vdd", "vcc", "pwr", "supply"}},
        {"ground", {"gnd", "vss"}},
        {"sensor", {"sensor", "sens"}},
        {"led", {"led"}},
        {"switch", {"switch", "sw"}},
        {"button", {"button", "btn"}},
        {"display", {"display", "disp"}},
        {"segment", {"seg", "segment"}},
        {"video", {"video", "vga"}},
        {"audio", {"audio"}},
        {"pixel", {"pixel", "pix"}},
        {"color", {"color", "rgb"}},
        {"row", {"row"}},
        {"column", {"col", "column"}},
        {"line", {"line"}},
        {"page", {"page"}},
        {"bank", {"bank"}},
        {"block", {"blk", "block"}},
        {"sector", {"sector"}},
        {"region", {"region"}},
        {"window", {"window", "win"}},
        {"boundary", {"bound", "boundary"}},
        {"arbiter", {"arb", "arbiter"}},
        {"priority", {"prio", "priority"}},
        {"weight", {"weight"}},
        {"credit", {"credit"}},
        {"threshold", {"thresh", "threshold"}},
        {"alarm", {"alarm"}},
        {"watchdog", {"watchdog", "wdt"}},
        {"version", {"version", "ver"}},
        {"revision", {"rev", "revision"}},
        {"magic", {"magic"}},
        {"signature", {"signature"}},
        {"escape", {"escape", "esc"}},
        {"lock", {"lock"}},
        {"unlock", {"unlock"}},
        {"guard", {"guard"}},
        {"event", {"event", "evt"}},
        {"notify", {"notify"}},
        {"wakeup", {"wakeup", "wake"}},
        {"sleep", {"sleep"}},
        {"idle", {"idle"}},
        {"active", {"active", "act"}},
        {"halt", {"halt"}},
        {"run", {"run"}},
        {"step", {"step"}},
        {"init", {"init"}},
        {"boot", {"boot"}},
        {"setup", {"setup"}},
        {"commit", {"commit"}},
        {"abort", {"abort"}},
        {"retry", {"retry"}},
        {"timeout", {"timeout"}},
        {"expire", {"expire"}},
        {"refresh", {"refresh"}},
        {"reload", {"reload"}},
        {"restore", {"restore"}},
        {"save", {"save"}},
        {"swap", {"swap"}},
        {"rotate", {"rot", "rotate"}},
        {"reverse", {"reverse"}},
        {"forward", {"fwd", "forward"}},
        {"backward", {"bwd", "backward"}},
        {"local", {"local"}},
        {"remote", {"remote"}},
        {"master", {"master", "mst"}},
        {"slave", {"slave", "slv"}},
        {"host", {"host"}},
        {"device", {"device", "dev"}},
        {"target", {"target", "tgt"}},
        {"source", {"src", "source"}},
        {"destination", {"dst", "dest"}},
        {"upstream", {"upstream"}},
        {"downstream", {"downstream"}},
    };
    return e;
  }();
  return entries;
}

/// The 28 operation tags in frozen order, then constant, structural tags,
/// curated names and the "general" fallback; exactly 300 entries.
inline const std::vector<std::string>& rtl_vocabulary() {
  static const std::vector<std::string> v = [] {
    std::vector<std::string> out = {
        // 28 operation tags
        "plus", "minus", "times", "divide", "mod", "power", "and", "or", "xor", "xnor",
        "not", "logical_and", "logical_or", "logical_not", "shift_left", "shift_right",
        "arith_shift_left", "arith_shift_right", "less_than", "greater_than", "less_equal",
        "greater_equal", "equal", "not_equal", "case_equal", "case_not_equal", "branch",
        "reduction_or",
        // constant + structural
        "constant", "branch_condition", "concat", "partselect", "bitselect", "repeat",
        "multidriver", "unknown_op"};
    for (const NameEntry& e : curated_name_entries()) out.push_back(e.tag);
    int reserved = 0;
    while (out.size() < static_cast<std::size_t>(kRtlFeatureDim) - 1) {
      char buf[24];
      std::snprintf(buf, sizeof(buf), "reserved_%03d", reserved++);
      out.push_back(buf);
    }
    out.push_back("general");
    if (out.size() != static_cast<std::size_t>(kRtlFeatureDim))
      raise(errc::version_mismatch, "RTL vocabulary is not exactly 300 entries");
    return out;
  }();
  return v;
}

/// RTL tag index of an operation node.
inline int rtl_op_index(OpTag op) {
  switch (op) {
    case OpTag::Plus: return 0;
    case OpTag::Minus: return 1;
    case OpTag::Times: return 2;
    case OpTag::Divide: return 3;
    case OpTag::Mod: return 4;
    case OpTag::Power: return 5;
    case OpTag::And: return 6;
    case OpTag::Or: return 7;
    case OpTag::Xor: return 8;
    case OpTag::Xnor: return 9;
    case OpTag::Not: return 10;
    case OpTag::LogAnd: return 11;
    case OpTag::LogOr: return 12;
    case OpTag::LogNot: return 13;
    case OpTag::Shl: return 14;
    case OpTag::Shr: return 15;
    case OpTag::SShl: return 16;
    case OpTag::SShr: return 17;
    case OpTag::Lt: return 18;
    case OpTag::Gt: return 19;
    case OpTag::Le: return 20;
    case OpTag::Ge: return 21;
    case OpTag::Eq: return 22;
    case OpTag::Ne: return 23;
    case OpTag::CaseEq: return 24;
    case OpTag::CaseNe: return 25;
    case OpTag::RedOr: return 27;
    case OpTag::Concat: return kRtlConcatIndex;
    case OpTag::PartSelect: return kRtlPartSelectIndex;
    case OpTag::BitSelect: return kRtlBitSelectIndex;
    case OpTag::Repeat: return kRtlRepeatIndex;
    case OpTag::MultiDriver: return kRtlMultiDriverIndex;
    default: return kRtlUnknownOpIndex;  // gate-only and library-cell ops
  }
}

/// Longest-substring match of a signal name against the curated list;
/// ties break toward the earlier vocabulary entry. Unmatched names are
/// "general".
inline int rtl_name_index(const std::string& name) {
  std::string lower;
  lower.reserve(name.size());
  for (char c : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  int best = kRtlGeneralIndex;
  std::size_t best_len = 0;
  const auto& entries = curated_name_entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (const std::string& pat : entries[i].patterns) {
      if (pat.size() > best_len && lower.find(pat) != std::string::npos) {
        best_len = pat.size();
        best = kRtlFirstNameIndex + static_cast<int>(i);
      }
    }
  }
  return best;
}

/// Node kind implied by a tag index, used when loading serialized graphs.
inline NodeKind kind_for_tag(Dialect dialect, int tag) {
  if (dialect == Dialect::Netlist) {
    switch (tag) {
      case kNlInput:
      case kNlOutput:
      case kNlIntermediate: return NodeKind::Signal;
      case kNlConstant: return NodeKind::Constant;
      case kNlBranch: return NodeKind::Branch;
      case kNlBranchCondition: return NodeKind::BranchCondition;
      default: return NodeKind::Operation;
    }
  }
  if (tag == kRtlBranchIndex) return NodeKind::Branch;
  if (tag == kRtlConstantIndex) return NodeKind::Constant;
  if (tag == kRtlBranchConditionIndex) return NodeKind::BranchCondition;
  if (tag < kRtlFirstNameIndex) return NodeKind::Operation;
  return NodeKind::Signal;
}

inline int feature_dim(Dialect d) {
  return d == Dialect::Rtl ? kRtlFeatureDim : kNetlistFeatureDim;
}

inline const std::string& tag_label(Dialect d, int tag) {
  const auto& v = d == Dialect::Rtl ? rtl_vocabulary() : netlist_vocabulary();
  if (tag < 0 || tag >= static_cast<int>(v.size()))
    raise(errc::untagged_node, "tag index " + std::to_string(tag) + " out of range");
  return v[static_cast<std::size_t>(tag)];
}

}  // namespace htscan::graph
