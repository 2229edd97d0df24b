// Copyright (c) seuscope contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef SEUSCOPE_NETLIST_HPP
#define SEUSCOPE_NETLIST_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace seu {

// Width-typed bit-level IR for synchronous designs. A TransitionSystem owns
// every net and expression node; expression nodes are hash-consed, so
// structurally equal expressions share one id. After freeze() the system is
// immutable and safe to share across threads read-only.

using NetId = uint32_t;
using ExprId = uint32_t;
constexpr NetId kNoNet = UINT32_MAX;
constexpr ExprId kNoExpr = UINT32_MAX;
constexpr int kMaxWidth = 64;

class NetlistError : public std::runtime_error {
 public:
  explicit NetlistError(const std::string& what) : std::runtime_error(what) {}
};

enum class NetKind : uint8_t { kInput, kRegister, kWire };

enum class Op : uint8_t {
  kConst,
  kRef,
  kNot,
  kAnd,
  kOr,
  kXor,
  kIte,
  kEq,
  kNeq,
  kUlt,
  kUle,
  kSlt,
  kSle,
  kAdd,
  kSub,
  kShl,    // logical left, rhs is an unsigned amount of any width
  kShr,    // logical right
  kSra,    // arithmetic right
  kSlice,  // aux0 = hi, aux1 = lo
  kConcat, // a = high part, b = low part
  kSignExt,
  kZeroExt,
};

struct Net {
  std::string name;
  int width = 0;
  NetKind kind = NetKind::kWire;
};

struct ExprNode {
  Op op = Op::kConst;
  uint16_t width = 0;
  ExprId a = kNoExpr;
  ExprId b = kNoExpr;
  ExprId c = kNoExpr;
  uint64_t cval = 0;  // kConst value, or kRef NetId, or packed slice bounds
};

struct RegisterDef {
  NetId net = kNoNet;
  uint64_t init = 0;
  ExprId next = kNoExpr;
};

// Total assignment of concrete values to the registers (State) or the
// inputs (InputVector) of one system, indexed by register/input ordinal.
using State = std::vector<uint64_t>;
using InputVector = std::vector<uint64_t>;

struct StepResult {
  State next_state;
  // Value of every net (inputs, registers, wires), indexed by NetId.
  std::vector<uint64_t> net_values;
};

class TransitionSystem {
 public:
  // ---- construction ----
  NetId add_input(const std::string& name, int width);
  NetId add_register(const std::string& name, int width, uint64_t init);
  void set_next(NetId reg, ExprId next);
  NetId add_wire(const std::string& name, int width, ExprId expr);
  void add_assumption(ExprId expr, const std::string& name = "");
  void mark_output(NetId net);
  // Turns a free input into a wire driven by `expr` (environment binding).
  void bind_input(NetId net, ExprId expr);

  // ---- expression builders (hash-consed) ----
  ExprId const_(int width, uint64_t value);
  ExprId ref(NetId net);
  ExprId ref(const std::string& name);
  ExprId not_(ExprId a);
  ExprId and_(ExprId a, ExprId b);
  ExprId or_(ExprId a, ExprId b);
  ExprId xor_(ExprId a, ExprId b);
  ExprId ite(ExprId cond, ExprId t, ExprId e);
  ExprId eq(ExprId a, ExprId b);
  ExprId neq(ExprId a, ExprId b);
  ExprId ult(ExprId a, ExprId b);
  ExprId ule(ExprId a, ExprId b);
  ExprId slt(ExprId a, ExprId b);
  ExprId sle(ExprId a, ExprId b);
  ExprId add(ExprId a, ExprId b);
  ExprId sub(ExprId a, ExprId b);
  ExprId shl(ExprId a, ExprId amount);
  ExprId shr(ExprId a, ExprId amount);
  ExprId sra(ExprId a, ExprId amount);
  ExprId slice(ExprId a, int hi, int lo);
  ExprId concat(ExprId high, ExprId low);
  ExprId sign_ext(ExprId a, int width);
  ExprId zero_ext(ExprId a, int width);

  // Convenience: n-ary and/or over width-1 terms (empty lists fold to 1/0).
  ExprId all_of(const std::vector<ExprId>& terms);
  ExprId any_of(const std::vector<ExprId>& terms);

  // ---- queries ----
  const Net& net(NetId id) const { return nets_.at(id); }
  const ExprNode& node(ExprId id) const { return exprs_.at(id); }
  int width_of(ExprId id) const { return exprs_.at(id).width; }
  std::optional<NetId> find(const std::string& name) const;
  size_t net_count() const { return nets_.size(); }
  const std::vector<NetId>& inputs() const { return inputs_; }
  const std::vector<RegisterDef>& registers() const { return registers_; }
  const std::vector<std::pair<NetId, ExprId>>& wires() const { return wires_; }
  const std::vector<std::pair<ExprId, std::string>>& assumptions() const {
    return assumptions_;
  }
  const std::vector<NetId>& outputs() const { return outputs_; }
  // Ordinal of a register/input net within registers()/inputs().
  size_t register_index(NetId net) const;
  size_t input_index(NetId net) const;
  bool is_frozen() const { return frozen_; }

  // ---- analyses ----
  // Validates (unique ids, widths, acyclic combinational dependencies, all
  // register next-functions present) and locks the system.
  void freeze();

  // One synchronous step under concrete state/inputs. Pure; assumptions are
  // not checked here (eval_assumptions does that).
  StepResult eval_step(const State& state, const InputVector& inputs) const;

  // Evaluates one expression given values for every net it references.
  uint64_t eval_expr(ExprId expr,
                     const std::vector<uint64_t>& net_values) const;

  // Index of the first violated assumption, if any.
  std::optional<size_t> violated_assumption(
      const std::vector<uint64_t>& net_values) const;

  State initial_state() const;

  // Least fixpoint of structural dependency closure from `roots` through
  // wire definitions and register next-functions.
  std::unordered_set<NetId> coi(const std::vector<NetId>& roots) const;
  // Nets referenced by an expression.
  void expr_support(ExprId expr, std::unordered_set<NetId>& out) const;

  // Decomposes a word-level expression into `width` single-bit expressions.
  // Element i is semantically bit i of the input under eval. Leaves are
  // width-1 slices of net references. Memoized per system.
  const std::vector<ExprId>& bitblast(ExprId expr) const;

  // Debug listing: one line per net (kind, width, defining expression).
  void dump(std::ostream& os) const;
  std::string expr_to_string(ExprId expr) const;

  // Clones every net and expression of `src` into this system, prefixing
  // net names except those listed in `passthrough` (which are unified with
  // any existing same-named net of equal width and kind). Returns the
  // net id remapping.
  std::unordered_map<NetId, NetId> import_system(
      const TransitionSystem& src, const std::string& prefix,
      const std::vector<std::string>& passthrough = {});

  // Structural hash of the frozen system (registers, wires, assumptions).
  uint64_t structural_hash() const;

 private:
  ExprId intern(ExprNode n);
  NetId new_net(const std::string& name, int width, NetKind kind);
  void check_mutable() const;
  void check_width(ExprId e, int w, const char* ctx) const;
  ExprId import_expr(const TransitionSystem& src, ExprId expr,
                     const std::unordered_map<NetId, NetId>& net_map,
                     std::unordered_map<ExprId, ExprId>& memo);

  std::vector<Net> nets_;
  std::vector<ExprNode> exprs_;
  std::unordered_map<uint64_t, std::vector<ExprId>> expr_hash_;
  std::unordered_map<std::string, NetId> by_name_;
  std::vector<NetId> inputs_;
  std::vector<RegisterDef> registers_;
  std::vector<std::pair<NetId, ExprId>> wires_;  // in definition order
  std::vector<std::pair<ExprId, std::string>> assumptions_;
  std::vector<NetId> outputs_;
  std::unordered_map<NetId, size_t> reg_index_;
  std::unordered_map<NetId, size_t> input_index_;
  std::unordered_map<NetId, ExprId> wire_def_;
  std::vector<NetId> eval_order_;  // wires in topological order
  bool frozen_ = false;
  mutable std::unordered_map<ExprId, std::vector<ExprId>> blast_memo_;
};

uint64_t mask_of(int width);
int64_t to_signed(uint64_t v, int width);

}  // namespace seu

#endif  // SEUSCOPE_NETLIST_HPP
