// Copyright (c) seuscope contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "seuscope/netlist.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>
#include <sstream>

namespace seu {

uint64_t mask_of(int width) {
  return width >= 64 ? ~uint64_t{0} : (uint64_t{1} << width) - 1;
}

int64_t to_signed(uint64_t v, int width) {
  if (width < 64 && (v >> (width - 1)) & 1) {
    return static_cast<int64_t>(v | ~mask_of(width));
  }
  return static_cast<int64_t>(v);
}

namespace {

uint64_t hash_mix(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

uint64_t node_hash(const ExprNode& n) {
  uint64_t h = 0xcbf29ce484222325ull;
  h = hash_mix(h, static_cast<uint64_t>(n.op));
  h = hash_mix(h, n.width);
  h = hash_mix(h, n.a);
  h = hash_mix(h, n.b);
  h = hash_mix(h, n.c);
  h = hash_mix(h, n.cval);
  return h;
}

bool node_equal(const ExprNode& x, const ExprNode& y) {
  return x.op == y.op && x.width == y.width && x.a == y.a && x.b == y.b &&
         x.c == y.c && x.cval == y.cval;
}

}  // namespace

void TransitionSystem::check_mutable() const {
  if (frozen_) throw NetlistError("transition system is frozen");
}

void TransitionSystem::check_width(ExprId e, int w, const char* ctx) const {
  if (width_of(e) != w) {
    throw NetlistError(std::string("width mismatch in ") + ctx + ": expected " +
                       std::to_string(w) + ", got " +
                       std::to_string(width_of(e)));
  }
}

NetId TransitionSystem::new_net(const std::string& name, int width,
                                NetKind kind) {
  check_mutable();
  if (width < 1 || width > kMaxWidth) {
    throw NetlistError("net '" + name + "': width " + std::to_string(width) +
                       " out of range 1.." + std::to_string(kMaxWidth));
  }
  if (by_name_.count(name)) {
    throw NetlistError("duplicate id '" + name + "'");
  }
  NetId id = static_cast<NetId>(nets_.size());
  nets_.push_back(Net{name, width, kind});
  by_name_[name] = id;
  return id;
}

NetId TransitionSystem::add_input(const std::string& name, int width) {
  NetId id = new_net(name, width, NetKind::kInput);
  input_index_[id] = inputs_.size();
  inputs_.push_back(id);
  return id;
}

NetId TransitionSystem::add_register(const std::string& name, int width,
                                     uint64_t init) {
  if (width < 64 && (init & ~mask_of(width)) != 0) {
    throw NetlistError("register '" + name + "': init value overflows width");
  }
  NetId id = new_net(name, width, NetKind::kRegister);
  reg_index_[id] = registers_.size();
  registers_.push_back(RegisterDef{id, init, kNoExpr});
  return id;
}

void TransitionSystem::set_next(NetId reg, ExprId next) {
  check_mutable();
  auto it = reg_index_.find(reg);
  if (it == reg_index_.end()) {
    throw NetlistError("set_next: net is not a register");
  }
  RegisterDef& def = registers_[it->second];
  if (def.next != kNoExpr) {
    throw NetlistError("set_next: next already set for '" + net(reg).name +
                       "'");
  }
  check_width(next, net(reg).width, "register next");
  def.next = next;
}

NetId TransitionSystem::add_wire(const std::string& name, int width,
                                 ExprId expr) {
  check_width(expr, width, ("wire '" + name + "'").c_str());
  NetId id = new_net(name, width, NetKind::kWire);
  wires_.emplace_back(id, expr);
  wire_def_[id] = expr;
  return id;
}

void TransitionSystem::add_assumption(ExprId expr, const std::string& name) {
  check_mutable();
  check_width(expr, 1, "assumption");
  assumptions_.emplace_back(expr, name);
}

void TransitionSystem::mark_output(NetId n) {
  check_mutable();
  if (std::find(outputs_.begin(), outputs_.end(), n) == outputs_.end()) {
    outputs_.push_back(n);
  }
}

void TransitionSystem::bind_input(NetId n, ExprId expr) {
  check_mutable();
  if (net(n).kind != NetKind::kInput) {
    throw NetlistError("bind_input: '" + net(n).name + "' is not an input");
  }
  check_width(expr, net(n).width, "bind_input");
  nets_[n].kind = NetKind::kWire;
  inputs_.erase(std::find(inputs_.begin(), inputs_.end(), n));
  input_index_.clear();
  for (size_t i = 0; i < inputs_.size(); ++i) input_index_[inputs_[i]] = i;
  wires_.emplace_back(n, expr);
  wire_def_[n] = expr;
}

std::optional<NetId> TransitionSystem::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

size_t TransitionSystem::register_index(NetId n) const {
  auto it = reg_index_.find(n);
  if (it == reg_index_.end())
    throw NetlistError("not a register: " + net(n).name);
  return it->second;
}

size_t TransitionSystem::input_index(NetId n) const {
  auto it = input_index_.find(n);
  if (it == input_index_.end()) throw NetlistError("not an input: " + net(n).name);
  return it->second;
}

ExprId TransitionSystem::intern(ExprNode n) {
  uint64_t h = node_hash(n);
  auto& bucket = expr_hash_[h];
  for (ExprId id : bucket) {
    if (node_equal(exprs_[id], n)) return id;
  }
  ExprId id = static_cast<ExprId>(exprs_.size());
  exprs_.push_back(n);
  bucket.push_back(id);
  return id;
}

ExprId TransitionSystem::const_(int width, uint64_t value) {
  if (width < 1 || width > kMaxWidth) {
    throw NetlistError("const width out of range");
  }
  if (width < 64 && (value & ~mask_of(width)) != 0) {
    throw NetlistError("literal overflows width " + std::to_string(width));
  }
  ExprNode n;
  n.op = Op::kConst;
  n.width = static_cast<uint16_t>(width);
  n.cval = value;
  return intern(n);
}

ExprId TransitionSystem::ref(NetId netid) {
  if (netid >= nets_.size()) throw NetlistError("unresolved reference");
  ExprNode n;
  n.op = Op::kRef;
  n.width = static_cast<uint16_t>(nets_[netid].width);
  n.cval = netid;
  return intern(n);
}

ExprId TransitionSystem::ref(const std::string& name) {
  auto id = find(name);
  if (!id) throw NetlistError("unresolved reference: '" + name + "'");
  return ref(*id);
}

namespace {
bool is_const(const ExprNode& n) { return n.op == Op::kConst; }
}  // namespace

ExprId TransitionSystem::not_(ExprId a) {
  const ExprNode na = node(a);
  if (is_const(na)) return const_(na.width, ~na.cval & mask_of(na.width));
  if (na.op == Op::kNot) return na.a;
  ExprNode n;
  n.op = Op::kNot;
  n.width = na.width;
  n.a = a;
  return intern(n);
}

ExprId TransitionSystem::and_(ExprId a, ExprId b) {
  const ExprNode na = node(a), nb = node(b);
  if (na.width != nb.width) throw NetlistError("width mismatch in and");
  uint64_t m = mask_of(na.width);
  if (is_const(na) && is_const(nb)) return const_(na.width, na.cval & nb.cval);
  if (is_const(na)) {
    if (na.cval == 0) return a;
    if (na.cval == m) return b;
  }
  if (is_const(nb)) {
    if (nb.cval == 0) return b;
    if (nb.cval == m) return a;
  }
  if (a == b) return a;
  if (a > b) std::swap(a, b);
  ExprNode n;
  n.op = Op::kAnd;
  n.width = na.width;
  n.a = a;
  n.b = b;
  return intern(n);
}

ExprId TransitionSystem::or_(ExprId a, ExprId b) {
  const ExprNode na = node(a), nb = node(b);
  if (na.width != nb.width) throw NetlistError("width mismatch in or");
  uint64_t m = mask_of(na.width);
  if (is_const(na) && is_const(nb)) return const_(na.width, na.cval | nb.cval);
  if (is_const(na)) {
    if (na.cval == 0) return b;
    if (na.cval == m) return a;
  }
  if (is_const(nb)) {
    if (nb.cval == 0) return a;
    if (nb.cval == m) return b;
  }
  if (a == b) return a;
  if (a > b) std::swap(a, b);
  ExprNode n;
  n.op = Op::kOr;
  n.width = na.width;
  n.a = a;
  n.b = b;
  return intern(n);
}

ExprId TransitionSystem::xor_(ExprId a, ExprId b) {
  const ExprNode na = node(a), nb = node(b);
  if (na.width != nb.width) throw NetlistError("width mismatch in xor");
  if (is_const(na) && is_const(nb)) return const_(na.width, na.cval ^ nb.cval);
  if (is_const(na) && na.cval == 0) return b;
  if (is_const(nb) && nb.cval == 0) return a;
  if (a == b) return const_(na.width, 0);
  if (a > b) std::swap(a, b);
  ExprNode n;
  n.op = Op::kXor;
  n.width = na.width;
  n.a = a;
  n.b = b;
  return intern(n);
}

ExprId TransitionSystem::ite(ExprId cond, ExprId t, ExprId e) {
  check_width(cond, 1, "ite condition");
  const ExprNode nt = node(t), ne = node(e);
  if (nt.width != ne.width) throw NetlistError("width mismatch in ite arms");
  const ExprNode nc = node(cond);
  if (is_const(nc)) return nc.cval ? t : e;
  if (t == e) return t;
  ExprNode n;
  n.op = Op::kIte;
  n.width = nt.width;
  n.a = cond;
  n.b = t;
  n.c = e;
  return intern(n);
}

#define SEU_BINOP(fn, opk, resw)                                       \
  ExprId TransitionSystem::fn(ExprId a, ExprId b) {                    \
    const ExprNode na = node(a), nb = node(b);                         \
    if (na.width != nb.width) throw NetlistError("width mismatch");    \
    ExprNode n;                                                        \
    n.op = opk;                                                        \
    n.width = resw;                                                    \
    n.a = a;                                                           \
    n.b = b;                                                           \
    if (is_const(na) && is_const(nb)) {                                \
      return const_(n.width, eval_expr(intern(n), {}));                \
    }                                                                  \
    return intern(n);                                                  \
  }

SEU_BINOP(neq, Op::kNeq, 1)
SEU_BINOP(ult, Op::kUlt, 1)
SEU_BINOP(ule, Op::kUle, 1)
SEU_BINOP(slt, Op::kSlt, 1)
SEU_BINOP(sle, Op::kSle, 1)
SEU_BINOP(add, Op::kAdd, na.width)
SEU_BINOP(sub, Op::kSub, na.width)
#undef SEU_BINOP

ExprId TransitionSystem::eq(ExprId a, ExprId b) {
  const ExprNode na = node(a), nb = node(b);
  if (na.width != nb.width) throw NetlistError("width mismatch in eq");
  if (a == b) return const_(1, 1);
  if (is_const(na) && is_const(nb)) return const_(1, na.cval == nb.cval);
  ExprNode n;
  n.op = Op::kEq;
  n.width = 1;
  n.a = a;
  n.b = b;
  return intern(n);
}

namespace {
Op shift_op_of(int which) {
  return which == 0 ? Op::kShl : which == 1 ? Op::kShr : Op::kSra;
}
}  // namespace

ExprId TransitionSystem::shl(ExprId a, ExprId amount) {
  (void)shift_op_of;
  const ExprNode na = node(a), nb = node(amount);
  ExprNode n;
  n.op = Op::kShl;
  n.width = na.width;
  n.a = a;
  n.b = amount;
  if (is_const(na) && is_const(nb)) return const_(n.width, eval_expr(intern(n), {}));
  return intern(n);
}

ExprId TransitionSystem::shr(ExprId a, ExprId amount) {
  const ExprNode na = node(a), nb = node(amount);
  ExprNode n;
  n.op = Op::kShr;
  n.width = na.width;
  n.a = a;
  n.b = amount;
  if (is_const(na) && is_const(nb)) return const_(n.width, eval_expr(intern(n), {}));
  return intern(n);
}

ExprId TransitionSystem::sra(ExprId a, ExprId amount) {
  const ExprNode na = node(a), nb = node(amount);
  ExprNode n;
  n.op = Op::kSra;
  n.width = na.width;
  n.a = a;
  n.b = amount;
  if (is_const(na) && is_const(nb)) return const_(n.width, eval_expr(intern(n), {}));
  return intern(n);
}

ExprId TransitionSystem::slice(ExprId a, int hi, int lo) {
  const ExprNode na = node(a);
  if (lo < 0 || hi < lo || hi >= na.width) {
    throw NetlistError("slice bounds [" + std::to_string(hi) + ":" +
                       std::to_string(lo) + "] out of width " +
                       std::to_string(na.width));
  }
  if (lo == 0 && hi == na.width - 1) return a;
  if (is_const(na)) return const_(hi - lo + 1, (na.cval >> lo) & mask_of(hi - lo + 1));
  ExprNode n;
  n.op = Op::kSlice;
  n.width = static_cast<uint16_t>(hi - lo + 1);
  n.a = a;
  n.cval = (static_cast<uint64_t>(hi) << 32) | static_cast<uint32_t>(lo);
  return intern(n);
}

ExprId TransitionSystem::concat(ExprId high, ExprId low) {
  const ExprNode nh = node(high), nl = node(low);
  int w = nh.width + nl.width;
  if (w > kMaxWidth) throw NetlistError("concat exceeds max width");
  if (is_const(nh) && is_const(nl)) {
    return const_(w, (nh.cval << nl.width) | nl.cval);
  }
  ExprNode n;
  n.op = Op::kConcat;
  n.width = static_cast<uint16_t>(w);
  n.a = high;
  n.b = low;
  return intern(n);
}

ExprId TransitionSystem::sign_ext(ExprId a, int width) {
  const ExprNode na = node(a);
  if (width < na.width || width > kMaxWidth) {
    throw NetlistError("sign_ext target width invalid");
  }
  if (width == na.width) return a;
  if (is_const(na)) {
    return const_(width,
                  static_cast<uint64_t>(to_signed(na.cval, na.width)) &
                      mask_of(width));
  }
  ExprNode n;
  n.op = Op::kSignExt;
  n.width = static_cast<uint16_t>(width);
  n.a = a;
  return intern(n);
}

ExprId TransitionSystem::zero_ext(ExprId a, int width) {
  const ExprNode na = node(a);
  if (width < na.width || width > kMaxWidth) {
    throw NetlistError("zero_ext target width invalid");
  }
  if (width == na.width) return a;
  if (is_const(na)) return const_(width, na.cval);
  ExprNode n;
  n.op = Op::kZeroExt;
  n.width = static_cast<uint16_t>(width);
  n.a = a;
  return intern(n);
}

ExprId TransitionSystem::all_of(const std::vector<ExprId>& terms) {
  ExprId acc = const_(1, 1);
  for (ExprId t : terms) acc = and_(acc, t);
  return acc;
}

ExprId TransitionSystem::any_of(const std::vector<ExprId>& terms) {
  ExprId acc = const_(1, 0);
  for (ExprId t : terms) acc = or_(acc, t);
  return acc;
}

void TransitionSystem::expr_support(ExprId expr,
                                    std::unordered_set<NetId>& out) const {
  std::vector<ExprId> stack{expr};
  std::unordered_set<ExprId> seen;
  while (!stack.empty()) {
    ExprId e = stack.back();
    stack.pop_back();
    if (!seen.insert(e).second) continue;
    const ExprNode& n = exprs_.at(e);
    if (n.op == Op::kRef) {
      out.insert(static_cast<NetId>(n.cval));
      continue;
    }
    if (n.a != kNoExpr) stack.push_back(n.a);
    if (n.b != kNoExpr) stack.push_back(n.b);
    if (n.c != kNoExpr) stack.push_back(n.c);
  }
}

void TransitionSystem::freeze() {
  if (frozen_) return;
  for (const RegisterDef& r : registers_) {
    if (r.next == kNoExpr) {
      throw NetlistError("register '" + net(r.net).name + "' has no next");
    }
  }
  // Topological order over wire-to-wire dependencies; inputs and register
  // outputs are sources.
  std::unordered_map<NetId, std::vector<NetId>> deps;
  for (const auto& [w, def] : wires_) {
    std::unordered_set<NetId> sup;
    expr_support(def, sup);
    auto& d = deps[w];
    for (NetId s : sup) {
      if (nets_[s].kind == NetKind::kWire) d.push_back(s);
    }
  }
  eval_order_.clear();
  std::unordered_map<NetId, int> color;  // 0 white, 1 grey, 2 black
  struct Frame {
    NetId net;
    size_t child;
  };
  for (const auto& [w0, def0] : wires_) {
    if (color[w0]) continue;
    std::vector<Frame> stack{{w0, 0}};
    color[w0] = 1;
    while (!stack.empty()) {
      Frame& f = stack.back();
      auto& d = deps[f.net];
      if (f.child < d.size()) {
        NetId c = d[f.child++];
        if (color[c] == 1) {
          throw NetlistError("combinational cycle through net '" +
                             net(c).name + "'");
        }
        if (color[c] == 0) {
          color[c] = 1;
          stack.push_back({c, 0});
        }
      } else {
        color[f.net] = 2;
        eval_order_.push_back(f.net);
        stack.pop_back();
      }
    }
  }
  frozen_ = true;
}

State TransitionSystem::initial_state() const {
  State s(registers_.size());
  for (size_t i = 0; i < registers_.size(); ++i) s[i] = registers_[i].init;
  return s;
}

namespace {

// Shared scalar semantics for one node given operand values.
uint64_t apply_op(const ExprNode& n, int aw, uint64_t a, uint64_t b,
                  uint64_t c) {
  uint64_t m = mask_of(n.width);
  switch (n.op) {
    case Op::kConst:
      return n.cval;
    case Op::kRef:
      return a;
    case Op::kNot:
      return ~a & m;
    case Op::kAnd:
      return a & b;
    case Op::kOr:
      return a | b;
    case Op::kXor:
      return a ^ b;
    case Op::kIte:
      return a ? b : c;
    case Op::kEq:
      return a == b;
    case Op::kNeq:
      return a != b;
    case Op::kUlt:
      return a < b;
    case Op::kUle:
      return a <= b;
    case Op::kSlt:
      return to_signed(a, aw) < to_signed(b, aw);
    case Op::kSle:
      return to_signed(a, aw) <= to_signed(b, aw);
    case Op::kAdd:
      return (a + b) & m;
    case Op::kSub:
      return (a - b) & m;
    case Op::kShl:
      return b >= static_cast<uint64_t>(n.width) ? 0 : (a << b) & m;
    case Op::kShr:
      return b >= static_cast<uint64_t>(n.width) ? 0 : a >> b;
    case Op::kSra: {
      uint64_t amt = std::min<uint64_t>(b, n.width - 1);
      return static_cast<uint64_t>(to_signed(a, n.width) >>
                                   static_cast<int64_t>(amt)) &
             m;
    }
    case Op::kSlice: {
      int lo = static_cast<int>(n.cval & 0xffffffff);
      return (a >> lo) & m;
    }
    case Op::kConcat:
      return 0;  // needs the low operand width; callers handle it directly
    case Op::kSignExt:
      return static_cast<uint64_t>(to_signed(a, aw)) & m;
    case Op::kZeroExt:
      return a;
  }
  return 0;
}

}  // namespace

// Concat needs the low operand's width; handled specially in eval loops.
uint64_t TransitionSystem::eval_expr(
    ExprId expr, const std::vector<uint64_t>& net_values) const {
  std::vector<ExprId> order;
  std::vector<ExprId> stack{expr};
  std::unordered_map<ExprId, uint64_t> val;
  std::unordered_set<ExprId> expanded;
  while (!stack.empty()) {
    ExprId e = stack.back();
    const ExprNode& n = exprs_.at(e);
    if (val.count(e)) {
      stack.pop_back();
      continue;
    }
    if (n.op == Op::kConst) {
      val[e] = n.cval;
      stack.pop_back();
      continue;
    }
    if (n.op == Op::kRef) {
      NetId nid = static_cast<NetId>(n.cval);
      if (nid >= net_values.size()) {
        throw NetlistError("eval_expr: no value for net '" + net(nid).name +
                           "'");
      }
      val[e] = net_values[nid] & mask_of(n.width);
      stack.pop_back();
      continue;
    }
    if (!expanded.count(e)) {
      expanded.insert(e);
      if (n.a != kNoExpr) stack.push_back(n.a);
      if (n.b != kNoExpr) stack.push_back(n.b);
      if (n.c != kNoExpr) stack.push_back(n.c);
      continue;
    }
    uint64_t a = n.a != kNoExpr ? val.at(n.a) : 0;
    uint64_t b = n.b != kNoExpr ? val.at(n.b) : 0;
    uint64_t c = n.c != kNoExpr ? val.at(n.c) : 0;
    int aw = n.a != kNoExpr ? exprs_[n.a].width : 0;
    uint64_t r;
    if (n.op == Op::kConcat) {
      r = ((a << exprs_[n.b].width) | b) & mask_of(n.width);
    } else {
      r = apply_op(n, aw, a, b, c);
    }
    val[e] = r & mask_of(n.width);
    stack.pop_back();
  }
  return val.at(expr);
}

StepResult TransitionSystem::eval_step(const State& state,
                                       const InputVector& inputs) const {
  if (!frozen_) throw NetlistError("eval_step: system not frozen");
  if (state.size() != registers_.size() || inputs.size() != inputs_.size()) {
    throw NetlistError("eval_step: state/input vector size mismatch");
  }
  StepResult r;
  r.net_values.assign(nets_.size(), 0);
  for (size_t i = 0; i < inputs_.size(); ++i) {
    r.net_values[inputs_[i]] = inputs[i] & mask_of(net(inputs_[i]).width);
  }
  for (size_t i = 0; i < registers_.size(); ++i) {
    r.net_values[registers_[i].net] =
        state[i] & mask_of(net(registers_[i].net).width);
  }
  for (NetId w : eval_order_) {
    r.net_values[w] = eval_expr(wire_def_.at(w), r.net_values);
  }
  r.next_state.resize(registers_.size());
  for (size_t i = 0; i < registers_.size(); ++i) {
    r.next_state[i] = eval_expr(registers_[i].next, r.net_values);
  }
  return r;
}

std::optional<size_t> TransitionSystem::violated_assumption(
    const std::vector<uint64_t>& net_values) const {
  for (size_t i = 0; i < assumptions_.size(); ++i) {
    if (eval_expr(assumptions_[i].first, net_values) == 0) return i;
  }
  return std::nullopt;
}

std::unordered_set<NetId> TransitionSystem::coi(
    const std::vector<NetId>& roots) const {
  std::unordered_set<NetId> result;
  std::vector<NetId> work;
  for (NetId r : roots) {
    if (result.insert(r).second) work.push_back(r);
  }
  while (!work.empty()) {
    NetId n = work.back();
    work.pop_back();
    std::unordered_set<NetId> sup;
    if (nets_[n].kind == NetKind::kWire) {
      expr_support(wire_def_.at(n), sup);
    } else if (nets_[n].kind == NetKind::kRegister) {
      const RegisterDef& def = registers_[register_index(n)];
      if (def.next != kNoExpr) expr_support(def.next, sup);
    }
    for (NetId s : sup) {
      if (result.insert(s).second) work.push_back(s);
    }
  }
  return result;
}

const std::vector<ExprId>& TransitionSystem::bitblast(ExprId expr) const {
  auto it = blast_memo_.find(expr);
  if (it != blast_memo_.end()) return it->second;
  auto* self = const_cast<TransitionSystem*>(this);
  const ExprNode n = exprs_.at(expr);
  std::vector<ExprId> bits;
  auto blast_of = [&](ExprId e) { return bitblast(e); };  // memoized recurse
  switch (n.op) {
    case Op::kConst: {
      for (int i = 0; i < n.width; ++i)
        bits.push_back(self->const_(1, (n.cval >> i) & 1));
      break;
    }
    case Op::kRef: {
      if (n.width == 1) {
        bits.push_back(expr);
      } else {
        for (int i = 0; i < n.width; ++i) bits.push_back(self->slice(expr, i, i));
      }
      break;
    }
    case Op::kNot: {
      for (ExprId b : blast_of(n.a)) bits.push_back(self->not_(b));
      break;
    }
    case Op::kAnd:
    case Op::kOr:
    case Op::kXor: {
      std::vector<ExprId> a = blast_of(n.a), b = blast_of(n.b);
      for (int i = 0; i < n.width; ++i) {
        bits.push_back(n.op == Op::kAnd   ? self->and_(a[i], b[i])
                       : n.op == Op::kOr ? self->or_(a[i], b[i])
                                         : self->xor_(a[i], b[i]));
      }
      break;
    }
    case Op::kIte: {
      ExprId c = blast_of(n.a)[0];
      std::vector<ExprId> t = blast_of(n.b), e = blast_of(n.c);
      for (int i = 0; i < n.width; ++i)
        bits.push_back(self->ite(c, t[i], e[i]));
      break;
    }
    case Op::kEq:
    case Op::kNeq: {
      std::vector<ExprId> a = blast_of(n.a), b = blast_of(n.b);
      std::vector<ExprId> eqs;
      for (size_t i = 0; i < a.size(); ++i)
        eqs.push_back(self->not_(self->xor_(a[i], b[i])));
      // balanced and-reduce
      while (eqs.size() > 1) {
        std::vector<ExprId> next;
        for (size_t i = 0; i + 1 < eqs.size(); i += 2)
          next.push_back(self->and_(eqs[i], eqs[i + 1]));
        if (eqs.size() % 2) next.push_back(eqs.back());
        eqs = next;
      }
      ExprId r = eqs.empty() ? self->const_(1, 1) : eqs[0];
      bits.push_back(n.op == Op::kEq ? r : self->not_(r));
      break;
    }
    case Op::kUlt:
    case Op::kUle:
    case Op::kSlt:
    case Op::kSle: {
      // lt chain from LSB up; for signed compares the MSBs are inverted.
      bool le = n.op == Op::kUle || n.op == Op::kSle;
      bool sgn = n.op == Op::kSlt || n.op == Op::kSle;
      std::vector<ExprId> a = blast_of(le ? n.b : n.a);
      std::vector<ExprId> b = blast_of(le ? n.a : n.b);
      if (sgn) {
        a.back() = self->not_(a.back());
        b.back() = self->not_(b.back());
      }
      ExprId lt = self->const_(1, 0);
      for (size_t i = 0; i < a.size(); ++i) {
        ExprId same = self->not_(self->xor_(a[i], b[i]));
        lt = self->or_(self->and_(self->not_(a[i]), b[i]),
                       self->and_(same, lt));
      }
      // a<b for lt; a<=b encoded as !(b<a)
      bits.push_back(le ? self->not_(lt) : lt);
      break;
    }
    case Op::kAdd:
    case Op::kSub: {
      std::vector<ExprId> a = blast_of(n.a), b = blast_of(n.b);
      bool sub = n.op == Op::kSub;
      ExprId carry = self->const_(1, sub ? 1 : 0);
      for (int i = 0; i < n.width; ++i) {
        ExprId bi = sub ? self->not_(b[i]) : b[i];
        ExprId axb = self->xor_(a[i], bi);
        bits.push_back(self->xor_(axb, carry));
        carry = self->or_(self->and_(a[i], bi), self->and_(carry, axb));
      }
      break;
    }
    case Op::kShl:
    case Op::kShr:
    case Op::kSra: {
      std::vector<ExprId> src = blast_of(n.a);
      std::vector<ExprId> amt = blast_of(n.b);
      ExprId sign = n.op == Op::kSra ? src.back() : self->const_(1, 0);
      ExprId zero = self->const_(1, 0);
      int w = n.width;
      int stages = 0;
      while ((1 << stages) < w) ++stages;
      std::vector<ExprId> cur = src;
      for (int j = 0; j < stages && j < static_cast<int>(amt.size()); ++j) {
        int d = 1 << j;
        std::vector<ExprId> nxt(w);
        for (int i = 0; i < w; ++i) {
          ExprId shifted;
          if (n.op == Op::kShl) {
            shifted = i - d >= 0 ? cur[i - d] : zero;
          } else {
            shifted = i + d < w ? cur[i + d] : (n.op == Op::kSra ? sign : zero);
          }
          nxt[i] = self->ite(amt[j], shifted, cur[i]);
        }
        cur = nxt;
      }
      // any amount bit beyond the barrel range forces the saturated result
      ExprId over = self->const_(1, 0);
      for (size_t j = stages; j < amt.size(); ++j) over = self->or_(over, amt[j]);
      ExprId fill = n.op == Op::kSra ? sign : zero;
      for (int i = 0; i < w; ++i) bits.push_back(self->ite(over, fill, cur[i]));
      break;
    }
    case Op::kSlice: {
      std::vector<ExprId> a = blast_of(n.a);
      int lo = static_cast<int>(n.cval & 0xffffffff);
      for (int i = 0; i < n.width; ++i) bits.push_back(a[lo + i]);
      break;
    }
    case Op::kConcat: {
      std::vector<ExprId> hi = blast_of(n.a), lo = blast_of(n.b);
      bits = lo;
      bits.insert(bits.end(), hi.begin(), hi.end());
      break;
    }
    case Op::kSignExt:
    case Op::kZeroExt: {
      bits = blast_of(n.a);
      ExprId fill =
          n.op == Op::kSignExt ? bits.back() : self->const_(1, 0);
      while (static_cast<int>(bits.size()) < n.width) bits.push_back(fill);
      break;
    }
  }
  assert(static_cast<int>(bits.size()) == n.width);
  return blast_memo_.emplace(expr, std::move(bits)).first->second;
}

std::string TransitionSystem::expr_to_string(ExprId expr) const {
  const ExprNode& n = exprs_.at(expr);
  std::ostringstream os;
  auto kid = [&](ExprId e) { return expr_to_string(e); };
  switch (n.op) {
    case Op::kConst:
      os << n.width << "'d" << n.cval;
      break;
    case Op::kRef:
      os << net(static_cast<NetId>(n.cval)).name;
      break;
    case Op::kSlice:
      os << "(slice " << kid(n.a) << " " << (n.cval >> 32) << " "
         << (n.cval & 0xffffffff) << ")";
      break;
    default: {
      static const char* names[] = {
          "const", "ref", "not", "and", "or",  "xor",  "ite",   "eq",
          "neq",   "ult", "ule", "slt", "sle", "add",  "sub",   "shl",
          "shr",   "sra", "slice", "concat", "sext", "zext"};
      os << "(" << names[static_cast<int>(n.op)];
      if (n.op == Op::kSignExt || n.op == Op::kZeroExt) os << n.width;
      if (n.a != kNoExpr) os << " " << kid(n.a);
      if (n.b != kNoExpr) os << " " << kid(n.b);
      if (n.c != kNoExpr) os << " " << kid(n.c);
      os << ")";
      break;
    }
  }
  return os.str();
}

void TransitionSystem::dump(std::ostream& os) const {
  for (NetId i = 0; i < nets_.size(); ++i) {
    const Net& n = nets_[i];
    switch (n.kind) {
      case NetKind::kInput:
        os << "input " << n.name << "[" << n.width << "]\n";
        break;
      case NetKind::kRegister: {
        const RegisterDef& r = registers_[register_index(i)];
        os << "reg " << n.name << "[" << n.width << "] init=" << r.init
           << " next=" << (r.next == kNoExpr ? "?" : expr_to_string(r.next))
           << "\n";
        break;
      }
      case NetKind::kWire:
        os << "wire " << n.name << "[" << n.width
           << "] = " << expr_to_string(wire_def_.at(i)) << "\n";
        break;
    }
  }
  for (const auto& [a, name] : assumptions_) {
    os << "assume " << (name.empty() ? "" : name + " ") << expr_to_string(a)
       << "\n";
  }
}

ExprId TransitionSystem::import_expr(
    const TransitionSystem& src, ExprId expr,
    const std::unordered_map<NetId, NetId>& net_map,
    std::unordered_map<ExprId, ExprId>& memo) {
  auto it = memo.find(expr);
  if (it != memo.end()) return it->second;
  const ExprNode n = src.node(expr);
  ExprId result;
  if (n.op == Op::kConst) {
    result = const_(n.width, n.cval);
  } else if (n.op == Op::kRef) {
    result = ref(net_map.at(static_cast<NetId>(n.cval)));
  } else {
    ExprNode copy = n;
    if (n.a != kNoExpr) copy.a = import_expr(src, n.a, net_map, memo);
    if (n.b != kNoExpr) copy.b = import_expr(src, n.b, net_map, memo);
    if (n.c != kNoExpr) copy.c = import_expr(src, n.c, net_map, memo);
    result = intern(copy);
  }
  memo[expr] = result;
  return result;
}

std::unordered_map<NetId, NetId> TransitionSystem::import_system(
    const TransitionSystem& src, const std::string& prefix,
    const std::vector<std::string>& passthrough) {
  check_mutable();
  std::unordered_map<NetId, NetId> net_map;
  auto pass = [&](const std::string& name) {
    return std::find(passthrough.begin(), passthrough.end(), name) !=
           passthrough.end();
  };
  for (NetId i = 0; i < src.net_count(); ++i) {
    const Net& n = src.net(i);
    std::string name = pass(n.name) ? n.name : prefix + n.name;
    if (auto existing = find(name)) {
      if (!pass(n.name)) throw NetlistError("duplicate id '" + name + "'");
      const Net& e = net(*existing);
      if (e.width != n.width || e.kind != n.kind) {
        throw NetlistError("passthrough net '" + name +
                           "' differs between systems");
      }
      net_map[i] = *existing;
      continue;
    }
    switch (n.kind) {
      case NetKind::kInput:
        net_map[i] = add_input(name, n.width);
        break;
      case NetKind::kRegister:
        net_map[i] = add_register(name, n.width,
                                  src.registers()[src.register_index(i)].init);
        break;
      case NetKind::kWire:
        // definition attached below, once all nets exist
        net_map[i] = new_net(name, n.width, NetKind::kWire);
        break;
    }
  }
  std::unordered_map<ExprId, ExprId> memo;
  for (const auto& [w, def] : src.wires()) {
    NetId nw = net_map.at(w);
    if (wire_def_.count(nw)) continue;  // already-shared passthrough wire
    ExprId d = import_expr(src, def, net_map, memo);
    wires_.emplace_back(nw, d);
    wire_def_[nw] = d;
  }
  for (const RegisterDef& r : src.registers()) {
    NetId nr = net_map.at(r.net);
    RegisterDef& dst = registers_[register_index(nr)];
    if (dst.next == kNoExpr) {
      dst.next = import_expr(src, r.next, net_map, memo);
    }
  }
  for (const auto& [a, name] : src.assumptions()) {
    add_assumption(import_expr(src, a, net_map, memo),
                   name.empty() ? name : prefix + name);
  }
  for (NetId o : src.outputs()) mark_output(net_map.at(o));
  return net_map;
}

uint64_t TransitionSystem::structural_hash() const {
  uint64_t h = 0xcbf29ce484222325ull;
  for (const Net& n : nets_) {
    for (char c : n.name) h = hash_mix(h, static_cast<uint64_t>(c));
    h = hash_mix(h, n.width);
    h = hash_mix(h, static_cast<uint64_t>(n.kind));
  }
  for (const ExprNode& n : exprs_) h = hash_mix(h, node_hash(n));
  for (const RegisterDef& r : registers_) {
    h = hash_mix(h, r.net);
    h = hash_mix(h, r.init);
    h = hash_mix(h, r.next);
  }
  for (const auto& [w, d] : wires_) {
    h = hash_mix(h, w);
    h = hash_mix(h, d);
  }
  for (const auto& [a, name] : assumptions_) h = hash_mix(h, a);
  return h;
}

}  // namespace seu
