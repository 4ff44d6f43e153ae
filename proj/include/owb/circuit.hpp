#pragma once
// Boolean circuits with unlimited fan-in and/or gates, non-simplifying
// restriction, evaluation and exact counting/parity.
//
// Conventions used throughout the workbench:
//  - gates are stored in topological order, children ids < parent id;
//  - restriction never rewrites the DAG; it is recorded in `hardwired`;
//  - empty AND evaluates to 1, empty OR to 0;
//  - when a circuit represents a subset of [2^n] the inputs are named
//    x0..x{n-1} with x0 the most significant bit of the element.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "owb/bytes.hpp"

namespace owb {

using Bit = uint8_t;

enum class GateKind : uint8_t { Input, Const0, Const1, And, Or, Not };

struct Gate {
  GateKind kind;
  std::string name;            // Input gates only
  std::vector<uint32_t> args;  // children, empty for Input/Const
};

using Assignment = std::map<std::string, Bit>;

struct Circuit {
  std::vector<Gate> gates;
  uint32_t output = 0;
  std::map<std::string, Bit> hardwired;

  void validate() const;  // throws std::runtime_error on malformed structure

  // Names of input gates not hardwired, in first-occurrence order.
  std::vector<std::string> free_inputs() const;
  std::vector<std::string> input_names() const;  // all inputs, incl. hardwired
  bool closed() const { return free_inputs().empty(); }

  Circuit restricted(const std::string& name, Bit b) const;
  Circuit restricted(const Assignment& rho) const;

  Bit eval() const;  // requires closed()
  Bit eval_on(const Assignment& a) const;

  // Exact model counting over the free inputs; throws if the free-input
  // count exceeds `cap`.
  uint64_t count_sat(unsigned cap = 20) const;
  Bit parity(unsigned cap = 20) const;

  Bytes encode() const;
  static Circuit decode(std::string_view);
  std::string to_text() const;
  static Circuit parse_text(std::string_view);

  bool operator==(const Circuit& o) const { return encode() == o.encode(); }
};

struct MultiCircuit {
  Circuit base;  // base.output unused; outputs below are authoritative
  std::vector<uint32_t> outputs;

  void validate() const;
  std::vector<std::string> free_inputs() const { return base.free_inputs(); }
  std::vector<Bit> mo_eval(const std::vector<Bit>& x) const;
  // Convenience for [2^in] -> [2^out] functions over inputs x0..x{n-1},
  // x0 = most significant bit.
  uint64_t eval_u64(uint64_t x) const;

  Bytes encode() const;
  static MultiCircuit decode(std::string_view);
  std::string to_text() const;
  static MultiCircuit parse_text(std::string_view);

  bool operator==(const MultiCircuit& o) const { return encode() == o.encode(); }
};

// Incremental construction helper. Input gates are shared by name.
struct CircuitBuilder {
  Circuit c;
  std::map<std::string, uint32_t> inputs_by_name;

  uint32_t input(const std::string& name);
  uint32_t add(GateKind k, std::vector<uint32_t> args = {});
  uint32_t konst(Bit b) { return add(b ? GateKind::Const1 : GateKind::Const0); }
  uint32_t gand(std::vector<uint32_t> a) { return add(GateKind::And, std::move(a)); }
  uint32_t gor(std::vector<uint32_t> a) { return add(GateKind::Or, std::move(a)); }
  uint32_t gnot(uint32_t a) { return add(GateKind::Not, {a}); }
  uint32_t gxor(uint32_t a, uint32_t b);
  uint32_t gxnor(uint32_t a, uint32_t b);
  uint32_t gmux(uint32_t s, uint32_t if0, uint32_t if1);  // s ? if1 : if0

  // Copies `sub`'s gates into this circuit.  Input gates of `sub` are wired
  // through `wiring` (name -> existing gate id) when present, otherwise to
  // this builder's like-named input; `sub`'s hardwired bits become consts.
  // Returns the translated ids of `wanted` (gate ids in `sub`).
  std::vector<uint32_t> embed(const Circuit& sub,
                              const std::map<std::string, uint32_t>& wiring,
                              const std::vector<uint32_t>& wanted);
  std::vector<uint32_t> embed(const MultiCircuit& sub,
                              const std::map<std::string, uint32_t>& wiring);

  // value(bits) < c and value(bits) == c, bits msb-first, c given in `width`
  // binary digits.
  uint32_t lt_const(const std::vector<uint32_t>& bits, uint64_t c);
  uint32_t eq_const(const std::vector<uint32_t>& bits, uint64_t c);
  uint32_t eq_vec(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
  uint32_t lt_vec(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);

  Circuit take(uint32_t out) {
    c.output = out;
    return std::move(c);
  }
  MultiCircuit take_multi(std::vector<uint32_t> outs) {
    MultiCircuit m;
    m.base = std::move(c);
    m.outputs = std::move(outs);
    if (!m.outputs.empty()) m.base.output = m.outputs[0];
    return m;
  }
};

// Canonical set-circuit constructions over inputs x0..x{n-1}.
std::vector<std::string> numbered_inputs(unsigned n);
Circuit set_full(unsigned n);
Circuit set_singleton(uint64_t i, unsigned n);
Circuit set_interval_lt(unsigned n, uint64_t i);  // { x : x < i }
// { x : F(x) < i } and { x : F(x) == i } for a MultiCircuit-valued function.
Circuit set_fn_lt(const MultiCircuit& f, uint64_t i);
Circuit set_fn_eq(const MultiCircuit& f, uint64_t i);
// X ∪ Y by one ∨-gate; the circuits must have identical free-input sets.
Circuit set_union(const Circuit& x, const Circuit& y);

// Truth-table-backed function as a DNF MultiCircuit ([2^in] -> [2^out]).
MultiCircuit table_multicircuit(unsigned in_bits, unsigned out_bits,
                                const std::vector<uint64_t>& table);

uint64_t assignment_to_u64(const std::vector<std::string>& names, const Assignment& a);
Assignment u64_to_assignment(const std::vector<std::string>& names, uint64_t v);

}  // namespace owb
