#pragma once
// The four oracle axiom sets (parity, counting, tqbf, pspace): query-key
// encodings, reply shapes, honest replies, failure witnesses and their
// checkers.

#include <optional>
#include <string>

#include "owb/circuit.hpp"
#include "owb/oracle.hpp"
#include "owb/qbf.hpp"

namespace owb {

// Key namespaces. A key is the tag byte followed by the canonical encoding
// of the queried object.
constexpr char kParityTag = 'P';
constexpr char kCountingTag = '#';
constexpr char kTqbfTag = 'Q';
constexpr char kPspaceTag = 'S';

Key parity_key(const Circuit&);
Key counting_key(const Circuit&);
Key tqbf_key(const Qbf&);
// A pspace query names a transition function, a start configuration (bit
// chars, one per input of the transition) and a step count.
Key pspace_key(const MultiCircuit&, const std::string& w, uint64_t t);

Circuit circuit_of_key(const Key&);  // parity/counting keys
Qbf qbf_of_key(const Key&);
void pspace_of_key(const Key&, MultiCircuit&, std::string&, uint64_t&);

// Reply encodings:
//  - bit: "0" or "1";
//  - nat: little-endian bytes, canonical (no trailing zero byte; empty = 0);
//  - config: one '0'/'1' char per configuration bit.
struct ReplyShape {
  enum Kind : uint8_t { Bit, Nat, Config } kind;
  size_t len = 0;  // Config: exact length; Nat: free-input count (advisory)
};
ReplyShape shape_of(const Key&);
bool reply_well_formed(const ReplyShape&, const Reply&);

Reply bit_reply(Bit b);
Bit reply_bit(const Reply&);  // throws on malformed
Reply nat_reply(uint64_t n);
// Arbitrary-precision helpers on canonical little-endian nats.
Reply nat_add(const Reply& a, const Reply& b);
bool nat_is_zero(const Reply& a);
std::optional<uint64_t> nat_u64(const Reply& a);  // nullopt if > 64 bits
std::string nat_decimal(const Reply& a);

Reply config_reply(const std::vector<Bit>&);
std::vector<Bit> reply_config(const Reply&);

struct FailureWitness {
  enum class Kind : uint8_t {
    Split,       // parity/counting: A(C) inconsistent with A(C|x=0), A(C|x=1)
    Base,        // parity/counting: closed C, A(C) != eval(C)
    TForall,     // A(forall x F) true but branch b false
    TForallAll,  // A(forall x F) false but both branches true
    TExists,     // A(exists x F) true but both branches false
    TExistsAt,   // A(exists x F) false but branch b true
    TBase,       // quantifier-free F, A(F) != eval
    Zero,        // A(C, w, 0) != w
    Step,        // A(C, w, t+1) != C(A(C, w, t))
  };
  Kind kind;
  Circuit c;        // Split/Base
  std::string var;  // Split
  Qbf f;            // T*
  Bit branch = 0;   // TForall/TExistsAt
  MultiCircuit mc;  // Zero/Step
  std::string w;
  uint64_t t = 0;  // Step: the lower of the two step counts named

  Bytes encode() const;
  static FailureWitness decode(std::string_view);
  std::string describe() const;  // one human-readable line
  bool operator==(const FailureWitness& o) const { return encode() == o.encode(); }
};

struct AxiomSet {
  enum class Name : uint8_t { Parity, Counting, Tqbf, Pspace } name;
  // Tqbf only: when set, axioms are asserted only for formulas of level <= k
  // (witnesses naming deeper formulas are rejected).
  std::optional<unsigned> level_cap;

  static AxiomSet parity() { return {Name::Parity, std::nullopt}; }
  static AxiomSet counting() { return {Name::Counting, std::nullopt}; }
  static AxiomSet tqbf() { return {Name::Tqbf, std::nullopt}; }
  static AxiomSet tqbf_level(unsigned k) { return {Name::Tqbf, k}; }
  static AxiomSet pspace() { return {Name::Pspace, std::nullopt}; }

  char tag() const;
  // Ground-truth reply; throws when the key is outside this axiom set's
  // namespace or beyond brute-force caps.
  Reply honest_reply(const Key&) const;
  // True iff every key named by w is present in alpha with well-formed
  // replies and the stated violation holds. Malformed witnesses yield false.
  bool check_failure(const SparseOracle& alpha, const FailureWitness& w) const;

  std::string label() const;
};

}  // namespace owb
