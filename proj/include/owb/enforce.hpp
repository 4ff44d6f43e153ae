#pragma once
// Enforceable goals: facts the Inspector can force a consistent adversary
// to assert, on pain of handing over a failure witness. Each builder
// captures its objects; running it against a session either establishes the
// goal (the asserting replies are then in the transcript) or returns a
// valid witness.
//
// Builders whose goal is not actually true (e.g. "equal" circuits that
// differ, "disjoint" sets that intersect) may throw std::logic_error when
// the lie bottoms out: that is a caller bug, not an adversary failure.

#include <functional>

#include "owb/engine.hpp"

namespace owb {

struct Enforceable {
  std::string goal;
  std::function<std::optional<FailureWitness>(Session&)> run;  // nullopt = established
};

inline std::optional<FailureWitness> enforce(const Enforceable& e, Session& s) {
  return e.run(s);
}

// A(C) = A(D) for semantically equal circuits over the same free inputs.
Enforceable enforce_parity_equal(Circuit c, Circuit d);
Enforceable enforce_counting_equal(Circuit c, Circuit d);

// A(X ∪ Y) = A(X) ⊕ A(Y) for disjoint X, Y over the same free inputs.
Enforceable enforce_parity_disjoint_union(Circuit x, Circuit y);

// A(F) = A(G) for same-prefix, semantically equal closed formulas.
Enforceable enforce_qbf_equal(Qbf f, Qbf g);
// A(F) != A(dual F) for a closed formula.
Enforceable enforce_qbf_dual(Qbf f);

// A(C, w, t) = A(D, w, t) for semantically equal transition functions.
Enforceable enforce_pspace_equal(MultiCircuit c, MultiCircuit d, std::string w, uint64_t t);

// A(C) forced to the caller-computed value. `expected` must itself satisfy
// the recursion (expected(C) = expected(C|x=0) ^ expected(C|x=1), ground
// value on closed circuits); it is consulted on restrictions of c only.
Enforceable enforce_parity_value(Circuit c, std::function<Bit(const Circuit&)> expected);
Enforceable enforce_counting_value(Circuit c, std::function<uint64_t(const Circuit&)> expected);

// Membership extraction against the counting oracle: the session's claimed
// count for c must be >= k; returns k distinct members of c (as numbers over
// c's free inputs, msb-first) or a witness.
struct Extraction {
  std::vector<uint64_t> members;
  std::optional<FailureWitness> witness;  // set iff extraction failed
};
Extraction extract_members(Session&, const Circuit& c, uint64_t k);
// Same against the parity oracle (claimed parity 1 yields one member).
Extraction extract_odd_member(Session&, const Circuit& c);

// For a truly-true closed F the adversary claims false: descend to a
// witness. `exists_branch` picks a truly-true branch at ∃ nodes (defaults
// to brute-force evaluation, which caps at 20 quantifiers). Returns nullopt
// only if the adversary in fact claims F true.
std::optional<FailureWitness> qbf_force_true(Session&, const Qbf& f,
                                             std::function<Bit(const Qbf&)> exists_branch = {});
// Dual: truly-false F claimed true. `forall_branch` picks a truly-false
// branch at ∀ nodes.
std::optional<FailureWitness> qbf_force_false(Session&, const Qbf& f,
                                              std::function<Bit(const Qbf&)> forall_branch = {});

}  // namespace owb
