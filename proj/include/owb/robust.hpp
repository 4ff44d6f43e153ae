#pragma once
// Robustness of the parity axioms: k-query black-box recursive definitions
// of parity, the query-count threshold n_k above which any consistent query
// pattern is realizable by a genuine parity function, and the two
// polynomial-time translations between violations of such a definition and
// badly-behaved circuits (circuits violating the plain parity axioms).

#include "owb/enforce.hpp"

namespace owb {

// The restricted view a black-box evaluator gets of (C, A): the input list,
// parity queries for restrictions setting exactly one input, and ground
// evaluation under total restrictions. Queries of both kinds share a budget.
class ThetaView {
 public:
  ThetaView(Session& s, Circuit c, unsigned budget);
  const std::vector<std::string>& inputs() const { return inputs_; }
  Bit query_restricted(const std::string& x, Bit b);  // A(C|x=b)
  Bit query_eval(const Assignment& total);            // eval(C|rho), rho total
  unsigned used() const { return used_; }

 private:
  Session& s_;
  Circuit c_;
  std::vector<std::string> inputs_;
  unsigned budget_, used_ = 0;
};

struct BlackBoxEvaluator {
  std::string name;
  unsigned k;  // query budget
  std::function<Bit(ThetaView&)> run;
};

// theta(C; A) with A answered by the session. Throws std::logic_error if the
// evaluator exceeds its declared budget.
Bit theta_apply(const BlackBoxEvaluator&, const Circuit&, Session&);

// The paper-style 2-query definition: closed circuits evaluate directly,
// otherwise split on the first input.
BlackBoxEvaluator first_input_split_evaluator();

// Least n such that every consistent pattern of <= k parity/eval queries on
// an n-input circuit is realizable by an actual set with either total
// parity. Computed by exhausting query patterns and solving each as a GF(2)
// linear system; results cached. Requires k <= 6.
unsigned parity_pattern_threshold(unsigned k);

// Solvability of one query pattern: subcube constraints (var index, value,
// claimed parity), point constraints (point, membership) and a total parity
// b, over sets on n inputs with n <= 6.
struct PatternConstraint {
  bool is_point;
  unsigned var;    // subcube: variable index
  Bit value;       // subcube: the value the variable is set to
  uint64_t point;  // point: msb-first index of the evaluated point
  Bit rhs;
};
bool pattern_realizable(unsigned n, const std::vector<PatternConstraint>&, Bit total);

// Queries the parity splits (and base value) of c; returns a witness iff c
// is badly-behaved on the session's replies.
std::optional<FailureWitness> behaviour_witness(Session&, const Circuit& c);

// Given alpha(C) != theta(C; alpha) on the session, finds a badly-behaved
// restriction of C (possibly C itself) together with its witness.
// Throws std::logic_error when the precondition does not actually hold.
std::pair<Circuit, FailureWitness> failure_from_theta_violation(const BlackBoxEvaluator&,
                                                                Session&, const Circuit& c);

// Given badly-behaved D, finds a restriction C of D (possibly D itself) with
// alpha(C) != theta(C; alpha); the postcondition is re-checked before
// returning. Throws std::logic_error when D is not badly-behaved.
Circuit theta_violation_from_bad_circuit(const BlackBoxEvaluator&, Session&, const Circuit& d);

}  // namespace owb
