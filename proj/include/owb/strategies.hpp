#pragma once
// Machine constructions behind the oracle-simulation strategies: the
// counter machine that tabulates satisfying assignments of a circuit, and
// the stack evaluator machine that decides a closed QBF, both as transition
// functions suitable for configuration queries.  Exposed so their step
// semantics can be tested directly.

#include "owb/circuit.hpp"
#include "owb/qbf.hpp"

namespace owb {

// Transition function over configurations (index : m+1 bits, counter : m+1
// bits) for a circuit with m free inputs: while index < 2^m the machine
// evaluates the circuit on the index'th assignment, adds the result to the
// counter (mod 2^{m+1}) and increments the index; afterwards it halts.
// After 2^m steps from the all-zero configuration the counter holds the
// number of satisfying assignments.
MultiCircuit counting_step_machine(const Circuit& c);

// Transition function over configurations (t : k+1 bits, stack s_0..s_{k-1},
// result bit) for a closed formula with k quantifiers.  Step t evaluates the
// matrix on the assignment spelled by t's binary digits (outermost variable
// in the most significant position) and folds the value into the stack along
// the trailing ones of t, combining with OR at existential depths and AND at
// universal depths.  After 2^k steps from the all-zero configuration the
// result bit holds the truth value; the second half of the run mirrors the
// machine of the formula peeled at 1, one stack level down.
MultiCircuit qbf_eval_machine(const Qbf& f);

// Configuration width of qbf_eval_machine for a k-quantifier formula.
unsigned qbf_eval_config_bits(unsigned k);

}  // namespace owb
