#pragma once

// Reduction calculus between search problems, plus the glue that turns an
// Inspector protocol against an adversary axiom set into a search-problem
// solver.  Three kinds of object live here:
//
//  - ManyOneReduction: classic (f, g) reduction between TFNP problems.
//  - CxReduction: counterexample reduction (f, g, h) from a TFNP or two-sided
//    problem into a two-sided problem.  Solutions map back through g; alleged
//    counterexamples map forward through h.
//  - GammaSolver: a recipe that, given an instance of a TFNP problem, builds
//    a query protocol against a fixed axiom set whose solved transcripts
//    decode to solutions of the instance.
//
// Each comes with a verification harness that exercises it over a corpus of
// instances and reports violations in a stable order.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "owb/axioms.hpp"
#include "owb/engine.hpp"
#include "owb/pnp.hpp"
#include "owb/problems.hpp"

namespace owb {

// --- solution packing ----------------------------------------------------

// Total bits used when the components of a shape are concatenated.
unsigned shape_bits(const Shape& shape);

// Concatenate the components of a solution into one word, first component in
// the most significant position.  Requires shape_fits and shape_bits <= 64.
std::uint64_t pack_solution(const Shape& shape, const Solution& sol);
Solution unpack_solution(const Shape& shape, std::uint64_t bits);

// Byte encoding of a solution tuple, used to carry solutions through the
// protocol engine (ProtocolResult payloads) and the CLI.
Bytes encode_solution(const Solution& sol);
Solution decode_solution(const Bytes& bytes);

// --- reduction objects ----------------------------------------------------

struct ManyOneReduction {
    std::string name;
    TfnpProblem source;
    TfnpProblem target;
    // Instance translation.  Must produce a valid target instance whenever
    // the input is a valid source instance.
    std::function<Instance(const Instance&)> f;
    // Solution translation back: any target solution of f(u) must map to a
    // source solution of u.
    std::function<Solution(const Instance&, const Solution&)> g;
};

// Counterexample reduction into a two-sided problem.  Exactly one of
// tfnp_source / tfs2_source is set.
//
// For a TFNP source Q: whenever y is structurally valid for f(u) and
// g(u, y) fails to solve u, then h(u, y, {}) must refute y.
//
// For a two-sided source Q: whenever w refutes g(u, y) as a candidate
// solution of u, then h(u, y, w) must refute y as a candidate for f(u).
struct CxReduction {
    std::string name;
    std::optional<TfnpProblem> tfnp_source;
    std::optional<Tfs2Problem> tfs2_source;
    Tfs2Problem target;
    std::function<Instance(const Instance&)> f;
    std::function<Solution(const Instance&, const Solution&)> g;
    std::function<Solution(const Instance&, const Solution&, const Solution&)> h;

    std::string source_name() const;
};

// Protocol-based solver: a solved run of build(inst) against honest play of
// `gamma` yields payload bytes that decode_solution to a valid solution of
// inst.  Against a dishonest adversary the protocol must either still solve
// the instance or exhibit a valid failure witness.
struct GammaSolver {
    std::string name;
    TfnpProblem problem;
    AxiomSet gamma;
    std::function<Protocol(const Instance&)> build;
};

// --- verification harnesses ------------------------------------------------

struct ReductionReport {
    std::string name;
    bool pass = true;
    unsigned instances = 0;
    unsigned checks = 0;
    // Human-readable violation descriptions, in corpus order (stable).
    std::vector<std::string> violations;

    void fail(std::string what);
    // One line per instance is too chatty; this prints a summary line and
    // then each violation on its own line.
    std::string to_text() const;
};

// Enumerates every structurally valid target solution of f(u) for each
// corpus instance and checks that g maps it to a valid source solution.
// Solution spaces are enumerated exhaustively, so corpora must be desk
// scale (target solution space <= 2^cap_bits).
ReductionReport verify_many_one(const ManyOneReduction& red,
                                const std::vector<Instance>& corpus,
                                unsigned cap_bits = 24);

// Checks the counterexample-reduction contract by exhaustive enumeration of
// target solutions y (and, for a two-sided source, of source refutations w).
ReductionReport verify_cx(const CxReduction& red,
                          const std::vector<Instance>& corpus,
                          unsigned cap_bits = 24);

// Plays each corpus instance honestly (expects a solved, valid outcome) and
// then against `seeds` seeded adversaries per instance, expecting every game
// to end Solved-with-valid-solution or Failure-with-valid-witness.
ReductionReport verify_solver(const GammaSolver& solver,
                              const std::vector<Instance>& corpus,
                              const std::vector<std::uint64_t>& seeds);

// --- the checkable construction -------------------------------------------

// TFNP problem derived from a two-sided problem R: an instance is an
// R-instance extended with a circuit funcs["chk"] from packed candidate
// solutions to packed refutation attempts, and y solves it when chk(y)
// fails to refute y.
TfnpProblem checkable(const Tfs2Problem& r);

// Extends an R-instance with a checking circuit, producing an instance of
// checkable(r).  The circuit must map shape_bits(y_shape) input bits to
// shape_bits(z_shape) output bits.
Instance checkable_instance(const Tfs2Problem& r, const Instance& inst,
                            const MultiCircuit& chk);

// Builds the checking circuit y -> h(u, y, w...) of a counterexample
// reduction as an explicit table, so works only at desk scale.
// For a TFNP source the third argument of h is always the empty tuple.
MultiCircuit cx_check_circuit(const CxReduction& red, const Instance& u);

// Q <=_c R if and only if Q <= checkable(R), constructively in both
// directions.  The forward direction tabulates h (desk scale only).
ManyOneReduction cx_to_checkable(const CxReduction& red);
CxReduction checkable_to_cx(const Tfs2Problem& r, const ManyOneReduction& red);

// If Q <=_c R between two-sided problems, then checkable(Q) <= checkable(R):
// the new checking circuit is y -> h(u, y, C(g(u, y))) where C is the
// checking circuit attached to the checkable(Q) instance.  Desk scale.
ManyOneReduction compose_checkable(const CxReduction& red);

// --- absorbing local-search post-processing --------------------------------

// A reduction to a pigeonhole instance over oracle machines ("rwpp2") whose
// solution-to-solution map is allowed to first solve a local-search problem:
// from a solution (hole, run) of f(u), build a set instance, find its least
// member s, and only then extract either a source solution or a refutation
// of the run.  pls_absorb turns this into a plain counterexample reduction
// by instrumenting the hole-to-pigeon machine to run the least-member binary
// search itself, so that s can be read off the recorded run.
struct PlsExtract {
    bool is_solution = false;
    Solution solution;        // when is_solution
    // Otherwise a refutation of the simulated G-then-F run: a query index
    // into the combined run (G queries first) and a witness for it.
    unsigned bad_index = 0;
    std::uint64_t bad_witness = 0;
};

struct PlsCxData {
    std::string name;
    TfnpProblem source;
    // u -> rwpp2 instance (tags "F" and "G" name the machines).
    std::function<Instance(const Instance&)> f;
    // The local-search stage: a set instance with circuit funcs["S"]
    // (search_bits inputs, 1 output, nonempty set), built from the hole and
    // the reply bits of the combined G-then-F simulation on that hole.
    std::function<unsigned(const Instance&)> search_bits;  // of the rwpp2 instance
    std::function<Instance(const Instance&, std::uint64_t hole,
                           const std::vector<Bit>& replies)> set_instance;
    // From the least member s of that set (and the simulated runs), either a
    // source solution or a refutation of the simulation.
    std::function<PlsExtract(const Instance& u, std::uint64_t hole,
                             const PnpRun& grun, const PnpRun& frun,
                             std::uint64_t s)> extract;
};

// Registers a fresh instrumented machine and returns the counterexample
// reduction into the modified rwpp2 instance.  The instrumented machine runs
// the original G's queries, then F's queries on G's output, then the binary
// search for the least member of the set instance, and outputs G's pigeon.
CxReduction pls_absorb(const PlsCxData& data);

} // namespace owb
