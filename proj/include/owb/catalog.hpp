#pragma once

// Named catalog of the concrete reductions and Inspector strategies, with
// deterministic desk-scale corpora for the verification harnesses, plus the
// protocol registry and the "local" search problems built on it.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "owb/reductions.hpp"

namespace owb {

// --- protocol registry ------------------------------------------------------
// Protocols are host-level steppers; a serializable reference to one is the
// registered builder name plus an opaque parameter blob.

using ProtocolBuilder = std::function<Protocol(const Bytes& params)>;
void register_protocol(const std::string& name, ProtocolBuilder builder);
Protocol build_protocol(const std::string& name, const Bytes& params);
std::vector<std::string> protocol_names();

// --- local problems ---------------------------------------------------------
// The search problem attached to an axiom set with single-bit replies
// (parity, tqbf): given a protocol reference, find a run on which the
// protocol claims no failure.  A candidate solution lists one reply bit per
// budgeted query, in the order the queries are first asked; trailing unused
// bits must be zero.  Supported axiom sets: parity and tqbf (any level cap).
TfnpProblem local_problem(const AxiomSet& gamma);
Instance local_instance(const AxiomSet& gamma, const std::string& proto_name,
                        const Bytes& params);
// The protocol an instance refers to, rebuilt from its reference.
Protocol protocol_of_instance(const Instance& inst);
// Replays the protocol against scripted reply bits; true when the outcome is
// a solution claim.  Bits beyond the queries actually asked must be zero.
bool local_run_ok(const AxiomSet& gamma, const Protocol& proto, const Solution& bits);

// --- catalog ----------------------------------------------------------------

struct CatalogEntry {
  std::string name;
  // Exactly one of these is set.
  std::optional<ManyOneReduction> many_one;
  std::optional<CxReduction> cx;
  std::optional<GammaSolver> solver;
  // Deterministic corpus for the harnesses; `count` scales the sample size.
  std::function<std::vector<Instance>(uint64_t seed, unsigned count)> corpus;
  // Enumeration cap for verify_many_one / verify_cx on this entry.
  unsigned cap_bits = 24;

  std::string kind() const { return many_one ? "many_one" : cx ? "cx" : "solver"; }
};

const CatalogEntry& catalog_entry(const std::string& name);
std::vector<std::string> catalog_names();

namespace detail {
// Entries contributed by the strategy and leaf translation units; collected
// into the catalog on first use.
std::vector<CatalogEntry> strategy_entries();
std::vector<CatalogEntry> leaf_entries();
}  // namespace detail

// Runs the appropriate harness over the entry's corpus.  For solvers,
// `adversaries` seeded adversaries are played per instance in addition to the
// honest one.
ReductionReport verify_entry(const CatalogEntry& entry, uint64_t seed, unsigned count,
                             unsigned adversaries = 20);

}  // namespace owb
