#pragma once
// Oracle-machine computations for the two-round problems built on them.
//
// A machine is a registered host-level stepper, parameterised by an Instance.
// On input x it asks a fixed number of existential oracle queries; each query
// is a Circuit over free inputs named w0..w{witness_bits-1} and the reply is
// YES exactly when the circuit is satisfiable.  Witness values are packed by
// index: input wi reads bit i of the packed value, so the packing does not
// depend on which inputs a particular query happens to mention.  A recorded run lists the
// reply bits and, for every YES, a witness assignment; replaying the stepper
// against the recorded replies regenerates the queries, so the record is
// self-contained.  A counterexample names a NO reply along with an assignment
// satisfying that query.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "owb/circuit.hpp"
#include "owb/problems.hpp"

namespace owb {

struct PnpMachine {
  std::string name;
  std::function<unsigned(const Instance&)> in_bits;
  std::function<unsigned(const Instance&)> out_bits;
  std::function<unsigned(const Instance&)> queries;
  std::function<unsigned(const Instance&)> witness_bits;
  // Query number `replies.size()`, given the replies received so far.
  std::function<Circuit(const Instance&, uint64_t x, const std::vector<Bit>& replies)> query;
  // Final output once all replies are in.
  std::function<uint64_t(const Instance&, uint64_t x, const std::vector<Bit>& replies)> output;
};

void register_pnp_machine(PnpMachine m);
const PnpMachine& pnp_machine(const std::string& name);
std::vector<std::string> pnp_machine_names();

// Returns a packed witness when the circuit is satisfiable.
using NpOracle = std::function<std::optional<uint64_t>(const Circuit&)>;
NpOracle honest_np_oracle();  // brute force, smallest packed witness first

struct PnpRun {
  std::vector<Bit> replies;
  std::vector<uint64_t> witnesses;  // aligned with replies, 0 for NO
  uint64_t output = 0;
};

// Evaluates the query circuit on a packed witness value.
bool query_satisfied(const Circuit& q, uint64_t w);

PnpRun run_pnp(const PnpMachine& m, const Instance& inst, uint64_t x,
               const NpOracle& oracle);

// YES witnesses satisfy their queries, NO witness slots are zero, and the
// shape matches the machine's budgets.
bool pnp_run_valid(const PnpMachine& m, const Instance& inst, uint64_t x,
                   const PnpRun& run);

// (idx, w) refutes the run iff query idx was answered NO and w satisfies it.
bool check_pnp_counterexample(const PnpMachine& m, const Instance& inst, uint64_t x,
                              const PnpRun& run, unsigned idx, uint64_t w);

// Encoding of runs inside solution tuples: t reply bits then t witness fields.
Shape pnp_run_shape(unsigned queries, unsigned witness_bits);
PnpRun pnp_run_from_fields(const PnpMachine& m, const Instance& inst, uint64_t x,
                           const uint64_t* fields);  // output filled by replay

namespace detail {
Tfs2Problem make_pnp_problem();
Tfs2Problem make_rwpp2_problem();
}  // namespace detail

}  // namespace owb
