#pragma once
// Game runtime: adversaries, budgeted consistent query sessions, protocols,
// game execution, local-solution verification and the crossing search used
// by every binary-search enforcement argument.

#include <functional>
#include <optional>
#include <stdexcept>

#include "owb/axioms.hpp"
#include "owb/oracle.hpp"

namespace owb {

struct BudgetExhausted : std::runtime_error {
  BudgetExhausted() : std::runtime_error("query budget exhausted") {}
};

struct MalformedReply : std::runtime_error {
  Key key;
  Reply reply;
  MalformedReply(Key k, Reply r)
      : std::runtime_error("adversary reply has the wrong shape"),
        key(std::move(k)),
        reply(std::move(r)) {}
};

struct MissingKey : std::runtime_error {
  Key key;
  explicit MissingKey(Key k)
      : std::runtime_error("replay key missing from the supplied oracle"),
        key(std::move(k)) {}
};

// A reply policy. Consistency is enforced by the Session (first reply per
// key wins), so every policy behaves as a partial oracle.
using Adversary = std::function<Reply(const Key&)>;

Adversary honest_adversary(AxiomSet);
// Scripted replies with a fallback for unscripted keys (e.g. honest).
Adversary scripted_adversary(std::map<Key, Reply> script, Adversary fallback);
// Scripted only: unscripted keys throw MissingKey.
Adversary strict_scripted_adversary(std::map<Key, Reply> script);
// Uniform replies of the right shape, deterministic in (seed, key).
Adversary seeded_adversary(uint64_t seed);
// Thin alias for policies that prompt an external party.
Adversary interactive_adversary(std::function<Reply(const Key&)> prompt);

// A budgeted, memoized query session against an adversary. Only fresh keys
// count against the budget; replies are shape-checked against the key.
struct Session {
  Adversary adv;
  uint64_t budget;
  SparseOracle transcript;

  Session(Adversary a, uint64_t t) : adv(std::move(a)), budget(t) {}
  Reply ask(const Key&);
  Bit ask_bit(const Key& k) { return reply_bit(ask(k)); }
  uint64_t used() const { return transcript.size(); }
};

struct ProtocolResult {
  enum class Kind : uint8_t { Solution, Failure };
  Kind kind;
  Bytes solution;                         // Solution
  std::optional<FailureWitness> witness;  // Failure

  static ProtocolResult solved(Bytes y) {
    return {Kind::Solution, std::move(y), std::nullopt};
  }
  static ProtocolResult failed(FailureWitness w) {
    return {Kind::Failure, {}, std::move(w)};
  }
};

// Deterministic host-level stepper with a declared query budget.
struct Protocol {
  std::string name;
  Bytes params;
  uint64_t budget;
  std::function<ProtocolResult(Session&)> run;
};

struct GameResult {
  enum class Kind : uint8_t { Solved, Failure, Exhausted, Malformed };
  Kind kind;
  Bytes solution;
  std::optional<FailureWitness> witness;
  SparseOracle transcript;
  std::string diagnostic;

  Transcript to_transcript(const Protocol&) const;
};

// Plays the protocol against the adversary. Failure outputs are checked
// against gamma on the run's own transcript; an invalid claimed witness is
// reported as Malformed (a protocol bug), as are wrong-shape replies.
GameResult run_game(const Protocol&, const Adversary&, const AxiomSet& gamma);

// Replays the protocol against alpha as a strict script: true iff the replay
// stays within alpha's keys and the output is a solution (not a failure
// witness valid on alpha). Optionally reports why it failed.
bool verify_local_solution(const Protocol&, const AxiomSet& gamma, const SparseOracle& alpha,
                           std::string* diagnostic = nullptr);

// Crossing search: given pred(lo) != pred(hi) with lo < hi, returns i in
// [lo, hi) with pred(i) != pred(i+1) using ~log(hi-lo) evaluations.
uint64_t first_diff(uint64_t lo, uint64_t hi, const std::function<bool(uint64_t)>& pred);

}  // namespace owb
