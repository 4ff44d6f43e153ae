#pragma once
// Quantified Boolean formulas over circuits: prenex prefix + matrix,
// Σ/Π classification, restriction, duality, brute-force evaluation, and the
// Savitch-style Reach formula builders used by the PSPACE/TQBF simulations.

#include <cstdint>
#include <string>
#include <vector>

#include "owb/circuit.hpp"

namespace owb {

enum class Quant : uint8_t { Forall = 0, Exists = 1 };

struct Qbf {
  std::vector<std::pair<Quant, std::string>> prefix;  // outermost first
  Circuit matrix;

  void validate() const;
  bool closed() const;
  // free (unbound, unhardwired) matrix inputs
  std::vector<std::string> free_vars() const;

  // level k = number of maximal alternating quantifier blocks; cls is 'S'
  // (Σ, outermost ∃), 'P' (Π, outermost ∀) or 'Q' (quantifier-free, k = 0).
  void classify(unsigned& k, char& cls) const;
  unsigned level() const;

  Qbf restricted(const std::string& x, Bit b) const;  // free vars only
  Qbf dual() const;
  // Drop the outermost quantifier and hardwire its variable to b.
  Qbf peeled(Bit b) const;

  Bit tqbf_eval(unsigned cap = 20) const;  // closed, |prefix| ≤ cap

  Bytes encode() const;
  static Qbf decode(std::string_view);
  std::string to_text() const;
  static Qbf parse_text(std::string_view);

  bool operator==(const Qbf& o) const { return encode() == o.encode(); }
};

// Reach-formula family for a transition function step: [2^n] -> [2^n].
// reach(i) is Reach_i(u, v): "v is reached from u in exactly 2^i steps",
// with free variables u0..u{n-1}, v0..v{n-1} and prenex prefix
//   ∃ m{i}_0..m{i}_{n-1} ∀ s{i} ∃ m{i-1}_* ∀ s{i-1} ... ∃ m1_* ∀ s1
// over a single recursive copy selected by the s-variables
// (segment endpoints are muxed: level l connects (a,b) through midpoint m{l},
//  s{l}=0 selects (a,m{l}), s{l}=1 selects (m{l},b)).
struct ReachFamily {
  MultiCircuit step;
  unsigned n;

  explicit ReachFamily(MultiCircuit step_);

  Qbf reach(unsigned i) const;  // open: u,v free
  Qbf reach_points(unsigned i, uint64_t u, uint64_t v) const;  // closed
  Qbf exists_target(unsigned i, uint64_t u) const;  // ∃v Reach_i(u,v), closed
  // ∀u ∃v (Reach_i(u,v) ∧ ∀v' (¬Reach_i(u,v') ∨ v'=v)), prenex, closed.
  Qbf forall_exists_unique(unsigned i) const;

  static std::string uvar(unsigned j) { return "u" + std::to_string(j); }
  static std::string vvar(unsigned j) { return "v" + std::to_string(j); }
  static std::string mvar(unsigned l, unsigned j) {
    return "m" + std::to_string(l) + "_" + std::to_string(j);
  }
  static std::string svar(unsigned l) { return "s" + std::to_string(l); }
};

}  // namespace owb
