#pragma once
// Registry of total search problems at desk scale.
//
// Solutions are small tuples of numbers packed as vector<uint64_t>, with a
// per-problem "shape" giving the bit width of every component; brute solvers
// and verification harnesses enumerate candidates shape-wise in lexicographic
// order (first component most significant) and return the first valid one.
// Single-round problems (a checker R(x,y)) live in TfnpProblem; two-round
// problems (output y, then survive any challenge z) live in Tfs2Problem.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "owb/circuit.hpp"

namespace owb {

// A function [2^in_bits] -> [2^out_bits], backed by an explicit table or by
// a MultiCircuit over inputs x0..x{in_bits-1} (x0 = msb).  Either backing
// evaluates; as_multicircuit() gives a circuit view of both.
struct Func {
  unsigned in_bits = 0;
  unsigned out_bits = 0;
  std::vector<uint64_t> table;            // size 2^in_bits when table-backed
  std::optional<MultiCircuit> circuit;    // set when circuit-backed

  bool table_backed() const { return !circuit.has_value(); }
  uint64_t operator()(uint64_t x) const;
  MultiCircuit as_multicircuit() const;

  static Func from_table(unsigned in_bits, unsigned out_bits,
                         std::vector<uint64_t> table);
  static Func from_circuit(MultiCircuit mc);
};

// Packs multi-argument calls: args are laid out msb-first, each `w` bits wide,
// first argument in the highest bits.
uint64_t pack_args(const std::vector<uint64_t>& args, unsigned w);

// A problem instance: a size parameter plus named functions, number lists and
// numbers.  Which names are required is fixed per problem; `validate` on the
// problem object checks them.
struct Instance {
  std::string problem;
  unsigned n = 0;
  std::map<std::string, Func> funcs;
  std::map<std::string, std::vector<uint64_t>> sets;
  std::map<std::string, uint64_t> scalars;
  std::map<std::string, std::string> tags;

  uint64_t scalar_or(const std::string& k, uint64_t dflt) const;
  const Func& func(const std::string& k) const;  // throws if absent
  const std::string& tag(const std::string& k) const;

  std::string to_text() const;
  static Instance parse_text(std::string_view text);
};

using Solution = std::vector<uint64_t>;
using Shape = std::vector<unsigned>;  // bit width per solution component

// Shape-wise enumeration helpers.
bool shape_fits(const Shape& shape, const Solution& y);
Solution zero_of_shape(const Shape& shape);
// Odometer increment in lexicographic order; false once y wraps back to zero.
bool next_in_shape(const Shape& shape, Solution& y);
// Total number of candidates; throws std::runtime_error above `cap` bits.
uint64_t shape_space(const Shape& shape, unsigned cap = 40);

struct TfnpProblem {
  std::string name;
  std::function<void(const Instance&)> validate;  // throws on malformed input
  std::function<Shape(const Instance&)> sol_shape;
  std::function<bool(const Instance&, const Solution&)> check;
  std::function<Solution(const Instance&)> brute;
};

struct Tfs2Problem {
  std::string name;
  std::function<void(const Instance&)> validate;
  std::function<Shape(const Instance&)> y_shape;
  std::function<Shape(const Instance&)> z_shape;
  // True when z fails to refute y (and y is well-formed); a solution is a y
  // with rel(inst, y, z) for every z.
  std::function<bool(const Instance&, const Solution& y, const Solution& z)> rel;
  std::function<Solution(const Instance&)> brute;
};

const TfnpProblem& tfnp(const std::string& name);
const Tfs2Problem& tfs2(const std::string& name);
std::vector<std::string> tfnp_names();
std::vector<std::string> tfs2_names();

// Generic brute-force pieces, exposed for tests and the harnesses.
Solution brute_first(const TfnpProblem& p, const Instance& inst);
std::optional<Solution> try_brute_first(const TfnpProblem& p, const Instance& inst);
bool tfs2_solution_ok(const Tfs2Problem& p, const Instance& inst, const Solution& y);
Solution tfs2_brute_first(const Tfs2Problem& p, const Instance& inst);

// ----- choice problems ------------------------------------------------------
// A choice instance has functions P0..P{n-2} where Pi takes i+2 arguments
// from a universe [U]; U depends on the variant:
//   long_choice/short_choice            U = 2^n / 2^n - 2
//   weak_long_choice/weak_short_choice  U = 2^{n+1} / 2^{n-1} - 2
uint64_t choice_universe(const Instance& inst);
unsigned choice_arg_bits(const Instance& inst);

// a is a b-sequence for P: the a_i are distinct, within the universe, and
// Pi(a_0..a_i, a_j) = b_i whenever i < j, over i < |b|, j < |a|.
// Throws std::invalid_argument on arity/universe violations.
bool is_b_sequence(const Instance& inst, const std::vector<Bit>& b,
                   const std::vector<uint64_t>& a);

// Constructive solvers that maintain the live candidate set S(A,B) explicitly:
// long choice picks the majority side of each split (ties toward 0) and ends
// with the two smallest survivors; short choice picks the minority side and
// stops as soon as S empties.  Elements a_j are chosen minimal in S.
std::pair<std::vector<Bit>, std::vector<uint64_t>> brute_long_choice(const Instance& inst);
std::pair<std::vector<Bit>, std::vector<uint64_t>> brute_short_choice(const Instance& inst);

// ----- graph helpers (leaf / lonely) ----------------------------------------
// Leaf instances give each node two neighbour candidates via funcs["N"]
// (n bits -> 2n bits, high half first candidate); the edge {u,v} exists when
// u != v and each lists the other.  Degrees are therefore always <= 2.
std::vector<uint64_t> leaf_neighbours(const Instance& inst, uint64_t u);
unsigned leaf_degree(const Instance& inst, uint64_t u);
// Lonely: u is matched iff v = N(u) satisfies N(v) = u, v != u, and neither
// endpoint is node 0.
bool lonely_matched(const Instance& inst, uint64_t u);

// Ramsey reads the colour of an unordered pair at (min, max), so symmetry of
// the backing circuit is never required.
Bit ramsey_colour(const Instance& inst, uint64_t u, uint64_t v);
// Tournament tie-breaking: u beats v iff u != v and funcs["B"], read at
// (min, max), points at u (inverted above the diagonal).  Every circuit
// therefore defines a genuine tournament.
bool tournament_beats(const Instance& inst, uint64_t u, uint64_t v);

}  // namespace owb
