#include "owb/problems.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "owb/pnp.hpp"

namespace owb {

// ---------------------------------------------------------------------------
// Func

uint64_t Func::operator()(uint64_t x) const {
  if (in_bits < 64) x &= in_bits ? ((1ull << in_bits) - 1) : 0;
  if (table_backed()) return table[x];
  return circuit->eval_u64(x);
}

MultiCircuit Func::as_multicircuit() const {
  if (table_backed()) return table_multicircuit(in_bits, out_bits, table);
  return *circuit;
}

Func Func::from_table(unsigned in_bits, unsigned out_bits, std::vector<uint64_t> table) {
  if (in_bits > 24) throw std::runtime_error("func: table too wide");
  if (table.size() != (1ull << in_bits)) throw std::runtime_error("func: table size mismatch");
  for (uint64_t v : table)
    if (out_bits < 64 && (v >> out_bits) != 0) throw std::runtime_error("func: table value out of range");
  Func f;
  f.in_bits = in_bits;
  f.out_bits = out_bits;
  f.table = std::move(table);
  return f;
}

Func Func::from_circuit(MultiCircuit mc) {
  mc.validate();
  Func f;
  f.in_bits = static_cast<unsigned>(mc.free_inputs().size());
  f.out_bits = static_cast<unsigned>(mc.outputs.size());
  f.circuit = std::move(mc);
  return f;
}

uint64_t pack_args(const std::vector<uint64_t>& args, unsigned w) {
  if (args.size() * w > 64) throw std::runtime_error("pack_args: too wide");
  uint64_t r = 0;
  uint64_t mask = w >= 64 ? ~0ull : ((1ull << w) - 1);
  for (uint64_t a : args) r = (r << w) | (a & mask);
  return r;
}

// ---------------------------------------------------------------------------
// Instance

uint64_t Instance::scalar_or(const std::string& k, uint64_t dflt) const {
  auto it = scalars.find(k);
  return it == scalars.end() ? dflt : it->second;
}

const Func& Instance::func(const std::string& k) const {
  auto it = funcs.find(k);
  if (it == funcs.end()) throw std::runtime_error("instance: missing function " + k);
  return it->second;
}

const std::string& Instance::tag(const std::string& k) const {
  auto it = tags.find(k);
  if (it == tags.end()) throw std::runtime_error("instance: missing tag " + k);
  return it->second;
}

std::string Instance::to_text() const {
  std::ostringstream os;
  os << "problem " << problem << '\n';
  os << "n " << n << '\n';
  for (auto& [k, v] : scalars) os << "scalar " << k << ' ' << v << '\n';
  for (auto& [k, v] : tags) os << "tag " << k << ' ' << v << '\n';
  for (auto& [k, vs] : sets) {
    os << "set " << k;
    for (uint64_t v : vs) os << ' ' << v;
    os << '\n';
  }
  for (auto& [k, f] : funcs) {
    if (f.table_backed()) {
      os << "func " << k << " table " << f.in_bits << ' ' << f.out_bits;
      for (uint64_t v : f.table) os << ' ' << v;
      os << '\n';
    } else {
      os << "func " << k << " circuit\n" << f.circuit->to_text() << "endfunc\n";
    }
  }
  return os.str();
}

Instance Instance::parse_text(std::string_view text) {
  Instance inst;
  std::istringstream is{std::string(text)};
  std::string line;
  bool saw_problem = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "problem") {
      ls >> inst.problem;
      saw_problem = true;
    } else if (tok == "n") {
      ls >> inst.n;
    } else if (tok == "scalar") {
      std::string k;
      uint64_t v;
      if (!(ls >> k >> v)) throw std::runtime_error("instance parse: bad scalar line");
      inst.scalars[k] = v;
    } else if (tok == "tag") {
      std::string k, v;
      if (!(ls >> k >> v)) throw std::runtime_error("instance parse: bad tag line");
      inst.tags[k] = v;
    } else if (tok == "set") {
      std::string k;
      if (!(ls >> k)) throw std::runtime_error("instance parse: bad set line");
      std::vector<uint64_t> vs;
      uint64_t v;
      while (ls >> v) vs.push_back(v);
      inst.sets[k] = std::move(vs);
    } else if (tok == "func") {
      std::string k, kind;
      if (!(ls >> k >> kind)) throw std::runtime_error("instance parse: bad func line");
      if (kind == "table") {
        unsigned in_bits, out_bits;
        if (!(ls >> in_bits >> out_bits)) throw std::runtime_error("instance parse: bad table header");
        std::vector<uint64_t> table;
        uint64_t v;
        while (ls >> v) table.push_back(v);
        inst.funcs[k] = Func::from_table(in_bits, out_bits, std::move(table));
      } else if (kind == "circuit") {
        std::string body, sub;
        bool closed = false;
        while (std::getline(is, sub)) {
          if (sub == "endfunc") {
            closed = true;
            break;
          }
          body += sub;
          body += '\n';
        }
        if (!closed) throw std::runtime_error("instance parse: unterminated circuit func");
        inst.funcs[k] = Func::from_circuit(MultiCircuit::parse_text(body));
      } else {
        throw std::runtime_error("instance parse: unknown func kind " + kind);
      }
    } else {
      throw std::runtime_error("instance parse: unknown directive " + tok);
    }
  }
  if (!saw_problem) throw std::runtime_error("instance parse: missing problem line");
  return inst;
}

// ---------------------------------------------------------------------------
// Shapes

bool shape_fits(const Shape& shape, const Solution& y) {
  if (y.size() != shape.size()) return false;
  for (size_t i = 0; i < y.size(); ++i) {
    unsigned w = shape[i];
    if (w >= 64) continue;
    if ((y[i] >> w) != 0) return false;
  }
  return true;
}

Solution zero_of_shape(const Shape& shape) { return Solution(shape.size(), 0); }

bool next_in_shape(const Shape& shape, Solution& y) {
  for (size_t i = y.size(); i-- > 0;) {
    uint64_t top = shape[i] >= 64 ? ~0ull : ((1ull << shape[i]) - 1);
    if (y[i] < top) {
      ++y[i];
      return true;
    }
    y[i] = 0;
  }
  return false;
}

uint64_t shape_space(const Shape& shape, unsigned cap) {
  unsigned total = 0;
  for (unsigned w : shape) total += w;
  if (total > cap) throw std::runtime_error("shape_space: enumeration cap exceeded");
  return 1ull << total;
}

// ---------------------------------------------------------------------------
// Generic brute force

std::optional<Solution> try_brute_first(const TfnpProblem& p, const Instance& inst) {
  Shape shape = p.sol_shape(inst);
  shape_space(shape, 30);
  Solution y = zero_of_shape(shape);
  do {
    if (p.check(inst, y)) return y;
  } while (next_in_shape(shape, y));
  return std::nullopt;
}

Solution brute_first(const TfnpProblem& p, const Instance& inst) {
  auto y = try_brute_first(p, inst);
  if (!y) throw std::runtime_error(p.name + ": no solution found by brute force");
  return *y;
}

bool tfs2_solution_ok(const Tfs2Problem& p, const Instance& inst, const Solution& y) {
  Shape zs = p.z_shape(inst);
  shape_space(zs, 30);
  Solution z = zero_of_shape(zs);
  do {
    if (!p.rel(inst, y, z)) return false;
  } while (next_in_shape(zs, z));
  return true;
}

Solution tfs2_brute_first(const Tfs2Problem& p, const Instance& inst) {
  Shape ys = p.y_shape(inst);
  shape_space(ys, 30);
  Solution y = zero_of_shape(ys);
  do {
    if (tfs2_solution_ok(p, inst, y)) return y;
  } while (next_in_shape(ys, y));
  throw std::runtime_error(p.name + ": no refutation-free candidate found");
}

// ---------------------------------------------------------------------------
// Shared helpers

namespace {

uint64_t pow2(unsigned b) { return 1ull << b; }

unsigned bits_for_count(uint64_t m) {  // least width holding values 0..m-1
  unsigned b = 0;
  while (m > pow2(b)) ++b;
  return b;
}

const Func& need_func(const Instance& inst, const std::string& k, unsigned in_bits,
                      unsigned out_bits) {
  const Func& f = inst.func(k);
  if (f.in_bits != in_bits || f.out_bits != out_bits)
    throw std::runtime_error("instance: function " + k + " has wrong arity");
  return f;
}

// Range scan: every value of f on [0, dom) lies below `bound`.
void need_range(const Func& f, uint64_t dom, uint64_t bound, const std::string& k) {
  if (f.in_bits > 16) throw std::runtime_error("instance: " + k + " too wide to range-check");
  for (uint64_t x = 0; x < dom; ++x)
    if (f(x) >= bound) throw std::runtime_error("instance: " + k + " maps outside its codomain");
}

void need_size(const Instance& inst, unsigned lo, unsigned hi) {
  if (inst.n < lo || inst.n > hi) throw std::runtime_error("instance: size parameter out of range");
}

}  // namespace

// ---------------------------------------------------------------------------
// Choice problems

uint64_t choice_universe(const Instance& inst) {
  if (inst.problem == "long_choice") return pow2(inst.n);
  if (inst.problem == "weak_long_choice") return pow2(inst.n + 1);
  if (inst.problem == "short_choice") return pow2(inst.n) - 2;
  if (inst.problem == "weak_short_choice") return pow2(inst.n - 1) - 2;
  throw std::runtime_error("choice_universe: not a choice instance: " + inst.problem);
}

unsigned choice_arg_bits(const Instance& inst) {
  return bits_for_count(choice_universe(inst));
}

namespace {

std::string pname(unsigned i) { return "P" + std::to_string(i); }

void validate_choice(const Instance& inst) {
  unsigned lo = (inst.problem == "weak_short_choice") ? 3 : 2;
  need_size(inst, lo, 6);
  unsigned w = choice_arg_bits(inst);
  for (unsigned i = 0; i + 1 < inst.n; ++i) need_func(inst, pname(i), (i + 2) * w, 1);
}

Bit choice_eval(const Instance& inst, unsigned i, const std::vector<uint64_t>& prefix,
                uint64_t z) {
  unsigned w = choice_arg_bits(inst);
  std::vector<uint64_t> args = prefix;
  args.push_back(z);
  return static_cast<Bit>(inst.func(pname(i))(pack_args(args, w)) & 1);
}

}  // namespace

bool is_b_sequence(const Instance& inst, const std::vector<Bit>& b,
                   const std::vector<uint64_t>& a) {
  uint64_t universe = choice_universe(inst);
  if (b.size() > inst.n - 1) throw std::invalid_argument("is_b_sequence: too many b values");
  for (uint64_t v : a)
    if (v >= universe) throw std::invalid_argument("is_b_sequence: element outside universe");
  std::set<uint64_t> seen(a.begin(), a.end());
  if (seen.size() != a.size()) return false;
  for (size_t i = 0; i < b.size(); ++i) {
    std::vector<uint64_t> prefix(a.begin(), a.begin() + std::min(a.size(), i + 1));
    if (prefix.size() < i + 1) break;  // no j > i exists either
    for (size_t j = i + 1; j < a.size(); ++j)
      if (choice_eval(inst, static_cast<unsigned>(i), prefix, a[j]) != b[i]) return false;
  }
  return true;
}

namespace {

// One refinement step shared by both constructive solvers: remove the minimal
// element a_j from s and split the rest on P_j's value.
struct ChoiceSplit {
  uint64_t aj;
  std::vector<uint64_t> side[2];
};

ChoiceSplit choice_split(const Instance& inst, const std::vector<uint64_t>& a_prefix,
                         unsigned j, const std::vector<uint64_t>& s) {
  ChoiceSplit sp;
  sp.aj = s.front();
  std::vector<uint64_t> prefix = a_prefix;
  prefix.push_back(sp.aj);
  for (size_t idx = 1; idx < s.size(); ++idx) {
    Bit v = choice_eval(inst, j, prefix, s[idx]);
    sp.side[v].push_back(s[idx]);
  }
  return sp;
}

std::vector<uint64_t> choice_full_universe(const Instance& inst) {
  std::vector<uint64_t> s(choice_universe(inst));
  for (size_t i = 0; i < s.size(); ++i) s[i] = i;
  return s;
}

}  // namespace

std::pair<std::vector<Bit>, std::vector<uint64_t>> brute_long_choice(const Instance& inst) {
  validate_choice(inst);
  std::vector<uint64_t> s = choice_full_universe(inst);
  std::vector<Bit> b;
  std::vector<uint64_t> a;
  for (unsigned j = 0; j + 1 < inst.n; ++j) {
    ChoiceSplit sp = choice_split(inst, a, j, s);
    Bit bj = sp.side[1].size() > sp.side[0].size() ? 1 : 0;
    a.push_back(sp.aj);
    b.push_back(bj);
    s = std::move(sp.side[bj]);
  }
  if (s.size() < 2) throw std::logic_error("brute_long_choice: survivor set too small");
  a.push_back(s[0]);
  a.push_back(s[1]);
  return {b, a};
}

std::pair<std::vector<Bit>, std::vector<uint64_t>> brute_short_choice(const Instance& inst) {
  validate_choice(inst);
  std::vector<uint64_t> s = choice_full_universe(inst);
  std::vector<Bit> b;
  std::vector<uint64_t> a;
  for (unsigned j = 0; j + 1 < inst.n; ++j) {
    ChoiceSplit sp = choice_split(inst, a, j, s);
    Bit bj = sp.side[1].size() < sp.side[0].size() ? 1 : 0;
    a.push_back(sp.aj);
    b.push_back(bj);
    s = std::move(sp.side[bj]);
    if (s.empty()) return {b, a};
  }
  throw std::logic_error("brute_short_choice: candidate set never emptied");
}

// ---------------------------------------------------------------------------
// Graph helpers

std::vector<uint64_t> leaf_neighbours(const Instance& inst, uint64_t u) {
  const Func& nf = inst.func("N");
  unsigned n = inst.n;
  uint64_t mask = pow2(n) - 1;
  auto cands = [&](uint64_t v) {
    uint64_t out = nf(v);
    return std::pair<uint64_t, uint64_t>{(out >> n) & mask, out & mask};
  };
  auto lists = [&](uint64_t v, uint64_t target) {
    auto [c0, c1] = cands(v);
    return c0 == target || c1 == target;
  };
  auto [c0, c1] = cands(u);
  std::vector<uint64_t> out;
  for (uint64_t v : {c0, c1}) {
    if (v == u) continue;
    if (std::find(out.begin(), out.end(), v) != out.end()) continue;
    if (lists(v, u)) out.push_back(v);
  }
  return out;
}

unsigned leaf_degree(const Instance& inst, uint64_t u) {
  return static_cast<unsigned>(leaf_neighbours(inst, u).size());
}

bool lonely_matched(const Instance& inst, uint64_t u) {
  const Func& nf = inst.func("N");
  uint64_t v = nf(u);
  return u != 0 && v != 0 && v != u && nf(v) == u;
}

Bit ramsey_colour(const Instance& inst, uint64_t u, uint64_t v) {
  if (u > v) std::swap(u, v);
  return static_cast<Bit>(inst.func("E")(pack_args({u, v}, inst.n)) & 1);
}

bool tournament_beats(const Instance& inst, uint64_t u, uint64_t v) {
  if (u == v) return false;
  Bit b = static_cast<Bit>(inst.func("B")(pack_args({std::min(u, v), std::max(u, v)}, inst.n)) & 1);
  return u < v ? b == 1 : b == 0;
}

// ---------------------------------------------------------------------------
// TFNP registry

namespace {

Shape repeat_shape(unsigned count, unsigned width) { return Shape(count, width); }

TfnpProblem make_p_computation() {
  TfnpProblem p;
  p.name = "p_computation";
  p.validate = [](const Instance& inst) {
    const Func& step = inst.func("step");
    if (step.in_bits != step.out_bits) throw std::runtime_error("instance: step must preserve width");
    if (inst.scalar_or("t", 0) > (1ull << 20)) throw std::runtime_error("instance: time too large");
    if (step.in_bits < 64 && (inst.scalar_or("x0", 0) >> step.in_bits) != 0)
      throw std::runtime_error("instance: start configuration out of range");
  };
  p.sol_shape = [](const Instance& inst) { return Shape{inst.func("step").in_bits}; };
  auto replay = [](const Instance& inst) {
    const Func& step = inst.func("step");
    uint64_t cfg = inst.scalar_or("x0", 0);
    uint64_t t = inst.scalar_or("t", 0);
    for (uint64_t i = 0; i < t; ++i) cfg = step(cfg);
    return cfg;
  };
  p.check = [replay](const Instance& inst, const Solution& y) {
    return shape_fits(Shape{inst.func("step").in_bits}, y) && y[0] == replay(inst);
  };
  p.brute = [replay](const Instance& inst) { return Solution{replay(inst)}; };
  return p;
}

TfnpProblem make_pigeon() {
  TfnpProblem p;
  p.name = "pigeon";
  p.validate = [](const Instance& inst) {
    need_size(inst, 1, 16);
    const Func& f = need_func(inst, "f", inst.n, inst.n);
    need_range(f, pow2(inst.n), pow2(inst.n) - 1, "f");
  };
  p.sol_shape = [](const Instance& inst) { return repeat_shape(2, inst.n); };
  p.check = [](const Instance& inst, const Solution& y) {
    if (!shape_fits(repeat_shape(2, inst.n), y)) return false;
    const Func& f = inst.func("f");
    return y[0] != y[1] && f(y[0]) == f(y[1]);
  };
  p.brute = [](const Instance& inst) { return brute_first(tfnp("pigeon"), inst); };
  return p;
}

TfnpProblem make_left_pigeon() {
  TfnpProblem p;
  p.name = "left_pigeon";
  p.validate = [](const Instance& inst) {
    need_size(inst, 1, 16);
    const Func& f = need_func(inst, "f", inst.n, inst.n);
    need_func(inst, "g", inst.n, inst.n);
    need_range(f, pow2(inst.n), pow2(inst.n) - 1, "f");
  };
  p.sol_shape = [](const Instance& inst) { return Shape{inst.n}; };
  p.check = [](const Instance& inst, const Solution& y) {
    if (!shape_fits(Shape{inst.n}, y)) return false;
    return inst.func("g")(inst.func("f")(y[0])) != y[0];
  };
  p.brute = [](const Instance& inst) { return brute_first(tfnp("left_pigeon"), inst); };
  return p;
}

TfnpProblem make_onto_pigeon() {
  TfnpProblem p;
  p.name = "onto_pigeon";
  p.validate = [](const Instance& inst) { tfnp("left_pigeon").validate(inst); };
  p.sol_shape = [](const Instance& inst) { return Shape{1, inst.n}; };
  p.check = [](const Instance& inst, const Solution& y) {
    if (!shape_fits(Shape{1, inst.n}, y)) return false;
    const Func& f = inst.func("f");
    const Func& g = inst.func("g");
    if (y[0] == 0) return g(f(y[1])) != y[1];
    return y[1] < pow2(inst.n) - 1 && f(g(y[1])) != y[1];
  };
  p.brute = [](const Instance& inst) { return brute_first(tfnp("onto_pigeon"), inst); };
  return p;
}

TfnpProblem make_leaf() {
  TfnpProblem p;
  p.name = "leaf";
  p.validate = [](const Instance& inst) {
    need_size(inst, 1, 16);
    need_func(inst, "N", inst.n, 2 * inst.n);
    if (leaf_degree(inst, 0) != 1) throw std::runtime_error("instance: node 0 must have degree 1");
  };
  p.sol_shape = [](const Instance& inst) { return Shape{inst.n}; };
  p.check = [](const Instance& inst, const Solution& y) {
    if (!shape_fits(Shape{inst.n}, y)) return false;
    return y[0] != 0 && leaf_degree(inst, y[0]) == 1;
  };
  p.brute = [](const Instance& inst) { return brute_first(tfnp("leaf"), inst); };
  return p;
}

TfnpProblem make_lonely() {
  TfnpProblem p;
  p.name = "lonely";
  p.validate = [](const Instance& inst) {
    need_size(inst, 1, 16);
    need_func(inst, "N", inst.n, inst.n);
  };
  p.sol_shape = [](const Instance& inst) { return Shape{inst.n}; };
  p.check = [](const Instance& inst, const Solution& y) {
    if (!shape_fits(Shape{inst.n}, y)) return false;
    return y[0] != 0 && !lonely_matched(inst, y[0]);
  };
  p.brute = [](const Instance& inst) { return brute_first(tfnp("lonely"), inst); };
  return p;
}

TfnpProblem make_localopt() {
  TfnpProblem p;
  p.name = "localopt";
  p.validate = [](const Instance& inst) {
    need_size(inst, 1, 16);
    const Func& s = need_func(inst, "S", inst.n, 1);
    need_func(inst, "N", inst.n, inst.n);
    if (s(pow2(inst.n) - 1) != 1)
      throw std::runtime_error("instance: top element must belong to S");
  };
  p.sol_shape = [](const Instance& inst) { return Shape{inst.n}; };
  p.check = [](const Instance& inst, const Solution& y) {
    if (!shape_fits(Shape{inst.n}, y)) return false;
    const Func& s = inst.func("S");
    const Func& nf = inst.func("N");
    if (s(y[0]) != 1) return false;
    uint64_t next = nf(y[0]);
    return s(next) == 0 || next >= y[0];
  };
  p.brute = [](const Instance& inst) { return brute_first(tfnp("localopt"), inst); };
  return p;
}

TfnpProblem make_weak_pigeon() {
  TfnpProblem p;
  p.name = "weak_pigeon";
  p.validate = [](const Instance& inst) {
    need_size(inst, 1, 16);
    need_func(inst, "f", inst.n, inst.n - 1);
  };
  p.sol_shape = [](const Instance& inst) { return repeat_shape(2, inst.n); };
  p.check = [](const Instance& inst, const Solution& y) {
    if (!shape_fits(repeat_shape(2, inst.n), y)) return false;
    const Func& f = inst.func("f");
    return y[0] != y[1] && f(y[0]) == f(y[1]);
  };
  p.brute = [](const Instance& inst) { return brute_first(tfnp("weak_pigeon"), inst); };
  return p;
}

TfnpProblem make_retraction_weak_pigeon() {
  TfnpProblem p;
  p.name = "retraction_weak_pigeon";
  p.validate = [](const Instance& inst) {
    need_size(inst, 1, 16);
    need_func(inst, "f", inst.n, inst.n + 1);
    need_func(inst, "g", inst.n + 1, inst.n);
  };
  p.sol_shape = [](const Instance& inst) { return Shape{inst.n + 1}; };
  p.check = [](const Instance& inst, const Solution& y) {
    if (!shape_fits(Shape{inst.n + 1}, y)) return false;
    return inst.func("f")(inst.func("g")(y[0])) != y[0];
  };
  p.brute = [](const Instance& inst) { return brute_first(tfnp("retraction_weak_pigeon"), inst); };
  return p;
}

unsigned ramsey_target(unsigned n) { return (n + 1) / 2; }  // ceil(n/2)

TfnpProblem make_ramsey() {
  TfnpProblem p;
  p.name = "ramsey";
  p.validate = [](const Instance& inst) {
    need_size(inst, 1, 10);
    need_func(inst, "E", 2 * inst.n, 1);
  };
  p.sol_shape = [](const Instance& inst) { return repeat_shape(ramsey_target(inst.n), inst.n); };
  p.check = [](const Instance& inst, const Solution& y) {
    if (!shape_fits(repeat_shape(ramsey_target(inst.n), inst.n), y)) return false;
    std::set<uint64_t> seen(y.begin(), y.end());
    if (seen.size() != y.size()) return false;
    if (y.size() < 2) return true;
    Bit c = ramsey_colour(inst, y[0], y[1]);
    for (size_t i = 0; i < y.size(); ++i)
      for (size_t j = i + 1; j < y.size(); ++j)
        if (ramsey_colour(inst, y[i], y[j]) != c) return false;
    return true;
  };
  p.brute = [](const Instance& inst) { return brute_first(tfnp("ramsey"), inst); };
  return p;
}

TfnpProblem make_long_choice(const std::string& name) {
  TfnpProblem p;
  p.name = name;
  p.validate = validate_choice;
  p.sol_shape = [](const Instance& inst) {
    Shape s(inst.n - 1, 1);  // b_0..b_{n-2}
    Shape a(inst.n + 1, choice_arg_bits(inst));
    s.insert(s.end(), a.begin(), a.end());
    return s;
  };
  p.check = [](const Instance& inst, const Solution& y) {
    unsigned m = inst.n - 1;
    Shape shape = tfnp(inst.problem).sol_shape(inst);
    if (!shape_fits(shape, y)) return false;
    std::vector<Bit> b(y.begin(), y.begin() + m);
    std::vector<uint64_t> a(y.begin() + m, y.end());
    uint64_t universe = choice_universe(inst);
    for (uint64_t v : a)
      if (v >= universe) return false;
    return is_b_sequence(inst, b, a);
  };
  p.brute = [](const Instance& inst) {
    auto [b, a] = brute_long_choice(inst);
    Solution y(b.begin(), b.end());
    y.insert(y.end(), a.begin(), a.end());
    return y;
  };
  return p;
}

TfnpProblem make_gi() {
  TfnpProblem p;
  p.name = "gi";
  p.validate = [](const Instance& inst) {
    need_size(inst, 1, 4);
    unsigned k = static_cast<unsigned>(inst.scalar_or("k", 0));
    if (k < 1 || k > 4) throw std::runtime_error("instance: turn count out of range");
    unsigned n = inst.n;
    const Func& g = need_func(inst, "G", (k + 1) * n, 1);
    for (unsigned j = 1; j <= k; ++j) need_func(inst, "f" + std::to_string(j), (j + 1) * n, n);
    // boundary games: game 0 always a win for B, the top game never
    if (k * n > 16) throw std::runtime_error("instance: game table too wide to check");
    for (uint64_t xs = 0; xs < pow2(k * n); ++xs) {
      if (g((0ull << (k * n)) | xs) != 1)
        throw std::runtime_error("instance: game 0 must be everywhere true");
      if (g(((pow2(n) - 1) << (k * n)) | xs) != 0)
        throw std::runtime_error("instance: last game must be everywhere false");
    }
  };
  p.sol_shape = [](const Instance& inst) {
    unsigned k = static_cast<unsigned>(inst.scalar_or("k", 0));
    return repeat_shape(1 + 2 * k, inst.n);
  };
  p.check = [](const Instance& inst, const Solution& y) {
    unsigned k = static_cast<unsigned>(inst.scalar_or("k", 0));
    unsigned n = inst.n;
    if (!shape_fits(repeat_shape(1 + 2 * k, n), y)) return false;
    uint64_t i = y[0];
    if (i >= pow2(n) - 1) return false;
    std::vector<uint64_t> x(y.begin() + 1, y.begin() + 1 + k);
    std::vector<uint64_t> xp(y.begin() + 1 + k, y.end());
    // each move is copied from the other play through f^j_i; arguments
    // alternate primed (odd positions) and unprimed (even positions)
    for (unsigned j = 1; j <= k; ++j) {
      std::vector<uint64_t> args{i};
      for (unsigned q = 1; q <= j; ++q) args.push_back(q % 2 ? xp[q - 1] : x[q - 1]);
      uint64_t v = inst.func("f" + std::to_string(j))(pack_args(args, n));
      if (j % 2 ? x[j - 1] != v : xp[j - 1] != v) return false;
    }
    const Func& g = inst.func("G");
    std::vector<uint64_t> gx{i};
    gx.insert(gx.end(), x.begin(), x.end());
    std::vector<uint64_t> gxp{i + 1};
    gxp.insert(gxp.end(), xp.begin(), xp.end());
    return g(pack_args(gx, n)) == 1 && g(pack_args(gxp, n)) == 0;
  };
  p.brute = [](const Instance& inst) { return brute_first(tfnp("gi"), inst); };
  return p;
}

// ---------------------------------------------------------------------------
// Two-round registry

Tfs2Problem make_least_number() {
  Tfs2Problem p;
  p.name = "least_number";
  p.validate = [](const Instance& inst) {
    need_size(inst, 1, 16);
    const Func& s = need_func(inst, "S", inst.n, 1);
    uint64_t x = inst.scalar_or("x", 0);
    if ((x >> inst.n) != 0 || s(x) != 1)
      throw std::runtime_error("instance: x must be a member of S");
  };
  p.y_shape = [](const Instance& inst) { return Shape{inst.n}; };
  p.z_shape = [](const Instance& inst) { return Shape{inst.n}; };
  p.rel = [](const Instance& inst, const Solution& y, const Solution& z) {
    if (!shape_fits(Shape{inst.n}, y) || !shape_fits(Shape{inst.n}, z)) return false;
    const Func& s = inst.func("S");
    if (s(y[0]) != 1) return false;
    return !(s(z[0]) == 1 && z[0] < y[0]);
  };
  p.brute = [](const Instance& inst) { return tfs2_brute_first(tfs2("least_number"), inst); };
  return p;
}

Tfs2Problem make_empty() {
  Tfs2Problem p;
  p.name = "empty";
  p.validate = [](const Instance& inst) {
    need_size(inst, 1, 16);
    need_func(inst, "f", inst.n, inst.n);  // pigeons [2^n - 1] into holes [2^n]
  };
  p.y_shape = [](const Instance& inst) { return Shape{inst.n}; };
  p.z_shape = [](const Instance& inst) { return Shape{inst.n}; };
  p.rel = [](const Instance& inst, const Solution& y, const Solution& z) {
    if (!shape_fits(Shape{inst.n}, y) || !shape_fits(Shape{inst.n}, z)) return false;
    return !(z[0] < pow2(inst.n) - 1 && inst.func("f")(z[0]) == y[0]);
  };
  p.brute = [](const Instance& inst) { return tfs2_brute_first(tfs2("empty"), inst); };
  return p;
}

Tfs2Problem make_dual_weak_pigeon() {
  Tfs2Problem p;
  p.name = "dual_weak_pigeon";
  p.validate = [](const Instance& inst) {
    need_size(inst, 1, 16);
    need_func(inst, "f", inst.n, inst.n + 1);
  };
  p.y_shape = [](const Instance& inst) { return Shape{inst.n + 1}; };
  p.z_shape = [](const Instance& inst) { return Shape{inst.n}; };
  p.rel = [](const Instance& inst, const Solution& y, const Solution& z) {
    if (!shape_fits(Shape{inst.n + 1}, y) || !shape_fits(Shape{inst.n}, z)) return false;
    return inst.func("f")(z[0]) != y[0];
  };
  p.brute = [](const Instance& inst) { return tfs2_brute_first(tfs2("dual_weak_pigeon"), inst); };
  return p;
}

// Candidate kinds for the least-element-or-defect problem: 0 = least element
// u; 1 = totality defect (u,v covers reflexivity when u = v); 2 = antisymmetry
// defect (u,v); 3 = transitivity defect (u,v,w).  Unused fields must be zero.
Tfs2Problem make_min() {
  Tfs2Problem p;
  p.name = "min";
  p.validate = [](const Instance& inst) {
    need_size(inst, 1, 16);
    need_func(inst, "R", 2 * inst.n, 1);
  };
  p.y_shape = [](const Instance& inst) { return Shape{2, inst.n, inst.n, inst.n}; };
  p.z_shape = [](const Instance& inst) { return Shape{inst.n}; };
  p.rel = [](const Instance& inst, const Solution& y, const Solution& z) {
    if (!shape_fits(Shape{2, inst.n, inst.n, inst.n}, y) || !shape_fits(Shape{inst.n}, z))
      return false;
    const Func& rf = inst.func("R");
    auto rel = [&](uint64_t u, uint64_t v) { return rf(pack_args({u, v}, inst.n)) == 1; };
    uint64_t u = y[1], v = y[2], w = y[3];
    switch (y[0]) {
      case 0:
        return v == 0 && w == 0 && rel(u, z[0]);
      case 1:
        return w == 0 && !rel(u, v) && !rel(v, u);
      case 2:
        return w == 0 && u != v && rel(u, v) && rel(v, u);
      case 3:
        return rel(u, v) && rel(v, w) && !rel(u, w);
      default:
        return false;
    }
  };
  p.brute = [](const Instance& inst) { return tfs2_brute_first(tfs2("min"), inst); };
  return p;
}

Tfs2Problem make_tournament() {
  Tfs2Problem p;
  p.name = "tournament";
  p.validate = [](const Instance& inst) {
    need_size(inst, 1, 10);
    need_func(inst, "B", 2 * inst.n, 1);
  };
  p.y_shape = [](const Instance& inst) { return repeat_shape(inst.n, inst.n); };
  p.z_shape = [](const Instance& inst) { return Shape{inst.n}; };
  p.rel = [](const Instance& inst, const Solution& y, const Solution& z) {
    if (!shape_fits(repeat_shape(inst.n, inst.n), y) || !shape_fits(Shape{inst.n}, z))
      return false;
    for (uint64_t s : y)
      if (s == z[0] || tournament_beats(inst, s, z[0])) return true;
    return false;
  };
  // Greedy max-coverage picks: some node always covers at least half of what
  // remains, so n rounds dominate all 2^n nodes; spare slots repeat the first
  // pick.  Ties go to the smaller node.
  p.brute = [](const Instance& inst) {
    uint64_t nodes = pow2(inst.n);
    std::vector<bool> uncovered(nodes, true);
    uint64_t left = nodes;
    Solution y;
    while (left > 0 && y.size() < inst.n) {
      uint64_t best = 0, best_cover = 0;
      for (uint64_t s = 0; s < nodes; ++s) {
        uint64_t cover = 0;
        for (uint64_t zq = 0; zq < nodes; ++zq)
          if (uncovered[zq] && (zq == s || tournament_beats(inst, s, zq))) ++cover;
        if (cover > best_cover) {
          best = s;
          best_cover = cover;
        }
      }
      y.push_back(best);
      for (uint64_t zq = 0; zq < nodes; ++zq)
        if (uncovered[zq] && (zq == best || tournament_beats(inst, best, zq))) {
          uncovered[zq] = false;
          --left;
        }
    }
    if (left > 0) throw std::logic_error("tournament brute: greedy cover failed");
    while (y.size() < inst.n) y.push_back(y[0]);
    return y;
  };
  return p;
}

// Short-choice candidates: [k, b_0..b_{m-1}, a_0..a_{m-1}] with only the
// first k+1 b's and a's meaningful; trailing fields must be zero.
Tfs2Problem make_short_choice(const std::string& name) {
  Tfs2Problem p;
  p.name = name;
  p.validate = validate_choice;
  p.y_shape = [](const Instance& inst) {
    unsigned m = inst.n - 1;
    Shape s{bits_for_count(m)};
    Shape b(m, 1);
    Shape a(m, choice_arg_bits(inst));
    s.insert(s.end(), b.begin(), b.end());
    s.insert(s.end(), a.begin(), a.end());
    return s;
  };
  p.z_shape = [](const Instance& inst) { return Shape{choice_arg_bits(inst)}; };
  p.rel = [](const Instance& inst, const Solution& y, const Solution& z) {
    unsigned m = inst.n - 1;
    if (!shape_fits(tfs2(inst.problem).y_shape(inst), y) ||
        !shape_fits(tfs2(inst.problem).z_shape(inst), z))
      return false;
    uint64_t k = y[0];
    if (k + 1 > m) return false;
    uint64_t universe = choice_universe(inst);
    std::vector<Bit> b;
    std::vector<uint64_t> a;
    for (unsigned i = 0; i < m; ++i) {
      uint64_t bi = y[1 + i], ai = y[1 + m + i];
      if (i <= k) {
        b.push_back(static_cast<Bit>(bi));
        a.push_back(ai);
      } else if (bi != 0 || ai != 0) {
        return false;
      }
    }
    for (uint64_t v : a)
      if (v >= universe) return false;
    if (!is_b_sequence(inst, std::vector<Bit>(b.begin(), b.end() - 1), a)) return false;
    // z refutes by extending a with the full b, including b_k
    uint64_t ext = z[0];
    if (ext >= universe) return true;
    std::vector<uint64_t> longer = a;
    longer.push_back(ext);
    return !is_b_sequence(inst, b, longer);
  };
  p.brute = [](const Instance& inst) {
    auto [b, a] = brute_short_choice(inst);
    unsigned m = inst.n - 1;
    Solution y{b.size() - 1};
    for (unsigned i = 0; i < m; ++i) y.push_back(i < b.size() ? b[i] : 0);
    for (unsigned i = 0; i < m; ++i) y.push_back(i < a.size() ? a[i] : 0);
    return y;
  };
  return p;
}

using TfnpMap = std::map<std::string, TfnpProblem>;
using Tfs2Map = std::map<std::string, Tfs2Problem>;

const TfnpMap& tfnp_map() {
  static const TfnpMap m = [] {
    TfnpMap r;
    for (TfnpProblem p :
         {make_p_computation(), make_pigeon(), make_left_pigeon(), make_onto_pigeon(),
          make_leaf(), make_lonely(), make_localopt(), make_weak_pigeon(),
          make_retraction_weak_pigeon(), make_ramsey(), make_long_choice("long_choice"),
          make_long_choice("weak_long_choice"), make_gi()})
      r[p.name] = std::move(p);
    return r;
  }();
  return m;
}

const Tfs2Map& tfs2_map() {
  static const Tfs2Map m = [] {
    Tfs2Map r;
    for (Tfs2Problem p :
         {make_least_number(), make_empty(), make_dual_weak_pigeon(), make_min(),
          make_tournament(), make_short_choice("short_choice"),
          make_short_choice("weak_short_choice"), detail::make_pnp_problem(),
          detail::make_rwpp2_problem()})
      r[p.name] = std::move(p);
    return r;
  }();
  return m;
}

}  // namespace

const TfnpProblem& tfnp(const std::string& name) {
  auto& m = tfnp_map();
  auto it = m.find(name);
  if (it == m.end()) throw std::out_of_range("unknown problem: " + name);
  return it->second;
}

const Tfs2Problem& tfs2(const std::string& name) {
  auto& m = tfs2_map();
  auto it = m.find(name);
  if (it == m.end()) throw std::out_of_range("unknown problem: " + name);
  return it->second;
}

std::vector<std::string> tfnp_names() {
  std::vector<std::string> out;
  for (auto& [k, v] : tfnp_map()) out.push_back(k);
  return out;
}

std::vector<std::string> tfs2_names() {
  std::vector<std::string> out;
  for (auto& [k, v] : tfs2_map()) out.push_back(k);
  return out;
}

}  // namespace owb
