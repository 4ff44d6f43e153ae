#include "owb/catalog.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <random>

namespace owb {

namespace {

uint64_t pow2(unsigned b) { return 1ull << b; }

uint64_t mask_bits(unsigned b) { return b >= 64 ? ~0ull : pow2(b) - 1; }

unsigned bits_for_count(uint64_t m) {  // least width holding values 0..m-1
  unsigned b = 0;
  while (m > pow2(b)) ++b;
  return b;
}

}  // namespace

// --- protocol registry -------------------------------------------------------

namespace {

std::map<std::string, ProtocolBuilder>& protocol_map() {
  static std::map<std::string, ProtocolBuilder> m;
  return m;
}

}  // namespace

void register_protocol(const std::string& name, ProtocolBuilder builder) {
  protocol_map()[name] = std::move(builder);
}

Protocol build_protocol(const std::string& name, const Bytes& params) {
  auto it = protocol_map().find(name);
  if (it == protocol_map().end()) throw std::out_of_range("unknown protocol: " + name);
  Protocol p = it->second(params);
  p.name = name;
  p.params = params;
  return p;
}

std::vector<std::string> protocol_names() {
  std::vector<std::string> out;
  for (const auto& kv : protocol_map()) out.push_back(kv.first);
  return out;
}

// --- local problems ----------------------------------------------------------

bool local_run_ok(const AxiomSet& gamma, const Protocol& proto, const Solution& bits) {
  (void)gamma;  // the bits already fix the replies; gamma picked their shape
  if (bits.size() != proto.budget) return false;
  size_t next = 0;
  Adversary adv = [&bits, &next](const Key&) -> Reply {
    if (next >= bits.size()) throw std::runtime_error("scripted run out of reply bits");
    return bit_reply(static_cast<Bit>(bits[next++] & 1));
  };
  try {
    Session s(adv, proto.budget);
    ProtocolResult r = proto.run(s);
    if (r.kind != ProtocolResult::Kind::Solution) return false;
    for (size_t j = next; j < bits.size(); ++j)
      if (bits[j] != 0) return false;  // unused reply bits must be zero
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

Protocol protocol_of_instance(const Instance& inst) {
  return build_protocol(inst.tag("protocol"), from_hex(inst.tag("params")));
}

TfnpProblem local_problem(const AxiomSet& gamma) {
  if (gamma.name != AxiomSet::Name::Parity && gamma.name != AxiomSet::Name::Tqbf)
    throw std::invalid_argument("local problems need an axiom set with single-bit replies");
  TfnpProblem p;
  p.name = "local_" + gamma.label();
  p.validate = [](const Instance& inst) { protocol_of_instance(inst); };
  p.sol_shape = [](const Instance& inst) {
    return Shape(protocol_of_instance(inst).budget, 1);
  };
  p.check = [gamma](const Instance& inst, const Solution& y) {
    Protocol proto = protocol_of_instance(inst);
    if (!shape_fits(Shape(proto.budget, 1), y)) return false;
    return local_run_ok(gamma, proto, y);
  };
  p.brute = [gamma](const Instance& inst) {
    Protocol proto = protocol_of_instance(inst);
    std::vector<uint64_t> bits;
    Adversary honest = honest_adversary(gamma);
    Adversary recording = [honest, &bits](const Key& k) {
      Reply r = honest(k);
      bits.push_back(reply_bit(r));
      return r;
    };
    Session s(recording, proto.budget);
    ProtocolResult r = proto.run(s);
    if (r.kind != ProtocolResult::Kind::Solution)
      throw std::runtime_error("honest run claimed a failure");
    bits.resize(proto.budget, 0);
    return Solution(bits.begin(), bits.end());
  };
  return p;
}

Instance local_instance(const AxiomSet& gamma, const std::string& proto_name,
                        const Bytes& params) {
  build_protocol(proto_name, params);  // fail early on unknown references
  Instance inst;
  inst.problem = "local_" + gamma.label();
  inst.tags["protocol"] = proto_name;
  inst.tags["params"] = to_hex(params);
  return inst;
}

// --- shared construction helpers ---------------------------------------------

namespace {

// A circuit view over exactly in_bits ordered free inputs; tabulates when the
// backing circuit happens to ignore some of them.
MultiCircuit full_mc(const Func& f) {
  MultiCircuit mc = f.as_multicircuit();
  if (mc.free_inputs().size() == f.in_bits) return mc;
  if (f.in_bits > 20) throw std::runtime_error("catalog: function too wide to tabulate");
  std::vector<uint64_t> tab(pow2(f.in_bits));
  for (uint64_t x = 0; x < tab.size(); ++x) tab[x] = f(x);
  return table_multicircuit(f.in_bits, f.out_bits, tab);
}

std::vector<uint32_t> make_inputs(CircuitBuilder& b, unsigned n, unsigned from = 0) {
  std::vector<uint32_t> xs;
  for (unsigned j = 0; j < n; ++j) xs.push_back(b.input("x" + std::to_string(from + j)));
  return xs;
}

std::map<std::string, uint32_t> wire_all(const MultiCircuit& mc,
                                         const std::vector<uint32_t>& bits) {
  std::vector<std::string> names = mc.free_inputs();
  if (names.size() != bits.size()) throw std::logic_error("wire_all: arity mismatch");
  std::map<std::string, uint32_t> w;
  for (size_t i = 0; i < names.size(); ++i) w[names[i]] = bits[i];
  return w;
}

Circuit padding_query() {
  CircuitBuilder b;
  return b.take(b.konst(0));
}

// S extended with the top element as a member.
Func union_with_top(const Func& s, unsigned n) {
  CircuitBuilder b;
  std::vector<uint32_t> xs = make_inputs(b, n);
  MultiCircuit sm = full_mc(s);
  uint32_t sv = b.embed(sm, wire_all(sm, xs))[0];
  uint32_t out = b.gor({sv, b.eq_const(xs, mask_bits(n))});
  return Func::from_circuit(b.take_multi({out}));
}

// chk everywhere except at the top element, which is redirected to the fixed
// value x instead.
Func chk_with_top_escape(const Func& chk, unsigned n, uint64_t x) {
  CircuitBuilder b;
  std::vector<uint32_t> xs = make_inputs(b, n);
  MultiCircuit cm = full_mc(chk);
  std::vector<uint32_t> outs = b.embed(cm, wire_all(cm, xs));
  uint32_t at_top = b.eq_const(xs, mask_bits(n));
  std::vector<uint32_t> bits;
  for (unsigned j = 0; j < n; ++j)
    bits.push_back(b.gmux(at_top, outs[j], b.konst(static_cast<Bit>((x >> (n - 1 - j)) & 1))));
  return Func::from_circuit(b.take_multi(bits));
}

// chk with the all-ones output value squashed to zero, so the range bound
// required of a left-pigeon forward map always holds.
Func clamp_top_to_zero(const Func& chk, unsigned n) {
  CircuitBuilder b;
  std::vector<uint32_t> xs = make_inputs(b, n);
  MultiCircuit cm = full_mc(chk);
  std::vector<uint32_t> outs = b.embed(cm, wire_all(cm, xs));
  uint32_t keep = b.gnot(b.eq_const(outs, mask_bits(n)));
  std::vector<uint32_t> bits;
  for (unsigned j = 0; j < n; ++j) bits.push_back(b.gand({outs[j], keep}));
  return Func::from_circuit(b.take_multi(bits));
}

// --- pigeonhole amplification ladders ----------------------------------------
// Step i threads the low i bits of the argument unchanged past an inner
// (n -> n+1)-bit map f, widening by one bit per step.

uint64_t ladder_up(const Func& f, unsigned steps, uint64_t x) {
  uint64_t z = x;
  for (unsigned i = 0; i < steps; ++i) z = (f(z >> i) << i) | (z & mask_bits(i));
  return z;
}

uint64_t ladder_down(const Func& g, unsigned steps, uint64_t y) {
  for (unsigned i = steps; i-- > 0;) y = (g(y >> i) << i) | (y & mask_bits(i));
  return y;
}

// Given y with ladder_up(f)(ladder_down(g)(y)) != y, finds the first rung
// where the round trip diverges and returns the inner defect: a value v with
// f(g(v)) != v.
uint64_t ladder_defect(const Func& f, const Func& g, unsigned steps, uint64_t y) {
  std::vector<uint64_t> ys(steps + 1);
  ys[steps] = y;
  for (unsigned i = steps; i-- > 0;)
    ys[i] = (g(ys[i + 1] >> i) << i) | (ys[i + 1] & mask_bits(i));
  uint64_t z = ys[0];
  for (unsigned i = 0; i < steps; ++i) {
    uint64_t up = (f(z >> i) << i) | (z & mask_bits(i));
    if (up != ys[i + 1]) return ys[i + 1] >> i;
    z = up;
  }
  throw std::logic_error("pigeonhole ladder: no defect on a mismatched pair");
}

// --- canonical choice sequences over an oracle --------------------------------
// Shared machinery for the machines that walk canonical b-sequences: starting
// from a_0 = 0, each step finds the least later universe element agreeing
// with the choice bits so far, one oracle query per candidate bit.

struct CanonParams {
  uint64_t universe;  // elements are 0 .. universe-1
  unsigned w;         // bit width of one element inside queries and tables
  unsigned m;         // number of P functions = maximum search steps
};

CanonParams canon_params(const Instance& inst) {
  if (inst.tag("choice_kind") == "wlc") return {pow2(inst.n + 1), inst.n + 1, inst.n - 1};
  uint64_t u = pow2(inst.n) - 2;
  return {u, bits_for_count(u), inst.n};
}

struct CanonSides {
  unsigned value_bits;  // universe-element side
  unsigned code_bits;   // encoded bit-string side
};

CanonSides canon_sides(const Instance& inst) {
  if (inst.tag("choice_kind") == "wlc") return {inst.n + 1, inst.n};
  return {inst.n, inst.n + 1};
}

Bit canon_p(const Instance& inst, unsigned i, const std::vector<uint64_t>& a, uint64_t z,
            unsigned w) {
  std::vector<uint64_t> args(a.begin(), a.begin() + i + 1);
  args.push_back(z);
  return static_cast<Bit>(inst.func("P" + std::to_string(i))(pack_args(args, w)) & 1);
}

bool canon_member(const Instance& inst, const CanonParams& pr, const std::vector<uint64_t>& a,
                  const std::vector<Bit>& b, uint64_t lo, uint64_t z) {
  if (z >= pr.universe || z <= lo) return false;
  for (unsigned i = 0; i < b.size(); ++i)
    if (canon_p(inst, i, a, z, pr.w) != b[i]) return false;
  return true;
}

// Query bit i of a search step: does a candidate-set member extend the pinned
// prefix with a 0 at position i?  Built directly as a DNF over the undecided
// low bits; the recorded witness input wk reads the bit at msb position
// i+1+k, so every query stays within witness width w-1.
Circuit canon_query(const Instance& inst, const CanonParams& pr,
                    const std::vector<uint64_t>& a, const std::vector<Bit>& b, uint64_t lo,
                    const std::vector<Bit>& prefix, unsigned i) {
  unsigned free = pr.w - 1 - i;
  CircuitBuilder bd;
  std::vector<uint32_t> ins;
  for (unsigned k = 0; k < free; ++k) ins.push_back(bd.input("w" + std::to_string(k)));
  std::vector<uint32_t> sat;
  bool closed_yes = false;
  for (uint64_t v = 0; v < pow2(free); ++v) {
    uint64_t z = 0;
    for (unsigned j = 0; j < i; ++j) z |= static_cast<uint64_t>(prefix[j]) << (pr.w - 1 - j);
    for (unsigned k = 0; k < free; ++k) z |= ((v >> k) & 1) << (pr.w - 1 - (i + 1 + k));
    if (!canon_member(inst, pr, a, b, lo, z)) continue;
    if (free == 0) {
      closed_yes = true;
      break;
    }
    std::vector<uint32_t> lits;
    for (unsigned k = 0; k < free; ++k)
      lits.push_back(((v >> k) & 1) ? ins[k] : bd.gnot(ins[k]));
    sat.push_back(bd.gand(lits));
  }
  if (free == 0) return bd.take(bd.konst(closed_yes ? 1 : 0));
  return bd.take(bd.gor(sat));
}

struct SearchStep {
  std::optional<Circuit> query;  // set when another reply is needed first
  bool ok = false;               // reply-assembled candidate is a member
  uint64_t z = 0;
};

// One binary search over the candidate set "z > a.back(), P_i(.., z) = b_i
// for all i", consuming w reply bits from `replies` starting at `pos`.
// YES pins the next bit to 0, NO to 1; with honest replies and a nonempty
// set the assembled value is its least member.
SearchStep canon_search(const Instance& inst, const CanonParams& pr,
                        const std::vector<uint64_t>& a, const std::vector<Bit>& b,
                        const std::vector<Bit>& replies, size_t& pos) {
  uint64_t lo = a.back();
  std::vector<Bit> prefix;
  for (unsigned i = 0; i < pr.w; ++i) {
    if (pos == replies.size()) {
      SearchStep s;
      s.query = canon_query(inst, pr, a, b, lo, prefix, i);
      return s;
    }
    prefix.push_back(replies[pos++] ? 0 : 1);
  }
  uint64_t z = 0;
  for (unsigned j = 0; j < pr.w; ++j) z |= static_cast<uint64_t>(prefix[j]) << (pr.w - 1 - j);
  SearchStep s;
  s.ok = canon_member(inst, pr, a, b, lo, z);
  s.z = z;
  return s;
}

struct CanonSim {
  std::optional<Circuit> query;  // next query when the replies ran short
  std::vector<uint64_t> a;       // a_0 = 0 plus the found elements
  std::vector<Bit> b;
  bool error = false;       // a search produced a non-member (set was empty)
  bool hit_target = false;  // the scan reached the target value
  bool full = false;        // every scheduled search completed
};

// Scans toward `target`, reading off its choice bits: b_{j-1} is P_{j-1}
// evaluated host-side at the target, a_j the least later element matching
// the bits so far.  Stops on reaching the target.
CanonSim canon_scan(const Instance& inst, const CanonParams& pr, uint64_t target,
                    const std::vector<Bit>& replies) {
  CanonSim s;
  s.a.push_back(0);
  size_t pos = 0;
  if (target == 0) {
    s.hit_target = true;
    return s;
  }
  for (unsigned j = 1; j <= pr.m; ++j) {
    s.b.push_back(canon_p(inst, j - 1, s.a, target, pr.w));
    SearchStep st = canon_search(inst, pr, s.a, s.b, replies, pos);
    if (st.query) {
      s.query = std::move(st.query);
      return s;
    }
    if (!st.ok) {
      s.error = true;
      return s;
    }
    s.a.push_back(st.z);
    if (st.z == target) {
      s.hit_target = true;
      return s;
    }
  }
  s.full = true;
  return s;
}

// Rebuilds the canonical sequence for the given choice bits; error when some
// search comes back with a non-member.
CanonSim canon_rebuild(const Instance& inst, const CanonParams& pr,
                       const std::vector<Bit>& want, const std::vector<Bit>& replies) {
  CanonSim s;
  s.a.push_back(0);
  size_t pos = 0;
  for (unsigned j = 1; j <= want.size(); ++j) {
    s.b.push_back(want[j - 1]);
    SearchStep st = canon_search(inst, pr, s.a, s.b, replies, pos);
    if (st.query) {
      s.query = std::move(st.query);
      return s;
    }
    if (!st.ok) {
      s.error = true;
      return s;
    }
    s.a.push_back(st.z);
  }
  s.full = true;
  return s;
}

// Bit strings of length <= L, enumerated by length then lexicographically:
// the empty string is 0, then (0), (1), (0,0), ...
uint64_t enc_bits(const std::vector<Bit>& b) {
  uint64_t val = 0;
  for (Bit x : b) val = (val << 1) | x;
  return (pow2(static_cast<unsigned>(b.size())) - 1) + val;
}

std::vector<Bit> dec_bits(uint64_t p) {
  unsigned len = 0;
  uint64_t base = 0;
  while (p >= base + pow2(len)) {
    base += pow2(len);
    ++len;
  }
  uint64_t val = p - base;
  std::vector<Bit> b(len);
  for (unsigned i = 0; i < len; ++i) b[i] = static_cast<Bit>((val >> (len - 1 - i)) & 1);
  return b;
}

// Machine walking canonical sequences in one of two roles.  A finder maps a
// universe element to the encoding of its choice bits; a rebuilder decodes a
// bit string and reconstructs the sequence, outputting its last element (or
// the error code 0 when a search fails).  Out-of-universe inputs on the
// finder side map to the spare all-ones code; non-decodable codes on the
// rebuilder side map to the first spare universe index for the short variant
// and to 0 for the long one.  Unused budget is padded with constant-false
// queries, which an accepted run must answer NO.
PnpMachine make_canon(const std::string& name, bool finder) {
  PnpMachine m;
  m.name = name;
  m.in_bits = [finder](const Instance& inst) {
    CanonSides sd = canon_sides(inst);
    return finder ? sd.value_bits : sd.code_bits;
  };
  m.out_bits = [finder](const Instance& inst) {
    CanonSides sd = canon_sides(inst);
    return finder ? sd.code_bits : sd.value_bits;
  };
  m.queries = [](const Instance& inst) {
    CanonParams pr = canon_params(inst);
    return pr.m * pr.w;
  };
  m.witness_bits = [](const Instance& inst) { return canon_params(inst).w - 1; };
  m.query = [finder](const Instance& inst, uint64_t x, const std::vector<Bit>& replies) {
    CanonParams pr = canon_params(inst);
    CanonSim s;
    if (finder) {
      if (x >= pr.universe) return padding_query();
      s = canon_scan(inst, pr, x, replies);
    } else {
      if (x > pow2(pr.m + 1) - 2) return padding_query();
      s = canon_rebuild(inst, pr, dec_bits(x), replies);
    }
    return s.query ? std::move(*s.query) : padding_query();
  };
  m.output = [finder](const Instance& inst, uint64_t x, const std::vector<Bit>& replies) {
    CanonParams pr = canon_params(inst);
    CanonSides sd = canon_sides(inst);
    if (finder) {
      if (x >= pr.universe) return mask_bits(sd.code_bits);
      CanonSim s = canon_scan(inst, pr, x, replies);
      return enc_bits(s.b);
    }
    if (x > pow2(pr.m + 1) - 2)
      return inst.tag("choice_kind") == "wlc" ? 0 : pr.universe;
    CanonSim s = canon_rebuild(inst, pr, dec_bits(x), replies);
    return s.error ? 0 : s.a.back();
  };
  return m;
}

// Binary search for the least preimage of the input under funcs["f"], built
// as direct DNF queries over the undecided low candidate bits.
PnpMachine make_wp_inverse_search() {
  PnpMachine m;
  m.name = "wp_inverse_search";
  m.in_bits = [](const Instance& inst) { return inst.func("f").out_bits; };
  m.out_bits = [](const Instance& inst) { return inst.func("f").in_bits; };
  m.queries = [](const Instance& inst) { return inst.func("f").in_bits; };
  m.witness_bits = [](const Instance& inst) { return inst.func("f").in_bits - 1; };
  m.query = [](const Instance& inst, uint64_t x, const std::vector<Bit>& replies) {
    const Func& f = inst.func("f");
    unsigned n = f.in_bits;
    unsigned i = static_cast<unsigned>(replies.size());
    unsigned free = n - 1 - i;
    uint64_t prefix = 0;
    for (unsigned j = 0; j < i; ++j)
      prefix |= static_cast<uint64_t>(replies[j] ? 0 : 1) << (n - 1 - j);
    CircuitBuilder b;
    std::vector<uint32_t> ins;
    for (unsigned k = 0; k < free; ++k) ins.push_back(b.input("w" + std::to_string(k)));
    std::vector<uint32_t> sat;
    bool closed_yes = false;
    for (uint64_t v = 0; v < pow2(free); ++v) {
      uint64_t z = prefix;  // bit i stays 0
      for (unsigned k = 0; k < free; ++k) z |= ((v >> k) & 1) << (n - 1 - (i + 1 + k));
      if (f(z) != x) continue;
      if (free == 0) {
        closed_yes = true;
        break;
      }
      std::vector<uint32_t> lits;
      for (unsigned k = 0; k < free; ++k)
        lits.push_back(((v >> k) & 1) ? ins[k] : b.gnot(ins[k]));
      sat.push_back(b.gand(lits));
    }
    if (free == 0) return b.take(b.konst(closed_yes ? 1 : 0));
    return b.take(b.gor(sat));
  };
  m.output = [](const Instance& inst, uint64_t, const std::vector<Bit>& replies) {
    unsigned n = inst.func("f").in_bits;
    uint64_t y = 0;
    for (unsigned j = 0; j < n && j < replies.size(); ++j)
      y |= static_cast<uint64_t>(replies[j] ? 0 : 1) << (n - 1 - j);
    return y;
  };
  return m;
}

void ensure_catalog_machines() {
  static const bool done = [] {
    register_pnp_machine(make_canon("wlc_canon_G", true));
    register_pnp_machine(make_canon("wlc_canon_F", false));
    register_pnp_machine(make_canon("wsc_canon_F", true));
    register_pnp_machine(make_canon("wsc_canon_G", false));
    register_pnp_machine(make_wp_inverse_search());
    return true;
  }();
  (void)done;
}

// Points at a refutable NO reply in either recorded run of a machine-pair
// pigeonhole tuple, if there is one; {0,0,0} otherwise (then the tuple is
// already rejected or genuinely honest).
std::optional<std::pair<unsigned, uint64_t>> blame_run(const PnpMachine& m, const Instance& t,
                                                       uint64_t x, const PnpRun& run,
                                                       unsigned wbits) {
  for (unsigned idx = 0; idx < run.replies.size(); ++idx) {
    if (run.replies[idx]) continue;
    std::vector<Bit> pre(run.replies.begin(), run.replies.begin() + idx);
    Circuit q = m.query(t, x, pre);
    for (uint64_t w = 0; w <= mask_bits(wbits); ++w)
      if (query_satisfied(q, w)) return {{idx, w}};
  }
  return std::nullopt;
}

Solution rwpp2_blame(const Instance& t, const Solution& y) {
  const PnpMachine& fm = pnp_machine(t.tag("F"));
  const PnpMachine& gm = pnp_machine(t.tag("G"));
  unsigned tg = gm.queries(t);
  uint64_t hole = y[0];
  PnpRun grun = pnp_run_from_fields(gm, t, hole, y.data() + 1);
  if (!pnp_run_valid(gm, t, hole, grun)) return {0, 0, 0};
  uint64_t pigeon = grun.output;
  PnpRun frun = pnp_run_from_fields(fm, t, pigeon, y.data() + 1 + 2 * tg);
  if (!pnp_run_valid(fm, t, pigeon, frun)) return {0, 0, 0};
  if (auto hit = blame_run(gm, t, hole, grun, gm.witness_bits(t)))
    return {0, hit->first, hit->second};
  if (auto hit = blame_run(fm, t, pigeon, frun, fm.witness_bits(t)))
    return {1, hit->first, hit->second};
  return {0, 0, 0};
}

// --- deterministic corpora -----------------------------------------------------

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(uint64_t seed) : eng(seed) {}
  uint64_t bits(unsigned b) { return eng() & mask_bits(b); }
  uint64_t below(uint64_t m) { return eng() % m; }  // desk scale; bias immaterial
};

uint64_t sub_seed(uint64_t seed, unsigned i) {
  return seed * 0x9e3779b97f4a7c15ull + i + 1;
}

Func rand_func(Rng& r, unsigned in, unsigned out) {
  std::vector<uint64_t> tab(pow2(in));
  for (auto& v : tab) v = r.bits(out);
  return Func::from_table(in, out, tab);
}

using CorpusFn = std::function<std::vector<Instance>(uint64_t, unsigned)>;

CorpusFn corpus_of(std::vector<unsigned> sizes, Instance (*make)(Rng&, unsigned)) {
  return [sizes, make](uint64_t seed, unsigned count) {
    std::vector<Instance> out;
    for (unsigned i = 0; i < count; ++i) {
      Rng r(sub_seed(seed, i));
      out.push_back(make(r, sizes[i % sizes.size()]));
    }
    return out;
  };
}

Instance make_ln_inst(Rng& r, unsigned n) {
  std::vector<uint64_t> tab(pow2(n));
  for (auto& v : tab) v = r.bits(1);
  uint64_t x = r.below(pow2(n));
  tab[x] = 1;
  Instance u;
  u.problem = "least_number";
  u.n = n;
  u.funcs["S"] = Func::from_table(n, 1, tab);
  u.scalars["x"] = x;
  return u;
}

Instance make_localopt_inst(Rng& r, unsigned n) {
  std::vector<uint64_t> tab(pow2(n));
  for (auto& v : tab) v = r.bits(1);
  tab[pow2(n) - 1] = 1;
  Instance u;
  u.problem = "localopt";
  u.n = n;
  u.funcs["S"] = Func::from_table(n, 1, tab);
  u.funcs["N"] = rand_func(r, n, n);
  return u;
}

Instance make_empty_inst(Rng& r, unsigned n) {
  Instance u;
  u.problem = "empty";
  u.n = n;
  u.funcs["f"] = rand_func(r, n, n);
  return u;
}

Instance make_left_pigeon_inst(Rng& r, unsigned n) {
  std::vector<uint64_t> tab(pow2(n));
  for (auto& v : tab) v = r.below(pow2(n) - 1);
  Instance u;
  u.problem = "left_pigeon";
  u.n = n;
  u.funcs["f"] = Func::from_table(n, n, tab);
  u.funcs["g"] = rand_func(r, n, n);
  return u;
}

Instance make_dwp_inst(Rng& r, unsigned n) {
  Instance u;
  u.problem = "dual_weak_pigeon";
  u.n = n;
  u.funcs["f"] = rand_func(r, n, n + 1);
  return u;
}

Instance make_rwp_inst(Rng& r, unsigned n) {
  Instance u;
  u.problem = "retraction_weak_pigeon";
  u.n = n;
  u.funcs["f"] = rand_func(r, n, n + 1);
  u.funcs["g"] = rand_func(r, n + 1, n);
  return u;
}

Instance make_wp_inst(Rng& r, unsigned n) {
  Instance u;
  u.problem = "weak_pigeon";
  u.n = n;
  u.funcs["f"] = rand_func(r, n, n - 1);
  return u;
}

Instance make_min_inst(Rng& r, unsigned n) {
  Instance u;
  u.problem = "min";
  u.n = n;
  u.funcs["R"] = rand_func(r, 2 * n, 1);
  return u;
}

Instance make_ramsey_inst(Rng& r, unsigned n) {
  Instance u;
  u.problem = "ramsey";
  u.n = n;
  u.funcs["E"] = rand_func(r, 2 * n, 1);
  return u;
}

Instance make_choice_inst(Rng& r, const std::string& problem, unsigned n, unsigned w) {
  Instance u;
  u.problem = problem;
  u.n = n;
  for (unsigned i = 0; i + 1 < n; ++i)
    u.funcs["P" + std::to_string(i)] = rand_func(r, (i + 2) * w, 1);
  return u;
}

Instance make_wlc_inst(Rng& r, unsigned n) {
  return make_choice_inst(r, "weak_long_choice", n, n + 1);
}

Instance make_wsc_inst(Rng& r, unsigned n) {
  return make_choice_inst(r, "weak_short_choice", n, bits_for_count(pow2(n - 1) - 2));
}

Instance make_pnp_bsl_inst(Rng& r, unsigned n) {
  std::vector<uint64_t> tab(pow2(n));
  for (auto& v : tab) v = r.bits(1);
  tab[r.below(pow2(n))] = 1;
  Instance u;
  u.problem = "pnp";
  u.n = n;
  u.tags["machine"] = "binary_search_least";
  u.funcs["S"] = Func::from_table(n, 1, tab);
  u.scalars["x"] = 0;
  return u;
}

Instance with_random_chk(Rng& r, const Tfs2Problem& base, Instance inst) {
  unsigned yb = shape_bits(base.y_shape(inst)), zb = shape_bits(base.z_shape(inst));
  std::vector<uint64_t> tab(pow2(yb));
  for (auto& v : tab) v = r.bits(zb);
  return checkable_instance(base, inst, table_multicircuit(yb, zb, tab));
}

Instance make_chk_ln_inst(Rng& r, unsigned n) {
  return with_random_chk(r, tfs2("least_number"), make_ln_inst(r, n));
}

Instance make_chk_empty_inst(Rng& r, unsigned n) {
  return with_random_chk(r, tfs2("empty"), make_empty_inst(r, n));
}

Instance make_chk_dwp_inst(Rng& r, unsigned n) {
  return with_random_chk(r, tfs2("dual_weak_pigeon"), make_dwp_inst(r, n));
}

// --- entry construction helpers -----------------------------------------------

CatalogEntry mo_entry(ManyOneReduction red, CorpusFn corpus, unsigned cap_bits = 24) {
  CatalogEntry e;
  e.name = red.name;
  e.many_one = std::move(red);
  e.corpus = std::move(corpus);
  e.cap_bits = cap_bits;
  return e;
}

CatalogEntry cx_entry(CxReduction red, CorpusFn corpus, unsigned cap_bits = 24) {
  CatalogEntry e;
  e.name = red.name;
  e.cx = std::move(red);
  e.corpus = std::move(corpus);
  e.cap_bits = cap_bits;
  return e;
}

// --- the least-number / oracle-machine pair ------------------------------------

Instance ln_pnp_instance(const Instance& u) {
  Instance t = u;
  t.problem = "pnp";
  t.tags["machine"] = "binary_search_least";
  return t;
}

// The binary-search machine wires witness input w<j> to candidate bit j
// counted from the most significant end, so a concrete member value packs
// with its bits reversed.
uint64_t bsl_pack_witness(uint64_t v, unsigned n) {
  uint64_t w = 0;
  for (unsigned j = 0; j < n; ++j) w |= ((v >> (n - 1 - j)) & 1) << j;
  return w;
}

CatalogEntry entry_leastnumber_to_pnp() {
  CxReduction red;
  red.name = "cxred_leastnumber_to_pnp";
  red.tfs2_source = tfs2("least_number");
  red.target = tfs2("pnp");
  red.f = ln_pnp_instance;
  red.g = [](const Instance& u, const Solution& y) {
    Instance t = ln_pnp_instance(u);
    const PnpMachine& m = pnp_machine("binary_search_least");
    std::vector<Bit> replies;
    for (unsigned i = 0; i < u.n; ++i) replies.push_back(static_cast<Bit>(y[i] & 1));
    return Solution{m.output(t, u.scalar_or("x", 0), replies)};
  };
  red.h = [](const Instance& u, const Solution& y, const Solution& w) -> Solution {
    Instance t = ln_pnp_instance(u);
    const PnpMachine& m = pnp_machine("binary_search_least");
    unsigned n = u.n;
    uint64_t x = u.scalar_or("x", 0);
    PnpRun run = pnp_run_from_fields(m, t, x, y.data());
    if (!pnp_run_valid(m, t, x, run)) return {0, 0};
    uint64_t claimed = run.output;
    const Func& s = u.func("S");
    // Fast path: a smaller member pinpoints the first dishonest NO, at the
    // highest bit where it sits below the claimed least.
    if (!w.empty() && s(w[0]) == 1 && w[0] < claimed) {
      unsigned i = 0;
      while (((w[0] >> (n - 1 - i)) & 1) == ((claimed >> (n - 1 - i)) & 1)) ++i;
      uint64_t wit = bsl_pack_witness(w[0], n);
      if (check_pnp_counterexample(m, t, x, run, i, wit)) return {i, wit};
    }
    for (unsigned idx = 0; idx < n; ++idx)
      for (uint64_t wit = 0; wit <= mask_bits(n); ++wit)
        if (check_pnp_counterexample(m, t, x, run, idx, wit)) return {idx, wit};
    return {0, 0};
  };
  return cx_entry(std::move(red), corpus_of({2, 3}, make_ln_inst));
}

// The reverse direction encodes a whole machine run as one number: the
// complement of its packed fields.  Membership means the run replays validly
// (YES answers witnessed, NO slots zero), so the all-NO run is always a
// member and swapping a refuted NO to a witnessed YES moves strictly
// downward, i.e. toward the least member.
Instance pnp_ln_instance(const Instance& u) {
  const PnpMachine& m = pnp_machine(u.tag("machine"));
  unsigned t = m.queries(u), k = m.witness_bits(u);
  unsigned total = t * (1 + k);
  if (total == 0 || total > 16)
    throw std::runtime_error("machine run encoding too wide to tabulate");
  uint64_t x = u.scalar_or("x", 0);
  Shape rs = pnp_run_shape(t, k);
  std::vector<uint64_t> tab(pow2(total));
  for (uint64_t v = 0; v < tab.size(); ++v) {
    Solution fields = unpack_solution(rs, ~v & mask_bits(total));
    PnpRun run = pnp_run_from_fields(m, u, x, fields.data());
    tab[v] = pnp_run_valid(m, u, x, run) ? 1 : 0;
  }
  Instance out;
  out.problem = "least_number";
  out.n = total;
  out.funcs["S"] = Func::from_table(total, 1, tab);
  out.scalars["x"] = mask_bits(total);
  return out;
}

CatalogEntry entry_pnp_to_leastnumber() {
  CxReduction red;
  red.name = "cxred_pnp_to_leastnumber";
  red.tfs2_source = tfs2("pnp");
  red.target = tfs2("least_number");
  red.f = pnp_ln_instance;
  red.g = [](const Instance& u, const Solution& y) {
    const PnpMachine& m = pnp_machine(u.tag("machine"));
    unsigned t = m.queries(u), k = m.witness_bits(u);
    return unpack_solution(pnp_run_shape(t, k), ~y[0] & mask_bits(t * (1 + k)));
  };
  red.h = [](const Instance& u, const Solution& y, const Solution& w) -> Solution {
    const PnpMachine& m = pnp_machine(u.tag("machine"));
    unsigned t = m.queries(u), k = m.witness_bits(u);
    unsigned total = t * (1 + k);
    uint64_t x = u.scalar_or("x", 0);
    Shape rs = pnp_run_shape(t, k);
    Solution fields = unpack_solution(rs, ~y[0] & mask_bits(total));
    PnpRun run = pnp_run_from_fields(m, u, x, fields.data());
    if (!pnp_run_valid(m, u, x, run)) return {0};
    unsigned idx = static_cast<unsigned>(w[0]);
    if (!check_pnp_counterexample(m, u, x, run, idx, w[1])) return {0};
    // Flipping the refuted NO into a witnessed YES and resetting the tail to
    // all-NO stays valid and strictly lowers the encoding.
    Solution flipped = fields;
    flipped[idx] = 1;
    flipped[t + idx] = w[1];
    for (unsigned j = idx + 1; j < t; ++j) {
      flipped[j] = 0;
      flipped[t + j] = 0;
    }
    return {~pack_solution(rs, flipped) & mask_bits(total)};
  };
  return cx_entry(std::move(red), corpus_of({1, 2}, make_pnp_bsl_inst));
}

// --- renamings between the checkable problems and their standard forms ---------

CatalogEntry entry_chk_ln_to_localopt() {
  ManyOneReduction red;
  red.name = "checkable_leastnumber_to_localopt";
  red.source = checkable(tfs2("least_number"));
  red.target = tfnp("localopt");
  red.f = [](const Instance& u) {
    unsigned n = u.n;
    Instance t;
    t.problem = "localopt";
    t.n = n;
    t.funcs["S"] = union_with_top(u.func("S"), n);
    if (u.func("S")(mask_bits(n)) == 1)
      t.funcs["N"] = Func::from_circuit(full_mc(u.func("chk")));
    else
      // The artificial top member escapes to the known member x, which sits
      // strictly below it, so the top never counts as a local optimum.
      t.funcs["N"] = chk_with_top_escape(u.func("chk"), n, u.scalar_or("x", 0));
    return t;
  };
  red.g = [](const Instance&, const Solution& y) { return y; };
  return mo_entry(std::move(red), corpus_of({2, 3}, make_chk_ln_inst));
}

CatalogEntry entry_localopt_to_chk_ln() {
  ManyOneReduction red;
  red.name = "localopt_to_checkable_leastnumber";
  red.source = tfnp("localopt");
  red.target = checkable(tfs2("least_number"));
  red.f = [](const Instance& u) {
    Instance t;
    t.problem = "least_number";
    t.n = u.n;
    t.funcs["S"] = u.func("S");
    t.scalars["x"] = mask_bits(u.n);  // a member by the localopt convention
    return checkable_instance(tfs2("least_number"), t, full_mc(u.func("N")));
  };
  red.g = [](const Instance&, const Solution& y) { return y; };
  return mo_entry(std::move(red), corpus_of({2, 3}, make_localopt_inst));
}

CatalogEntry entry_chk_empty_to_leftpigeon() {
  ManyOneReduction red;
  red.name = "checkable_empty_to_leftpigeon";
  red.source = checkable(tfs2("empty"));
  red.target = tfnp("left_pigeon");
  red.f = [](const Instance& u) {
    Instance t;
    t.problem = "left_pigeon";
    t.n = u.n;
    t.funcs["f"] = clamp_top_to_zero(u.func("chk"), u.n);
    t.funcs["g"] = u.func("f");
    return t;
  };
  red.g = [](const Instance&, const Solution& y) { return y; };
  return mo_entry(std::move(red), corpus_of({2, 3}, make_chk_empty_inst));
}

CatalogEntry entry_leftpigeon_to_chk_empty() {
  ManyOneReduction red;
  red.name = "leftpigeon_to_checkable_empty";
  red.source = tfnp("left_pigeon");
  red.target = checkable(tfs2("empty"));
  red.f = [](const Instance& u) {
    Instance t;
    t.problem = "empty";
    t.n = u.n;
    t.funcs["f"] = u.func("g");
    return checkable_instance(tfs2("empty"), t, full_mc(u.func("f")));
  };
  red.g = [](const Instance&, const Solution& y) { return y; };
  return mo_entry(std::move(red), corpus_of({2, 3}, make_left_pigeon_inst));
}

CatalogEntry entry_chk_dwp_to_rwp() {
  ManyOneReduction red;
  red.name = "checkable_dualweakpigeon_to_rwp";
  red.source = checkable(tfs2("dual_weak_pigeon"));
  red.target = tfnp("retraction_weak_pigeon");
  red.f = [](const Instance& u) {
    Instance t;
    t.problem = "retraction_weak_pigeon";
    t.n = u.n;
    t.funcs["f"] = u.func("f");
    t.funcs["g"] = u.func("chk");
    return t;
  };
  red.g = [](const Instance&, const Solution& y) { return y; };
  return mo_entry(std::move(red), corpus_of({2, 3}, make_chk_dwp_inst));
}

CatalogEntry entry_rwp_to_chk_dwp() {
  ManyOneReduction red;
  red.name = "rwp_to_checkable_dualweakpigeon";
  red.source = tfnp("retraction_weak_pigeon");
  red.target = checkable(tfs2("dual_weak_pigeon"));
  red.f = [](const Instance& u) {
    Instance t;
    t.problem = "dual_weak_pigeon";
    t.n = u.n;
    t.funcs["f"] = u.func("f");
    return checkable_instance(tfs2("dual_weak_pigeon"), t, full_mc(u.func("g")));
  };
  red.g = [](const Instance&, const Solution& y) { return y; };
  return mo_entry(std::move(red), corpus_of({2, 3}, make_rwp_inst));
}

// --- colouring and collision problems into weak long choice --------------------

CatalogEntry entry_ramsey_to_wlc() {
  ManyOneReduction red;
  red.name = "red_ramsey_to_wlc";
  red.source = tfnp("ramsey");
  red.target = tfnp("weak_long_choice");
  red.f = [](const Instance& u) {
    unsigned nodes_bits = u.n;          // graph on [2^nodes_bits]
    unsigned n = nodes_bits - 1;        // choice size; universe 2^{n+1} = nodes
    unsigned w = nodes_bits;
    Instance t;
    t.problem = "weak_long_choice";
    t.n = n;
    for (unsigned i = 0; i + 1 < n; ++i) {
      unsigned ib = (i + 2) * w;
      std::vector<uint64_t> tab(pow2(ib));
      for (uint64_t v = 0; v < tab.size(); ++v) {
        uint64_t z = v & mask_bits(w);
        uint64_t xi = (v >> w) & mask_bits(w);  // last element of the prefix
        tab[v] = ramsey_colour(u, xi, z);
      }
      t.funcs["P" + std::to_string(i)] = Func::from_table(ib, 1, tab);
    }
    return t;
  };
  red.g = [](const Instance& u, const Solution& y) {
    unsigned n = u.n - 1;
    unsigned target = (u.n + 1) / 2;  // required monochromatic set size
    // Majority choice bit; every surviving index i pairs monochromatically
    // with every later survivor and with the final element.
    unsigned zeros = 0;
    for (unsigned i = 0; i + 1 < n; ++i)
      if (y[i] == 0) ++zeros;
    uint64_t c = (2 * zeros >= n - 1) ? 0 : 1;
    Solution out;
    for (unsigned i = 0; i + 1 < n && out.size() + 1 < target; ++i)
      if (y[i] == c) out.push_back(y[(n - 1) + i]);
    out.push_back(y[(n - 1) + n]);
    return out;
  };
  return mo_entry(std::move(red), corpus_of({3, 4}, make_ramsey_inst));
}

CatalogEntry entry_weakpigeon_to_wlc() {
  ManyOneReduction red;
  red.name = "red_weakpigeon_to_wlc";
  red.source = tfnp("weak_pigeon");
  red.target = tfnp("weak_long_choice");
  // Amplified map: first shrink n+1 bits to n by threading the low bit past
  // f, then apply f again; two elements sharing all choice bits collide.
  red.f = [](const Instance& u) {
    unsigned n = u.n, w = n + 1;
    const Func f = u.func("f");
    auto wide = [&](uint64_t z) { return f((f(z >> 1) << 1) | (z & 1)); };
    Instance t;
    t.problem = "weak_long_choice";
    t.n = n;
    for (unsigned i = 0; i + 1 < n; ++i) {
      unsigned ib = (i + 2) * w;
      std::vector<uint64_t> tab(pow2(ib));
      for (uint64_t v = 0; v < tab.size(); ++v) tab[v] = (wide(v & mask_bits(w)) >> i) & 1;
      t.funcs["P" + std::to_string(i)] = Func::from_table(ib, 1, tab);
    }
    return t;
  };
  red.g = [](const Instance& u, const Solution& y) -> Solution {
    unsigned n = u.n;
    const Func& f = u.func("f");
    auto half = [&](uint64_t z) { return (f(z >> 1) << 1) | (z & 1); };
    uint64_t x = y[(n - 1) + (n - 1)], xp = y[(n - 1) + n];  // last two elements
    if (half(x) != half(xp)) return {half(x), half(xp)};
    return {x >> 1, xp >> 1};
  };
  return mo_entry(std::move(red), corpus_of({2, 3}, make_wp_inst));
}

// --- weak long choice into the machine pigeonhole ------------------------------

Instance wlc_rwpp2_instance(const Instance& u) {
  ensure_catalog_machines();
  Instance t = u;
  t.problem = "rwpp2";
  t.tags["choice_kind"] = "wlc";
  t.tags["F"] = "wlc_canon_F";
  t.tags["G"] = "wlc_canon_G";
  return t;
}

CatalogEntry entry_wlc_to_rwpp2() {
  CxReduction red;
  red.name = "cxred_wlc_to_rwpp2";
  red.tfnp_source = tfnp("weak_long_choice");
  red.target = tfs2("rwpp2");
  red.f = wlc_rwpp2_instance;
  red.g = [](const Instance& u, const Solution& y) {
    Instance t = wlc_rwpp2_instance(u);
    CanonParams pr = canon_params(t);
    std::vector<Bit> replies;
    for (unsigned i = 0; i < pr.m * pr.w; ++i)
      replies.push_back(static_cast<Bit>(y[1 + i] & 1));
    CanonSim s = canon_scan(t, pr, y[0], replies);
    if (!s.full) return zero_of_shape(tfnp("weak_long_choice").sol_shape(u));
    // A completed scan is a solution outright: the choice bits were read off
    // the hole itself and every element passed the membership check.
    Solution out(s.b.begin(), s.b.end());
    out.insert(out.end(), s.a.begin(), s.a.end());
    out.push_back(y[0]);
    return out;
  };
  red.h = [](const Instance& u, const Solution& y, const Solution&) {
    return rwpp2_blame(wlc_rwpp2_instance(u), y);
  };
  return cx_entry(std::move(red), corpus_of({2}, make_wlc_inst));
}

// --- the pigeonhole amplification entry -----------------------------------------

TfnpProblem make_rwp_wide() {
  TfnpProblem p;
  p.name = "rwp_wide";
  p.validate = [](const Instance& inst) {
    if (inst.n < 1 || inst.n > 8) throw std::runtime_error("instance: size parameter out of range");
    const Func& f = inst.func("F");
    const Func& g = inst.func("G");
    if (f.in_bits != inst.n || f.out_bits != 2 * inst.n || g.in_bits != 2 * inst.n ||
        g.out_bits != inst.n)
      throw std::runtime_error("instance: F and G must map n bits to 2n and back");
  };
  p.sol_shape = [](const Instance& inst) { return Shape{2 * inst.n}; };
  p.check = [](const Instance& inst, const Solution& y) {
    if (!shape_fits(Shape{2 * inst.n}, y)) return false;
    return inst.func("F")(inst.func("G")(y[0])) != y[0];
  };
  TfnpProblem base = p;
  p.brute = [base](const Instance& inst) { return brute_first(base, inst); };
  return p;
}

CatalogEntry entry_amplify_rwpp() {
  ManyOneReduction red;
  red.name = "amplify_rwpp";
  red.source = tfnp("retraction_weak_pigeon");
  red.target = make_rwp_wide();
  red.f = [](const Instance& u) {
    unsigned n = u.n;
    const Func& f = u.func("f");
    const Func& g = u.func("g");
    std::vector<uint64_t> ftab(pow2(n)), gtab(pow2(2 * n));
    for (uint64_t x = 0; x < ftab.size(); ++x) ftab[x] = ladder_up(f, n, x);
    for (uint64_t y = 0; y < gtab.size(); ++y) gtab[y] = ladder_down(g, n, y);
    Instance t;
    t.problem = "rwp_wide";
    t.n = n;
    t.funcs["F"] = Func::from_table(n, 2 * n, ftab);
    t.funcs["G"] = Func::from_table(2 * n, n, gtab);
    return t;
  };
  red.g = [](const Instance& u, const Solution& y) {
    return Solution{ladder_defect(u.func("f"), u.func("g"), u.n, y[0])};
  };
  return mo_entry(std::move(red), corpus_of({2, 3}, make_rwp_inst));
}

// --- retraction pigeonhole into weak short choice ------------------------------

// Enough ladder steps that every hole slab outnumbers the elements a
// candidate can name: 2^{steps-1} > n+1.
unsigned wsc_ladder_steps(unsigned n) {
  unsigned c = 1;
  while (pow2(c - 1) <= n + 1) ++c;
  return c;
}

Instance rwp_wsc_instance(const Instance& u) {
  unsigned ns = u.n, c = wsc_ladder_steps(ns), nn = ns + 2;
  unsigned w = bits_for_count(pow2(nn - 1) - 2);
  const Func f = u.func("f");
  Instance t;
  t.problem = "weak_short_choice";
  t.n = nn;
  for (unsigned i = 0; i + 1 < nn; ++i) {
    unsigned ib = (i + 2) * w;
    std::vector<uint64_t> tab(pow2(ib));
    for (uint64_t v = 0; v < tab.size(); ++v) {
      uint64_t z = v & mask_bits(w);
      if (z >= pow2(ns)) z = 0;  // out-of-domain universe elements read as 0
      tab[v] = (ladder_up(f, c, z) >> i) & 1;
    }
    t.funcs["P" + std::to_string(i)] = Func::from_table(ib, 1, tab);
  }
  return t;
}

struct RwpWscCase {
  bool vacuous = false;  // candidate malformed; already rejected by rel
  bool defect = false;   // source solution recovered from the ladder
  uint64_t value = 0;    // defect value or the unnamed extending element
};

RwpWscCase rwp_wsc_core(const Instance& u, const Solution& y) {
  unsigned ns = u.n, c = wsc_ladder_steps(ns), m = ns + 1;
  RwpWscCase out;
  uint64_t k = y[0];
  if (k + 1 > m) {
    out.vacuous = true;
    return out;
  }
  for (unsigned i = 0; i < m; ++i)
    if (i > k && (y[1 + i] != 0 || y[1 + m + i] != 0)) {
      out.vacuous = true;
      return out;
    }
  const Func& f = u.func("f");
  const Func& g = u.func("g");
  // The slab of amplified holes whose low bits spell the choice bits, minus
  // the images of the named elements, is nonempty by the step count.
  uint64_t fixed = 0;
  for (unsigned i = 0; i <= k; ++i) fixed |= y[1 + i] << i;
  std::set<uint64_t> used;
  for (unsigned i = 0; i <= k; ++i) {
    uint64_t ai = y[1 + m + i];
    if (ai < pow2(ns)) used.insert(ladder_up(f, c, ai));
  }
  unsigned hbits = ns + c;
  uint64_t target = 0;
  bool found = false;
  for (uint64_t hi = 0; hi < pow2(hbits - (k + 1)); ++hi) {
    uint64_t cand = (hi << (k + 1)) | fixed;
    if (!used.count(cand)) {
      target = cand;
      found = true;
      break;
    }
  }
  if (!found) throw std::logic_error("hole slab exhausted despite the counting bound");
  uint64_t x = ladder_down(g, c, target);
  if (ladder_up(f, c, x) != target) {
    out.defect = true;
    out.value = ladder_defect(f, g, c, target);
    return out;
  }
  // x maps onto the slab, matches every choice bit, and differs from every
  // named element: it extends the sequence, refuting the candidate.
  out.value = x;
  return out;
}

CatalogEntry entry_rwpp_to_wsc() {
  CxReduction red;
  red.name = "cxred_rwpp_to_wsc";
  red.tfnp_source = tfnp("retraction_weak_pigeon");
  red.target = tfs2("weak_short_choice");
  red.f = rwp_wsc_instance;
  red.g = [](const Instance& u, const Solution& y) -> Solution {
    RwpWscCase c = rwp_wsc_core(u, y);
    if (c.defect) return {c.value};
    return {0};
  };
  red.h = [](const Instance& u, const Solution& y, const Solution&) -> Solution {
    RwpWscCase c = rwp_wsc_core(u, y);
    if (c.vacuous || c.defect) return {0};
    return {c.value};
  };
  return cx_entry(std::move(red), corpus_of({2}, make_rwp_inst));
}

// --- weak short choice into the machine pigeonhole -----------------------------

Instance wsc_rwpp2_instance(const Instance& u) {
  ensure_catalog_machines();
  Instance t = u;
  t.problem = "rwpp2";
  t.n = u.n - 1;
  t.tags["choice_kind"] = "wsc";
  t.tags["F"] = "wsc_canon_F";
  t.tags["G"] = "wsc_canon_G";
  return t;
}

CatalogEntry entry_wsc_to_rwpp2() {
  CxReduction red;
  red.name = "cxred_wsc_to_rwpp2";
  red.tfs2_source = tfs2("weak_short_choice");
  red.target = tfs2("rwpp2");
  red.f = wsc_rwpp2_instance;
  red.g = [](const Instance& u, const Solution& y) {
    Instance t = wsc_rwpp2_instance(u);
    CanonParams pr = canon_params(t);
    Shape ys = tfs2("weak_short_choice").y_shape(u);
    uint64_t hole = y[0];
    if (hole > pow2(pr.m + 1) - 2) return zero_of_shape(ys);
    std::vector<Bit> replies;
    for (unsigned i = 0; i < pr.m * pr.w; ++i)
      replies.push_back(static_cast<Bit>(y[1 + i] & 1));
    CanonSim s = canon_rebuild(t, pr, dec_bits(hole), replies);
    if (!s.error) return zero_of_shape(ys);
    // A failed search is an unextendable prefix: the elements found so far
    // together with their choice bits.
    uint64_t k = s.a.size() - 1;
    Solution out{k};
    for (unsigned i = 0; i < pr.m; ++i) out.push_back(i < s.b.size() ? s.b[i] : 0);
    for (unsigned i = 0; i < pr.m; ++i) out.push_back(i < s.a.size() ? s.a[i] : 0);
    return out;
  };
  red.h = [](const Instance& u, const Solution& y, const Solution&) {
    return rwpp2_blame(wsc_rwpp2_instance(u), y);
  };
  return cx_entry(std::move(red), corpus_of({3}, make_wsc_inst));
}

// --- total orders and tournaments ----------------------------------------------

CatalogEntry entry_min_to_tournament() {
  CxReduction red;
  red.name = "cxred_min_to_tournament";
  red.tfs2_source = tfs2("min");
  red.target = tfs2("tournament");
  red.f = [](const Instance& u) {
    Instance t = u;
    t.problem = "tournament";
    t.funcs["B"] = u.func("R");
    return t;
  };
  red.g = [](const Instance& u, const Solution& y) -> Solution {
    unsigned n = u.n;
    const Func& rf = u.func("R");
    auto rel = [&](uint64_t a, uint64_t b) { return rf(pack_args({a, b}, n)) == 1; };
    auto beats = [&](uint64_t a, uint64_t b) {
      if (a == b) return false;
      return a < b ? rel(a, b) : !rel(b, a);
    };
    std::vector<uint64_t> s(y.begin(), y.end());
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    // Any order defect inside the claimed dominating set survives every
    // challenge, so those come first.
    for (uint64_t a : s)
      if (!rel(a, a)) return {1, a, a, 0};
    for (uint64_t a : s)
      for (uint64_t b : s) {
        if (a >= b) continue;
        if (!rel(a, b) && !rel(b, a)) return {1, a, b, 0};
        if (rel(a, b) && rel(b, a)) return {2, a, b, 0};
      }
    for (uint64_t a : s)
      for (uint64_t b : s)
        for (uint64_t cc : s)
          if (rel(a, b) && rel(b, cc) && !rel(a, cc)) return {3, a, b, cc};
    // The set is linearly ordered, so it has a least element.
    uint64_t least = 0;
    bool have = false;
    for (uint64_t cand : s) {
      bool ok = true;
      for (uint64_t b : s)
        if (!rel(cand, b)) {
          ok = false;
          break;
        }
      if (ok) {
        least = cand;
        have = true;
        break;
      }
    }
    if (!have) throw std::logic_error("linearly ordered set without a least element");
    // If something below the least claim is still covered by the set, the
    // covering edge exposes an order defect; if it is uncovered, the least
    // claim stands and the challenge refutes the dominating set instead.
    for (uint64_t z = 0; z < pow2(n); ++z) {
      if (rel(least, z)) continue;
      for (uint64_t sv : s) {
        if (!beats(sv, z)) continue;
        if (sv < z || rel(sv, z)) return {3, least, sv, z};
        return {1, z, sv, 0};
      }
      return {0, least, 0, 0};
    }
    return {0, least, 0, 0};
  };
  red.h = [](const Instance& u, const Solution& y, const Solution&) -> Solution {
    unsigned n = u.n;
    const Func& rf = u.func("R");
    auto rel = [&](uint64_t a, uint64_t b) { return rf(pack_args({a, b}, n)) == 1; };
    auto beats = [&](uint64_t a, uint64_t b) {
      if (a == b) return false;
      return a < b ? rel(a, b) : !rel(b, a);
    };
    for (uint64_t z = 0; z < pow2(n); ++z) {
      bool covered = false;
      for (uint64_t sv : y)
        if (sv == z || beats(sv, z)) {
          covered = true;
          break;
        }
      if (!covered) return {z};
    }
    return {0};
  };
  return cx_entry(std::move(red), corpus_of({2, 3}, make_min_inst));
}

CatalogEntry entry_leastnumber_to_min() {
  CxReduction red;
  red.name = "cxred_leastnumber_to_min";
  red.tfs2_source = tfs2("least_number");
  red.target = tfs2("min");
  // Key order (non-membership, value): a genuine total order putting members
  // first, so only least-element claims can ever be challenged.
  red.f = [](const Instance& u) {
    unsigned n = u.n;
    CircuitBuilder b;
    std::vector<uint32_t> as = make_inputs(b, n, 0);
    std::vector<uint32_t> bs = make_inputs(b, n, n);
    MultiCircuit sm = full_mc(u.func("S"));
    uint32_t sa = b.embed(sm, wire_all(sm, as))[0];
    uint32_t sb = b.embed(sm, wire_all(sm, bs))[0];
    std::vector<uint32_t> ka{b.gnot(sa)};
    ka.insert(ka.end(), as.begin(), as.end());
    std::vector<uint32_t> kb{b.gnot(sb)};
    kb.insert(kb.end(), bs.begin(), bs.end());
    uint32_t le = b.gor({b.lt_vec(ka, kb), b.eq_vec(ka, kb)});
    Instance t;
    t.problem = "min";
    t.n = n;
    t.funcs["R"] = Func::from_circuit(b.take_multi({le}));
    return t;
  };
  red.g = [](const Instance& u, const Solution& y) -> Solution {
    if (y[0] == 0) return {y[1]};
    return {u.scalar_or("x", 0)};
  };
  red.h = [](const Instance& u, const Solution& y, const Solution& w) -> Solution {
    if (y[0] != 0 || y[2] != 0 || y[3] != 0) return {0};  // defect claims are vacuous
    uint64_t t = y[1];
    const Func& s = u.func("S");
    if (s(t) != 1) return {u.scalar_or("x", 0)};  // a member outranks any non-member
    if (!w.empty() && s(w[0]) == 1 && w[0] < t) return {w[0]};
    return {0};
  };
  return cx_entry(std::move(red), corpus_of({2, 3}, make_ln_inst));
}

// --- weak pigeonhole into the machine pigeonhole --------------------------------

Instance wp_rwpp2_instance(const Instance& u) {
  ensure_catalog_machines();
  Instance t;
  t.problem = "rwpp2";
  t.n = u.n - 1;
  t.tags["F"] = "wp_inverse_search";
  t.tags["G"] = "plain_G";
  t.funcs["G"] = u.func("f");
  t.funcs["f"] = u.func("f");
  return t;
}

CatalogEntry entry_weakpigeon_to_rwpp2() {
  CxReduction red;
  red.name = "cxred_weakpigeon_to_rwpp2";
  red.tfnp_source = tfnp("weak_pigeon");
  red.target = tfs2("rwpp2");
  red.f = wp_rwpp2_instance;
  red.g = [](const Instance& u, const Solution& y) -> Solution {
    Instance t = wp_rwpp2_instance(u);
    const PnpMachine& fm = pnp_machine("wp_inverse_search");
    uint64_t hole = y[0];
    uint64_t pigeon = u.func("f")(hole);
    PnpRun frun = pnp_run_from_fields(fm, t, pigeon, y.data() + 1);  // G asks nothing
    uint64_t found = frun.output;
    if (found != hole && u.func("f")(found) == u.func("f")(hole)) return {found, hole};
    return {0, 0};
  };
  red.h = [](const Instance& u, const Solution& y, const Solution&) {
    return rwpp2_blame(wp_rwpp2_instance(u), y);
  };
  return cx_entry(std::move(red), corpus_of({2, 3}, make_wp_inst));
}

// --- catalog assembly -----------------------------------------------------------

std::map<std::string, CatalogEntry>& entry_map() {
  static std::map<std::string, CatalogEntry> m = [] {
    std::map<std::string, CatalogEntry> r;
    auto put = [&r](CatalogEntry e) { r[e.name] = std::move(e); };
    put(entry_leastnumber_to_pnp());
    put(entry_pnp_to_leastnumber());
    put(entry_chk_ln_to_localopt());
    put(entry_localopt_to_chk_ln());
    put(entry_chk_empty_to_leftpigeon());
    put(entry_leftpigeon_to_chk_empty());
    put(entry_chk_dwp_to_rwp());
    put(entry_rwp_to_chk_dwp());
    put(entry_ramsey_to_wlc());
    put(entry_weakpigeon_to_wlc());
    put(entry_wlc_to_rwpp2());
    put(entry_amplify_rwpp());
    put(entry_rwpp_to_wsc());
    put(entry_wsc_to_rwpp2());
    put(entry_min_to_tournament());
    put(entry_leastnumber_to_min());
    put(entry_weakpigeon_to_rwpp2());
    for (CatalogEntry& e : detail::strategy_entries()) r[e.name] = std::move(e);
    for (CatalogEntry& e : detail::leaf_entries()) r[e.name] = std::move(e);
    return r;
  }();
  return m;
}

}  // namespace

const CatalogEntry& catalog_entry(const std::string& name) {
  auto& m = entry_map();
  auto it = m.find(name);
  if (it == m.end()) throw std::out_of_range("unknown catalog entry: " + name);
  return it->second;
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> out;
  for (const auto& kv : entry_map()) out.push_back(kv.first);
  return out;
}

ReductionReport verify_entry(const CatalogEntry& entry, uint64_t seed, unsigned count,
                             unsigned adversaries) {
  std::vector<Instance> corpus = entry.corpus(seed, count);
  if (entry.many_one) return verify_many_one(*entry.many_one, corpus, entry.cap_bits);
  if (entry.cx) return verify_cx(*entry.cx, corpus, entry.cap_bits);
  std::vector<uint64_t> seeds;
  for (unsigned i = 0; i < adversaries; ++i) seeds.push_back(sub_seed(seed, i));
  return verify_solver(*entry.solver, corpus, seeds);
}

}  // namespace owb
