#include "owb/strategies.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "owb/catalog.hpp"
#include "owb/enforce.hpp"
#include "owb/pnp.hpp"

namespace owb {

namespace {

uint64_t pow2(unsigned b) { return 1ull << b; }

uint64_t mask_bits(unsigned b) { return b >= 64 ? ~0ull : pow2(b) - 1; }

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

CorpusFn corpus_of(std::vector<unsigned> sizes, std::function<Instance(Rng&, unsigned)> make) {
  return [sizes, make](uint64_t seed, unsigned count) {
    std::vector<Instance> out;
    for (unsigned i = 0; i < count; ++i) {
      Rng r(sub_seed(seed, i));
      out.push_back(make(r, sizes[i % sizes.size()]));
    }
    return out;
  };
}

// A circuit view over exactly in_bits ordered free inputs; tabulates when the
// backing circuit happens to ignore some of them.
MultiCircuit full_mc(const Func& f) {
  MultiCircuit mc = f.as_multicircuit();
  if (mc.free_inputs().size() == f.in_bits) return mc;
  if (f.in_bits > 20) throw std::runtime_error("strategy: function too wide to tabulate");
  std::vector<uint64_t> tab(pow2(f.in_bits));
  for (uint64_t x = 0; x < tab.size(); ++x) tab[x] = f(x);
  return table_multicircuit(f.in_bits, f.out_bits, tab);
}

std::map<std::string, uint32_t> wire_all(const MultiCircuit& mc,
                                         const std::vector<uint32_t>& bits) {
  std::vector<std::string> names = mc.free_inputs();
  if (names.size() != bits.size()) throw std::logic_error("wire_all: arity mismatch");
  std::map<std::string, uint32_t> w;
  for (size_t i = 0; i < names.size(); ++i) w[names[i]] = bits[i];
  return w;
}

// Indicator circuit of a subset of [2^n].  Table construction declares all n
// inputs, so every subset of the same universe has an identical free-input
// set and the set algebra (unions, equality enforcement) lines up.
Circuit subset_of(unsigned n, const std::function<bool(uint64_t)>& member) {
  std::vector<uint64_t> tab(pow2(n));
  for (uint64_t x = 0; x < tab.size(); ++x) tab[x] = member(x) ? 1 : 0;
  return set_fn_eq(table_multicircuit(n, 1, tab), 1);
}

// --- pigeonhole amplification ladders (shared with the reduction catalog) ----

uint64_t ladder_up(const Func& f, unsigned steps, uint64_t x) {
  uint64_t z = x;
  for (unsigned i = 0; i < steps; ++i) z = (f(z >> i) << i) | (z & mask_bits(i));
  return z;
}

uint64_t ladder_down(const Func& g, unsigned steps, uint64_t y) {
  for (unsigned i = steps; i-- > 0;) y = (g(y >> i) << i) | (y & mask_bits(i));
  return y;
}

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

// --- witness constructors ----------------------------------------------------

FailureWitness split_witness(Circuit c, std::string var) {
  FailureWitness w;
  w.kind = FailureWitness::Kind::Split;
  w.c = std::move(c);
  w.var = std::move(var);
  return w;
}

FailureWitness base_witness(Circuit c) {
  FailureWitness w;
  w.kind = FailureWitness::Kind::Base;
  w.c = std::move(c);
  return w;
}

FailureWitness qbf_witness(FailureWitness::Kind k, Qbf f, Bit branch = 0) {
  FailureWitness w;
  w.kind = k;
  w.f = std::move(f);
  w.branch = branch;
  return w;
}

FailureWitness zero_witness(MultiCircuit mc, std::string w0) {
  FailureWitness w;
  w.kind = FailureWitness::Kind::Zero;
  w.mc = std::move(mc);
  w.w = std::move(w0);
  return w;
}

FailureWitness step_witness(MultiCircuit mc, std::string w0, uint64_t t) {
  FailureWitness w;
  w.kind = FailureWitness::Kind::Step;
  w.mc = std::move(mc);
  w.w = std::move(w0);
  w.t = t;
  return w;
}

// The claimed configuration at `hi` is known to differ from iterating the
// transition function; crossing search pins either a broken start or a broken
// step.  Asks O(log hi) configuration keys on the session.
FailureWitness localize_pspace(Session& s, const MultiCircuit& d, const std::string& w0,
                               uint64_t hi) {
  std::vector<std::vector<Bit>> truth{reply_config(w0)};
  for (uint64_t j = 0; j < hi; ++j) truth.push_back(d.mo_eval(truth.back()));
  auto pred = [&](uint64_t j) { return s.ask(pspace_key(d, w0, j)) == config_reply(truth[j]); };
  if (!pred(0)) return zero_witness(d, w0);
  return step_witness(d, w0, first_diff(0, hi, pred));
}

// Aborts an inner simulated run with a witness addressed to a specific outer
// protocol frame; nested simulations rethrow witnesses that are not theirs.
struct Escape {
  const void* owner;
  FailureWitness w;
};

// Runs enforcement goals in order; the first returned witness ends the run.
struct EnforceRunner {
  Session& s;
  std::optional<ProtocolResult> out;
  bool ok(const Enforceable& e) {
    if (out) return false;
    if (std::optional<FailureWitness> w = enforce(e, s)) out = ProtocolResult::failed(*w);
    return !out;
  }
};

Bit counting_lsb(const Reply& r) {
  return r.empty() ? 0 : static_cast<Bit>(r[0] & 1);
}

}  // namespace

// --- step machines -----------------------------------------------------------

MultiCircuit counting_step_machine(const Circuit& c) {
  std::vector<std::string> names = c.free_inputs();
  unsigned m = static_cast<unsigned>(names.size());
  unsigned len = 2 * m + 2;
  if (len > 16) throw std::runtime_error("counting machine: circuit too wide to tabulate");
  std::vector<uint64_t> tab(pow2(len));
  for (uint64_t cfg = 0; cfg < tab.size(); ++cfg) {
    uint64_t i = cfg >> (m + 1);
    uint64_t cnt = cfg & mask_bits(m + 1);
    if (i >= pow2(m)) {
      tab[cfg] = cfg;  // finished scanning: hold the configuration
      continue;
    }
    Bit v = c.eval_on(u64_to_assignment(names, i));
    tab[cfg] = ((i + 1) << (m + 1)) | ((cnt + v) & mask_bits(m + 1));
  }
  return table_multicircuit(len, len, tab);
}

unsigned qbf_eval_config_bits(unsigned k) { return 2 * k + 2; }

MultiCircuit qbf_eval_machine(const Qbf& f) {
  f.validate();
  if (!f.closed()) throw std::runtime_error("qbf machine: formula must be closed");
  unsigned k = static_cast<unsigned>(f.prefix.size());
  unsigned len = qbf_eval_config_bits(k);
  if (len > 16) throw std::runtime_error("qbf machine: prefix too deep to tabulate");
  std::vector<uint64_t> tab(pow2(len));
  for (uint64_t cfg = 0; cfg < tab.size(); ++cfg) {
    uint64_t t = cfg >> (k + 1);
    if (t >= pow2(k)) {
      tab[cfg] = cfg;  // all assignments consumed: hold the configuration
      continue;
    }
    Assignment a;
    for (unsigned q = 0; q < k; ++q)
      a[f.prefix[q].second] = static_cast<Bit>((t >> (k - 1 - q)) & 1);
    Bit v = f.matrix.eval_on(a);
    std::vector<Bit> stk(k);
    for (unsigned d = 0; d < k; ++d) stk[d] = static_cast<Bit>((cfg >> (k - d)) & 1);
    Bit r = static_cast<Bit>(cfg & 1);
    // each trailing 1 of t closes a subtree: fold the saved sibling value in,
    // innermost quantifier first
    unsigned done = 0;
    while (done < k && ((t >> done) & 1)) ++done;
    for (unsigned i = 0; i < done; ++i) {
      unsigned d = k - 1 - i;
      v = f.prefix[d].first == Quant::Exists ? static_cast<Bit>(stk[d] | v)
                                             : static_cast<Bit>(stk[d] & v);
    }
    if (done == k)
      r = v;
    else
      stk[k - 1 - done] = v;
    uint64_t out = (t + 1) << (k + 1);
    for (unsigned d = 0; d < k; ++d) out |= static_cast<uint64_t>(stk[d]) << (k - d);
    out |= r;
    tab[cfg] = out;
  }
  return table_multicircuit(len, len, tab);
}

namespace {

// --- lonely against the parity oracle ----------------------------------------
// Partition the universe into unmatched elements U (including 0) and the two
// sides L (lower half of a pair) and R (upper half).  |Full| is even, so the
// adversary's parities must make A(U) + A(L) + A(R) even.  If A(U) = 0 then
// U minus {0} has claimed parity 1 and extraction yields an unmatched
// element.  Otherwise A(L) != A(R) and the prefix columns L_i = {x in L :
// x <= i}, R_i = {x in R : N(x) <= i} agree at 0 and disagree at the top;
// the crossing point is either a solution or a parity lie.

Protocol lonely_parity_protocol(const Instance& inst) {
  Protocol p;
  p.budget = 512;
  p.run = [inst](Session& s) -> ProtocolResult {
    unsigned n = inst.n;
    const Func& nf = inst.func("N");
    uint64_t top = mask_bits(n);
    auto matched = [&nf](uint64_t x) {
      uint64_t v = nf(x);
      return x != 0 && v != 0 && v != x && nf(v) == x;
    };
    auto in_left = [&](uint64_t x) { return matched(x) && nf(x) > x; };
    auto in_right = [&](uint64_t x) { return matched(x) && nf(x) < x; };
    Circuit full = subset_of(n, [](uint64_t) { return true; });
    Circuit us = subset_of(n, [&](uint64_t x) { return !matched(x); });
    Circuit ls = subset_of(n, in_left);
    Circuit rs = subset_of(n, in_right);
    auto parity_of = [](const Circuit& c) { return c.parity(); };
    EnforceRunner er{s};
    er.ok(enforce_parity_value(full, parity_of));
    er.ok(enforce_parity_disjoint_union(ls, rs));
    Circuit m = set_union(ls, rs);
    er.ok(enforce_parity_disjoint_union(us, m));
    er.ok(enforce_parity_equal(full, set_union(us, m)));
    if (er.out) return *er.out;
    if (s.ask_bit(parity_key(us)) == 0) {
      // claimed even count of unmatched elements; splitting off {0} leaves a
      // set with claimed parity 1
      Circuit zero = subset_of(n, [](uint64_t x) { return x == 0; });
      Circuit rest = subset_of(n, [&](uint64_t x) { return x != 0 && !matched(x); });
      er.ok(enforce_parity_value(zero, parity_of));
      er.ok(enforce_parity_disjoint_union(zero, rest));
      er.ok(enforce_parity_equal(us, set_union(zero, rest)));
      if (er.out) return *er.out;
      Extraction ex = extract_odd_member(s, rest);
      if (ex.witness) return ProtocolResult::failed(*ex.witness);
      return ProtocolResult::solved(encode_solution({ex.members[0]}));
    }
    auto lset = [&](uint64_t i) {
      return subset_of(n, [&](uint64_t x) { return in_left(x) && x <= i; });
    };
    auto rset = [&](uint64_t i) {
      return subset_of(n, [&](uint64_t x) { return in_right(x) && nf(x) <= i; });
    };
    er.ok(enforce_parity_equal(ls, lset(top)));
    er.ok(enforce_parity_equal(rs, rset(top)));
    er.ok(enforce_parity_value(lset(0), parity_of));
    er.ok(enforce_parity_value(rset(0), parity_of));
    if (er.out) return *er.out;
    auto pred = [&](uint64_t i) {
      return s.ask_bit(parity_key(lset(i))) == s.ask_bit(parity_key(rset(i)));
    };
    uint64_t i = first_diff(0, top, pred);
    uint64_t x = i + 1;
    if (!matched(x)) return ProtocolResult::solved(encode_solution({x}));
    if (in_right(x)) {
      // both columns are unchanged as sets, yet the claimed parities moved
      er.ok(enforce_parity_equal(lset(i), lset(i + 1)));
      er.ok(enforce_parity_equal(rset(i), rset(i + 1)));
    } else {
      // x joins the left column and its partner joins the right column, so
      // both claimed parities must flip together
      uint64_t y = nf(x);
      Circuit sx = subset_of(n, [&](uint64_t v) { return v == x; });
      Circuit sy = subset_of(n, [&](uint64_t v) { return v == y; });
      er.ok(enforce_parity_value(sx, parity_of));
      er.ok(enforce_parity_value(sy, parity_of));
      er.ok(enforce_parity_disjoint_union(lset(i), sx));
      er.ok(enforce_parity_equal(lset(i + 1), set_union(lset(i), sx)));
      er.ok(enforce_parity_disjoint_union(rset(i), sy));
      er.ok(enforce_parity_equal(rset(i + 1), set_union(rset(i), sy)));
    }
    if (er.out) return *er.out;
    throw std::logic_error("lonely: consistent claims crossed the parity ledger");
  };
  return p;
}

// --- localopt against level-1 formulas ----------------------------------------
// Descend the existential closure of S, taking the lower branch whenever it
// is claimed nonempty, and remember each dyadic interval claimed empty.  The
// reached point a is a genuine member of S with every smaller member denied;
// if N(a) is a smaller member the denial is refutable.

Qbf member_exists_qbf(const Func& sf, unsigned n) {
  CircuitBuilder b;
  std::vector<uint32_t> xs;
  for (unsigned j = 0; j < n; ++j) xs.push_back(b.input("x" + std::to_string(j)));
  MultiCircuit sm = full_mc(sf);
  Qbf f;
  f.matrix = b.take(b.embed(sm, wire_all(sm, xs))[0]);
  for (unsigned j = 0; j < n; ++j) f.prefix.push_back({Quant::Exists, "x" + std::to_string(j)});
  return f;
}

Protocol localopt_tqbf1_protocol(const Instance& inst) {
  Protocol p;
  p.budget = 4ull * inst.n + 2;
  p.run = [inst](Session& s) -> ProtocolResult {
    unsigned n = inst.n;
    const Func& sf = inst.func("S");
    const Func& nf = inst.func("N");
    Qbf f = member_exists_qbf(sf, n);
    if (!s.ask_bit(tqbf_key(f))) return ProtocolResult::failed(*qbf_force_true(s, f));
    struct Denied {
      Qbf g;
      uint64_t lo;
      uint64_t size;
    };
    std::vector<Denied> denied;
    uint64_t a = 0;
    for (unsigned d = 0; d < n; ++d) {
      Qbf c0 = f.peeled(0);
      if (s.ask_bit(tqbf_key(c0))) {
        f = std::move(c0);
        a <<= 1;
        continue;
      }
      Qbf c1 = f.peeled(1);
      if (!s.ask_bit(tqbf_key(c1)))
        return ProtocolResult::failed(qbf_witness(FailureWitness::Kind::TExists, f));
      denied.push_back({std::move(c0), (a << 1) << (n - d - 1), pow2(n - d - 1)});
      f = std::move(c1);
      a = (a << 1) | 1;
    }
    if (f.matrix.eval() != 1)
      return ProtocolResult::failed(qbf_witness(FailureWitness::Kind::TBase, f));
    uint64_t b = nf(a);
    if (sf(b) == 0 || b >= a) return ProtocolResult::solved(encode_solution({a}));
    // b is a member of S below a, so it falls in an interval claimed empty
    for (const Denied& e : denied) {
      if (b < e.lo || b >= e.lo + e.size) continue;
      auto pick = [b, n](const Qbf& g) -> Bit {
        unsigned j = static_cast<unsigned>(std::stoul(g.prefix[0].second.substr(1)));
        return static_cast<Bit>((b >> (n - 1 - j)) & 1);
      };
      return ProtocolResult::failed(*qbf_force_true(s, e.g, pick));
    }
    throw std::logic_error("localopt: minimum bypassed without a denied interval");
  };
  return p;
}

// --- ground-truth referee for one closed formula -------------------------------

Protocol qbf_truth_protocol(const Qbf& f) {
  f.validate();
  if (!f.closed()) throw std::runtime_error("truth protocol: formula must be closed");
  Protocol p;
  p.budget = 2ull * f.prefix.size() + 1;
  p.run = [f](Session& s) -> ProtocolResult {
    Bit truth = f.tqbf_eval();
    if (s.ask_bit(tqbf_key(f)) == truth) return ProtocolResult::solved(encode_solution({}));
    std::optional<FailureWitness> w = truth ? qbf_force_true(s, f) : qbf_force_false(s, f);
    return ProtocolResult::failed(*w);
  };
  return p;
}

// --- pigeon against the counting oracle ----------------------------------------
// The preimage-count columns P_i = {x : f(x) < i} run from 0 up to 2^n while
// i only reaches 2^n - 1; crossing search finds an i whose claimed count
// exceeds i+1, and extracting i+2 members forces a collision.

Protocol pigeon_counting_protocol(const Instance& inst) {
  Protocol p;
  p.budget = 256;
  p.run = [inst](Session& s) -> ProtocolResult {
    unsigned n = inst.n;
    const Func& f = inst.func("f");
    auto pset = [&](uint64_t i) {
      return subset_of(n, [&](uint64_t x) { return f(x) < i; });
    };
    auto count_of = [](const Circuit& c) { return c.count_sat(); };
    EnforceRunner er{s};
    er.ok(enforce_counting_value(pset(0), count_of));
    er.ok(enforce_counting_value(pset(pow2(n) - 1), count_of));
    if (er.out) return *er.out;
    auto pred = [&](uint64_t i) {
      std::optional<uint64_t> v = nat_u64(s.ask(counting_key(pset(i))));
      return v.has_value() && *v <= i;
    };
    uint64_t i = first_diff(0, pow2(n) - 1, pred);
    Extraction ex = extract_members(s, pset(i + 1), i + 2);
    if (ex.witness) return ProtocolResult::failed(*ex.witness);
    std::vector<uint64_t> xs = ex.members;
    std::sort(xs.begin(), xs.end(),
              [&f](uint64_t a, uint64_t b) { return f(a) < f(b); });
    for (size_t j = 0; j + 1 < xs.size(); ++j)
      if (f(xs[j]) == f(xs[j + 1]))
        return ProtocolResult::solved(encode_solution({xs[j], xs[j + 1]}));
    throw std::logic_error("pigeon: extracted members below the bound without a collision");
  };
  return p;
}

// --- oracle translation wrappers ------------------------------------------------
// Each wrapper replays an inner protocol, deriving its replies from a coarser
// oracle, and translates any inner failure witness into one for the outer
// axiom set.

Protocol parity_over_counting(Protocol inner) {
  Protocol p;
  p.name = inner.name;
  p.budget = inner.budget;
  p.run = [inner](Session& outer) -> ProtocolResult {
    std::vector<uint64_t> bits;
    Adversary adv = [&outer, &bits](const Key& k) -> Reply {
      Bit b = counting_lsb(outer.ask(counting_key(circuit_of_key(k))));
      bits.push_back(b);
      return bit_reply(b);
    };
    Session is(adv, inner.budget);
    ProtocolResult res = inner.run(is);
    if (res.kind == ProtocolResult::Kind::Solution) {
      bits.resize(inner.budget, 0);
      return ProtocolResult::solved(encode_solution(Solution(bits.begin(), bits.end())));
    }
    if (!AxiomSet::parity().check_failure(is.transcript, *res.witness))
      throw std::logic_error("parity wrapper: inner witness does not verify");
    // Split and Base transfer verbatim: counts whose low bits disagree differ
    return ProtocolResult::failed(*res.witness);
  };
  return p;
}

Protocol tqbf1_over_counting(Protocol inner) {
  Protocol p;
  p.name = inner.name;
  p.budget = inner.budget + 32;
  p.run = [inner](Session& outer) -> ProtocolResult {
    std::vector<uint64_t> bits;
    auto claim_bit = [&outer](const Qbf& f) -> Bit {
      if (f.level() > 1)
        throw std::logic_error("counting wrapper: expected a level-1 formula");
      Reply r = outer.ask(counting_key(f.matrix));
      if (!f.prefix.empty() && f.prefix[0].first == Quant::Forall) {
        std::optional<uint64_t> v = nat_u64(r);
        return v.has_value() && *v == pow2(static_cast<unsigned>(f.prefix.size())) ? 1 : 0;
      }
      return nat_is_zero(r) ? 0 : 1;
    };
    Adversary adv = [&](const Key& k) -> Reply {
      Bit b = claim_bit(qbf_of_key(k));
      bits.push_back(b);
      return bit_reply(b);
    };
    Session is(adv, inner.budget);
    ProtocolResult res = inner.run(is);
    if (res.kind == ProtocolResult::Kind::Solution) {
      bits.resize(inner.budget, 0);
      return ProtocolResult::solved(encode_solution(Solution(bits.begin(), bits.end())));
    }
    const FailureWitness& fw = *res.witness;
    if (!AxiomSet::tqbf().check_failure(is.transcript, fw))
      throw std::logic_error("counting wrapper: inner witness does not verify");
    auto ck = [&outer](const Circuit& c) { return outer.ask(counting_key(c)); };
    auto cku = [&](const Circuit& c) { return nat_u64(ck(c)).value_or(UINT64_MAX); };
    // The claimed count exceeds the circuit's input capacity: splitting on
    // variables, some branch stays over half its capacity until a closed
    // circuit claims at least 2.
    std::function<FailureWitness(Circuit)> overcommit = [&](Circuit c) -> FailureWitness {
      for (;;) {
        std::vector<std::string> names = c.free_inputs();
        Reply rc = ck(c);
        if (names.empty()) return base_witness(std::move(c));
        Circuit c0 = c.restricted(names[0], 0);
        Circuit c1 = c.restricted(names[0], 1);
        Reply r0 = ck(c0);
        Reply r1 = ck(c1);
        if (rc != nat_add(r0, r1)) return split_witness(std::move(c), names[0]);
        uint64_t half = pow2(static_cast<unsigned>(names.size()) - 1);
        c = cku(c0) > half ? std::move(c0) : std::move(c1);
      }
    };
    const Qbf& f = fw.f;
    Circuit mat = f.matrix;
    switch (fw.kind) {
      case FailureWitness::Kind::TBase:
        return ProtocolResult::failed(base_witness(std::move(mat)));
      case FailureWitness::Kind::TExists:
        // parent count nonzero, both branch counts zero
        return ProtocolResult::failed(split_witness(std::move(mat), f.prefix[0].second));
      case FailureWitness::Kind::TExistsAt: {
        // parent count zero, one branch count nonzero
        const std::string& x = f.prefix[0].second;
        ck(mat.restricted(x, static_cast<Bit>(1 - fw.branch)));
        return ProtocolResult::failed(split_witness(std::move(mat), x));
      }
      case FailureWitness::Kind::TForall: {
        // parent count is the full 2^m, the refused branch claims strictly
        // less than half, so the other branch claims strictly more
        unsigned m = static_cast<unsigned>(f.prefix.size());
        const std::string& x = f.prefix[0].second;
        Circuit cb = mat.restricted(x, fw.branch);
        Circuit co = mat.restricted(x, static_cast<Bit>(1 - fw.branch));
        if (ck(mat) != nat_add(ck(cb), ck(co)))
          return ProtocolResult::failed(split_witness(std::move(mat), x));
        uint64_t half = pow2(m - 1);
        return ProtocolResult::failed(overcommit(cku(cb) > half ? std::move(cb) : std::move(co)));
      }
      case FailureWitness::Kind::TForallAll: {
        unsigned m = static_cast<unsigned>(f.prefix.size());
        const std::string& x = f.prefix[0].second;
        Circuit c0 = mat.restricted(x, 0);
        Circuit c1 = mat.restricted(x, 1);
        if (ck(mat) != nat_add(ck(c0), ck(c1)))
          return ProtocolResult::failed(split_witness(std::move(mat), x));
        if (m >= 2)
          throw std::logic_error("counting wrapper: full branch counts must sum past the parent");
        // closed children each claim at least 1 while the sum avoids 2, so
        // one child claims at least 2
        return ProtocolResult::failed(overcommit(cku(c0) > 1 ? std::move(c0) : std::move(c1)));
      }
      default:
        throw std::logic_error("counting wrapper: unexpected witness kind");
    }
  };
  return p;
}

Protocol tqbf_over_pspace(Protocol inner) {
  Protocol p;
  p.name = inner.name;
  p.budget = inner.budget + 32;
  p.run = [inner](Session& outer) -> ProtocolResult {
    struct Rec {
      Qbf f;
      Bit claimed;
      MultiCircuit m;
      uint64_t steps;
    };
    std::vector<Rec> recs;
    std::vector<uint64_t> bits;
    Adversary adv = [&](const Key& k) -> Reply {
      Qbf f = qbf_of_key(k);
      MultiCircuit m = qbf_eval_machine(f);
      uint64_t steps = pow2(static_cast<unsigned>(f.prefix.size()));
      std::string w0(qbf_eval_config_bits(static_cast<unsigned>(f.prefix.size())), '0');
      Reply r = outer.ask(pspace_key(m, w0, steps));
      Bit b = static_cast<Bit>(r.back() == '1');  // the result bit closes the config
      recs.push_back({std::move(f), b, std::move(m), steps});
      bits.push_back(b);
      return bit_reply(b);
    };
    Session is(adv, inner.budget);
    ProtocolResult res = inner.run(is);
    if (res.kind == ProtocolResult::Kind::Solution) {
      bits.resize(inner.budget, 0);
      return ProtocolResult::solved(encode_solution(Solution(bits.begin(), bits.end())));
    }
    if (!AxiomSet::tqbf().check_failure(is.transcript, *res.witness))
      throw std::logic_error("pspace wrapper: inner witness does not verify");
    // a valid inner witness pins jointly impossible truth claims, so one of
    // the evaluation machines was answered against the ground truth
    for (const Rec& rec : recs) {
      if (rec.claimed == rec.f.tqbf_eval()) continue;
      std::string w0(rec.m.free_inputs().size(), '0');
      return ProtocolResult::failed(localize_pspace(outer, rec.m, w0, rec.steps));
    }
    throw std::logic_error("pspace wrapper: witnessed run with no false claim");
  };
  return p;
}

Protocol counting_over_pspace(Protocol inner) {
  Protocol p;
  p.name = inner.name;
  p.budget = inner.budget + 32;
  p.run = [inner](Session& outer) -> ProtocolResult {
    struct Rec {
      Circuit c;
      MultiCircuit m;
      uint64_t steps;
      uint64_t claimed;
    };
    std::vector<Rec> recs;
    Adversary adv = [&](const Key& k) -> Reply {
      Circuit c = circuit_of_key(k);
      MultiCircuit m = counting_step_machine(c);
      unsigned w = static_cast<unsigned>(c.free_inputs().size());
      std::string w0(2 * w + 2, '0');
      std::vector<Bit> cfg = reply_config(outer.ask(pspace_key(m, w0, pow2(w))));
      uint64_t cnt = 0;  // counter field: the low w+1 config bits, msb first
      for (size_t j = w + 1; j < cfg.size(); ++j) cnt = (cnt << 1) | cfg[j];
      recs.push_back({std::move(c), std::move(m), pow2(w), cnt});
      return nat_reply(cnt);
    };
    Session is(adv, inner.budget);
    ProtocolResult res = inner.run(is);
    if (res.kind == ProtocolResult::Kind::Solution) return res;
    if (!AxiomSet::counting().check_failure(is.transcript, *res.witness))
      throw std::logic_error("pspace wrapper: inner witness does not verify");
    for (const Rec& rec : recs) {
      if (rec.claimed == rec.c.count_sat()) continue;
      std::string w0(rec.m.free_inputs().size(), '0');
      return ProtocolResult::failed(localize_pspace(outer, rec.m, w0, rec.steps));
    }
    throw std::logic_error("pspace wrapper: witnessed run with no false count");
  };
  return p;
}

// Configuration queries answered through Reach formulas: the step count is
// decomposed into powers of two and each power is resolved by peeling the
// target bits out of an "exists v Reach(u, v)" claim.  The final witness for a
// broken step is the tail of the first link whose claimed endpoint disagrees
// with iterating the transition function.
Protocol pspace_over_tqbf(Protocol inner) {
  Protocol p;
  p.name = inner.name;
  p.budget = 16 * inner.budget + 256;
  p.run = [inner](Session& outer) -> ProtocolResult {
    int frame = 0;
    struct Link {
      unsigned lvl;
      uint64_t from;
      uint64_t to;
      Qbf tail;  // fully peeled Reach claim, asserted true
    };
    std::map<Key, std::vector<Link>> chains;
    Adversary adv = [&](const Key& k) -> Reply {
      MultiCircuit m;
      std::string w;
      uint64_t t;
      pspace_of_key(k, m, w, t);
      if (t == 0) return Reply(w);
      std::vector<Bit> wcfg = reply_config(w);
      unsigned n = static_cast<unsigned>(wcfg.size());
      ReachFamily rf(m);
      uint64_t u = 0;
      for (unsigned j = 0; j < n; ++j) u = (u << 1) | wcfg[j];
      std::vector<Link> links;
      for (int lvl = 63; lvl >= 0; --lvl) {
        if (!((t >> lvl) & 1)) continue;
        Qbf g = rf.exists_target(static_cast<unsigned>(lvl), u);
        if (!outer.ask_bit(tqbf_key(g)))
          throw Escape{&frame, *qbf_force_true(outer, g)};
        uint64_t v = 0;
        for (unsigned j = 0; j < n; ++j) {
          Qbf c0 = g.peeled(0);
          if (outer.ask_bit(tqbf_key(c0))) {
            g = std::move(c0);
            v <<= 1;
            continue;
          }
          Qbf c1 = g.peeled(1);
          if (!outer.ask_bit(tqbf_key(c1)))
            throw Escape{&frame, qbf_witness(FailureWitness::Kind::TExists, g)};
          g = std::move(c1);
          v = (v << 1) | 1;
        }
        links.push_back({static_cast<unsigned>(lvl), u, v, std::move(g)});
        u = v;
      }
      chains[k] = std::move(links);
      std::vector<Bit> out(n);
      for (unsigned j = 0; j < n; ++j) out[j] = static_cast<Bit>((u >> (n - 1 - j)) & 1);
      return config_reply(out);
    };
    Session is(adv, inner.budget);
    ProtocolResult res;
    try {
      res = inner.run(is);
    } catch (Escape& e) {
      if (e.owner != &frame) throw;
      return ProtocolResult::failed(std::move(e.w));
    }
    if (res.kind == ProtocolResult::Kind::Solution) return res;
    const FailureWitness& fw = *res.witness;
    if (!AxiomSet::pspace().check_failure(is.transcript, fw))
      throw std::logic_error("tqbf wrapper: inner witness does not verify");
    if (fw.kind == FailureWitness::Kind::Zero)
      throw std::logic_error("tqbf wrapper: start configurations are answered verbatim");
    auto bad_tail = [&](uint64_t t) -> std::optional<Qbf> {
      auto it = chains.find(pspace_key(fw.mc, fw.w, t));
      if (it == chains.end()) return std::nullopt;  // t == 0: answered verbatim
      for (const Link& l : it->second) {
        std::vector<Bit> cfg(fw.mc.free_inputs().size());
        for (unsigned j = 0; j < cfg.size(); ++j)
          cfg[j] = static_cast<Bit>((l.from >> (cfg.size() - 1 - j)) & 1);
        for (uint64_t step = 0; step < pow2(l.lvl); ++step) cfg = fw.mc.mo_eval(cfg);
        uint64_t want = 0;
        for (Bit b : cfg) want = (want << 1) | b;
        if (l.to != want) return l.tail;
      }
      return std::nullopt;
    };
    std::optional<Qbf> tail = bad_tail(fw.t);
    if (!tail) tail = bad_tail(fw.t + 1);
    if (!tail) throw std::logic_error("tqbf wrapper: step witness with exact reach chains");
    return ProtocolResult::failed(*qbf_force_false(outer, *tail));
  };
  return p;
}

// --- retraction weak pigeon against level-2 formulas ----------------------------
// The instance is first amplified to a pigeonhole pair f~: 2^n -> 2^{2n},
// g~: 2^{2n} -> 2^n.  Leaves of the depth-n binary tree are labelled by the
// diagonal H, and Good(b) claims labels for every left sibling along branch
// b such that all further descents reproduce H.  Good(0) holds vacuously and
// a total labelling refutes itself at the root, so either a crossing or the
// top branch hands the Inspector labels whose g~-side recombination must
// expose a point with f~(g~(y)) != y.

struct RwppAmp {
  unsigned n;
  Func f, g;        // original maps, n -> n+1 and n+1 -> n
  Func famp, gamp;  // amplified maps, n -> 2n and 2n -> n
  Func h;           // leaf labels, values 0/1 carried in n bits
};

RwppAmp rwpp_amplify(const Instance& inst) {
  RwppAmp a;
  a.n = inst.n;
  a.f = inst.func("f");
  a.g = inst.func("g");
  std::vector<uint64_t> up(pow2(a.n)), down(pow2(2 * a.n));
  for (uint64_t x = 0; x < up.size(); ++x) up[x] = ladder_up(a.f, a.n, x);
  for (uint64_t y = 0; y < down.size(); ++y) down[y] = ladder_down(a.g, a.n, y);
  a.famp = Func::from_table(a.n, 2 * a.n, up);
  a.gamp = Func::from_table(2 * a.n, a.n, down);
  std::vector<uint64_t> h(pow2(a.n));
  for (uint64_t w = 0; w < h.size(); ++w) {
    uint64_t z = w;  // follow the turns of w starting from w itself
    for (unsigned t = 0; t < a.n; ++t) {
      uint64_t both = a.famp(z);
      z = ((w >> (a.n - 1 - t)) & 1) ? (both & mask_bits(a.n)) : (both >> a.n);
    }
    h[w] = z == 0 ? 1 : 0;
  }
  a.h = Func::from_table(a.n, a.n, h);
  return a;
}

Qbf good_qbf(const RwppAmp& a, uint64_t b) {
  unsigned n = a.n;
  CircuitBuilder bld;
  Qbf q;
  std::map<unsigned, std::vector<uint32_t>> zbits;
  for (unsigned i = 0; i < n; ++i) {
    if (!((b >> (n - 1 - i)) & 1)) continue;
    std::vector<uint32_t> zs;
    for (unsigned j = 0; j < n; ++j) {
      std::string name = "z" + std::to_string(i) + "_" + std::to_string(j);
      zs.push_back(bld.input(name));
      q.prefix.push_back({Quant::Exists, name});
    }
    zbits[i] = std::move(zs);
  }
  std::vector<uint32_t> vbits;
  for (unsigned t = 0; t + 1 < n; ++t) {
    std::string name = "v" + std::to_string(t);
    vbits.push_back(bld.input(name));
    q.prefix.push_back({Quant::Forall, name});
  }
  MultiCircuit fm = full_mc(a.famp);
  MultiCircuit hm = full_mc(a.h);
  std::vector<uint32_t> conds;
  for (const auto& [i, zs] : zbits) {
    std::vector<uint32_t> cur = zs;
    for (unsigned t = 0; t + 1 + i < n; ++t) {
      std::vector<uint32_t> both = bld.embed(fm, wire_all(fm, cur));
      std::vector<uint32_t> next;
      for (unsigned j = 0; j < n; ++j)
        next.push_back(bld.gmux(vbits[t], both[j], both[n + j]));
      cur = std::move(next);
    }
    std::vector<uint32_t> addr;
    for (unsigned j = 0; j < n; ++j) {
      if (j < i)
        addr.push_back(bld.konst(static_cast<Bit>((b >> (n - 1 - j)) & 1)));
      else if (j == i)
        addr.push_back(bld.konst(0));
      else
        addr.push_back(vbits[j - i - 1]);
    }
    std::vector<uint32_t> hv = bld.embed(hm, wire_all(hm, addr));
    conds.push_back(bld.eq_vec(cur, hv));
  }
  q.matrix = bld.take(bld.gand(std::move(conds)));
  return q;
}

struct GoodView {
  std::map<unsigned, uint64_t> labels;  // right-turn depth -> extracted label
  Qbf tail;                             // universal remainder, asserted true
};

std::variant<GoodView, FailureWitness> peel_good(Session& s, const RwppAmp& a, Qbf g) {
  GoodView out;
  while (!g.prefix.empty() && g.prefix[0].first == Quant::Exists) {
    std::string name = g.prefix[0].second;
    Bit bit;
    Qbf c0 = g.peeled(0);
    if (s.ask_bit(tqbf_key(c0))) {
      g = std::move(c0);
      bit = 0;
    } else {
      Qbf c1 = g.peeled(1);
      if (!s.ask_bit(tqbf_key(c1)))
        return qbf_witness(FailureWitness::Kind::TExists, std::move(g));
      g = std::move(c1);
      bit = 1;
    }
    size_t us = name.find('_');
    unsigned i = static_cast<unsigned>(std::stoul(name.substr(1, us - 1)));
    unsigned j = static_cast<unsigned>(std::stoul(name.substr(us + 1)));
    out.labels[i] |= static_cast<uint64_t>(bit) << (a.n - 1 - j);
  }
  out.tail = std::move(g);
  return out;
}

Protocol rwpp_tqbf2_protocol(const Instance& inst) {
  Protocol p;
  p.budget = 1u << 10;
  p.run = [inst](Session& s) -> ProtocolResult {
    RwppAmp a = rwpp_amplify(inst);
    unsigned n = a.n;
    uint64_t top = mask_bits(n);
    // recombine a left label and the child label below it, or catch the
    // amplified pigeonhole pair red-handed
    auto combine = [&a](uint64_t zleft, uint64_t cur) -> std::variant<uint64_t, Solution> {
      uint64_t pair = (zleft << a.n) | cur;
      uint64_t z = a.gamp(pair);
      if (a.famp(z) != pair) return Solution{ladder_defect(a.f, a.g, a.n, pair)};
      return z;
    };
    auto finish_true = [&](uint64_t b, bool crossing) -> ProtocolResult {
      auto got = peel_good(s, a, good_qbf(a, b));
      if (std::holds_alternative<FailureWitness>(got))
        return ProtocolResult::failed(std::get<FailureWitness>(std::move(got)));
      GoodView view = std::get<GoodView>(std::move(got));
      if (view.tail.tqbf_eval() != 1)
        return ProtocolResult::failed(*qbf_force_false(s, view.tail));
      unsigned tz = 0;  // trailing right turns of b (deepest positions)
      while (crossing && ((b >> tz) & 1)) ++tz;
      unsigned stop = crossing ? n - 1 - tz : 0;
      uint64_t cur = a.h(crossing ? b : top);
      for (unsigned i = n; i-- > (crossing ? stop + 1 : 0);) {
        auto r = combine(view.labels.at(i), cur);
        if (std::holds_alternative<Solution>(r))
          return ProtocolResult::solved(encode_solution(std::get<Solution>(r)));
        cur = std::get<uint64_t>(r);
      }
      if (!crossing)
        throw std::logic_error("pigeonhole tree: a total labelling would refute itself");
      // cur now genuinely labels the node entered by flipping the turn at
      // `stop`, which is exactly the extra label branch b+1 needs
      std::map<unsigned, uint64_t> next = view.labels;
      for (unsigned i = stop; i < n; ++i) next.erase(i);
      next[stop] = cur;
      auto pick = [next, n](const Qbf& g) -> Bit {
        const std::string& name = g.prefix[0].second;
        size_t us = name.find('_');
        unsigned i = static_cast<unsigned>(std::stoul(name.substr(1, us - 1)));
        unsigned j = static_cast<unsigned>(std::stoul(name.substr(us + 1)));
        return static_cast<Bit>((next.at(i) >> (n - 1 - j)) & 1);
      };
      return ProtocolResult::failed(*qbf_force_true(s, good_qbf(a, b + 1), pick));
    };
    if (s.ask_bit(tqbf_key(good_qbf(a, top)))) return finish_true(top, false);
    if (!s.ask_bit(tqbf_key(good_qbf(a, 0))))
      return ProtocolResult::failed(*qbf_force_true(s, good_qbf(a, 0)));
    auto pred = [&](uint64_t b) { return s.ask_bit(tqbf_key(good_qbf(a, b))); };
    return finish_true(first_diff(0, top, pred), true);
  };
  return p;
}

// --- game induction against level-k formulas ------------------------------------
// W_i is game number i as a closed formula: universal moves on odd rounds,
// existential on even, with the win condition G(i, moves).  W_0 always holds
// and W_top never does; at a claimed crossing the two runs are peeled in
// lockstep, copying each move through the f_j maps, so consistent claims end
// in a valid solution tuple.

Qbf gi_game_qbf(const Instance& inst, unsigned k, uint64_t i) {
  unsigned n = inst.n;
  CircuitBuilder b;
  Qbf q;
  std::vector<uint32_t> moves;
  for (unsigned j = 1; j <= k; ++j)
    for (unsigned l = 0; l < n; ++l) {
      std::string name = "m" + std::to_string(j) + "_" + std::to_string(l);
      moves.push_back(b.input(name));
      q.prefix.push_back({j % 2 ? Quant::Forall : Quant::Exists, name});
    }
  MultiCircuit gm = full_mc(inst.func("G"));
  std::vector<uint32_t> addr;
  for (unsigned l = 0; l < n; ++l) addr.push_back(b.konst(static_cast<Bit>((i >> (n - 1 - l)) & 1)));
  addr.insert(addr.end(), moves.begin(), moves.end());
  q.matrix = b.take(b.embed(gm, wire_all(gm, addr))[0]);
  return q;
}

Protocol gi_tqbfk_protocol(const Instance& inst) {
  Protocol p;
  p.budget = 1u << 9;
  p.run = [inst](Session& s) -> ProtocolResult {
    unsigned n = inst.n;
    unsigned k = static_cast<unsigned>(inst.scalar_or("k", 0));
    uint64_t top = mask_bits(n);
    auto game = [&](uint64_t i) { return gi_game_qbf(inst, k, i); };
    if (!s.ask_bit(tqbf_key(game(0))))
      return ProtocolResult::failed(*qbf_force_true(s, game(0)));
    if (s.ask_bit(tqbf_key(game(top))))
      return ProtocolResult::failed(*qbf_force_false(s, game(top)));
    auto pred = [&](uint64_t i) { return s.ask_bit(tqbf_key(game(i))); };
    uint64_t i = first_diff(0, top, pred);
    Qbf ft = game(i);      // asserted true
    Qbf ff = game(i + 1);  // asserted false
    std::vector<uint64_t> x(k), xp(k);
    auto fval = [&](unsigned j) {
      std::vector<uint64_t> args{i};
      for (unsigned q = 1; q <= j; ++q) args.push_back(q % 2 ? xp[q - 1] : x[q - 1]);
      return inst.func("f" + std::to_string(j))(pack_args(args, n));
    };
    for (unsigned j = 1; j <= k; ++j) {
      if (j % 2) {
        // universal round: pull the move from the false game, mirror it
        // through f_j into the true one
        uint64_t val = 0;
        for (unsigned l = 0; l < n; ++l) {
          Qbf c0 = ff.peeled(0);
          if (!s.ask_bit(tqbf_key(c0))) {
            ff = std::move(c0);
            val <<= 1;
            continue;
          }
          Qbf c1 = ff.peeled(1);
          if (s.ask_bit(tqbf_key(c1)))
            return ProtocolResult::failed(
                qbf_witness(FailureWitness::Kind::TForallAll, std::move(ff)));
          ff = std::move(c1);
          val = (val << 1) | 1;
        }
        xp[j - 1] = val;
        x[j - 1] = fval(j);
        for (unsigned l = 0; l < n; ++l) {
          Bit bit = static_cast<Bit>((x[j - 1] >> (n - 1 - l)) & 1);
          Qbf child = ft.peeled(bit);
          if (!s.ask_bit(tqbf_key(child)))
            return ProtocolResult::failed(
                qbf_witness(FailureWitness::Kind::TForall, std::move(ft), bit));
          ft = std::move(child);
        }
      } else {
        // existential round: pull the move from the true game, mirror it
        // through f_j into the false one
        uint64_t val = 0;
        for (unsigned l = 0; l < n; ++l) {
          Qbf c0 = ft.peeled(0);
          if (s.ask_bit(tqbf_key(c0))) {
            ft = std::move(c0);
            val <<= 1;
            continue;
          }
          Qbf c1 = ft.peeled(1);
          if (!s.ask_bit(tqbf_key(c1)))
            return ProtocolResult::failed(
                qbf_witness(FailureWitness::Kind::TExists, std::move(ft)));
          ft = std::move(c1);
          val = (val << 1) | 1;
        }
        x[j - 1] = val;
        xp[j - 1] = fval(j);
        for (unsigned l = 0; l < n; ++l) {
          Bit bit = static_cast<Bit>((xp[j - 1] >> (n - 1 - l)) & 1);
          Qbf child = ff.peeled(bit);
          if (s.ask_bit(tqbf_key(child)))
            return ProtocolResult::failed(
                qbf_witness(FailureWitness::Kind::TExistsAt, std::move(ff), bit));
          ff = std::move(child);
        }
      }
    }
    if (ft.matrix.eval() != 1)
      return ProtocolResult::failed(qbf_witness(FailureWitness::Kind::TBase, std::move(ft)));
    if (ff.matrix.eval() != 0)
      return ProtocolResult::failed(qbf_witness(FailureWitness::Kind::TBase, std::move(ff)));
    Solution y{i};
    y.insert(y.end(), x.begin(), x.end());
    y.insert(y.end(), xp.begin(), xp.end());
    return ProtocolResult::solved(encode_solution(y));
  };
  return p;
}

// --- local tqbf runs as an oracle machine ----------------------------------------
// One NP query per protocol step: the query circuit is the matrix of the
// formula the protocol asks about, its quantified variables renamed to
// witness inputs, complemented for universal formulas so that a YES answer
// always means "the claim is a 1-claim about a Sigma view".

struct SimStop {};

struct SimTrace {
  std::vector<Qbf> formulas;          // fresh formulas in ask order
  std::map<Key, unsigned> index;      // tqbf key -> query index
  std::optional<ProtocolResult> res;  // set when the protocol finished
  std::optional<Qbf> next;            // set when it out-ran the supplied replies
};

Bit raw_to_claim(const Qbf& f, Bit raw) {
  bool pi = !f.prefix.empty() && f.prefix[0].first == Quant::Forall;
  return pi ? static_cast<Bit>(!raw) : raw;
}

SimTrace simulate_replies(const Protocol& proto, const std::vector<Bit>& raws,
                          bool stop_at_end) {
  SimTrace tr;
  Adversary adv = [&tr, &raws, stop_at_end](const Key& k) -> Reply {
    size_t i = tr.formulas.size();
    Qbf f = qbf_of_key(k);
    if (i >= raws.size()) {
      if (!stop_at_end) throw std::runtime_error("simulated run out of replies");
      tr.next = std::move(f);
      throw SimStop{};
    }
    Bit b = raw_to_claim(f, raws[i]);
    tr.index[k] = static_cast<unsigned>(i);
    tr.formulas.push_back(std::move(f));
    return bit_reply(b);
  };
  Session s(adv, proto.budget);
  try {
    tr.res = proto.run(s);
  } catch (const SimStop&) {
  }
  return tr;
}

Circuit np_view(const Qbf& f) {
  CircuitBuilder b;
  std::map<std::string, uint32_t> wiring;
  for (unsigned q = 0; q < f.prefix.size(); ++q)
    wiring[f.prefix[q].second] = b.input("w" + std::to_string(q));
  uint32_t out = b.embed(f.matrix, wiring, {f.matrix.output})[0];
  bool pi = !f.prefix.empty() && f.prefix[0].first == Quant::Forall;
  return b.take(pi ? b.gnot(out) : out);
}

void register_local_tqbf1_machine() {
  PnpMachine m;
  m.name = "local_tqbf1_sim";
  m.in_bits = [](const Instance&) { return 0u; };
  m.out_bits = [](const Instance&) { return 1u; };
  m.queries = [](const Instance& inst) {
    return static_cast<unsigned>(protocol_of_instance(inst).budget);
  };
  m.witness_bits = [](const Instance& inst) {
    return static_cast<unsigned>(std::stoul(inst.tag("wb")));
  };
  m.query = [](const Instance& inst, uint64_t, const std::vector<Bit>& replies) {
    SimTrace tr = simulate_replies(protocol_of_instance(inst), replies, true);
    if (!tr.next) {
      CircuitBuilder b;  // run already over: pad with unsatisfiable queries
      return b.take(b.konst(0));
    }
    return np_view(*tr.next);
  };
  m.output = [](const Instance& inst, uint64_t, const std::vector<Bit>& replies) -> uint64_t {
    SimTrace tr = simulate_replies(protocol_of_instance(inst), replies, true);
    return tr.res && tr.res->kind == ProtocolResult::Kind::Solution ? 1 : 0;
  };
  register_pnp_machine(std::move(m));
}

// --- corpora ----------------------------------------------------------------------

Instance make_lonely_inst(Rng& r, unsigned n) {
  Instance u;
  u.problem = "lonely";
  u.n = n;
  if (r.bits(1)) {
    u.funcs["N"] = rand_func(r, n, n);
    return u;
  }
  // a genuine partial involution fixing 0
  std::vector<uint64_t> tab(pow2(n));
  std::vector<uint64_t> xs;
  for (uint64_t x = 1; x < pow2(n); ++x) xs.push_back(x);
  std::shuffle(xs.begin(), xs.end(), r.eng);
  tab[0] = r.below(pow2(n));
  for (size_t i = 0; i + 1 < xs.size(); i += 2) {
    tab[xs[i]] = xs[i + 1];
    tab[xs[i + 1]] = xs[i];
  }
  if (xs.size() % 2) tab[xs.back()] = r.below(pow2(n));
  u.funcs["N"] = Func::from_table(n, n, tab);
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

Instance make_pigeon_inst(Rng& r, unsigned n) {
  std::vector<uint64_t> tab(pow2(n));
  for (auto& v : tab) v = r.below(pow2(n) - 1);
  Instance u;
  u.problem = "pigeon";
  u.n = n;
  u.funcs["f"] = Func::from_table(n, n, tab);
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

Instance make_gi_inst(Rng& r, unsigned n) {
  unsigned k = 1 + static_cast<unsigned>(r.below(2));
  Instance u;
  u.problem = "gi";
  u.n = n;
  u.scalars["k"] = k;
  std::vector<uint64_t> g(pow2((k + 1) * n));
  for (uint64_t i = 0; i < g.size(); ++i) {
    uint64_t game = i >> (k * n);
    g[i] = game == 0 ? 1 : game == pow2(n) - 1 ? 0 : r.bits(1);
  }
  u.funcs["G"] = Func::from_table((k + 1) * n, 1, g);
  for (unsigned j = 1; j <= k; ++j)
    u.funcs["f" + std::to_string(j)] = rand_func(r, (j + 1) * n, n);
  return u;
}

Qbf random_table_qbf(Rng& r, unsigned k, std::optional<Quant> uniform) {
  std::vector<uint64_t> tab(pow2(k));
  for (auto& v : tab) v = r.bits(1);
  Qbf f;
  f.matrix = set_fn_eq(table_multicircuit(k, 1, tab), 1);
  for (unsigned j = 0; j < k; ++j) {
    Quant q = uniform ? *uniform : (r.bits(1) ? Quant::Exists : Quant::Forall);
    f.prefix.push_back({q, "x" + std::to_string(j)});
  }
  return f;
}

void ensure_registered();

// Instances of the level-1 local problem, split between the ground-truth
// referee on random formulas and the localopt descent.
CorpusFn local_tqbf1_corpus() {
  return [](uint64_t seed, unsigned count) {
    ensure_registered();
    std::vector<Instance> out;
    for (unsigned i = 0; i < count; ++i) {
      Rng r(sub_seed(seed, i));
      Instance u;
      if (i % 2) {
        unsigned n = 1;  // keep the run short: the oracle-machine image is enumerated
        Instance lo = make_localopt_inst(r, n);
        u = local_instance(AxiomSet::tqbf_level(1), "localopt_tqbf1", lo.to_text());
        u.n = n;
        u.tags["wb"] = std::to_string(n);
      } else {
        unsigned k = 1 + i / 2 % 2;
        Quant q = r.bits(1) ? Quant::Exists : Quant::Forall;
        Qbf f = random_table_qbf(r, k, q);
        u = local_instance(AxiomSet::tqbf_level(1), "qbf_truth", f.encode());
        u.n = k;
        u.tags["wb"] = std::to_string(k);
      }
      out.push_back(std::move(u));
    }
    return out;
  };
}

// --- catalog entries ----------------------------------------------------------------

CatalogEntry solver_entry(GammaSolver sv, CorpusFn corpus) {
  CatalogEntry e;
  e.name = sv.name;
  e.solver = std::move(sv);
  e.corpus = std::move(corpus);
  return e;
}

CatalogEntry entry_lonely_over_parity() {
  GammaSolver sv;
  sv.name = "strategy_lonely_over_parity";
  sv.problem = tfnp("lonely");
  sv.gamma = AxiomSet::parity();
  sv.build = [](const Instance& u) { return lonely_parity_protocol(u); };
  return solver_entry(std::move(sv), corpus_of({1, 2, 3}, make_lonely_inst));
}

CatalogEntry entry_localopt_over_tqbf1() {
  GammaSolver sv;
  sv.name = "strategy_localopt_over_tqbf1";
  sv.problem = tfnp("localopt");
  sv.gamma = AxiomSet::tqbf_level(1);
  sv.build = [](const Instance& u) { return localopt_tqbf1_protocol(u); };
  return solver_entry(std::move(sv), corpus_of({1, 2, 3}, make_localopt_inst));
}

CatalogEntry entry_local_tqbf1_to_pnp() {
  CxReduction red;
  red.name = "cxred_local_tqbf1_to_pnp";
  red.tfnp_source = local_problem(AxiomSet::tqbf_level(1));
  red.target = tfs2("pnp");
  red.f = [](const Instance& u) {
    Instance t;
    t.problem = "pnp";
    t.n = u.n;
    t.tags["machine"] = "local_tqbf1_sim";
    t.tags["protocol"] = u.tag("protocol");
    t.tags["params"] = u.tag("params");
    t.tags["wb"] = u.tag("wb");
    t.scalars["x"] = 0;
    return t;
  };
  red.g = [](const Instance& u, const Solution& y) -> Solution {
    Protocol proto = protocol_of_instance(u);
    unsigned t = static_cast<unsigned>(proto.budget);
    std::vector<Bit> raws(y.begin(), y.begin() + t);
    try {
      SimTrace tr = simulate_replies(proto, raws, false);
      if (tr.res && tr.res->kind == ProtocolResult::Kind::Solution) {
        Solution bits;
        for (size_t i = 0; i < tr.formulas.size(); ++i)
          bits.push_back(raw_to_claim(tr.formulas[i], raws[i]));
        bits.resize(t, 0);
        return bits;
      }
    } catch (const std::exception&) {
    }
    return zero_of_shape(Shape(t, 1));
  };
  red.h = [](const Instance& u, const Solution& y, const Solution&) -> Solution {
    // Map the protocol's failure witness to a NO answer it contradicts.  In
    // every remaining case the run itself breaks a YES obligation, so the
    // relation is already violated and any reply will do.
    try {
      Protocol proto = protocol_of_instance(u);
      unsigned t = static_cast<unsigned>(proto.budget);
      unsigned wb = static_cast<unsigned>(std::stoul(u.tag("wb")));
      std::vector<Bit> raws(y.begin(), y.begin() + t);
      SimTrace tr = simulate_replies(proto, raws, false);
      if (!tr.res || tr.res->kind != ProtocolResult::Kind::Failure) return {0, 0};
      const FailureWitness& fw = *tr.res->witness;
      auto idx = [&tr](const Qbf& g) -> unsigned { return tr.index.at(tqbf_key(g)); };
      auto wit = [&](unsigned ix) { return y[t + ix]; };
      uint64_t wmask = mask_bits(wb);
      switch (fw.kind) {
        case FailureWitness::Kind::TBase: {
          unsigned ix = idx(fw.f);
          if (raw_to_claim(fw.f, raws[ix]) == 0 && fw.f.matrix.eval() == 1) return {ix, 0};
          return {0, 0};
        }
        case FailureWitness::Kind::TExists: {
          // the parent's YES witness satisfies one denied branch
          uint64_t w = wit(idx(fw.f));
          Bit b = static_cast<Bit>(w & 1);
          return {idx(fw.f.peeled(b)), (w >> 1) & wmask};
        }
        case FailureWitness::Kind::TExistsAt: {
          // the branch's YES witness extends to the denied parent
          uint64_t w = wit(idx(fw.f.peeled(fw.branch)));
          return {idx(fw.f), (fw.branch | (w << 1)) & wmask};
        }
        case FailureWitness::Kind::TForall: {
          Qbf child = fw.f.peeled(fw.branch);
          if (child.prefix.empty()) {
            if (child.matrix.eval() == 0) return {idx(fw.f), fw.branch};
            return {idx(child), 0};
          }
          uint64_t w = wit(idx(child));
          return {idx(fw.f), (fw.branch | (w << 1)) & wmask};
        }
        case FailureWitness::Kind::TForallAll: {
          uint64_t w = wit(idx(fw.f));
          Bit b = static_cast<Bit>(w & 1);
          Qbf child = fw.f.peeled(b);
          if (child.prefix.empty()) return {0, 0};
          return {idx(child), (w >> 1) & wmask};
        }
        default:
          return {0, 0};
      }
    } catch (const std::exception&) {
      return {0, 0};
    }
  };
  CatalogEntry e;
  e.name = red.name;
  e.cx = std::move(red);
  e.corpus = local_tqbf1_corpus();
  return e;
}

CatalogEntry entry_tqbf_over_pspace() {
  GammaSolver sv;
  sv.name = "strategy_tqbf_over_pspace";
  sv.problem = local_problem(AxiomSet::tqbf());
  sv.gamma = AxiomSet::pspace();
  sv.build = [](const Instance& u) { return tqbf_over_pspace(protocol_of_instance(u)); };
  CorpusFn corpus = [](uint64_t seed, unsigned count) {
    ensure_registered();
    std::vector<Instance> out;
    for (unsigned i = 0; i < count; ++i) {
      Rng r(sub_seed(seed, i));
      Instance u;
      if (i % 3 == 2) {
        unsigned n = 1 + (i / 3) % 2;
        u = local_instance(AxiomSet::tqbf(), "localopt_tqbf1", make_localopt_inst(r, n).to_text());
        u.n = n;
      } else {
        unsigned k = i % 4;
        u = local_instance(AxiomSet::tqbf(), "qbf_truth", random_table_qbf(r, k, std::nullopt).encode());
        u.n = k;
      }
      out.push_back(std::move(u));
    }
    return out;
  };
  return solver_entry(std::move(sv), std::move(corpus));
}

CatalogEntry entry_pspace_over_tqbf() {
  GammaSolver sv;
  sv.name = "strategy_pspace_over_tqbf";
  sv.problem = tfnp("pigeon");
  sv.gamma = AxiomSet::tqbf();
  sv.build = [](const Instance& u) {
    return pspace_over_tqbf(counting_over_pspace(pigeon_counting_protocol(u)));
  };
  return solver_entry(std::move(sv), corpus_of({1}, make_pigeon_inst));
}

CatalogEntry entry_parity_over_counting() {
  GammaSolver sv;
  sv.name = "strategy_parity_over_counting";
  sv.problem = local_problem(AxiomSet::parity());
  sv.gamma = AxiomSet::counting();
  sv.build = [](const Instance& u) { return parity_over_counting(protocol_of_instance(u)); };
  CorpusFn corpus = [](uint64_t seed, unsigned count) {
    ensure_registered();
    std::vector<Instance> out;
    for (unsigned i = 0; i < count; ++i) {
      Rng r(sub_seed(seed, i));
      unsigned n = 1 + i % 2;
      Instance u = local_instance(AxiomSet::parity(), "lonely_parity",
                                  make_lonely_inst(r, n).to_text());
      u.n = n;
      out.push_back(std::move(u));
    }
    return out;
  };
  return solver_entry(std::move(sv), std::move(corpus));
}

CatalogEntry entry_pigeon_over_counting() {
  GammaSolver sv;
  sv.name = "strategy_pigeon_over_counting";
  sv.problem = tfnp("pigeon");
  sv.gamma = AxiomSet::counting();
  sv.build = [](const Instance& u) { return pigeon_counting_protocol(u); };
  return solver_entry(std::move(sv), corpus_of({1, 2, 3}, make_pigeon_inst));
}

CatalogEntry entry_tqbf1_over_counting() {
  GammaSolver sv;
  sv.name = "strategy_tqbf1_over_counting";
  sv.problem = local_problem(AxiomSet::tqbf_level(1));
  sv.gamma = AxiomSet::counting();
  sv.build = [](const Instance& u) { return tqbf1_over_counting(protocol_of_instance(u)); };
  return solver_entry(std::move(sv), local_tqbf1_corpus());
}

CatalogEntry entry_counting_over_pspace() {
  GammaSolver sv;
  sv.name = "strategy_counting_over_pspace";
  sv.problem = tfnp("pigeon");
  sv.gamma = AxiomSet::pspace();
  sv.build = [](const Instance& u) {
    return counting_over_pspace(pigeon_counting_protocol(u));
  };
  return solver_entry(std::move(sv), corpus_of({1, 2}, make_pigeon_inst));
}

CatalogEntry entry_rwpp_over_tqbf2() {
  GammaSolver sv;
  sv.name = "strategy_rwpp_over_tqbf2";
  sv.problem = tfnp("retraction_weak_pigeon");
  sv.gamma = AxiomSet::tqbf_level(2);
  sv.build = [](const Instance& u) { return rwpp_tqbf2_protocol(u); };
  return solver_entry(std::move(sv), corpus_of({1, 2}, make_rwp_inst));
}

CatalogEntry entry_gik_over_tqbfk() {
  GammaSolver sv;
  sv.name = "strategy_gik_over_tqbfk";
  sv.problem = tfnp("gi");
  sv.gamma = AxiomSet::tqbf_level(4);
  sv.build = [](const Instance& u) { return gi_tqbfk_protocol(u); };
  return solver_entry(std::move(sv), corpus_of({1, 2}, make_gi_inst));
}

void ensure_registered() {
  static const bool done = [] {
    register_protocol("lonely_parity", [](const Bytes& params) {
      return lonely_parity_protocol(Instance::parse_text(params));
    });
    register_protocol("localopt_tqbf1", [](const Bytes& params) {
      return localopt_tqbf1_protocol(Instance::parse_text(params));
    });
    register_protocol("qbf_truth",
                      [](const Bytes& params) { return qbf_truth_protocol(Qbf::decode(params)); });
    register_local_tqbf1_machine();
    return true;
  }();
  (void)done;
}

}  // namespace

namespace detail {

std::vector<CatalogEntry> strategy_entries() {
  ensure_registered();
  std::vector<CatalogEntry> out;
  out.push_back(entry_lonely_over_parity());
  out.push_back(entry_localopt_over_tqbf1());
  out.push_back(entry_local_tqbf1_to_pnp());
  out.push_back(entry_tqbf_over_pspace());
  out.push_back(entry_pspace_over_tqbf());
  out.push_back(entry_parity_over_counting());
  out.push_back(entry_pigeon_over_counting());
  out.push_back(entry_tqbf1_over_counting());
  out.push_back(entry_counting_over_pspace());
  out.push_back(entry_rwpp_over_tqbf2());
  out.push_back(entry_gik_over_tqbfk());
  return out;
}

}  // namespace detail

}  // namespace owb
