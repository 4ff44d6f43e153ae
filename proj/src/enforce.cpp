#include "owb/enforce.hpp"

#include <algorithm>

namespace owb {

namespace {

using FW = FailureWitness;

FW split_witness(Circuit c, std::string var) {
  FW w;
  w.kind = FW::Kind::Split;
  w.c = std::move(c);
  w.var = std::move(var);
  return w;
}

FW base_witness(Circuit c) {
  FW w;
  w.kind = FW::Kind::Base;
  w.c = std::move(c);
  return w;
}

FW qbf_witness(FW::Kind k, Qbf f, Bit branch = 0) {
  FW w;
  w.kind = k;
  w.f = std::move(f);
  w.branch = branch;
  return w;
}

FW step_witness(MultiCircuit mc, std::string w0, uint64_t t) {
  FW w;
  w.kind = FW::Kind::Step;
  w.mc = std::move(mc);
  w.w = std::move(w0);
  w.t = t;
  return w;
}

// shared descent for the two circuit-equality goals
std::optional<FW> circuit_equal_run(Session& s, Circuit c, Circuit d, bool counting) {
  auto key = [&](const Circuit& x) { return counting ? counting_key(x) : parity_key(x); };
  Reply rc = s.ask(key(c)), rd = s.ask(key(d));
  while (true) {
    if (rc == rd) return std::nullopt;
    if (c.closed()) {
      if (!d.closed()) throw std::logic_error("circuit equality: mismatched inputs");
      Bit e = c.eval();
      if (d.eval() != e) throw std::logic_error("circuit equality: circuits differ");
      Reply want = counting ? nat_reply(e) : bit_reply(e);
      return base_witness(rc != want ? c : d);
    }
    std::string x = c.free_inputs().front();
    std::vector<std::string> dfi = d.free_inputs();
    if (std::find(dfi.begin(), dfi.end(), x) == dfi.end())
      throw std::logic_error("circuit equality: mismatched inputs");
    Circuit c0 = c.restricted(x, 0), c1 = c.restricted(x, 1);
    Circuit d0 = d.restricted(x, 0), d1 = d.restricted(x, 1);
    Reply rc0 = s.ask(key(c0)), rc1 = s.ask(key(c1));
    Reply rd0 = s.ask(key(d0)), rd1 = s.ask(key(d1));
    auto joins = [&](const Reply& whole, const Reply& r0, const Reply& r1) {
      if (counting) return whole == nat_add(r0, r1);
      return reply_bit(whole) == (reply_bit(r0) ^ reply_bit(r1));
    };
    if (!joins(rc, rc0, rc1)) return split_witness(c, x);
    if (!joins(rd, rd0, rd1)) return split_witness(d, x);
    if (rc0 != rd0) {
      c = std::move(c0), d = std::move(d0), rc = rc0, rd = rd0;
    } else {
      // replies join consistently and agree at branch 0, so they differ at 1
      c = std::move(c1), d = std::move(d1), rc = rc1, rd = rd1;
    }
  }
}

std::optional<FW> value_run(Session& s, Circuit c, bool counting,
                            const std::function<Reply(const Circuit&)>& expected) {
  auto key = [&](const Circuit& x) { return counting ? counting_key(x) : parity_key(x); };
  Reply rc = s.ask(key(c));
  while (true) {
    if (rc == expected(c)) return std::nullopt;
    if (c.closed()) return base_witness(std::move(c));
    std::string x = c.free_inputs().front();
    Circuit c0 = c.restricted(x, 0), c1 = c.restricted(x, 1);
    Reply r0 = s.ask(key(c0)), r1 = s.ask(key(c1));
    bool joins = counting ? rc == nat_add(r0, r1)
                          : reply_bit(rc) == (reply_bit(r0) ^ reply_bit(r1));
    if (!joins) return split_witness(std::move(c), x);
    // the claimed value decomposes, so some branch claim is also off
    if (r0 != expected(c0)) {
      c = std::move(c0), rc = r0;
    } else {
      c = std::move(c1), rc = r1;
    }
  }
}

}  // namespace

Enforceable enforce_parity_equal(Circuit c, Circuit d) {
  return {"parity equality of two circuit encodings",
          [c = std::move(c), d = std::move(d)](Session& s) {
            return circuit_equal_run(s, c, d, false);
          }};
}

Enforceable enforce_counting_equal(Circuit c, Circuit d) {
  return {"count equality of two circuit encodings",
          [c = std::move(c), d = std::move(d)](Session& s) {
            return circuit_equal_run(s, c, d, true);
          }};
}

Enforceable enforce_parity_value(Circuit c, std::function<Bit(const Circuit&)> expected) {
  return {"parity of a circuit with a known value",
          [c = std::move(c), expected = std::move(expected)](Session& s) {
            return value_run(s, c, false,
                             [&](const Circuit& x) { return bit_reply(expected(x)); });
          }};
}

Enforceable enforce_counting_value(Circuit c, std::function<uint64_t(const Circuit&)> expected) {
  return {"count of a circuit with a known value",
          [c = std::move(c), expected = std::move(expected)](Session& s) {
            return value_run(s, c, true,
                             [&](const Circuit& x) { return nat_reply(expected(x)); });
          }};
}

Enforceable enforce_parity_disjoint_union(Circuit x, Circuit y) {
  Circuit u = set_union(x, y);
  return {"parity additivity over a disjoint union",
          [u = std::move(u), x = std::move(x), y = std::move(y)](Session& s)
              -> std::optional<FW> {
            Circuit cu = u, cx = x, cy = y;
            Bit ru = s.ask_bit(parity_key(cu));
            Bit rx = s.ask_bit(parity_key(cx));
            Bit ry = s.ask_bit(parity_key(cy));
            while (true) {
              if (ru == (rx ^ ry)) return std::nullopt;
              if (cu.closed()) {
                // at a point: u = x | y, and disjointness makes | equal ^
                Bit ex = cx.eval(), ey = cy.eval();
                if (ex && ey) throw std::logic_error("disjoint union: sets intersect");
                if (ru != (ex | ey)) return base_witness(std::move(cu));
                if (rx != ex) return base_witness(std::move(cx));
                return base_witness(std::move(cy));
              }
              std::string v = cu.free_inputs().front();
              Circuit u0 = cu.restricted(v, 0), u1 = cu.restricted(v, 1);
              Circuit x0 = cx.restricted(v, 0), x1 = cx.restricted(v, 1);
              Circuit y0 = cy.restricted(v, 0), y1 = cy.restricted(v, 1);
              Bit ru0 = s.ask_bit(parity_key(u0)), ru1 = s.ask_bit(parity_key(u1));
              Bit rx0 = s.ask_bit(parity_key(x0)), rx1 = s.ask_bit(parity_key(x1));
              Bit ry0 = s.ask_bit(parity_key(y0)), ry1 = s.ask_bit(parity_key(y1));
              if (ru != (ru0 ^ ru1)) return split_witness(std::move(cu), v);
              if (rx != (rx0 ^ rx1)) return split_witness(std::move(cx), v);
              if (ry != (ry0 ^ ry1)) return split_witness(std::move(cy), v);
              if (ru0 != (rx0 ^ ry0)) {
                cu = std::move(u0), cx = std::move(x0), cy = std::move(y0);
                ru = ru0, rx = rx0, ry = ry0;
              } else {
                cu = std::move(u1), cx = std::move(x1), cy = std::move(y1);
                ru = ru1, rx = rx1, ry = ry1;
              }
            }
          }};
}

Enforceable enforce_qbf_equal(Qbf f, Qbf g) {
  return {"equality of two same-prefix formulas",
          [f = std::move(f), g = std::move(g)](Session& s) -> std::optional<FW> {
            Qbf cf = f, cg = g;
            if (cf.prefix != cg.prefix)
              throw std::logic_error("qbf equality: prefixes differ");
            Bit rf = s.ask_bit(tqbf_key(cf)), rg = s.ask_bit(tqbf_key(cg));
            while (true) {
              if (rf == rg) return std::nullopt;
              if (cf.prefix.empty()) {
                Bit e = cf.matrix.eval();
                if (cg.matrix.eval() != e)
                  throw std::logic_error("qbf equality: formulas differ");
                return qbf_witness(FW::Kind::TBase, rf != e ? std::move(cf) : std::move(cg));
              }
              // make cf the side claimed true
              if (!rf) {
                std::swap(cf, cg);
                std::swap(rf, rg);
              }
              Quant q = cf.prefix[0].first;
              Qbf f0 = cf.peeled(0), f1 = cf.peeled(1);
              Qbf g0 = cg.peeled(0), g1 = cg.peeled(1);
              Bit rf0 = s.ask_bit(tqbf_key(f0)), rf1 = s.ask_bit(tqbf_key(f1));
              Bit rg0 = s.ask_bit(tqbf_key(g0)), rg1 = s.ask_bit(tqbf_key(g1));
              if (q == Quant::Exists) {
                if (!rf0 && !rf1) return qbf_witness(FW::Kind::TExists, std::move(cf));
                if (rg0) return qbf_witness(FW::Kind::TExistsAt, std::move(cg), 0);
                if (rg1) return qbf_witness(FW::Kind::TExistsAt, std::move(cg), 1);
                Bit b = rf0 ? 0 : 1;  // cf branch claimed true, cg branch false
                cf = b ? std::move(f1) : std::move(f0);
                cg = b ? std::move(g1) : std::move(g0);
                rf = 1, rg = 0;
              } else {
                if (!rf0) return qbf_witness(FW::Kind::TForall, std::move(cf), 0);
                if (!rf1) return qbf_witness(FW::Kind::TForall, std::move(cf), 1);
                if (rg0 && rg1) return qbf_witness(FW::Kind::TForallAll, std::move(cg));
                Bit b = rg0 ? 1 : 0;  // cg branch claimed false, cf branch true
                cf = b ? std::move(f1) : std::move(f0);
                cg = b ? std::move(g1) : std::move(g0);
                rf = 1, rg = 0;
              }
            }
          }};
}

Enforceable enforce_qbf_dual(Qbf f) {
  return {"a formula and its dual disagree",
          [f = std::move(f)](Session& s) -> std::optional<FW> {
            Qbf cf = f, cg = f.dual();  // invariant: cg == dual(cf)
            Bit rf = s.ask_bit(tqbf_key(cf)), rg = s.ask_bit(tqbf_key(cg));
            while (true) {
              if (rf != rg) return std::nullopt;
              Bit r = rf;
              if (cf.prefix.empty()) {
                Bit e = cf.matrix.eval();
                // true values are e and 1-e; the shared claim is wrong for one
                return qbf_witness(FW::Kind::TBase, r != e ? std::move(cf) : std::move(cg));
              }
              Quant q = cf.prefix[0].first;
              // peeling commutes with duality on the canonical encoding
              Qbf f0 = cf.peeled(0), f1 = cf.peeled(1);
              Qbf g0 = cg.peeled(0), g1 = cg.peeled(1);
              Bit rf0 = s.ask_bit(tqbf_key(f0)), rf1 = s.ask_bit(tqbf_key(f1));
              Bit rg0 = s.ask_bit(tqbf_key(g0)), rg1 = s.ask_bit(tqbf_key(g1));
              // exactly one of cf, cg has the universal quantifier outermost
              Qbf& fa = q == Quant::Forall ? cf : cg;  // ∀ side
              Qbf& ex = q == Quant::Forall ? cg : cf;  // ∃ side
              Bit fa0 = q == Quant::Forall ? rf0 : rg0, fa1 = q == Quant::Forall ? rf1 : rg1;
              Bit ex0 = q == Quant::Forall ? rg0 : rf0, ex1 = q == Quant::Forall ? rg1 : rf1;
              Bit b;
              if (r) {
                if (!fa0) return qbf_witness(FW::Kind::TForall, std::move(fa), 0);
                if (!fa1) return qbf_witness(FW::Kind::TForall, std::move(fa), 1);
                if (!ex0 && !ex1) return qbf_witness(FW::Kind::TExists, std::move(ex));
                b = ex0 ? 0 : 1;  // both sides claim branch b true
              } else {
                if (ex0) return qbf_witness(FW::Kind::TExistsAt, std::move(ex), 0);
                if (ex1) return qbf_witness(FW::Kind::TExistsAt, std::move(ex), 1);
                if (fa0 && fa1) return qbf_witness(FW::Kind::TForallAll, std::move(fa));
                b = fa0 ? 1 : 0;  // both sides claim branch b false
              }
              cf = b ? std::move(f1) : std::move(f0);
              cg = b ? std::move(g1) : std::move(g0);
              rf = rg = r;
            }
          }};
}

Enforceable enforce_pspace_equal(MultiCircuit c, MultiCircuit d, std::string w, uint64_t t) {
  return {"step-for-step equality of two transition encodings",
          [c = std::move(c), d = std::move(d), w = std::move(w), t](Session& s)
              -> std::optional<FW> {
            auto at = [&](const MultiCircuit& m, uint64_t i) {
              return s.ask(pspace_key(m, w, i));
            };
            if (at(c, t) == at(d, t)) return std::nullopt;
            if (at(c, 0) != w) {
              FW fw;
              fw.kind = FW::Kind::Zero, fw.mc = c, fw.w = w;
              return fw;
            }
            if (at(d, 0) != w) {
              FW fw;
              fw.kind = FW::Kind::Zero, fw.mc = d, fw.w = w;
              return fw;
            }
            uint64_t i = first_diff(0, t, [&](uint64_t j) { return at(c, j) == at(d, j); });
            // equal configurations at i, different at i+1: one transition lies
            std::vector<Bit> cfg = reply_config(at(c, i));
            if (reply_config(at(c, i + 1)) != c.mo_eval(cfg)) return step_witness(c, w, i);
            if (reply_config(at(d, i + 1)) != d.mo_eval(cfg)) return step_witness(d, w, i);
            throw std::logic_error("pspace equality: transition functions differ");
          }};
}

Extraction extract_members(Session& s, const Circuit& c, uint64_t k) {
  Extraction out;
  // stack of (restriction, members still wanted here)
  std::vector<std::pair<Circuit, uint64_t>> todo{{c, k}};
  std::vector<std::string> names = c.free_inputs();
  while (!todo.empty()) {
    auto [cur, want] = std::move(todo.back());
    todo.pop_back();
    if (want == 0) continue;
    Reply r = s.ask(counting_key(cur));
    if (cur.closed()) {
      // want >= 1 here, and a point holds at most one member
      if (cur.eval() != 1 || want > 1) {
        out.witness = [&] {
          FailureWitness w;
          w.kind = FailureWitness::Kind::Base;
          w.c = cur;
          return w;
        }();
        // claimed count exceeded what a point can hold, or the point is
        // outside the set; either way the closed claim must be wrong for
        // the caller's invariant (claim >= want) to have held
        if (cur.eval() == 1 && r == nat_reply(1)) {
          // the lie happened higher up: the parent split overcommitted, but
          // splits were checked on the way down, so this cannot occur
          throw std::logic_error("extract: consistent overcommitted point");
        }
        return out;
      }
      Assignment full = cur.hardwired;
      out.members.push_back(assignment_to_u64(names, full));
      continue;
    }
    std::string x = cur.free_inputs().front();
    Circuit c0 = cur.restricted(x, 0), c1 = cur.restricted(x, 1);
    Reply r0 = s.ask(counting_key(c0)), r1 = s.ask(counting_key(c1));
    if (r != nat_add(r0, r1)) {
      FailureWitness w;
      w.kind = FailureWitness::Kind::Split;
      w.c = cur;
      w.var = x;
      out.witness = w;
      return out;
    }
    // distribute the demand by the claimed counts (claims >= want overall)
    uint64_t c0claim = nat_u64(r0).value_or(UINT64_MAX);
    uint64_t take0 = std::min(want, c0claim);
    todo.emplace_back(std::move(c1), want - take0);
    todo.emplace_back(std::move(c0), take0);
  }
  return out;
}

Extraction extract_odd_member(Session& s, const Circuit& c) {
  Extraction out;
  std::vector<std::string> names = c.free_inputs();
  Circuit cur = c;
  Bit r = s.ask_bit(parity_key(cur));
  if (!r) throw std::logic_error("extract: claimed parity is 0");
  while (!cur.closed()) {
    std::string x = cur.free_inputs().front();
    Circuit c0 = cur.restricted(x, 0), c1 = cur.restricted(x, 1);
    Bit r0 = s.ask_bit(parity_key(c0)), r1 = s.ask_bit(parity_key(c1));
    if (r != (r0 ^ r1)) {
      FailureWitness w;
      w.kind = FailureWitness::Kind::Split;
      w.c = cur;
      w.var = x;
      out.witness = w;
      return out;
    }
    if (r0) {
      cur = std::move(c0), r = r0;
    } else {
      cur = std::move(c1), r = r1;
    }
  }
  if (cur.eval() != 1) {
    FailureWitness w;
    w.kind = FailureWitness::Kind::Base;
    w.c = cur;
    out.witness = w;
    return out;
  }
  out.members.push_back(assignment_to_u64(names, cur.hardwired));
  return out;
}

namespace {

std::optional<FW> force_run(Session& s, Qbf f, Bit target,
                            std::function<Bit(const Qbf&)> branch) {
  if (!branch)
    branch = [target](const Qbf& g) -> Bit {
      // default: brute-force a branch whose true value matches the target
      return g.peeled(0).tqbf_eval() == target ? 0 : 1;
    };
  Bit r = s.ask_bit(tqbf_key(f));
  while (true) {
    if (r == target) return std::nullopt;  // adversary concedes
    if (f.prefix.empty())
      return qbf_witness(FW::Kind::TBase, std::move(f));
    Quant q = f.prefix[0].first;
    bool branch_quant = (target == 1) == (q == Quant::Exists);
    if (branch_quant) {
      // peel along a branch that truly has the target value
      Bit b = branch(f);
      Qbf child = f.peeled(b);
      Bit rb = s.ask_bit(tqbf_key(child));
      if (rb != r) {
        // child claim flipped to the target: parent claim is the lie
        if (target == 1)
          return qbf_witness(FW::Kind::TExistsAt, std::move(f), b);
        return qbf_witness(FW::Kind::TForall, std::move(f), b);
      }
      f = std::move(child);
      r = rb;
    } else {
      // every branch truly has the target value: ask both
      Qbf f0 = f.peeled(0), f1 = f.peeled(1);
      Bit r0 = s.ask_bit(tqbf_key(f0)), r1 = s.ask_bit(tqbf_key(f1));
      if (r0 != r && r1 != r) {
        if (target == 1) return qbf_witness(FW::Kind::TForallAll, std::move(f));
        return qbf_witness(FW::Kind::TExists, std::move(f));
      }
      if (r0 == r) {
        f = std::move(f0), r = r0;
      } else {
        f = std::move(f1), r = r1;
      }
    }
  }
}

}  // namespace

std::optional<FailureWitness> qbf_force_true(Session& s, const Qbf& f,
                                             std::function<Bit(const Qbf&)> exists_branch) {
  return force_run(s, f, 1, std::move(exists_branch));
}

std::optional<FailureWitness> qbf_force_false(Session& s, const Qbf& f,
                                              std::function<Bit(const Qbf&)> forall_branch) {
  return force_run(s, f, 0, std::move(forall_branch));
}

}  // namespace owb
