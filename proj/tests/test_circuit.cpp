#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "owb/circuit.hpp"

using namespace owb;

// Reference evaluator, written independently of Circuit::eval: straight
// recursion over gate ids with no memoization or iteration tricks.
static Bit ref_eval(const Circuit& c, uint32_t id, const Assignment& a) {
  const Gate& g = c.gates[id];
  switch (g.kind) {
    case GateKind::Input: {
      auto h = c.hardwired.find(g.name);
      if (h != c.hardwired.end()) return h->second;
      auto it = a.find(g.name);
      REQUIRE(it != a.end());
      return it->second;
    }
    case GateKind::Const0:
      return 0;
    case GateKind::Const1:
      return 1;
    case GateKind::And: {
      for (uint32_t x : g.args)
        if (!ref_eval(c, x, a)) return 0;
      return 1;
    }
    case GateKind::Or: {
      for (uint32_t x : g.args)
        if (ref_eval(c, x, a)) return 1;
      return 0;
    }
    case GateKind::Not:
      return ref_eval(c, g.args[0], a) ? 0 : 1;
  }
  return 0;
}

static Bit ref_eval(const Circuit& c, const Assignment& a) {
  return ref_eval(c, c.output, a);
}

// Brute-force model count via the reference evaluator.
static uint64_t ref_count(const Circuit& c) {
  std::vector<std::string> fi = c.free_inputs();
  uint64_t total = 0;
  for (uint64_t v = 0; v < (1ull << fi.size()); ++v)
    total += ref_eval(c, u64_to_assignment(fi, v));
  return total;
}

static Circuit random_circuit(std::mt19937_64& rng, unsigned n_inputs,
                              unsigned n_gates) {
  CircuitBuilder b;
  std::vector<uint32_t> pool;
  for (unsigned i = 0; i < n_inputs; ++i) pool.push_back(b.input("x" + std::to_string(i)));
  pool.push_back(b.konst(0));
  pool.push_back(b.konst(1));
  for (unsigned i = 0; i < n_gates; ++i) {
    unsigned pick = rng() % 3;
    if (pick == 2) {
      pool.push_back(b.gnot(pool[rng() % pool.size()]));
    } else {
      std::vector<uint32_t> args;
      unsigned fanin = rng() % 4;  // empty gates allowed on purpose
      for (unsigned j = 0; j < fanin; ++j) args.push_back(pool[rng() % pool.size()]);
      pool.push_back(pick == 0 ? b.gand(std::move(args)) : b.gor(std::move(args)));
    }
  }
  return b.take(pool.back());
}

TEST_CASE("gate conventions: empty and/or, consts, not") {
  CircuitBuilder b;
  uint32_t e_and = b.gand({});
  uint32_t e_or = b.gor({});
  uint32_t both = b.gand({b.gnot(e_or), e_and});
  Circuit c = b.take(both);
  c.validate();
  CHECK(c.eval() == 1);
}

TEST_CASE("validate rejects malformed circuits") {
  Circuit c;
  c.gates.push_back(Gate{GateKind::Not, "", {1}});  // forward reference
  c.gates.push_back(Gate{GateKind::Const0, "", {}});
  c.output = 0;
  CHECK_THROWS(c.validate());

  Circuit d;
  d.gates.push_back(Gate{GateKind::Input, "x", {}});
  d.gates.push_back(Gate{GateKind::Input, "x", {}});  // duplicate input name
  d.output = 1;
  CHECK_THROWS(d.validate());

  Circuit e;
  e.gates.push_back(Gate{GateKind::Const1, "", {}});
  e.output = 0;
  e.hardwired["ghost"] = 1;  // hardwires a non-existent input
  CHECK_THROWS(e.validate());

  Circuit f;
  f.gates.push_back(Gate{GateKind::Const1, "", {}});
  f.output = 3;  // output out of range
  CHECK_THROWS(f.validate());
}

TEST_CASE("eval matches reference on random circuits") {
  std::mt19937_64 rng(2026);
  for (int t = 0; t < 200; ++t) {
    Circuit c = random_circuit(rng, 4, 12);
    c.validate();
    std::vector<std::string> fi = c.free_inputs();
    for (uint64_t v = 0; v < (1ull << fi.size()); ++v) {
      Assignment a = u64_to_assignment(fi, v);
      CHECK(c.eval_on(a) == ref_eval(c, a));
    }
  }
}

TEST_CASE("restriction is recorded, not rewritten") {
  std::mt19937_64 rng(7);
  Circuit c = random_circuit(rng, 3, 10);
  Circuit r = c.restricted("x1", 1);
  CHECK(r.gates.size() == c.gates.size());  // DAG untouched
  CHECK(r.hardwired.at("x1") == 1);
  std::vector<std::string> fi = r.free_inputs();
  CHECK(std::find(fi.begin(), fi.end(), "x1") == fi.end());
  for (uint64_t v = 0; v < (1ull << fi.size()); ++v) {
    Assignment a = u64_to_assignment(fi, v);
    Assignment full = a;
    full["x1"] = 1;
    CHECK(r.eval_on(a) == ref_eval(c, full));
  }
  // restricting an already-hardwired input is an error
  CHECK_THROWS(r.restricted("x1", 0));
}

TEST_CASE("restriction order does not matter for the canonical encoding") {
  std::mt19937_64 rng(11);
  Circuit c = random_circuit(rng, 4, 8);
  Circuit a = c.restricted("x0", 1).restricted("x3", 0);
  Circuit b = c.restricted("x3", 0).restricted("x0", 1);
  CHECK(a == b);
  Assignment rho{{"x0", 1}, {"x3", 0}};
  CHECK(a == c.restricted(rho));
}

TEST_CASE("count_sat and parity match brute force") {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 100; ++t) {
    Circuit c = random_circuit(rng, 5, 15);
    uint64_t expect = ref_count(c);
    CHECK(c.count_sat() == expect);
    CHECK(c.parity() == (expect & 1));
  }
}

TEST_CASE("count_sat enforces the free-input cap") {
  CircuitBuilder b;
  std::vector<uint32_t> xs;
  for (unsigned i = 0; i < 6; ++i) xs.push_back(b.input("x" + std::to_string(i)));
  Circuit c = b.take(b.gor(std::move(xs)));
  CHECK_THROWS(c.count_sat(5));
  CHECK(c.count_sat(6) == 63);
}

TEST_CASE("encode/decode and text round trips") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 50; ++t) {
    Circuit c = random_circuit(rng, 4, 10).restricted("x2", t & 1);
    Circuit d = Circuit::decode(c.encode());
    CHECK(c == d);
    Circuit e = Circuit::parse_text(c.to_text());
    CHECK(c == e);
  }
}

TEST_CASE("text format is human-editable") {
  Circuit c = Circuit::parse_text(
      "# tiny majority-ish circuit\n"
      "0 input a\n"
      "1 input b\n"
      "2 and 0 1\n"
      "3 or 0 1\n"
      "4 not 2\n"
      "5 and 3 4\n"
      "output 5\n"
      "hardwired b=1\n");
  CHECK(c.free_inputs() == std::vector<std::string>{"a"});
  CHECK(c.eval_on({{"a", 0}}) == 1);  // exactly one of a,b
  CHECK(c.eval_on({{"a", 1}}) == 0);
}

TEST_CASE("builder comparators match integer arithmetic") {
  std::mt19937_64 rng(5);
  for (unsigned n = 1; n <= 4; ++n) {
    for (int t = 0; t < 10; ++t) {
      uint64_t k = rng() % (1ull << n);
      CircuitBuilder b;
      std::vector<uint32_t> xs, ys;
      for (unsigned i = 0; i < n; ++i) xs.push_back(b.input("x" + std::to_string(i)));
      for (unsigned i = 0; i < n; ++i) ys.push_back(b.input("y" + std::to_string(i)));
      uint32_t lt = b.lt_const(xs, k);
      uint32_t eq = b.eq_const(xs, k);
      uint32_t ltv = b.lt_vec(xs, ys);
      uint32_t eqv = b.eq_vec(xs, ys);
      MultiCircuit m = b.take_multi({lt, eq, ltv, eqv});
      for (uint64_t x = 0; x < (1ull << n); ++x) {
        for (uint64_t y = 0; y < (1ull << n); ++y) {
          std::vector<Bit> in;
          for (unsigned i = 0; i < n; ++i) in.push_back((x >> (n - 1 - i)) & 1);
          for (unsigned i = 0; i < n; ++i) in.push_back((y >> (n - 1 - i)) & 1);
          std::vector<Bit> out = m.mo_eval(in);
          CHECK(out[0] == (x < k));
          CHECK(out[1] == (x == k));
          CHECK(out[2] == (x < y));
          CHECK(out[3] == (x == y));
        }
      }
    }
  }
}

TEST_CASE("builder mux and xor") {
  CircuitBuilder b;
  uint32_t s = b.input("s"), p = b.input("p"), q = b.input("q");
  MultiCircuit m = b.take_multi({b.gmux(s, p, q), b.gxor(p, q), b.gxnor(p, q)});
  for (int v = 0; v < 8; ++v) {
    Bit sv = v >> 2 & 1, pv = v >> 1 & 1, qv = v & 1;
    std::vector<Bit> out = m.mo_eval({sv, pv, qv});
    CHECK(out[0] == (sv ? qv : pv));
    CHECK(out[1] == (pv ^ qv));
    CHECK(out[2] == (1 ^ pv ^ qv));
  }
}

TEST_CASE("embed rewires by name and honours hardwired bits") {
  CircuitBuilder inner;
  uint32_t a = inner.input("a"), bb = inner.input("b"), cc = inner.input("c");
  Circuit sub = inner.take(inner.gand({inner.gxor(a, bb), cc})).restricted("c", 1);

  CircuitBuilder outer;
  uint32_t p = outer.input("p"), q = outer.input("q");
  // a := p AND q, b falls through to the like-named outer input.
  uint32_t got = outer.embed(sub, {{"a", outer.gand({p, q})}}, {sub.output})[0];
  Circuit c = outer.take(got);
  std::vector<std::string> fi = c.free_inputs();
  std::sort(fi.begin(), fi.end());
  CHECK(fi == std::vector<std::string>{"b", "p", "q"});
  for (int v = 0; v < 8; ++v) {
    Bit pv = v >> 2 & 1, qv = v >> 1 & 1, bv = v & 1;
    CHECK(c.eval_on({{"p", pv}, {"q", qv}, {"b", bv}}) == ((pv & qv) ^ bv));
  }
}

TEST_CASE("x0 is the most significant bit in set and table helpers") {
  unsigned n = 3;
  // singleton {5} = 101: x0=1, x1=0, x2=1
  Circuit s = set_singleton(5, n);
  CHECK(s.eval_on({{"x0", 1}, {"x1", 0}, {"x2", 1}}) == 1);
  CHECK(s.eval_on({{"x0", 1}, {"x1", 0}, {"x2", 0}}) == 0);
  CHECK(s.count_sat() == 1);

  Circuit lt = set_interval_lt(n, 5);
  for (uint64_t x = 0; x < 8; ++x)
    CHECK(lt.eval_on(u64_to_assignment(numbered_inputs(n), x)) == (x < 5));
  CHECK(set_full(n).count_sat() == 8);
  CHECK(set_union(lt, s).count_sat() == 6);
}

TEST_CASE("table_multicircuit and eval_u64 agree with the table") {
  std::mt19937_64 rng(123);
  for (int t = 0; t < 10; ++t) {
    unsigned in = 1 + rng() % 3, out = 1 + rng() % 3;
    std::vector<uint64_t> table(1ull << in);
    for (auto& v : table) v = rng() % (1ull << out);
    MultiCircuit m = table_multicircuit(in, out, table);
    m.validate();
    CHECK(m.outputs.size() == out);
    for (uint64_t x = 0; x < table.size(); ++x) CHECK(m.eval_u64(x) == table[x]);
  }
}

TEST_CASE("set_fn helpers classify by function value") {
  std::vector<uint64_t> table{3, 1, 0, 3};
  MultiCircuit f = table_multicircuit(2, 2, table);
  for (uint64_t i = 0; i < 4; ++i) {
    Circuit lt = set_fn_lt(f, i);
    Circuit eq = set_fn_eq(f, i);
    for (uint64_t x = 0; x < 4; ++x) {
      Assignment a = u64_to_assignment(numbered_inputs(2), x);
      CHECK(lt.eval_on(a) == (table[x] < i));
      CHECK(eq.eval_on(a) == (table[x] == i));
    }
  }
}

TEST_CASE("assignment u64 helpers are msb-first inverses") {
  std::vector<std::string> names{"a", "b", "c"};
  for (uint64_t v = 0; v < 8; ++v) {
    Assignment a = u64_to_assignment(names, v);
    CHECK(a.at("a") == (v >> 2 & 1));
    CHECK(assignment_to_u64(names, a) == v);
  }
}

TEST_CASE("multicircuit round trips") {
  std::vector<uint64_t> table{2, 0, 1, 3};
  MultiCircuit m = table_multicircuit(2, 2, table);
  CHECK(MultiCircuit::decode(m.encode()) == m);
  CHECK(MultiCircuit::parse_text(m.to_text()) == m);
}
