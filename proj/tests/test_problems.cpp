#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "owb/pnp.hpp"
#include "owb/problems.hpp"

using namespace owb;

namespace {

std::mt19937_64 rng(20260826);

uint64_t rnd(uint64_t bound) { return bound ? rng() % bound : 0; }

Func random_table_func(unsigned in_bits, unsigned out_bits) {
  std::vector<uint64_t> t(1ull << in_bits);
  for (auto& v : t) v = rnd(1ull << out_bits);
  return Func::from_table(in_bits, out_bits, std::move(t));
}

Instance choice_instance(const std::string& problem, unsigned n, bool constant_zero = false) {
  Instance inst;
  inst.problem = problem;
  inst.n = n;
  unsigned w = choice_arg_bits(inst);
  for (unsigned i = 0; i + 1 < n; ++i) {
    Func f = random_table_func((i + 2) * w, 1);
    if (constant_zero) std::fill(f.table.begin(), f.table.end(), 0);
    inst.funcs["P" + std::to_string(i)] = std::move(f);
  }
  return inst;
}

// Independent re-check of the b-sequence condition: distinct elements, then a
// plain double loop over all (i, j) pairs.
bool naive_b_sequence(const Instance& inst, const std::vector<Bit>& b,
                      const std::vector<uint64_t>& a) {
  std::set<uint64_t> seen(a.begin(), a.end());
  if (seen.size() != a.size()) return false;
  unsigned w = choice_arg_bits(inst);
  for (size_t j = 0; j < a.size(); ++j)
    for (size_t i = 0; i < b.size() && i < j; ++i) {
      std::vector<uint64_t> args(a.begin(), a.begin() + i + 1);
      args.push_back(a[j]);
      if ((inst.func("P" + std::to_string(i))(pack_args(args, w)) & 1) != b[i]) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("shape enumeration walks lexicographically and respects widths") {
  Shape s{2, 1};
  Solution y = zero_of_shape(s);
  std::vector<Solution> seen{y};
  while (next_in_shape(s, y)) seen.push_back(y);
  CHECK(seen.size() == 8);
  CHECK(seen[0] == Solution{0, 0});
  CHECK(seen[1] == Solution{0, 1});
  CHECK(seen[2] == Solution{1, 0});
  CHECK(seen.back() == Solution{3, 1});
  CHECK(shape_fits(s, {3, 1}));
  CHECK(!shape_fits(s, {4, 0}));
  CHECK(!shape_fits(s, {0}));
  CHECK(shape_space(s) == 8);
  CHECK_THROWS(shape_space(Shape{30, 30}, 40));
}

TEST_CASE("func backings agree and serialize through instance text") {
  Func t = random_table_func(3, 2);
  Func c = Func::from_circuit(t.as_multicircuit());
  for (uint64_t x = 0; x < 8; ++x) CHECK(t(x) == c(x));

  Instance inst;
  inst.problem = "lonely";
  inst.n = 3;
  inst.funcs["N"] = random_table_func(3, 3);
  inst.funcs["C"] = c;
  inst.scalars["x"] = 5;
  inst.tags["machine"] = "binary_search_least";
  inst.sets["S"] = {1, 2, 3};
  std::string text = inst.to_text();
  Instance back = Instance::parse_text(text);
  CHECK(back.to_text() == text);
  CHECK(back.n == 3);
  CHECK(back.funcs.at("N").table == inst.funcs.at("N").table);
  for (uint64_t x = 0; x < 8; ++x) CHECK(back.func("C")(x) == c(x));
  CHECK_THROWS(Instance::parse_text("n 3\n"));  // no problem line
}

TEST_CASE("left pigeon forced example and brute order") {
  Instance inst;
  inst.problem = "left_pigeon";
  inst.n = 1;
  inst.funcs["f"] = Func::from_table(1, 1, {0, 0});
  inst.funcs["g"] = Func::from_table(1, 1, {0, 0});
  const TfnpProblem& p = tfnp("left_pigeon");
  p.validate(inst);
  CHECK(p.check(inst, {1}));
  CHECK(!p.check(inst, {0}));
  CHECK(p.brute(inst) == Solution{1});
}

TEST_CASE("pigeon: validation rejects out-of-range tables, brute is least collision") {
  Instance inst;
  inst.problem = "pigeon";
  inst.n = 2;
  inst.funcs["f"] = Func::from_table(2, 2, {0, 3, 1, 2});  // 3 is not a hole
  CHECK_THROWS(tfnp("pigeon").validate(inst));
  inst.funcs["f"] = Func::from_table(2, 2, {1, 0, 1, 2});
  tfnp("pigeon").validate(inst);
  Solution y = tfnp("pigeon").brute(inst);
  CHECK(y == Solution{0, 2});  // lexicographically first collision pair
  CHECK(tfnp("pigeon").check(inst, y));
  CHECK(!tfnp("pigeon").check(inst, {1, 1}));
}

TEST_CASE("onto pigeon accepts either direction of mismatch") {
  Instance inst;
  inst.problem = "onto_pigeon";
  inst.n = 2;
  inst.funcs["f"] = Func::from_table(2, 2, {0, 1, 2, 0});
  inst.funcs["g"] = Func::from_table(2, 2, {0, 1, 2, 0});
  const TfnpProblem& p = tfnp("onto_pigeon");
  p.validate(inst);
  // g(f(3)) = 0 != 3, and f(g(y)) = y for y < 3, so the pigeon side solves
  CHECK(p.check(inst, {0, 3}));
  CHECK(!p.check(inst, {1, 0}));
  CHECK(!p.check(inst, {1, 3}));  // hole 3 out of range
  CHECK(p.check(inst, p.brute(inst)));
}

TEST_CASE("lonely and leaf graph conventions") {
  Instance lone;
  lone.problem = "lonely";
  lone.n = 2;
  // partner map: 2 <-> 3, nodes 0 and 1 unmatched (1 points at 0 in vain)
  lone.funcs["N"] = Func::from_table(2, 2, {0, 0, 3, 2});
  CHECK(!lonely_matched(lone, 0));
  CHECK(!lonely_matched(lone, 1));
  CHECK(lonely_matched(lone, 2));
  CHECK(lonely_matched(lone, 3));
  CHECK(tfnp("lonely").brute(lone) == Solution{1});

  Instance leaf;
  leaf.problem = "leaf";
  leaf.n = 2;
  // path 0 - 1 - 2, node 3 isolated (lists 0 unreciprocated)
  auto pack2 = [](uint64_t a, uint64_t b) { return (a << 2) | b; };
  leaf.funcs["N"] = Func::from_table(
      2, 4, {pack2(1, 1), pack2(0, 2), pack2(1, 1), pack2(0, 0)});
  tfnp("leaf").validate(leaf);
  CHECK(leaf_degree(leaf, 0) == 1);
  CHECK(leaf_degree(leaf, 1) == 2);
  CHECK(leaf_degree(leaf, 2) == 1);
  CHECK(leaf_degree(leaf, 3) == 0);
  CHECK(tfnp("leaf").brute(leaf) == Solution{2});
  // a self-loop candidate never makes an edge
  leaf.funcs["N"] = Func::from_table(2, 4, {pack2(0, 1), pack2(0, 0), pack2(2, 2), pack2(3, 3)});
  tfnp("leaf").validate(leaf);
  CHECK(leaf_degree(leaf, 2) == 0);
  // and degree-0 node 0 is a malformed instance
  leaf.funcs["N"] = Func::from_table(2, 4, {pack2(0, 0), pack2(1, 1), pack2(2, 2), pack2(3, 3)});
  CHECK_THROWS(tfnp("leaf").validate(leaf));
}

TEST_CASE("localopt spec example and malformed instance") {
  Instance inst;
  inst.problem = "localopt";
  inst.n = 2;
  inst.funcs["S"] = Func::from_table(2, 1, {0, 0, 0, 1});  // S = {3}
  inst.funcs["N"] = Func::from_table(2, 2, {0, 0, 0, 3});  // N(3) = 3
  const TfnpProblem& p = tfnp("localopt");
  p.validate(inst);
  CHECK(p.check(inst, {3}));
  CHECK(p.brute(inst) == Solution{3});
  inst.funcs["S"] = Func::from_table(2, 1, {1, 0, 0, 0});  // top element missing
  CHECK_THROWS(p.validate(inst));
}

TEST_CASE("random TFNP instances: brute output always passes the predicate") {
  for (int round = 0; round < 200; ++round) {
    unsigned n = 2 + static_cast<unsigned>(rnd(2));
    {
      Instance inst;
      inst.problem = "weak_pigeon";
      inst.n = n;
      inst.funcs["f"] = random_table_func(n, n - 1);
      Solution y = tfnp("weak_pigeon").brute(inst);
      CHECK(tfnp("weak_pigeon").check(inst, y));
    }
    {
      Instance inst;
      inst.problem = "retraction_weak_pigeon";
      inst.n = n;
      inst.funcs["f"] = random_table_func(n, n + 1);
      inst.funcs["g"] = random_table_func(n + 1, n);
      Solution y = tfnp("retraction_weak_pigeon").brute(inst);
      CHECK(tfnp("retraction_weak_pigeon").check(inst, y));
    }
    {
      Instance inst;
      inst.problem = "lonely";
      inst.n = n;
      inst.funcs["N"] = random_table_func(n, n);
      Solution y = tfnp("lonely").brute(inst);
      CHECK(tfnp("lonely").check(inst, y));
    }
    {
      Instance inst;
      inst.problem = "localopt";
      inst.n = n;
      Func s = random_table_func(n, 1);
      s.table.back() = 1;
      inst.funcs["S"] = s;
      inst.funcs["N"] = random_table_func(n, n);
      Solution y = tfnp("localopt").brute(inst);
      CHECK(tfnp("localopt").check(inst, y));
    }
  }
}

TEST_CASE("ramsey: every graph on 16 nodes has a monochromatic pair") {
  for (int round = 0; round < 100; ++round) {
    Instance inst;
    inst.problem = "ramsey";
    inst.n = 4;
    inst.funcs["E"] = random_table_func(8, 1);
    Solution y = tfnp("ramsey").brute(inst);
    REQUIRE(y.size() == 2);
    CHECK(tfnp("ramsey").check(inst, y));
    CHECK(!tfnp("ramsey").check(inst, {y[0], y[0]}));  // distinctness required
  }
  // a size-3 set is needed at n = 5 and colours must agree
  Instance inst;
  inst.problem = "ramsey";
  inst.n = 5;
  inst.funcs["E"] = Func::from_table(10, 1, std::vector<uint64_t>(1 << 10, 1));
  CHECK(tfnp("ramsey").check(inst, {0, 1, 2}));
  Solution y = tfnp("ramsey").brute(inst);
  CHECK(y == Solution{0, 1, 2});
}

TEST_CASE("is_b_sequence matches the naive double-loop oracle") {
  Instance inst = choice_instance("long_choice", 2, true);
  CHECK(is_b_sequence(inst, {0}, {0, 1, 2}));
  CHECK(!is_b_sequence(inst, {0}, {0, 1, 1}));  // repeated element
  CHECK(!is_b_sequence(inst, {1}, {0, 1, 2}));  // constant-0 P contradicts b=1
  CHECK_THROWS_AS(is_b_sequence(inst, {0, 0}, {0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(is_b_sequence(inst, {0}, {4}), std::invalid_argument);

  for (int round = 0; round < 300; ++round) {
    Instance ri = choice_instance("long_choice", 3);
    std::vector<Bit> b;
    for (unsigned i = 0; i < rnd(3); ++i) b.push_back(static_cast<Bit>(rnd(2)));
    std::vector<uint64_t> a;
    for (unsigned i = 0; i < rnd(5); ++i) a.push_back(rnd(8));
    CHECK(is_b_sequence(ri, b, a) == naive_b_sequence(ri, b, a));
  }
}

TEST_CASE("b-sequence prefix closure") {
  for (int round = 0; round < 100; ++round) {
    Instance inst = choice_instance("long_choice", 3);
    auto [b, a] = brute_long_choice(inst);
    REQUIRE(is_b_sequence(inst, b, a));
    for (size_t i = 0; i + 1 < a.size(); ++i) {
      std::vector<Bit> pb(b.begin(), b.begin() + std::min(b.size(), i));
      std::vector<uint64_t> pa(a.begin(), a.begin() + i + 1);
      CHECK(is_b_sequence(inst, pb, pa));
    }
  }
}

TEST_CASE("long choice construction: forced example and random totality") {
  Instance inst = choice_instance("long_choice", 2, true);
  auto [b, a] = brute_long_choice(inst);
  CHECK(b == std::vector<Bit>{0});
  CHECK(a == std::vector<uint64_t>{0, 1, 2});

  for (const std::string& variant : {std::string("long_choice"), std::string("weak_long_choice")})
    for (int round = 0; round < 150; ++round) {
      unsigned n = 2 + static_cast<unsigned>(rnd(3));
      Instance ri = choice_instance(variant, n);
      Solution y = tfnp(variant).brute(ri);
      CHECK(tfnp(variant).check(ri, y));
      REQUIRE(y.size() == (n - 1) + (n + 1));
    }
}

TEST_CASE("short choice construction has zero counterexamples by enumeration") {
  Instance cz = choice_instance("short_choice", 2, true);
  auto [b, a] = brute_short_choice(cz);
  CHECK(b.size() == a.size());
  CHECK(tfs2_solution_ok(tfs2("short_choice"), cz, tfs2("short_choice").brute(cz)));

  for (const std::string& variant :
       {std::string("short_choice"), std::string("weak_short_choice")})
    for (int round = 0; round < 150; ++round) {
      unsigned lo = variant == "weak_short_choice" ? 3 : 2;
      unsigned n = lo + static_cast<unsigned>(rnd(2));
      Instance ri = choice_instance(variant, n);
      Solution y = tfs2(variant).brute(ri);
      CHECK(tfs2_solution_ok(tfs2(variant), ri, y));
    }
}

TEST_CASE("least number, empty and dual weak pigeon relations") {
  Instance ln;
  ln.problem = "least_number";
  ln.n = 3;
  ln.funcs["S"] = Func::from_table(3, 1, {0, 0, 1, 1, 0, 0, 0, 0});
  ln.scalars["x"] = 3;
  const Tfs2Problem& lp = tfs2("least_number");
  lp.validate(ln);
  CHECK(lp.brute(ln) == Solution{2});
  CHECK(!lp.rel(ln, {3}, {2}));  // member below the claim refutes it
  CHECK(lp.rel(ln, {3}, {4}));
  ln.scalars["x"] = 4;  // not a member
  CHECK_THROWS(lp.validate(ln));

  Instance em;
  em.problem = "empty";
  em.n = 2;
  em.funcs["f"] = Func::from_table(2, 2, {1, 1, 2, 0});  // pigeons 0,1,2; image {1,2}
  CHECK(tfs2("empty").brute(em) == Solution{0});
  CHECK(!tfs2("empty").rel(em, {1}, {0}));
  CHECK(tfs2("empty").rel(em, {0}, {3}));  // 3 is not a pigeon

  Instance dw;
  dw.problem = "dual_weak_pigeon";
  dw.n = 2;
  dw.funcs["f"] = Func::from_table(2, 3, {7, 6, 5, 4});
  Solution hole = tfs2("dual_weak_pigeon").brute(dw);
  CHECK(hole == Solution{0});
  CHECK(tfs2_solution_ok(tfs2("dual_weak_pigeon"), dw, hole));
}

TEST_CASE("min: total orders yield their least element, defects are found") {
  unsigned n = 2;
  auto rel_from = [&](auto f) {
    std::vector<uint64_t> t(1 << (2 * n));
    for (uint64_t u = 0; u < 4; ++u)
      for (uint64_t v = 0; v < 4; ++v) t[(u << n) | v] = f(u, v) ? 1 : 0;
    return Func::from_table(2 * n, 1, std::move(t));
  };
  Instance inst;
  inst.problem = "min";
  inst.n = n;
  inst.funcs["R"] = rel_from([](uint64_t u, uint64_t v) { return u <= v; });
  Solution y = tfs2("min").brute(inst);
  CHECK(y == Solution{0, 0, 0, 0});  // least element 0
  CHECK(tfs2_solution_ok(tfs2("min"), inst, y));

  // reversed order: least element is 3
  inst.funcs["R"] = rel_from([](uint64_t u, uint64_t v) { return u >= v; });
  CHECK(tfs2_solution_ok(tfs2("min"), inst, {0, 3, 0, 0}));
  CHECK(!tfs2_solution_ok(tfs2("min"), inst, {0, 1, 0, 0}));

  // break transitivity: 0<1, 1<2 but not 0<2
  inst.funcs["R"] = rel_from([](uint64_t u, uint64_t v) {
    if (u == v) return true;
    if (u == 0 && v == 2) return false;
    if (u == 2 && v == 0) return true;
    return u < v;
  });
  Solution d = tfs2("min").brute(inst);
  CHECK(tfs2_solution_ok(tfs2("min"), inst, d));
  CHECK(d[0] != 0);  // a defect, not a least-element claim

  for (int round = 0; round < 100; ++round) {
    Instance ri;
    ri.problem = "min";
    ri.n = 2;
    ri.funcs["R"] = random_table_func(4, 1);
    CHECK(tfs2_solution_ok(tfs2("min"), ri, tfs2("min").brute(ri)));
  }
}

TEST_CASE("tournament: greedy dominating set verified by enumeration") {
  for (int round = 0; round < 150; ++round) {
    Instance inst;
    inst.problem = "tournament";
    inst.n = 2 + static_cast<unsigned>(rnd(2));
    inst.funcs["B"] = random_table_func(2 * inst.n, 1);
    Solution y = tfs2("tournament").brute(inst);
    REQUIRE(y.size() == inst.n);
    CHECK(tfs2_solution_ok(tfs2("tournament"), inst, y));
  }
  // the tie-broken relation is a genuine tournament regardless of the circuit
  Instance inst;
  inst.problem = "tournament";
  inst.n = 2;
  inst.funcs["B"] = random_table_func(4, 1);
  for (uint64_t u = 0; u < 4; ++u)
    for (uint64_t v = 0; v < 4; ++v) {
      if (u == v) {
        CHECK(!tournament_beats(inst, u, v));
      } else {
        CHECK(tournament_beats(inst, u, v) != tournament_beats(inst, v, u));
      }
    }
}

TEST_CASE("binary search machine finds the least member with an honest oracle") {
  Instance inst;
  inst.problem = "pnp";
  inst.n = 2;
  inst.funcs["S"] = Func::from_table(2, 1, {0, 0, 1, 1});  // S = {2,3}
  inst.tags["machine"] = "binary_search_least";
  const PnpMachine& m = pnp_machine("binary_search_least");
  PnpRun run = run_pnp(m, inst, 0, honest_np_oracle());
  CHECK(run.output == 2);
  CHECK(pnp_run_valid(m, inst, 0, run));
  // no NO reply of the honest run can be refuted
  for (unsigned idx = 0; idx < 2; ++idx)
    for (uint64_t w = 0; w < 4; ++w) CHECK(!check_pnp_counterexample(m, inst, 0, run, idx, w));

  // an oracle lying NO on the second query yields output 3 and a counterexample
  NpOracle honest = honest_np_oracle();
  int asked = 0;
  NpOracle liar = [&](const Circuit& q) -> std::optional<uint64_t> {
    return ++asked == 2 ? std::nullopt : honest(q);
  };
  PnpRun lie = run_pnp(m, inst, 0, liar);
  CHECK(lie.output == 3);
  CHECK(pnp_run_valid(m, inst, 0, lie));  // a precomputation, but refutable
  CHECK(check_pnp_counterexample(m, inst, 0, lie, 1, 0));
}

TEST_CASE("pnp problem: honest run is counterexample-free, lies are caught") {
  for (int round = 0; round < 50; ++round) {
    Instance inst;
    inst.problem = "pnp";
    inst.n = 2;
    Func s = random_table_func(2, 1);
    uint64_t member = rnd(4);
    s.table[member] = 1;
    inst.funcs["S"] = s;
    inst.scalars["x"] = member;
    inst.tags["machine"] = "binary_search_least";
    const Tfs2Problem& p = tfs2("pnp");
    p.validate(inst);
    Solution y = p.brute(inst);
    CHECK(tfs2_solution_ok(p, inst, y));
  }
  // zero-query machines admit no counterexample at all
  Instance pl;
  pl.problem = "pnp";
  pl.n = 2;
  pl.funcs["F"] = random_table_func(2, 3);
  pl.tags["machine"] = "plain_F";
  Solution y = tfs2("pnp").brute(pl);
  CHECK(y.empty());
  CHECK(tfs2_solution_ok(tfs2("pnp"), pl, y));
}

TEST_CASE("rwpp2 with plain machines matches direct retraction search") {
  for (int round = 0; round < 100; ++round) {
    Instance inst;
    inst.problem = "rwpp2";
    inst.n = 2;
    inst.funcs["F"] = random_table_func(2, 3);
    inst.funcs["G"] = random_table_func(3, 2);
    inst.tags["F"] = "plain_F";
    inst.tags["G"] = "plain_G";
    const Tfs2Problem& p = tfs2("rwpp2");
    p.validate(inst);
    Solution y = p.brute(inst);
    CHECK(tfs2_solution_ok(p, inst, y));
    // first hole with F(G(y)) != y, by direct scan
    uint64_t expect = 0;
    while (inst.func("F")(inst.func("G")(expect)) == expect) ++expect;
    CHECK(y[0] == expect);
  }
}

TEST_CASE("game induction: boundary validation and solutions") {
  Instance inst;
  inst.problem = "gi";
  inst.n = 1;
  inst.scalars["k"] = 1;
  inst.funcs["G"] = Func::from_table(2, 1, {1, 1, 0, 0});  // game 0 true, game 1 false
  inst.funcs["f1"] = Func::from_table(2, 1, {1, 0, 1, 0});
  const TfnpProblem& p = tfnp("gi");
  p.validate(inst);
  Solution y = p.brute(inst);
  CHECK(p.check(inst, y));
  CHECK(y[0] == 0);
  CHECK(y[1] == inst.func("f1")(pack_args({0, y[2]}, 1)));

  inst.funcs["G"] = Func::from_table(2, 1, {1, 0, 0, 0});  // game 0 not always true
  CHECK_THROWS(p.validate(inst));

  // two-turn games, random tables at n = 1: brute always succeeds
  for (int round = 0; round < 100; ++round) {
    Instance ri;
    ri.problem = "gi";
    ri.n = 1;
    ri.scalars["k"] = 2;
    Func g = random_table_func(3, 1);
    for (uint64_t xs = 0; xs < 4; ++xs) {
      g.table[xs] = 1;        // G_0 true
      g.table[4 | xs] = 0;    // G_1 false
    }
    ri.funcs["G"] = g;
    ri.funcs["f1"] = random_table_func(2, 1);
    ri.funcs["f2"] = random_table_func(3, 1);
    tfnp("gi").validate(ri);
    Solution s = tfnp("gi").brute(ri);
    CHECK(tfnp("gi").check(ri, s));
  }
}

TEST_CASE("p computation replays the stepper") {
  Instance inst;
  inst.problem = "p_computation";
  inst.n = 3;
  inst.funcs["step"] = Func::from_table(3, 3, {1, 2, 3, 4, 5, 6, 7, 0});  // +1 mod 8
  inst.scalars["t"] = 11;
  inst.scalars["x0"] = 5;
  const TfnpProblem& p = tfnp("p_computation");
  p.validate(inst);
  CHECK(p.brute(inst) == Solution{0});  // 5 + 11 mod 8
  CHECK(p.check(inst, {0}));
  CHECK(!p.check(inst, {1}));
}

TEST_CASE("registries know their names and reject strangers") {
  CHECK_THROWS_AS(tfnp("no_such_problem"), std::out_of_range);
  CHECK_THROWS_AS(tfs2("pigeon"), std::out_of_range);
  CHECK_THROWS_AS(pnp_machine("no_such_machine"), std::out_of_range);
  for (const std::string& name : tfnp_names()) CHECK(tfnp(name).name == name);
  for (const std::string& name : tfs2_names()) CHECK(tfs2(name).name == name);
  CHECK(tfnp_names().size() == 13);
  CHECK(tfs2_names().size() == 9);
}
