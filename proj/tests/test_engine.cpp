#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "owb/enforce.hpp"

using namespace owb;

namespace {

// ∃-claim protocol from the parity axioms: queries A(C), A(C|x=0), A(C|x=1)
// for C = the single input gate x, and reports a Split witness whenever the
// replies violate additivity.
Protocol parity_triple_protocol() {
  Protocol p;
  p.name = "parity-triple";
  p.budget = 3;
  p.run = [](Session& s) -> ProtocolResult {
    CircuitBuilder b;
    Circuit c = b.take(b.input("x"));
    Bit r = s.ask_bit(parity_key(c));
    Bit r0 = s.ask_bit(parity_key(c.restricted("x", 0)));
    Bit r1 = s.ask_bit(parity_key(c.restricted("x", 1)));
    if (r != (r0 ^ r1)) {
      FailureWitness w;
      w.kind = FailureWitness::Kind::Split;
      w.c = c;
      w.var = "x";
      return ProtocolResult::failed(std::move(w));
    }
    return ProtocolResult::solved("ok");
  };
  return p;
}

Circuit random_circuit(std::mt19937_64& rng, unsigned n_inputs, unsigned n_gates) {
  CircuitBuilder b;
  std::vector<uint32_t> pool;
  for (unsigned i = 0; i < n_inputs; ++i) pool.push_back(b.input("x" + std::to_string(i)));
  pool.push_back(b.konst(rng() & 1));
  for (unsigned i = 0; i < n_gates; ++i) {
    unsigned pick = rng() % 3;
    if (pick == 2) {
      pool.push_back(b.gnot(pool[rng() % pool.size()]));
    } else {
      std::vector<uint32_t> args{pool[rng() % pool.size()], pool[rng() % pool.size()]};
      pool.push_back(pick ? b.gor(std::move(args)) : b.gand(std::move(args)));
    }
  }
  return b.take(pool.back());
}

// two structurally different encodings of the same function over x0..x{n-1}
std::pair<Circuit, Circuit> same_function_pair(std::mt19937_64& rng, unsigned n) {
  Circuit c = random_circuit(rng, n, 8);
  // re-encode c's truth table as a DNF over the same variables, forcing every
  // variable to appear so the free-input sets match
  std::vector<std::string> all = numbered_inputs(n);
  CircuitBuilder b;
  std::vector<uint32_t> terms;
  for (uint64_t v = 0; v < (1ull << n); ++v) {
    Assignment a = u64_to_assignment(all, v);
    if (!c.eval_on(a)) continue;
    std::vector<uint32_t> lits;
    for (unsigned i = 0; i < n; ++i) {
      uint32_t in = b.input(all[i]);
      lits.push_back(a[all[i]] ? in : b.gnot(in));
    }
    terms.push_back(b.gand(std::move(lits)));
  }
  // keep every input present even if the DNF is empty
  for (unsigned i = 0; i < n; ++i) b.input(all[i]);
  Circuit d = b.take(b.gor(std::move(terms)));
  // make sure c itself mentions every variable too (or with constant-0 terms)
  CircuitBuilder b3;
  uint32_t m3 = b3.embed(c, {}, {c.output})[0];
  std::vector<uint32_t> zero_terms;
  for (unsigned i = 0; i < n; ++i) {
    uint32_t in = b3.input(all[i]);
    zero_terms.push_back(b3.gand({in, b3.gnot(in)}));  // constant 0 touching in
  }
  zero_terms.push_back(m3);
  Circuit c3 = b3.take(b3.gor(std::move(zero_terms)));
  return {c3, d};
}

}  // namespace

TEST_CASE("session memoizes, shape-checks and budgets queries") {
  Circuit c = set_singleton(2, 2);
  Key k = parity_key(c);
  int calls = 0;
  Adversary count_adv = [&](const Key&) {
    ++calls;
    return Reply("1");
  };
  Session s(count_adv, 2);
  CHECK(s.ask(k) == "1");
  CHECK(s.ask(k) == "1");  // memoized, not re-asked
  CHECK(calls == 1);
  CHECK(s.transcript.size() == 1);
  CHECK(s.ask(parity_key(set_singleton(1, 2))) == "1");
  CHECK_THROWS_AS(s.ask(parity_key(set_singleton(0, 2))), BudgetExhausted);

  Adversary bad = [](const Key&) { return Reply("banana"); };
  Session s2(bad, 5);
  CHECK_THROWS_AS(s2.ask(k), MalformedReply);
}

TEST_CASE("run_game against the honest adversary never fails") {
  Protocol p = parity_triple_protocol();
  GameResult g = run_game(p, honest_adversary(AxiomSet::parity()), AxiomSet::parity());
  CHECK(g.kind == GameResult::Kind::Solved);
  CHECK(g.solution == "ok");
  // honest replies for C = x: parity 1, restrictions 0 and 1
  CHECK(g.transcript.entries[0].second == "1");
  CHECK(g.transcript.entries[1].second == "0");
  CHECK(g.transcript.entries[2].second == "1");
}

TEST_CASE("run_game classifies scripted lies as checked failures") {
  Protocol p = parity_triple_protocol();
  CircuitBuilder b;
  Circuit c = b.take(b.input("x"));
  std::map<Key, Reply> script{{parity_key(c), "0"},
                              {parity_key(c.restricted("x", 0)), "0"},
                              {parity_key(c.restricted("x", 1)), "1"}};
  GameResult g = run_game(p, strict_scripted_adversary(script), AxiomSet::parity());
  REQUIRE(g.kind == GameResult::Kind::Failure);
  CHECK(g.witness->kind == FailureWitness::Kind::Split);
  CHECK(AxiomSet::parity().check_failure(g.transcript, *g.witness));
}

TEST_CASE("replay determinism: scripted runs give identical transcripts") {
  Protocol p = parity_triple_protocol();
  Adversary adv = seeded_adversary(77);
  GameResult g1 = run_game(p, adv, AxiomSet::parity());
  GameResult g2 = run_game(p, adv, AxiomSet::parity());
  CHECK(g1.to_transcript(p).serialize() == g2.to_transcript(p).serialize());
}

TEST_CASE("exhausted and malformed outcomes are distinguished") {
  Protocol p = parity_triple_protocol();
  p.budget = 1;
  GameResult g = run_game(p, honest_adversary(AxiomSet::parity()), AxiomSet::parity());
  CHECK(g.kind == GameResult::Kind::Exhausted);

  Protocol p2 = parity_triple_protocol();
  Adversary bad = [](const Key&) { return Reply("xyz"); };
  GameResult g2 = run_game(p2, bad, AxiomSet::parity());
  CHECK(g2.kind == GameResult::Kind::Malformed);
}

TEST_CASE("bogus claimed witnesses are flagged, not passed through") {
  Protocol p;
  p.name = "liar";
  p.budget = 4;
  p.run = [](Session& s) -> ProtocolResult {
    CircuitBuilder b;
    Circuit c = b.take(b.input("x"));
    s.ask(parity_key(c));
    FailureWitness w;  // claims a Split it never established
    w.kind = FailureWitness::Kind::Split;
    w.c = c;
    w.var = "x";
    return ProtocolResult::failed(std::move(w));
  };
  GameResult g = run_game(p, honest_adversary(AxiomSet::parity()), AxiomSet::parity());
  CHECK(g.kind == GameResult::Kind::Malformed);
}

TEST_CASE("verify_local_solution accepts honest runs and rejects tampering") {
  Protocol p = parity_triple_protocol();
  AxiomSet g = AxiomSet::parity();
  GameResult honest = run_game(p, honest_adversary(g), g);
  REQUIRE(honest.kind == GameResult::Kind::Solved);
  CHECK(verify_local_solution(p, g, honest.transcript));

  // a lying oracle makes the protocol output a (valid) witness: not a solution
  CircuitBuilder b;
  Circuit c = b.take(b.input("x"));
  SparseOracle lying;
  lying.put(parity_key(c), "0");
  lying.put(parity_key(c.restricted("x", 0)), "0");
  lying.put(parity_key(c.restricted("x", 1)), "1");
  std::string why;
  CHECK(!verify_local_solution(p, g, lying, &why));
  CHECK(why.find("failure witness") != std::string::npos);

  // deleting a key breaks the replay with a missing-key diagnostic
  SparseOracle partial;
  partial.put(parity_key(c), "1");
  CHECK(!verify_local_solution(p, g, partial, &why));
  CHECK(why.find("missing") != std::string::npos);
}

TEST_CASE("transcript serialization is byte-stable and parses back") {
  Protocol p = parity_triple_protocol();
  p.params = "\x01\x02";
  GameResult g = run_game(p, honest_adversary(AxiomSet::parity()), AxiomSet::parity());
  Transcript t = g.to_transcript(p);
  std::string doc = t.serialize();
  Transcript back = Transcript::parse(doc);
  CHECK(back.serialize() == doc);
  CHECK(back.protocol == "parity-triple");
  CHECK(back.params == p.params);
  CHECK(back.oracle.entries == t.oracle.entries);
  CHECK(back.outcome.rfind("solved", 0) == 0);
}

TEST_CASE("first_diff finds a crossing with ties toward the lower half") {
  for (uint64_t cross = 0; cross < 40; ++cross) {
    auto pred = [cross](uint64_t i) { return i <= cross; };
    CHECK(first_diff(0, 41, pred) == cross);
  }
  CHECK_THROWS(first_diff(3, 3, [](uint64_t) { return true; }));
  CHECK_THROWS(first_diff(0, 10, [](uint64_t) { return true; }));
}

TEST_CASE("seeded adversary is deterministic and shape-correct") {
  std::mt19937_64 rng(6);
  Adversary a1 = seeded_adversary(42), a2 = seeded_adversary(42), a3 = seeded_adversary(43);
  bool differs = false;
  for (int t = 0; t < 30; ++t) {
    Circuit c = random_circuit(rng, 3, 5);
    for (const Key& k : {parity_key(c), counting_key(c)}) {
      CHECK(a1(k) == a2(k));
      CHECK(reply_well_formed(shape_of(k), a1(k)));
      if (a1(k) != a3(k)) differs = true;
    }
  }
  CHECK(differs);  // different seeds actually change replies
}

// ---- enforcement library ---------------------------------------------------

TEST_CASE("enforcing equality of equal circuits: honest establishes") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    auto [c, d] = same_function_pair(rng, 2 + rng() % 2);
    Session sp(honest_adversary(AxiomSet::parity()), 1000);
    CHECK(!enforce(enforce_parity_equal(c, d), sp).has_value());
    Session sc(honest_adversary(AxiomSet::counting()), 1000);
    CHECK(!enforce(enforce_counting_equal(c, d), sc).has_value());
  }
}

TEST_CASE("enforcing equality against liars yields checked witnesses") {
  std::mt19937_64 rng(10);
  int forced = 0;
  for (int t = 0; t < 40; ++t) {
    auto [c, d] = same_function_pair(rng, 2 + rng() % 2);
    for (uint64_t seed = 0; seed < 4; ++seed) {
      Session s(seeded_adversary(seed + 100 * t), 1000);
      auto w = enforce(enforce_parity_equal(c, d), s);
      if (w) {
        CHECK(AxiomSet::parity().check_failure(s.transcript, *w));
        ++forced;
      } else {
        // established: both top-level replies recorded equal
        CHECK(*s.transcript.find(parity_key(c)) == *s.transcript.find(parity_key(d)));
      }
      Session s2(seeded_adversary(seed + 991 * t), 1000);
      auto w2 = enforce(enforce_counting_equal(c, d), s2);
      if (w2) {
        CHECK(AxiomSet::counting().check_failure(s2.transcript, *w2));
        ++forced;
      }
    }
  }
  CHECK(forced > 20);  // the random adversary does lie often
}

TEST_CASE("disjoint-union additivity is enforceable") {
  // X = {x : x < 3}, Y = {5} over 3 bits: disjoint
  Circuit x = set_interval_lt(3, 3), y = set_singleton(5, 3);
  Session hs(honest_adversary(AxiomSet::parity()), 1000);
  CHECK(!enforce(enforce_parity_disjoint_union(x, y), hs).has_value());
  int forced = 0;
  for (uint64_t seed = 0; seed < 30; ++seed) {
    Session s(seeded_adversary(seed), 1000);
    auto w = enforce(enforce_parity_disjoint_union(x, y), s);
    if (w) {
      CHECK(AxiomSet::parity().check_failure(s.transcript, *w));
      ++forced;
    }
  }
  CHECK(forced > 5);
}

TEST_CASE("forcing a known parity value") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    Circuit c = random_circuit(rng, 3, 6);
    auto expected = [](const Circuit& x) { return x.parity(); };
    Session hs(honest_adversary(AxiomSet::parity()), 1000);
    CHECK(!enforce(enforce_parity_value(c, expected), hs).has_value());
    Session ls(seeded_adversary(t), 1000);
    auto w = enforce(enforce_parity_value(c, expected), ls);
    if (w) CHECK(AxiomSet::parity().check_failure(ls.transcript, *w));
    // count version with exact counts
    auto cexp = [](const Circuit& x) { return x.count_sat(); };
    Session hc(honest_adversary(AxiomSet::counting()), 1000);
    CHECK(!enforce(enforce_counting_value(c, cexp), hc).has_value());
    Session lc(seeded_adversary(t + 777), 1000);
    auto wc = enforce(enforce_counting_value(c, cexp), lc);
    if (wc) CHECK(AxiomSet::counting().check_failure(lc.transcript, *wc));
  }
}

TEST_CASE("qbf equality and duality are enforceable") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 20; ++t) {
    unsigned n = 2 + rng() % 2;
    auto [c, d] = same_function_pair(rng, n);
    Qbf f, g;
    f.matrix = c;
    g.matrix = d;
    for (const std::string& v : numbered_inputs(n)) {
      Quant q = rng() % 2 ? Quant::Exists : Quant::Forall;
      f.prefix.emplace_back(q, v);
      g.prefix.emplace_back(q, v);
    }
    Session hs(honest_adversary(AxiomSet::tqbf()), 1000);
    CHECK(!enforce(enforce_qbf_equal(f, g), hs).has_value());
    Session hd(honest_adversary(AxiomSet::tqbf()), 1000);
    CHECK(!enforce(enforce_qbf_dual(f), hd).has_value());
    for (uint64_t seed = 0; seed < 3; ++seed) {
      Session s(seeded_adversary(seed * 31 + t), 1000);
      auto w = enforce(enforce_qbf_equal(f, g), s);
      if (w) CHECK(AxiomSet::tqbf().check_failure(s.transcript, *w));
      Session s2(seeded_adversary(seed * 17 + t + 5), 1000);
      auto w2 = enforce(enforce_qbf_dual(f), s2);
      if (w2) CHECK(AxiomSet::tqbf().check_failure(s2.transcript, *w2));
    }
  }
}

TEST_CASE("pspace equality is enforceable with step-located witnesses") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 12; ++t) {
    unsigned n = 2;
    std::vector<uint64_t> table(1ull << n);
    for (auto& v : table) v = rng() % table.size();
    MultiCircuit c = table_multicircuit(n, n, table);
    // a second encoding: same table split differently (permute minterms by
    // rebuilding from a shifted scan)
    MultiCircuit d;
    {
      CircuitBuilder b;
      std::vector<uint32_t> outs(n);
      std::vector<std::string> names = numbered_inputs(n);
      for (unsigned bit = 0; bit < n; ++bit) {
        std::vector<uint32_t> terms;
        for (uint64_t x = table.size(); x-- > 0;) {  // reversed minterm order
          if (!((table[x] >> (n - 1 - bit)) & 1)) continue;
          std::vector<uint32_t> lits;
          for (unsigned i = 0; i < n; ++i) {
            uint32_t in = b.input(names[i]);
            lits.push_back(((x >> (n - 1 - i)) & 1) ? in : b.gnot(in));
          }
          terms.push_back(b.gand(std::move(lits)));
        }
        outs[bit] = b.gor(std::move(terms));
      }
      d = b.take_multi(outs);
    }
    REQUIRE(!(c == d));  // distinct encodings
    std::string w0 = "10";
    Session hs(honest_adversary(AxiomSet::pspace()), 1000);
    CHECK(!enforce(enforce_pspace_equal(c, d, w0, 9), hs).has_value());
    for (uint64_t seed = 0; seed < 6; ++seed) {
      Session s(seeded_adversary(seed * 7 + t), 1000);
      auto w = enforce(enforce_pspace_equal(c, d, w0, 9), s);
      if (w) CHECK(AxiomSet::pspace().check_failure(s.transcript, *w));
    }
  }
}

TEST_CASE("member extraction walks claimed counts down to points") {
  Circuit c = set_interval_lt(4, 6);  // {0..5}
  // honest: extract 3 members, all < 6 and distinct
  Session hs(honest_adversary(AxiomSet::counting()), 1000);
  Extraction e = extract_members(hs, c, 3);
  REQUIRE(!e.witness.has_value());
  REQUIRE(e.members.size() == 3);
  std::sort(e.members.begin(), e.members.end());
  CHECK(std::unique(e.members.begin(), e.members.end()) == e.members.end());
  for (uint64_t m : e.members) CHECK(m < 6);

  // claimed nonempty but actually empty set: must yield a witness
  Circuit empty = set_interval_lt(3, 0);
  std::map<Key, Reply> script;  // claim |empty| = 1 at every restriction depth
  Adversary liar = scripted_adversary({}, [&](const Key& k) -> Reply {
    return nat_reply(1);
  });
  Session ls(liar, 1000);
  Extraction e2 = extract_members(ls, empty, 1);
  REQUIRE(e2.witness.has_value());
  CHECK(AxiomSet::counting().check_failure(ls.transcript, *e2.witness));

  // parity flavor
  Circuit odd = set_singleton(9, 4);
  Session ps(honest_adversary(AxiomSet::parity()), 1000);
  Extraction e3 = extract_odd_member(ps, odd);
  REQUIRE(!e3.witness.has_value());
  CHECK(e3.members == std::vector<uint64_t>{9});
  Adversary pliar = [](const Key&) { return Reply("1"); };
  Session ps2(pliar, 1000);
  Extraction e4 = extract_odd_member(ps2, set_interval_lt(3, 4));  // parity 0 really
  if (e4.witness) CHECK(AxiomSet::parity().check_failure(ps2.transcript, *e4.witness));
}

TEST_CASE("qbf forcing turns wrong top-level claims into witnesses") {
  std::mt19937_64 rng(14);
  int forced_true = 0, forced_false = 0;
  for (int t = 0; t < 60; ++t) {
    Circuit m = random_circuit(rng, 3, 6);
    Qbf f;
    f.matrix = m;
    for (const std::string& v : m.free_inputs())
      f.prefix.emplace_back(rng() % 2 ? Quant::Exists : Quant::Forall, v);
    Bit truth = f.tqbf_eval();
    Session s(seeded_adversary(t), 2000);
    if (truth) {
      auto w = qbf_force_true(s, f);
      if (w) {
        CHECK(AxiomSet::tqbf().check_failure(s.transcript, *w));
        ++forced_true;
      } else {
        CHECK(reply_bit(*s.transcript.find(tqbf_key(f))) == 1);
      }
    } else {
      auto w = qbf_force_false(s, f);
      if (w) {
        CHECK(AxiomSet::tqbf().check_failure(s.transcript, *w));
        ++forced_false;
      } else {
        CHECK(reply_bit(*s.transcript.find(tqbf_key(f))) == 0);
      }
    }
  }
  CHECK(forced_true > 0);
  CHECK(forced_false > 0);
}
