#include "owb/engine.hpp"

namespace owb {

Adversary honest_adversary(AxiomSet g) {
  return [g](const Key& k) { return g.honest_reply(k); };
}

Adversary scripted_adversary(std::map<Key, Reply> script, Adversary fallback) {
  return [script = std::move(script), fallback = std::move(fallback)](const Key& k) {
    auto it = script.find(k);
    return it != script.end() ? it->second : fallback(k);
  };
}

Adversary strict_scripted_adversary(std::map<Key, Reply> script) {
  return [script = std::move(script)](const Key& k) {
    auto it = script.find(k);
    if (it == script.end()) throw MissingKey(k);
    return it->second;
  };
}

Adversary seeded_adversary(uint64_t seed) {
  return [seed](const Key& k) -> Reply {
    uint64_t h = fnv1a(k, fnv1a(std::string_view(reinterpret_cast<const char*>(&seed), 8)));
    ReplyShape s = shape_of(k);
    switch (s.kind) {
      case ReplyShape::Bit:
        return bit_reply(h & 1);
      case ReplyShape::Nat:
        // a small random count, occasionally zero
        return nat_reply(h % ((s.len < 8 ? (1ull << s.len) : 256) + 1));
      case ReplyShape::Config: {
        std::vector<Bit> bits;
        uint64_t x = h;
        for (size_t i = 0; i < s.len; ++i) {
          if (i % 64 == 0 && i) x = fnv1a(k, x);
          bits.push_back((x >> (i % 64)) & 1);
        }
        return config_reply(bits);
      }
    }
    throw std::runtime_error("seeded adversary: bad key shape");
  };
}

Adversary interactive_adversary(std::function<Reply(const Key&)> prompt) { return prompt; }

Reply Session::ask(const Key& k) {
  if (const Reply* r = transcript.find(k)) return *r;
  if (transcript.size() >= budget) throw BudgetExhausted();
  Reply r = adv(k);
  if (!reply_well_formed(shape_of(k), r)) throw MalformedReply(k, r);
  transcript.put(k, r);
  return r;
}

Transcript GameResult::to_transcript(const Protocol& p) const {
  Transcript t;
  t.protocol = p.name;
  t.params = p.params;
  t.oracle = transcript;
  switch (kind) {
    case Kind::Solved:
      t.outcome = "solved " + to_hex(solution);
      break;
    case Kind::Failure:
      t.outcome = "failure " + to_hex(witness->encode());
      break;
    case Kind::Exhausted:
      t.outcome = "exhausted";
      break;
    case Kind::Malformed:
      t.outcome = "malformed " + diagnostic;
      break;
  }
  return t;
}

GameResult run_game(const Protocol& p, const Adversary& adv, const AxiomSet& gamma) {
  Session s(adv, p.budget);
  GameResult g;
  try {
    ProtocolResult r = p.run(s);
    g.transcript = s.transcript;
    if (r.kind == ProtocolResult::Kind::Solution) {
      g.kind = GameResult::Kind::Solved;
      g.solution = r.solution;
    } else if (gamma.check_failure(s.transcript, *r.witness)) {
      g.kind = GameResult::Kind::Failure;
      g.witness = r.witness;
    } else {
      g.kind = GameResult::Kind::Malformed;
      g.diagnostic = "claimed failure witness does not check against the transcript";
    }
  } catch (const BudgetExhausted&) {
    g.transcript = s.transcript;
    g.kind = GameResult::Kind::Exhausted;
    g.diagnostic = "budget of " + std::to_string(p.budget) + " queries exhausted";
  } catch (const MalformedReply& e) {
    g.transcript = s.transcript;
    g.kind = GameResult::Kind::Malformed;
    g.diagnostic = "adversary reply of wrong shape for key " + to_hex(e.key);
  }
  return g;
}

bool verify_local_solution(const Protocol& p, const AxiomSet& gamma, const SparseOracle& alpha,
                           std::string* diagnostic) {
  auto fail = [&](const std::string& why) {
    if (diagnostic) *diagnostic = why;
    return false;
  };
  std::map<Key, Reply> script(alpha.index.begin(), alpha.index.end());
  Session s(strict_scripted_adversary(std::move(script)), p.budget);
  try {
    ProtocolResult r = p.run(s);
    if (r.kind == ProtocolResult::Kind::Failure) {
      if (gamma.check_failure(alpha, *r.witness))
        return fail("output is a failure witness valid on the oracle");
      return fail("output is a claimed failure witness (and it does not even check)");
    }
    if (diagnostic) *diagnostic = "";
    return true;
  } catch (const MissingKey& e) {
    return fail("replay queried a key missing from the oracle: " + to_hex(e.key));
  } catch (const BudgetExhausted&) {
    return fail("replay exhausted the protocol budget");
  } catch (const MalformedReply& e) {
    return fail("oracle holds a wrong-shape reply for key " + to_hex(e.key));
  }
}

uint64_t first_diff(uint64_t lo, uint64_t hi, const std::function<bool(uint64_t)>& pred) {
  if (lo >= hi) throw std::runtime_error("first_diff: empty range");
  bool plo = pred(lo);
  if (pred(hi) == plo) throw std::runtime_error("first_diff: endpoints agree");
  while (hi - lo > 1) {
    uint64_t mid = lo + (hi - lo) / 2;
    if (pred(mid) == plo)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace owb
