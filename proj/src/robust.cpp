#include "owb/robust.hpp"

#include <algorithm>
#include <map>

namespace owb {

ThetaView::ThetaView(Session& s, Circuit c, unsigned budget)
    : s_(s), c_(std::move(c)), inputs_(c_.free_inputs()), budget_(budget) {}

Bit ThetaView::query_restricted(const std::string& x, Bit b) {
  if (++used_ > budget_) throw std::logic_error("evaluator exceeded its query budget");
  return s_.ask_bit(parity_key(c_.restricted(x, b)));
}

Bit ThetaView::query_eval(const Assignment& total) {
  if (++used_ > budget_) throw std::logic_error("evaluator exceeded its query budget");
  return c_.eval_on(total);
}

Bit theta_apply(const BlackBoxEvaluator& th, const Circuit& c, Session& s) {
  ThetaView v(s, c, th.k);
  return th.run(v);
}

BlackBoxEvaluator first_input_split_evaluator() {
  return {"first-input split", 2, [](ThetaView& v) -> Bit {
            if (v.inputs().empty()) return v.query_eval({});
            const std::string& x = v.inputs().front();
            return v.query_restricted(x, 0) ^ v.query_restricted(x, 1);
          }};
}

bool pattern_realizable(unsigned n, const std::vector<PatternConstraint>& cs, Bit total) {
  if (n > 6) throw std::runtime_error("pattern_realizable: too many inputs");
  uint64_t all = n == 6 ? ~0ull : (1ull << (1ull << n)) - 1;
  // rows of the GF(2) system over the 2^n indicator bits
  std::vector<std::pair<uint64_t, Bit>> rows{{all, total}};
  for (const PatternConstraint& c : cs) {
    if (c.is_point) {
      rows.emplace_back(1ull << c.point, c.rhs);
    } else {
      uint64_t m = 0;
      for (uint64_t p = 0; p < (1ull << n); ++p)
        if (((p >> (n - 1 - c.var)) & 1) == c.value) m |= 1ull << p;
      rows.emplace_back(m, c.rhs);
    }
  }
  std::map<uint64_t, std::pair<uint64_t, Bit>> basis;  // pivot bit -> row
  for (auto [m, r] : rows) {
    while (m) {
      uint64_t pivot = m & -m;
      auto it = basis.find(pivot);
      if (it == basis.end()) {
        basis.emplace(pivot, std::make_pair(m, r));
        break;
      }
      m ^= it->second.first;
      r ^= it->second.second;
    }
    if (!m && r) return false;  // derived 0 = 1
  }
  return true;
}

namespace {

// Every pattern of <= k queries satisfying the minimal consistency condition
// is realizable at n inputs.
bool all_patterns_realizable(unsigned n, unsigned k) {
  // slots: 2n restricted-parity queries, then 2^n point evaluations
  unsigned slots = 2 * n + (1u << n);
  std::vector<unsigned> chosen;
  // enumerate subsets of at most k slots, then all reply combinations
  std::function<bool(unsigned)> rec = [&](unsigned from) -> bool {
    // test the current subset under every reply assignment and total parity
    for (uint64_t replies = 0; replies < (1ull << chosen.size()); ++replies) {
      for (Bit total = 0; total <= 1; ++total) {
        std::vector<PatternConstraint> cs;
        std::map<unsigned, Bit> sub;  // subcube slot -> reply
        for (size_t i = 0; i < chosen.size(); ++i) {
          PatternConstraint c{};
          c.rhs = (replies >> i) & 1;
          if (chosen[i] < 2 * n) {
            c.is_point = false;
            c.var = chosen[i] / 2;
            c.value = chosen[i] % 2;
            sub[chosen[i]] = c.rhs;
          } else {
            c.is_point = true;
            c.point = chosen[i] - 2 * n;
          }
          cs.push_back(c);
        }
        // minimal consistency: queried (x,0),(x,1) pairs must sum to total
        bool consistent = true;
        for (auto& [slot, r] : sub)
          if (slot % 2 == 0) {
            auto other = sub.find(slot + 1);
            if (other != sub.end() && (r ^ other->second) != total) consistent = false;
          }
        if (!consistent) continue;
        if (!pattern_realizable(n, cs, total)) return false;
      }
    }
    if (chosen.size() == k) return true;
    for (unsigned s = from; s < slots; ++s) {
      chosen.push_back(s);
      if (!rec(s + 1)) return false;
      chosen.pop_back();
    }
    return true;
  };
  return rec(0);
}

}  // namespace

unsigned parity_pattern_threshold(unsigned k) {
  if (k > 4) throw std::runtime_error("parity_pattern_threshold: supported for k <= 4");
  static std::map<unsigned, unsigned> cache;
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  const unsigned scan_to = 5;
  std::vector<bool> ok(scan_to + 1, false);
  for (unsigned n = 1; n <= scan_to; ++n) ok[n] = all_patterns_realizable(n, k);
  unsigned nk = 0;
  for (unsigned n = scan_to;; --n) {
    if (n == 0 || !ok[n]) {
      nk = n + 1;
      break;
    }
  }
  if (nk > scan_to) throw std::runtime_error("parity_pattern_threshold: no threshold found");
  cache[k] = nk;
  return nk;
}

std::optional<FailureWitness> behaviour_witness(Session& s, const Circuit& c) {
  Bit r = s.ask_bit(parity_key(c));
  if (c.closed()) {
    if (r == c.eval()) return std::nullopt;
    FailureWitness w;
    w.kind = FailureWitness::Kind::Base;
    w.c = c;
    return w;
  }
  for (const std::string& x : c.free_inputs()) {
    Bit r0 = s.ask_bit(parity_key(c.restricted(x, 0)));
    Bit r1 = s.ask_bit(parity_key(c.restricted(x, 1)));
    if (r != (r0 ^ r1)) {
      FailureWitness w;
      w.kind = FailureWitness::Kind::Split;
      w.c = c;
      w.var = x;
      return w;
    }
  }
  return std::nullopt;
}

namespace {

// visit every restriction of c (every subset of free inputs set both ways),
// including the trivial one, most-restricted first; stops early when f
// returns true
bool scan_restrictions(const Circuit& c, const std::function<bool(const Circuit&)>& f) {
  std::vector<std::string> fi = c.free_inputs();
  unsigned n = fi.size();
  std::vector<std::vector<unsigned>> states;  // per var: 0 = unset, 1/2 = set to 0/1
  std::vector<unsigned> state(n, 0);
  while (true) {
    states.push_back(state);
    unsigned i = 0;
    for (; i < n; ++i) {
      if (++state[i] <= 2) break;
      state[i] = 0;
    }
    if (i == n) break;
  }
  std::stable_sort(states.begin(), states.end(), [](const auto& a, const auto& b) {
    auto set_count = [](const std::vector<unsigned>& v) {
      return std::count_if(v.begin(), v.end(), [](unsigned s) { return s != 0; });
    };
    return set_count(a) > set_count(b);
  });
  for (const auto& st : states) {
    Circuit r = c;
    for (unsigned i = 0; i < n; ++i)
      if (st[i]) r = r.restricted(fi[i], st[i] - 1);
    if (f(r)) return true;
  }
  return false;
}

}  // namespace

std::pair<Circuit, FailureWitness> failure_from_theta_violation(const BlackBoxEvaluator& th,
                                                                Session& s, const Circuit& c) {
  Bit a = s.ask_bit(parity_key(c));
  if (a == theta_apply(th, c, s))
    throw std::logic_error("failure_from_theta_violation: no violation on this session");
  unsigned nk = parity_pattern_threshold(th.k);
  if (c.free_inputs().size() >= nk) {
    auto w = behaviour_witness(s, c);
    if (!w)
      throw std::logic_error("failure_from_theta_violation: large circuit is well-behaved");
    return {c, *w};
  }
  std::pair<Circuit, FailureWitness> out;
  bool found = scan_restrictions(c, [&](const Circuit& r) {
    auto w = behaviour_witness(s, r);
    if (!w) return false;
    out = {r, *w};
    return true;
  });
  if (!found)
    throw std::logic_error("failure_from_theta_violation: every restriction is well-behaved");
  return out;
}

Circuit theta_violation_from_bad_circuit(const BlackBoxEvaluator& th, Session& s,
                                         const Circuit& d0) {
  Circuit d = d0;
  if (!behaviour_witness(s, d))
    throw std::logic_error("theta_violation_from_bad_circuit: circuit is well-behaved");
  // descend to a locally minimal badly-behaved circuit
  for (bool moved = true; moved;) {
    moved = false;
    for (const std::string& x : d.free_inputs()) {
      for (Bit b = 0; b <= 1 && !moved; ++b) {
        Circuit child = d.restricted(x, b);
        if (behaviour_witness(s, child)) {
          d = std::move(child);
          moved = true;
        }
      }
      if (moved) break;
    }
  }
  unsigned nk = parity_pattern_threshold(th.k);
  Circuit result = d;
  if (d.free_inputs().size() < nk) {
    // globally minimal: a badly-behaved restriction with the fewest free
    // inputs (all of its proper restrictions are then well-behaved)
    size_t best = SIZE_MAX;
    scan_restrictions(d, [&](const Circuit& r) {
      if (behaviour_witness(s, r) && r.free_inputs().size() < best) {
        best = r.free_inputs().size();
        result = r;
      }
      return false;  // keep scanning
    });
  }
  Bit a = s.ask_bit(parity_key(result));
  if (a == theta_apply(th, result, s))
    throw std::logic_error("theta_violation_from_bad_circuit: postcondition failed");
  return result;
}

}  // namespace owb
