#include "owb/axioms.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace owb {

// ---- keys ------------------------------------------------------------------

Key parity_key(const Circuit& c) { return std::string(1, kParityTag) + c.encode(); }
Key counting_key(const Circuit& c) { return std::string(1, kCountingTag) + c.encode(); }
Key tqbf_key(const Qbf& f) { return std::string(1, kTqbfTag) + f.encode(); }

Key pspace_key(const MultiCircuit& mc, const std::string& w, uint64_t t) {
  if (w.size() != mc.free_inputs().size())
    throw std::runtime_error("pspace key: configuration width mismatch");
  for (char ch : w)
    if (ch != '0' && ch != '1') throw std::runtime_error("pspace key: bad configuration");
  ByteWriter bw;
  bw.u8(static_cast<uint8_t>(kPspaceTag));
  bw.str(mc.encode());
  bw.str(w);
  bw.varint(t);
  return bw.out;
}

Circuit circuit_of_key(const Key& k) {
  if (k.empty() || (k[0] != kParityTag && k[0] != kCountingTag))
    throw std::runtime_error("key: not a circuit query");
  return Circuit::decode(std::string_view(k).substr(1));
}

Qbf qbf_of_key(const Key& k) {
  if (k.empty() || k[0] != kTqbfTag) throw std::runtime_error("key: not a qbf query");
  return Qbf::decode(std::string_view(k).substr(1));
}

void pspace_of_key(const Key& k, MultiCircuit& mc, std::string& w, uint64_t& t) {
  ByteReader r(k);
  if (r.u8() != static_cast<uint8_t>(kPspaceTag))
    throw std::runtime_error("key: not a pspace query");
  mc = MultiCircuit::decode(r.str());
  w = r.str();
  t = r.varint();
  if (!r.done()) throw std::runtime_error("pspace key: trailing bytes");
  if (w.size() != mc.free_inputs().size())
    throw std::runtime_error("pspace key: configuration width mismatch");
}

ReplyShape shape_of(const Key& k) {
  if (k.empty()) throw std::runtime_error("empty key");
  switch (k[0]) {
    case kParityTag:
      return {ReplyShape::Bit, 0};
    case kCountingTag:
      return {ReplyShape::Nat, circuit_of_key(k).free_inputs().size()};
    case kTqbfTag:
      return {ReplyShape::Bit, 0};
    case kPspaceTag: {
      MultiCircuit mc;
      std::string w;
      uint64_t t;
      pspace_of_key(k, mc, w, t);
      return {ReplyShape::Config, w.size()};
    }
    default:
      throw std::runtime_error("key: unknown namespace tag");
  }
}

bool reply_well_formed(const ReplyShape& s, const Reply& r) {
  switch (s.kind) {
    case ReplyShape::Bit:
      return r.size() == 1 && (r[0] == '0' || r[0] == '1');
    case ReplyShape::Nat:
      return r.empty() || r.back() != '\0';  // canonical little-endian
    case ReplyShape::Config:
      if (r.size() != s.len) return false;
      for (char ch : r)
        if (ch != '0' && ch != '1') return false;
      return true;
  }
  return false;
}

// ---- reply codecs ----------------------------------------------------------

Reply bit_reply(Bit b) { return b ? "1" : "0"; }

Bit reply_bit(const Reply& r) {
  if (!reply_well_formed({ReplyShape::Bit, 0}, r))
    throw std::runtime_error("malformed bit reply");
  return r[0] == '1';
}

Reply nat_reply(uint64_t n) {
  Reply r;
  while (n) {
    r.push_back(static_cast<char>(n & 0xff));
    n >>= 8;
  }
  return r;
}

Reply nat_add(const Reply& a, const Reply& b) {
  Reply r;
  unsigned carry = 0;
  for (size_t i = 0; i < std::max(a.size(), b.size()) || carry; ++i) {
    unsigned s = carry;
    if (i < a.size()) s += static_cast<unsigned char>(a[i]);
    if (i < b.size()) s += static_cast<unsigned char>(b[i]);
    r.push_back(static_cast<char>(s & 0xff));
    carry = s >> 8;
  }
  while (!r.empty() && r.back() == '\0') r.pop_back();
  return r;
}

bool nat_is_zero(const Reply& a) { return a.empty(); }

std::optional<uint64_t> nat_u64(const Reply& a) {
  if (a.size() > 8) return std::nullopt;
  uint64_t v = 0;
  for (size_t i = a.size(); i-- > 0;) v = (v << 8) | static_cast<unsigned char>(a[i]);
  return v;
}

std::string nat_decimal(const Reply& a) {
  if (auto v = nat_u64(a)) return std::to_string(*v);
  // fall back to schoolbook division for wide values
  std::vector<unsigned char> d(a.rbegin(), a.rend());  // big-endian
  std::string out;
  while (!d.empty()) {
    unsigned rem = 0;
    std::vector<unsigned char> q;
    for (unsigned char byte : d) {
      unsigned cur = rem * 256 + byte;
      unsigned char qd = static_cast<unsigned char>(cur / 10);
      rem = cur % 10;
      if (!q.empty() || qd) q.push_back(qd);
    }
    out.push_back(static_cast<char>('0' + rem));
    d = std::move(q);
  }
  if (out.empty()) out = "0";
  std::reverse(out.begin(), out.end());
  return out;
}

Reply config_reply(const std::vector<Bit>& bits) {
  Reply r;
  for (Bit b : bits) r.push_back(b ? '1' : '0');
  return r;
}

std::vector<Bit> reply_config(const Reply& r) {
  std::vector<Bit> bits;
  for (char ch : r) {
    if (ch != '0' && ch != '1') throw std::runtime_error("malformed config reply");
    bits.push_back(ch == '1');
  }
  return bits;
}

// ---- failure witnesses -----------------------------------------------------

Bytes FailureWitness::encode() const {
  ByteWriter bw;
  bw.u8(static_cast<uint8_t>(kind));
  switch (kind) {
    case Kind::Split:
      bw.str(c.encode());
      bw.str(var);
      break;
    case Kind::Base:
      bw.str(c.encode());
      break;
    case Kind::TForall:
    case Kind::TExistsAt:
      bw.str(f.encode());
      bw.u8(branch);
      break;
    case Kind::TForallAll:
    case Kind::TExists:
    case Kind::TBase:
      bw.str(f.encode());
      break;
    case Kind::Zero:
      bw.str(mc.encode());
      bw.str(w);
      break;
    case Kind::Step:
      bw.str(mc.encode());
      bw.str(w);
      bw.varint(t);
      break;
  }
  return bw.out;
}

FailureWitness FailureWitness::decode(std::string_view s) {
  ByteReader r(s);
  FailureWitness fw;
  fw.kind = static_cast<Kind>(r.u8());
  switch (fw.kind) {
    case Kind::Split:
      fw.c = Circuit::decode(r.str());
      fw.var = r.str();
      break;
    case Kind::Base:
      fw.c = Circuit::decode(r.str());
      break;
    case Kind::TForall:
    case Kind::TExistsAt:
      fw.f = Qbf::decode(r.str());
      fw.branch = r.u8();
      break;
    case Kind::TForallAll:
    case Kind::TExists:
    case Kind::TBase:
      fw.f = Qbf::decode(r.str());
      break;
    case Kind::Zero:
      fw.mc = MultiCircuit::decode(r.str());
      fw.w = r.str();
      break;
    case Kind::Step:
      fw.mc = MultiCircuit::decode(r.str());
      fw.w = r.str();
      fw.t = r.varint();
      break;
    default:
      throw std::runtime_error("failure witness: unknown kind");
  }
  if (!r.done()) throw std::runtime_error("failure witness: trailing bytes");
  return fw;
}

std::string FailureWitness::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Split:
      os << "split at input " << var << " of a circuit on "
         << c.free_inputs().size() << " free inputs";
      break;
    case Kind::Base:
      os << "base mismatch on a closed circuit";
      break;
    case Kind::TForall:
      os << "forall claimed true, branch " << int(branch) << " claimed false";
      break;
    case Kind::TForallAll:
      os << "forall claimed false, both branches claimed true";
      break;
    case Kind::TExists:
      os << "exists claimed true, both branches claimed false";
      break;
    case Kind::TExistsAt:
      os << "exists claimed false, branch " << int(branch) << " claimed true";
      break;
    case Kind::TBase:
      os << "quantifier-free formula misevaluated";
      break;
    case Kind::Zero:
      os << "step-0 configuration differs from the start configuration";
      break;
    case Kind::Step:
      os << "configurations at steps " << t << " and " << t + 1
         << " are not related by the transition";
      break;
  }
  return os.str();
}

// ---- axiom sets ------------------------------------------------------------

char AxiomSet::tag() const {
  switch (name) {
    case Name::Parity:
      return kParityTag;
    case Name::Counting:
      return kCountingTag;
    case Name::Tqbf:
      return kTqbfTag;
    case Name::Pspace:
      return kPspaceTag;
  }
  return '?';
}

std::string AxiomSet::label() const {
  switch (name) {
    case Name::Parity:
      return "parity";
    case Name::Counting:
      return "counting";
    case Name::Tqbf:
      return level_cap ? "tqbf" + std::to_string(*level_cap) : "tqbf";
    case Name::Pspace:
      return "pspace";
  }
  return "?";
}

Reply AxiomSet::honest_reply(const Key& k) const {
  if (k.empty() || k[0] != tag())
    throw std::runtime_error("honest reply: key outside this axiom set");
  switch (name) {
    case Name::Parity:
      return bit_reply(circuit_of_key(k).parity());
    case Name::Counting:
      return nat_reply(circuit_of_key(k).count_sat());
    case Name::Tqbf:
      return bit_reply(qbf_of_key(k).tqbf_eval());
    case Name::Pspace: {
      MultiCircuit mc;
      std::string w;
      uint64_t t;
      pspace_of_key(k, mc, w, t);
      if (t > (1u << 20)) throw std::runtime_error("honest reply: step count cap exceeded");
      std::vector<Bit> cfg = reply_config(w);
      for (uint64_t i = 0; i < t; ++i) cfg = mc.mo_eval(cfg);
      return config_reply(cfg);
    }
  }
  throw std::runtime_error("honest reply: bad axiom set");
}

namespace {

// Fetch a well-formed reply for `key` from alpha, or fail the check.
bool fetch(const SparseOracle& a, const Key& key, Reply& out) {
  const Reply* r = a.find(key);
  if (!r || !reply_well_formed(shape_of(key), *r)) return false;
  out = *r;
  return true;
}

bool check_circuit_split(const SparseOracle& a, const FailureWitness& w, bool counting) {
  const Circuit& c = w.c;
  std::vector<std::string> fi = c.free_inputs();
  if (std::find(fi.begin(), fi.end(), w.var) == fi.end()) return false;
  auto key = [&](const Circuit& x) { return counting ? counting_key(x) : parity_key(x); };
  Reply r, r0, r1;
  if (!fetch(a, key(c), r) || !fetch(a, key(c.restricted(w.var, 0)), r0) ||
      !fetch(a, key(c.restricted(w.var, 1)), r1))
    return false;
  if (counting) return r != nat_add(r0, r1);
  return reply_bit(r) != (reply_bit(r0) ^ reply_bit(r1));
}

bool check_circuit_base(const SparseOracle& a, const FailureWitness& w, bool counting) {
  if (!w.c.closed()) return false;
  Reply r;
  if (!fetch(a, counting ? counting_key(w.c) : parity_key(w.c), r)) return false;
  Bit v = w.c.eval();
  if (counting) return r != nat_reply(v);
  return reply_bit(r) != v;
}

}  // namespace

bool AxiomSet::check_failure(const SparseOracle& a, const FailureWitness& w) const {
  try {
    switch (name) {
      case Name::Parity:
        if (w.kind == FailureWitness::Kind::Split) return check_circuit_split(a, w, false);
        if (w.kind == FailureWitness::Kind::Base) return check_circuit_base(a, w, false);
        return false;
      case Name::Counting:
        if (w.kind == FailureWitness::Kind::Split) return check_circuit_split(a, w, true);
        if (w.kind == FailureWitness::Kind::Base) return check_circuit_base(a, w, true);
        return false;
      case Name::Pspace: {
        if (w.kind == FailureWitness::Kind::Zero) {
          Reply r;
          if (!fetch(a, pspace_key(w.mc, w.w, 0), r)) return false;
          return r != w.w;
        }
        if (w.kind == FailureWitness::Kind::Step) {
          Reply rt, rt1;
          if (!fetch(a, pspace_key(w.mc, w.w, w.t), rt) ||
              !fetch(a, pspace_key(w.mc, w.w, w.t + 1), rt1))
            return false;
          return reply_config(rt1) != w.mc.mo_eval(reply_config(rt));
        }
        return false;
      }
      case Name::Tqbf:
        break;
    }
    // tqbf
    const Qbf& f = w.f;
    if (!f.closed()) return false;
    if (level_cap && f.level() > *level_cap) return false;
    auto bit_at = [&](const Qbf& g, Bit& out) {
      Reply r;
      if (!fetch(a, tqbf_key(g), r)) return false;
      out = reply_bit(r);
      return true;
    };
    Bit top;
    if (!bit_at(f, top)) return false;
    switch (w.kind) {
      case FailureWitness::Kind::TBase:
        return f.prefix.empty() && top != f.matrix.eval();
      case FailureWitness::Kind::TForall: {
        if (f.prefix.empty() || f.prefix[0].first != Quant::Forall || w.branch > 1)
          return false;
        Bit child;
        return bit_at(f.peeled(w.branch), child) && top == 1 && child == 0;
      }
      case FailureWitness::Kind::TForallAll: {
        if (f.prefix.empty() || f.prefix[0].first != Quant::Forall) return false;
        Bit c0, c1;
        return bit_at(f.peeled(0), c0) && bit_at(f.peeled(1), c1) && top == 0 && c0 == 1 &&
               c1 == 1;
      }
      case FailureWitness::Kind::TExists: {
        if (f.prefix.empty() || f.prefix[0].first != Quant::Exists) return false;
        Bit c0, c1;
        return bit_at(f.peeled(0), c0) && bit_at(f.peeled(1), c1) && top == 1 && c0 == 0 &&
               c1 == 0;
      }
      case FailureWitness::Kind::TExistsAt: {
        if (f.prefix.empty() || f.prefix[0].first != Quant::Exists || w.branch > 1)
          return false;
        Bit child;
        return bit_at(f.peeled(w.branch), child) && top == 0 && child == 1;
      }
      default:
        return false;
    }
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace owb
