#include "owb/qbf.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace owb {

void Qbf::validate() const {
  matrix.validate();
  std::set<std::string> seen;
  std::vector<std::string> fi = matrix.free_inputs();
  std::set<std::string> free_set(fi.begin(), fi.end());
  for (auto& [q, name] : prefix) {
    (void)q;
    if (!seen.insert(name).second)
      throw std::runtime_error("qbf: duplicate prefix variable " + name);
    if (!free_set.count(name))
      throw std::runtime_error("qbf: prefix variable not a free matrix input: " + name);
  }
}

std::vector<std::string> Qbf::free_vars() const {
  std::set<std::string> bound;
  for (auto& [q, name] : prefix) {
    (void)q;
    bound.insert(name);
  }
  std::vector<std::string> r;
  for (const std::string& x : matrix.free_inputs())
    if (!bound.count(x)) r.push_back(x);
  return r;
}

bool Qbf::closed() const { return free_vars().empty(); }

void Qbf::classify(unsigned& k, char& cls) const {
  if (prefix.empty()) {
    k = 0;
    cls = 'Q';
    return;
  }
  k = 1;
  for (size_t i = 1; i < prefix.size(); ++i)
    if (prefix[i].first != prefix[i - 1].first) ++k;
  cls = prefix[0].first == Quant::Exists ? 'S' : 'P';
}

unsigned Qbf::level() const {
  unsigned k;
  char cls;
  classify(k, cls);
  return k;
}

Qbf Qbf::restricted(const std::string& x, Bit b) const {
  for (auto& [q, name] : prefix) {
    (void)q;
    if (name == x) throw std::runtime_error("qbf restrict: variable is bound: " + x);
  }
  Qbf g;
  g.prefix = prefix;
  g.matrix = matrix.restricted(x, b);
  return g;
}

Qbf Qbf::dual() const {
  Qbf g;
  for (auto& [q, name] : prefix)
    g.prefix.emplace_back(q == Quant::Forall ? Quant::Exists : Quant::Forall, name);
  g.matrix = matrix;
  g.matrix.gates.push_back(Gate{GateKind::Not, "", {g.matrix.output}});
  g.matrix.output = static_cast<uint32_t>(g.matrix.gates.size() - 1);
  return g;
}

Qbf Qbf::peeled(Bit b) const {
  if (prefix.empty()) throw std::runtime_error("qbf peel: quantifier-free");
  Qbf g;
  g.prefix.assign(prefix.begin() + 1, prefix.end());
  g.matrix = matrix.restricted(prefix[0].second, b);
  return g;
}

Bit Qbf::tqbf_eval(unsigned cap) const {
  if (!closed()) throw std::runtime_error("tqbf_eval: open formula");
  if (prefix.size() > cap) throw std::runtime_error("tqbf_eval: quantifier cap exceeded");
  if (prefix.empty()) return matrix.eval();
  Bit v0 = peeled(0).tqbf_eval(cap);
  if (prefix[0].first == Quant::Forall && !v0) return 0;
  if (prefix[0].first == Quant::Exists && v0) return 1;
  return peeled(1).tqbf_eval(cap);
}

Bytes Qbf::encode() const {
  ByteWriter w;
  w.varint(prefix.size());
  for (auto& [q, name] : prefix) {
    w.u8(static_cast<uint8_t>(q));
    w.str(name);
  }
  w.str(matrix.encode());
  return w.out;
}

Qbf Qbf::decode(std::string_view s) {
  ByteReader r(s);
  Qbf g;
  uint64_t n = r.varint();
  for (uint64_t i = 0; i < n; ++i) {
    Quant q = static_cast<Quant>(r.u8());
    g.prefix.emplace_back(q, r.str());
  }
  g.matrix = Circuit::decode(r.str());
  if (!r.done()) throw std::runtime_error("qbf decode: trailing bytes");
  g.validate();
  return g;
}

std::string Qbf::to_text() const {
  std::ostringstream os;
  os << "prefix";
  for (auto& [q, name] : prefix) os << ' ' << (q == Quant::Forall ? 'A' : 'E') << ' ' << name;
  os << '\n' << matrix.to_text();
  return os.str();
}

Qbf Qbf::parse_text(std::string_view text) {
  std::string s(text);
  auto nl = s.find('\n');
  if (nl == std::string::npos) throw std::runtime_error("qbf parse: missing prefix line");
  std::istringstream hs(s.substr(0, nl));
  std::string tok;
  hs >> tok;
  if (tok != "prefix") throw std::runtime_error("qbf parse: expected prefix line");
  Qbf g;
  std::string q, name;
  while (hs >> q >> name) {
    if (q != "A" && q != "E") throw std::runtime_error("qbf parse: bad quantifier " + q);
    g.prefix.emplace_back(q == "A" ? Quant::Forall : Quant::Exists, name);
  }
  g.matrix = Circuit::parse_text(s.substr(nl + 1));
  g.validate();
  return g;
}

ReachFamily::ReachFamily(MultiCircuit step_) : step(std::move(step_)) {
  step.validate();
  n = static_cast<unsigned>(step.free_inputs().size());
  if (step.outputs.size() != n)
    throw std::runtime_error("reach: transition must map n bits to n bits");
}

Qbf ReachFamily::reach(unsigned i) const {
  CircuitBuilder b;
  std::vector<uint32_t> a_bits, b_bits;
  for (unsigned j = 0; j < n; ++j) a_bits.push_back(b.input(uvar(j)));
  for (unsigned j = 0; j < n; ++j) b_bits.push_back(b.input(vvar(j)));
  Qbf g;
  for (unsigned l = i; l >= 1; --l) {
    std::vector<uint32_t> m_bits;
    for (unsigned j = 0; j < n; ++j) {
      m_bits.push_back(b.input(mvar(l, j)));
      g.prefix.emplace_back(Quant::Exists, mvar(l, j));
    }
    uint32_t s = b.input(svar(l));
    g.prefix.emplace_back(Quant::Forall, svar(l));
    std::vector<uint32_t> na, nb;
    for (unsigned j = 0; j < n; ++j) {
      na.push_back(b.gmux(s, a_bits[j], m_bits[j]));
      nb.push_back(b.gmux(s, m_bits[j], b_bits[j]));
    }
    a_bits = na;
    b_bits = nb;
  }
  std::map<std::string, uint32_t> wiring;
  std::vector<std::string> step_in = step.free_inputs();
  for (unsigned j = 0; j < n; ++j) wiring[step_in[j]] = a_bits[j];
  std::vector<uint32_t> out = b.embed(step, wiring);
  std::vector<uint32_t> eqs;
  for (unsigned j = 0; j < n; ++j) eqs.push_back(b.gxnor(out[j], b_bits[j]));
  g.matrix = b.take(b.gand(std::move(eqs)));
  g.validate();
  return g;
}

Qbf ReachFamily::reach_points(unsigned i, uint64_t u, uint64_t v) const {
  Qbf g = reach(i);
  for (unsigned j = 0; j < n; ++j) {
    g = g.restricted(uvar(j), (u >> (n - 1 - j)) & 1);
    g = g.restricted(vvar(j), (v >> (n - 1 - j)) & 1);
  }
  return g;
}

Qbf ReachFamily::exists_target(unsigned i, uint64_t u) const {
  Qbf g = reach(i);
  for (unsigned j = 0; j < n; ++j) g = g.restricted(uvar(j), (u >> (n - 1 - j)) & 1);
  std::vector<std::pair<Quant, std::string>> pre;
  for (unsigned j = 0; j < n; ++j) pre.emplace_back(Quant::Exists, vvar(j));
  pre.insert(pre.end(), g.prefix.begin(), g.prefix.end());
  g.prefix = std::move(pre);
  g.validate();
  return g;
}

Qbf ReachFamily::forall_exists_unique(unsigned i) const {
  Qbf r = reach(i);
  CircuitBuilder b;
  Qbf g;
  std::map<std::string, uint32_t> w1, w2;
  for (unsigned j = 0; j < n; ++j) {
    w1[uvar(j)] = w2[uvar(j)] = b.input(uvar(j));
    g.prefix.emplace_back(Quant::Forall, uvar(j));
  }
  std::vector<uint32_t> v_bits, w_bits;
  for (unsigned j = 0; j < n; ++j) {
    v_bits.push_back(b.input(vvar(j)));
    w1[vvar(j)] = v_bits[j];
    g.prefix.emplace_back(Quant::Exists, vvar(j));
  }
  // primary copy keeps its m/s names and its (∃m ∀s)* prefix
  for (auto& [q, name] : r.prefix) {
    w1[name] = b.input(name);
    g.prefix.emplace_back(q, name);
  }
  // uniqueness copy: ∀v' then the dual of the inner prefix, names primed
  for (unsigned j = 0; j < n; ++j) {
    w_bits.push_back(b.input("w" + std::to_string(j)));
    w2[vvar(j)] = w_bits[j];
    g.prefix.emplace_back(Quant::Forall, "w" + std::to_string(j));
  }
  for (auto& [q, name] : r.prefix) {
    std::string primed = "d" + name;
    w2[name] = b.input(primed);
    g.prefix.emplace_back(q == Quant::Forall ? Quant::Exists : Quant::Forall, primed);
  }
  uint32_t m1 = b.embed(r.matrix, w1, {r.matrix.output})[0];
  uint32_t m2 = b.embed(r.matrix, w2, {r.matrix.output})[0];
  uint32_t eq = b.eq_vec(w_bits, v_bits);
  uint32_t out = b.gand({m1, b.gor({b.gnot(m2), eq})});
  g.matrix = b.take(out);
  g.validate();
  return g;
}

}  // namespace owb
