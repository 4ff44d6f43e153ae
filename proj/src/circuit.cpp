#include "owb/circuit.hpp"

#include <algorithm>
#include <sstream>

namespace owb {

void Circuit::validate() const {
  if (gates.empty()) throw std::runtime_error("circuit: no gates");
  if (output >= gates.size()) throw std::runtime_error("circuit: bad output id");
  for (size_t i = 0; i < gates.size(); ++i) {
    const Gate& g = gates[i];
    for (uint32_t a : g.args)
      if (a >= i) throw std::runtime_error("circuit: not topologically ordered");
    switch (g.kind) {
      case GateKind::Input:
        if (!g.args.empty()) throw std::runtime_error("circuit: input with children");
        if (g.name.empty()) throw std::runtime_error("circuit: unnamed input");
        break;
      case GateKind::Const0:
      case GateKind::Const1:
        if (!g.args.empty()) throw std::runtime_error("circuit: const with children");
        break;
      case GateKind::Not:
        if (g.args.size() != 1) throw std::runtime_error("circuit: not-gate arity");
        break;
      default:
        break;
    }
  }
  std::map<std::string, int> seen;
  for (const Gate& g : gates)
    if (g.kind == GateKind::Input) seen[g.name]++;
  for (auto& [name, cnt] : seen)
    if (cnt > 1) throw std::runtime_error("circuit: duplicate input name " + name);
  for (auto& [name, b] : hardwired) {
    (void)b;
    if (!seen.count(name))
      throw std::runtime_error("circuit: hardwired unknown input " + name);
  }
}

std::vector<std::string> Circuit::input_names() const {
  std::vector<std::string> r;
  for (const Gate& g : gates)
    if (g.kind == GateKind::Input) r.push_back(g.name);
  return r;
}

std::vector<std::string> Circuit::free_inputs() const {
  std::vector<std::string> r;
  for (const Gate& g : gates)
    if (g.kind == GateKind::Input && !hardwired.count(g.name)) r.push_back(g.name);
  return r;
}

Circuit Circuit::restricted(const std::string& name, Bit b) const {
  bool found = false;
  for (const Gate& g : gates)
    if (g.kind == GateKind::Input && g.name == name) found = true;
  if (!found) throw std::runtime_error("restrict: unknown input " + name);
  if (hardwired.count(name)) throw std::runtime_error("restrict: already hardwired " + name);
  Circuit c = *this;
  c.hardwired[name] = b ? 1 : 0;
  return c;
}

Circuit Circuit::restricted(const Assignment& rho) const {
  Circuit c = *this;
  for (auto& [name, b] : rho) c = c.restricted(name, b);
  return c;
}

static Bit eval_gates(const Circuit& c, const Assignment* a) {
  std::vector<Bit> val(c.gates.size(), 0);
  for (size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    switch (g.kind) {
      case GateKind::Input: {
        auto hw = c.hardwired.find(g.name);
        if (hw != c.hardwired.end()) {
          val[i] = hw->second;
        } else {
          if (!a) throw std::runtime_error("eval: open circuit (free input " + g.name + ")");
          auto it = a->find(g.name);
          if (it == a->end())
            throw std::runtime_error("eval: assignment missing input " + g.name);
          val[i] = it->second ? 1 : 0;
        }
        break;
      }
      case GateKind::Const0: val[i] = 0; break;
      case GateKind::Const1: val[i] = 1; break;
      case GateKind::Not: val[i] = val[g.args[0]] ? 0 : 1; break;
      case GateKind::And: {
        Bit v = 1;
        for (uint32_t x : g.args) v &= val[x];
        val[i] = v;
        break;
      }
      case GateKind::Or: {
        Bit v = 0;
        for (uint32_t x : g.args) v |= val[x];
        val[i] = v;
        break;
      }
    }
  }
  return val[c.output];
}

Bit Circuit::eval() const { return eval_gates(*this, nullptr); }

Bit Circuit::eval_on(const Assignment& a) const {
  if (a.empty()) return eval_gates(*this, nullptr);
  return eval_gates(*this, &a);
}

uint64_t Circuit::count_sat(unsigned cap) const {
  std::vector<std::string> fi = free_inputs();
  if (fi.size() > cap)
    throw std::runtime_error("count_sat: free-input count exceeds cap");
  uint64_t n = fi.size(), cnt = 0;
  for (uint64_t m = 0; m < (1ull << n); ++m) {
    Assignment a;
    for (uint64_t i = 0; i < n; ++i) a[fi[i]] = (m >> (n - 1 - i)) & 1;
    cnt += eval_on(a);
  }
  return cnt;
}

Bit Circuit::parity(unsigned cap) const { return count_sat(cap) & 1; }

Bytes Circuit::encode() const {
  ByteWriter w;
  w.varint(gates.size());
  for (const Gate& g : gates) {
    w.u8(static_cast<uint8_t>(g.kind));
    if (g.kind == GateKind::Input) {
      w.str(g.name);
    } else {
      w.varint(g.args.size());
      for (uint32_t a : g.args) w.varint(a);
    }
  }
  w.varint(output);
  w.varint(hardwired.size());
  for (auto& [name, b] : hardwired) {  // std::map iterates sorted by name
    w.str(name);
    w.u8(b);
  }
  return w.out;
}

static Circuit decode_circuit_body(ByteReader& r) {
  Circuit c;
  uint64_t n = r.varint();
  for (uint64_t i = 0; i < n; ++i) {
    Gate g;
    g.kind = static_cast<GateKind>(r.u8());
    if (g.kind == GateKind::Input) {
      g.name = r.str();
    } else {
      uint64_t k = r.varint();
      for (uint64_t j = 0; j < k; ++j) g.args.push_back(static_cast<uint32_t>(r.varint()));
    }
    c.gates.push_back(std::move(g));
  }
  c.output = static_cast<uint32_t>(r.varint());
  uint64_t h = r.varint();
  for (uint64_t i = 0; i < h; ++i) {
    std::string name = r.str();
    c.hardwired[name] = r.u8();
  }
  c.validate();
  return c;
}

Circuit Circuit::decode(std::string_view s) {
  ByteReader r(s);
  Circuit c = decode_circuit_body(r);
  if (!r.done()) throw std::runtime_error("circuit decode: trailing bytes");
  return c;
}

static const char* kind_name(GateKind k) {
  switch (k) {
    case GateKind::Input: return "input";
    case GateKind::Const0: return "const0";
    case GateKind::Const1: return "const1";
    case GateKind::And: return "and";
    case GateKind::Or: return "or";
    case GateKind::Not: return "not";
  }
  return "?";
}

static std::string gates_to_text(const Circuit& c) {
  std::ostringstream os;
  for (size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    os << i << ' ' << kind_name(g.kind);
    if (g.kind == GateKind::Input) os << ' ' << g.name;
    for (uint32_t a : g.args) os << ' ' << a;
    os << '\n';
  }
  return os.str();
}

static std::string hardwired_to_text(const Circuit& c) {
  std::ostringstream os;
  for (auto& [name, b] : c.hardwired) os << "hardwired " << name << '=' << int(b) << '\n';
  return os.str();
}

std::string Circuit::to_text() const {
  std::ostringstream os;
  os << gates_to_text(*this) << "output " << output << '\n' << hardwired_to_text(*this);
  return os.str();
}

namespace {
struct TextParse {
  Circuit c;
  std::vector<uint32_t> outputs;
  bool have_output = false;
  bool multi = false;
};

TextParse parse_circuit_text(std::string_view text) {
  TextParse tp;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "output") {
      uint32_t o;
      if (!(ls >> o)) throw std::runtime_error("parse: bad output line");
      tp.c.output = o;
      tp.outputs = {o};
      tp.have_output = true;
    } else if (tok == "outputs") {
      uint32_t o;
      tp.outputs.clear();
      while (ls >> o) tp.outputs.push_back(o);
      if (tp.outputs.empty()) throw std::runtime_error("parse: empty outputs line");
      tp.c.output = tp.outputs[0];
      tp.have_output = true;
      tp.multi = true;
    } else if (tok == "hardwired") {
      std::string kv;
      ls >> kv;
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::runtime_error("parse: bad hardwired line");
      tp.c.hardwired[kv.substr(0, eq)] = kv.substr(eq + 1) == "1" ? 1 : 0;
    } else {
      size_t id = std::stoul(tok);
      if (id != tp.c.gates.size()) throw std::runtime_error("parse: gate ids must be dense");
      Gate g;
      std::string kind;
      ls >> kind;
      if (kind == "input") {
        g.kind = GateKind::Input;
        ls >> g.name;
        if (g.name.empty()) throw std::runtime_error("parse: input without name");
      } else if (kind == "const0") {
        g.kind = GateKind::Const0;
      } else if (kind == "const1") {
        g.kind = GateKind::Const1;
      } else if (kind == "and" || kind == "or" || kind == "not") {
        g.kind = kind == "and" ? GateKind::And : kind == "or" ? GateKind::Or : GateKind::Not;
        uint32_t a;
        while (ls >> a) g.args.push_back(a);
      } else {
        throw std::runtime_error("parse: unknown gate kind " + kind);
      }
      tp.c.gates.push_back(std::move(g));
    }
  }
  if (!tp.have_output) throw std::runtime_error("parse: missing output line");
  tp.c.validate();
  return tp;
}
}  // namespace

Circuit Circuit::parse_text(std::string_view text) {
  TextParse tp = parse_circuit_text(text);
  if (tp.multi) throw std::runtime_error("parse: expected single-output circuit");
  return tp.c;
}

void MultiCircuit::validate() const {
  base.validate();
  if (outputs.empty()) throw std::runtime_error("multicircuit: no outputs");
  for (uint32_t o : outputs)
    if (o >= base.gates.size()) throw std::runtime_error("multicircuit: bad output id");
}

std::vector<Bit> MultiCircuit::mo_eval(const std::vector<Bit>& x) const {
  std::vector<std::string> fi = base.free_inputs();
  if (x.size() != fi.size()) throw std::runtime_error("mo_eval: arity mismatch");
  Assignment a;
  for (size_t i = 0; i < fi.size(); ++i) a[fi[i]] = x[i] ? 1 : 0;
  std::vector<Bit> out;
  Circuit tmp = base;
  // evaluate every gate once, then read all outputs
  std::vector<Bit> val(base.gates.size(), 0);
  for (size_t i = 0; i < base.gates.size(); ++i) {
    const Gate& g = base.gates[i];
    switch (g.kind) {
      case GateKind::Input: {
        auto hw = base.hardwired.find(g.name);
        val[i] = hw != base.hardwired.end() ? hw->second : a.at(g.name);
        break;
      }
      case GateKind::Const0: val[i] = 0; break;
      case GateKind::Const1: val[i] = 1; break;
      case GateKind::Not: val[i] = val[g.args[0]] ? 0 : 1; break;
      case GateKind::And: {
        Bit v = 1;
        for (uint32_t q : g.args) v &= val[q];
        val[i] = v;
        break;
      }
      case GateKind::Or: {
        Bit v = 0;
        for (uint32_t q : g.args) v |= val[q];
        val[i] = v;
        break;
      }
    }
  }
  for (uint32_t o : outputs) out.push_back(val[o]);
  return out;
}

uint64_t MultiCircuit::eval_u64(uint64_t x) const {
  size_t n = base.free_inputs().size();
  std::vector<Bit> bits(n);
  for (size_t i = 0; i < n; ++i) bits[i] = (x >> (n - 1 - i)) & 1;
  std::vector<Bit> out = mo_eval(bits);
  uint64_t v = 0;
  for (Bit b : out) v = (v << 1) | b;
  return v;
}

Bytes MultiCircuit::encode() const {
  ByteWriter w;
  w.str(base.encode());
  w.varint(outputs.size());
  for (uint32_t o : outputs) w.varint(o);
  return w.out;
}

MultiCircuit MultiCircuit::decode(std::string_view s) {
  ByteReader r(s);
  MultiCircuit m;
  std::string b = r.str();
  m.base = Circuit::decode(b);
  uint64_t n = r.varint();
  for (uint64_t i = 0; i < n; ++i) m.outputs.push_back(static_cast<uint32_t>(r.varint()));
  if (!r.done()) throw std::runtime_error("multicircuit decode: trailing bytes");
  m.validate();
  return m;
}

std::string MultiCircuit::to_text() const {
  std::ostringstream os;
  os << gates_to_text(base) << "outputs";
  for (uint32_t o : outputs) os << ' ' << o;
  os << '\n' << hardwired_to_text(base);
  return os.str();
}

MultiCircuit MultiCircuit::parse_text(std::string_view text) {
  TextParse tp = parse_circuit_text(text);
  MultiCircuit m;
  m.base = tp.c;
  m.outputs = tp.outputs;
  m.validate();
  return m;
}

uint32_t CircuitBuilder::input(const std::string& name) {
  auto it = inputs_by_name.find(name);
  if (it != inputs_by_name.end()) return it->second;
  c.gates.push_back(Gate{GateKind::Input, name, {}});
  uint32_t id = static_cast<uint32_t>(c.gates.size() - 1);
  inputs_by_name[name] = id;
  return id;
}

uint32_t CircuitBuilder::add(GateKind k, std::vector<uint32_t> args) {
  c.gates.push_back(Gate{k, "", std::move(args)});
  return static_cast<uint32_t>(c.gates.size() - 1);
}

uint32_t CircuitBuilder::gxor(uint32_t a, uint32_t b) {
  return gor({gand({a, gnot(b)}), gand({gnot(a), b})});
}

uint32_t CircuitBuilder::gxnor(uint32_t a, uint32_t b) {
  return gor({gand({a, b}), gand({gnot(a), gnot(b)})});
}

uint32_t CircuitBuilder::gmux(uint32_t s, uint32_t if0, uint32_t if1) {
  return gor({gand({gnot(s), if0}), gand({s, if1})});
}

std::vector<uint32_t> CircuitBuilder::embed(const Circuit& sub,
                                            const std::map<std::string, uint32_t>& wiring,
                                            const std::vector<uint32_t>& wanted) {
  std::vector<uint32_t> remap(sub.gates.size());
  for (size_t i = 0; i < sub.gates.size(); ++i) {
    const Gate& g = sub.gates[i];
    if (g.kind == GateKind::Input) {
      auto hw = sub.hardwired.find(g.name);
      if (hw != sub.hardwired.end()) {
        remap[i] = konst(hw->second);
      } else {
        auto w = wiring.find(g.name);
        remap[i] = w != wiring.end() ? w->second : input(g.name);
      }
    } else {
      std::vector<uint32_t> args;
      for (uint32_t a : g.args) args.push_back(remap[a]);
      remap[i] = add(g.kind, std::move(args));
    }
  }
  std::vector<uint32_t> out;
  for (uint32_t w : wanted) out.push_back(remap[w]);
  return out;
}

std::vector<uint32_t> CircuitBuilder::embed(const MultiCircuit& sub,
                                            const std::map<std::string, uint32_t>& wiring) {
  return embed(sub.base, wiring, sub.outputs);
}

uint32_t CircuitBuilder::lt_const(const std::vector<uint32_t>& bits, uint64_t cval) {
  // x < c  iff  exists i: c_i=1, x_i=0 and x_j=c_j for all j<i (msb-first)
  size_t n = bits.size();
  std::vector<uint32_t> disj;
  std::vector<uint32_t> prefix_eq;  // running list of equality terms
  for (size_t i = 0; i < n; ++i) {
    Bit ci = (cval >> (n - 1 - i)) & 1;
    if (ci) {
      std::vector<uint32_t> term = prefix_eq;
      term.push_back(gnot(bits[i]));
      disj.push_back(gand(std::move(term)));
      prefix_eq.push_back(bits[i]);  // x_i must equal 1
    } else {
      prefix_eq.push_back(gnot(bits[i]));  // x_i must equal 0
    }
  }
  return gor(std::move(disj));
}

uint32_t CircuitBuilder::eq_const(const std::vector<uint32_t>& bits, uint64_t cval) {
  size_t n = bits.size();
  std::vector<uint32_t> terms;
  for (size_t i = 0; i < n; ++i) {
    Bit ci = (cval >> (n - 1 - i)) & 1;
    terms.push_back(ci ? bits[i] : gnot(bits[i]));
  }
  return gand(std::move(terms));
}

uint32_t CircuitBuilder::eq_vec(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
  if (a.size() != b.size()) throw std::runtime_error("eq_vec: width mismatch");
  std::vector<uint32_t> terms;
  for (size_t i = 0; i < a.size(); ++i) terms.push_back(gxnor(a[i], b[i]));
  return gand(std::move(terms));
}

uint32_t CircuitBuilder::lt_vec(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
  if (a.size() != b.size()) throw std::runtime_error("lt_vec: width mismatch");
  std::vector<uint32_t> disj;
  std::vector<uint32_t> prefix_eq;
  for (size_t i = 0; i < a.size(); ++i) {
    std::vector<uint32_t> term = prefix_eq;
    term.push_back(gnot(a[i]));
    term.push_back(b[i]);
    disj.push_back(gand(std::move(term)));
    prefix_eq.push_back(gxnor(a[i], b[i]));
  }
  return gor(std::move(disj));
}

std::vector<std::string> numbered_inputs(unsigned n) {
  std::vector<std::string> r;
  for (unsigned i = 0; i < n; ++i) r.push_back("x" + std::to_string(i));
  return r;
}

static std::vector<uint32_t> declare_inputs(CircuitBuilder& b, unsigned n) {
  std::vector<uint32_t> ids;
  for (unsigned i = 0; i < n; ++i) ids.push_back(b.input("x" + std::to_string(i)));
  return ids;
}

Circuit set_full(unsigned n) {
  CircuitBuilder b;
  declare_inputs(b, n);
  return b.take(b.gand({}));
}

Circuit set_singleton(uint64_t i, unsigned n) {
  CircuitBuilder b;
  auto bits = declare_inputs(b, n);
  return b.take(b.eq_const(bits, i));
}

Circuit set_interval_lt(unsigned n, uint64_t i) {
  CircuitBuilder b;
  auto bits = declare_inputs(b, n);
  if (i > (n >= 64 ? UINT64_MAX : (1ull << n)))
    throw std::runtime_error("set_interval_lt: bound out of range");
  if (i >= (1ull << n)) return b.take(b.gand({}));  // whole domain
  return b.take(b.lt_const(bits, i));
}

Circuit set_fn_lt(const MultiCircuit& f, uint64_t i) {
  CircuitBuilder b;
  std::map<std::string, uint32_t> wiring;
  for (const std::string& name : f.free_inputs()) wiring[name] = b.input(name);
  auto out = b.embed(f, wiring);
  if (i >= (1ull << out.size())) return b.take(b.gand({}));
  return b.take(b.lt_const(out, i));
}

Circuit set_fn_eq(const MultiCircuit& f, uint64_t i) {
  CircuitBuilder b;
  std::map<std::string, uint32_t> wiring;
  for (const std::string& name : f.free_inputs()) wiring[name] = b.input(name);
  auto out = b.embed(f, wiring);
  return b.take(b.eq_const(out, i));
}

Circuit set_union(const Circuit& x, const Circuit& y) {
  if (x.free_inputs() != y.free_inputs())
    throw std::runtime_error("set_union: free-input mismatch");
  CircuitBuilder b;
  std::map<std::string, uint32_t> wiring;
  for (const std::string& name : x.free_inputs()) wiring[name] = b.input(name);
  uint32_t ox = b.embed(x, wiring, {x.output})[0];
  uint32_t oy = b.embed(y, wiring, {y.output})[0];
  return b.take(b.gor({ox, oy}));
}

MultiCircuit table_multicircuit(unsigned in_bits, unsigned out_bits,
                                const std::vector<uint64_t>& table) {
  if (table.size() != (1ull << in_bits))
    throw std::runtime_error("table_multicircuit: table size mismatch");
  CircuitBuilder b;
  auto bits = declare_inputs(b, in_bits);
  std::vector<uint32_t> outs;
  for (unsigned o = 0; o < out_bits; ++o) {
    std::vector<uint32_t> minterms;
    for (uint64_t x = 0; x < table.size(); ++x)
      if ((table[x] >> (out_bits - 1 - o)) & 1) minterms.push_back(b.eq_const(bits, x));
    outs.push_back(b.gor(std::move(minterms)));
  }
  return b.take_multi(std::move(outs));
}

uint64_t assignment_to_u64(const std::vector<std::string>& names, const Assignment& a) {
  uint64_t v = 0;
  for (const std::string& n : names) v = (v << 1) | (a.at(n) ? 1 : 0);
  return v;
}

Assignment u64_to_assignment(const std::vector<std::string>& names, uint64_t v) {
  Assignment a;
  size_t n = names.size();
  for (size_t i = 0; i < n; ++i) a[names[i]] = (v >> (n - 1 - i)) & 1;
  return a;
}

}  // namespace owb
