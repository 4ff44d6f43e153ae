#include "owb/pnp.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace owb {

namespace {

uint64_t pow2(unsigned b) { return 1ull << b; }

uint64_t mask_bits(unsigned b) { return b >= 64 ? ~0ull : pow2(b) - 1; }

unsigned bits_for_count(uint64_t m) {
  unsigned b = 0;
  while (m > pow2(b)) ++b;
  return b;
}

unsigned witness_index(const std::string& name) {
  if (name.size() < 2 || name[0] != 'w')
    throw std::runtime_error("oracle query: free input not named w<i>: " + name);
  unsigned i = 0;
  for (size_t p = 1; p < name.size(); ++p) {
    if (name[p] < '0' || name[p] > '9')
      throw std::runtime_error("oracle query: free input not named w<i>: " + name);
    i = i * 10 + (name[p] - '0');
  }
  return i;
}

std::map<std::string, PnpMachine>& machine_map() {
  static std::map<std::string, PnpMachine> m;
  return m;
}

void ensure_builtin_machines();

}  // namespace

void register_pnp_machine(PnpMachine m) {
  ensure_builtin_machines();
  machine_map()[m.name] = std::move(m);
}

const PnpMachine& pnp_machine(const std::string& name) {
  ensure_builtin_machines();
  auto& m = machine_map();
  auto it = m.find(name);
  if (it == m.end()) throw std::out_of_range("unknown oracle machine: " + name);
  return it->second;
}

std::vector<std::string> pnp_machine_names() {
  ensure_builtin_machines();
  std::vector<std::string> out;
  for (auto& [k, v] : machine_map()) out.push_back(k);
  return out;
}

bool query_satisfied(const Circuit& q, uint64_t w) {
  Assignment a;
  for (const std::string& name : q.free_inputs()) a[name] = (w >> witness_index(name)) & 1;
  return q.eval_on(a) == 1;
}

NpOracle honest_np_oracle() {
  return [](const Circuit& q) -> std::optional<uint64_t> {
    unsigned k = 0;
    for (const std::string& name : q.free_inputs()) k = std::max(k, witness_index(name) + 1);
    if (k > 20) throw std::runtime_error("oracle query too wide for brute force");
    for (uint64_t w = 0; w < pow2(k); ++w)
      if (query_satisfied(q, w)) return w;
    return std::nullopt;
  };
}

PnpRun run_pnp(const PnpMachine& m, const Instance& inst, uint64_t x, const NpOracle& oracle) {
  PnpRun run;
  unsigned t = m.queries(inst);
  for (unsigned i = 0; i < t; ++i) {
    Circuit q = m.query(inst, x, run.replies);
    std::optional<uint64_t> w = oracle(q);
    run.replies.push_back(w.has_value() ? 1 : 0);
    run.witnesses.push_back(w.value_or(0));
  }
  run.output = m.output(inst, x, run.replies) & mask_bits(m.out_bits(inst));
  return run;
}

bool pnp_run_valid(const PnpMachine& m, const Instance& inst, uint64_t x, const PnpRun& run) {
  unsigned t = m.queries(inst);
  unsigned wbits = m.witness_bits(inst);
  if (run.replies.size() != t || run.witnesses.size() != t) return false;
  std::vector<Bit> prefix;
  for (unsigned i = 0; i < t; ++i) {
    if (run.replies[i] > 1) return false;
    if (run.witnesses[i] > mask_bits(wbits)) return false;
    if (run.replies[i] == 1) {
      Circuit q = m.query(inst, x, prefix);
      if (!query_satisfied(q, run.witnesses[i])) return false;
    } else if (run.witnesses[i] != 0) {
      return false;  // canonical encoding: NO replies carry a zero witness slot
    }
    prefix.push_back(run.replies[i]);
  }
  return true;
}

bool check_pnp_counterexample(const PnpMachine& m, const Instance& inst, uint64_t x,
                              const PnpRun& run, unsigned idx, uint64_t w) {
  unsigned t = m.queries(inst);
  if (idx >= t || idx >= run.replies.size()) return false;
  if (run.replies[idx] != 0) return false;
  if (w > mask_bits(m.witness_bits(inst))) return false;
  std::vector<Bit> prefix(run.replies.begin(), run.replies.begin() + idx);
  Circuit q = m.query(inst, x, prefix);
  return query_satisfied(q, w);
}

Shape pnp_run_shape(unsigned queries, unsigned witness_bits) {
  Shape s(queries, 1);
  s.insert(s.end(), queries, witness_bits);
  return s;
}

PnpRun pnp_run_from_fields(const PnpMachine& m, const Instance& inst, uint64_t x,
                           const uint64_t* fields) {
  unsigned t = m.queries(inst);
  PnpRun run;
  for (unsigned i = 0; i < t; ++i) run.replies.push_back(static_cast<Bit>(fields[i] & 1));
  for (unsigned i = 0; i < t; ++i) run.witnesses.push_back(fields[t + i]);
  run.output = m.output(inst, x, run.replies) & mask_bits(m.out_bits(inst));
  return run;
}

namespace {

// Binary search for the least member of the set funcs["S"] (n inputs, 1
// output).  Query i asks whether S has a member extending the decided prefix
// with a 0 at position i; a YES pins bit i to 0, a NO to 1.  With an honest
// oracle and a nonempty S the output is the least member.
PnpMachine make_binary_search_least() {
  PnpMachine m;
  m.name = "binary_search_least";
  auto width = [](const Instance& inst) { return inst.func("S").in_bits; };
  m.in_bits = width;
  m.out_bits = width;
  m.queries = width;
  m.witness_bits = width;
  auto prefix_bits = [](const std::vector<Bit>& replies) {
    std::vector<Bit> p;
    for (Bit r : replies) p.push_back(r ? 0 : 1);
    return p;
  };
  m.query = [prefix_bits](const Instance& inst, uint64_t, const std::vector<Bit>& replies) {
    MultiCircuit s = inst.func("S").as_multicircuit();
    unsigned n = inst.func("S").in_bits;
    std::vector<std::string> names = s.free_inputs();
    std::vector<Bit> p = prefix_bits(replies);
    unsigned i = static_cast<unsigned>(replies.size());
    CircuitBuilder b;
    std::map<std::string, uint32_t> wiring;
    for (unsigned j = 0; j < n; ++j) {
      if (j < i)
        wiring[names[j]] = b.konst(p[j]);
      else if (j == i)
        wiring[names[j]] = b.konst(0);
      else
        wiring[names[j]] = b.input("w" + std::to_string(j));
    }
    std::vector<uint32_t> out = b.embed(s.base, wiring, {s.outputs[0]});
    return b.take(out[0]);
  };
  m.output = [prefix_bits](const Instance& inst, uint64_t, const std::vector<Bit>& replies) {
    unsigned n = inst.func("S").in_bits;
    std::vector<Bit> p = prefix_bits(replies);
    uint64_t y = 0;
    for (unsigned j = 0; j < n && j < p.size(); ++j) y |= uint64_t(p[j]) << (n - 1 - j);
    return y;
  };
  return m;
}

// Query-free machines computing the instance functions directly; they make a
// machine-backed hole/pigeon pair out of plain circuits for fixtures.
PnpMachine make_plain(const std::string& name, const std::string& fn) {
  PnpMachine m;
  m.name = name;
  m.in_bits = [fn](const Instance& inst) { return inst.func(fn).in_bits; };
  m.out_bits = [fn](const Instance& inst) { return inst.func(fn).out_bits; };
  m.queries = [](const Instance&) { return 0u; };
  m.witness_bits = [](const Instance&) { return 0u; };
  m.query = [](const Instance&, uint64_t, const std::vector<Bit>&) -> Circuit {
    throw std::logic_error("plain machine asks no queries");
  };
  m.output = [fn](const Instance& inst, uint64_t x, const std::vector<Bit>&) {
    return inst.func(fn)(x);
  };
  return m;
}

void ensure_builtin_machines() {
  static const bool done = [] {
    auto& m = machine_map();
    for (PnpMachine b : {make_binary_search_least(), make_plain("plain_F", "F"),
                         make_plain("plain_G", "G")})
      m[b.name] = std::move(b);
    return true;
  }();
  (void)done;
}

}  // namespace

namespace detail {

Tfs2Problem make_pnp_problem() {
  Tfs2Problem p;
  p.name = "pnp";
  p.validate = [](const Instance& inst) {
    const PnpMachine& m = pnp_machine(inst.tag("machine"));
    if (m.queries(inst) > 20 || m.witness_bits(inst) > 20)
      throw std::runtime_error("instance: machine budgets too large");
    unsigned in = m.in_bits(inst);
    if (in < 64 && (inst.scalar_or("x", 0) >> in) != 0)
      throw std::runtime_error("instance: machine input out of range");
  };
  p.y_shape = [](const Instance& inst) {
    const PnpMachine& m = pnp_machine(inst.tag("machine"));
    return pnp_run_shape(m.queries(inst), m.witness_bits(inst));
  };
  p.z_shape = [](const Instance& inst) {
    const PnpMachine& m = pnp_machine(inst.tag("machine"));
    return Shape{bits_for_count(m.queries(inst)), m.witness_bits(inst)};
  };
  p.rel = [](const Instance& inst, const Solution& y, const Solution& z) {
    const PnpMachine& m = pnp_machine(inst.tag("machine"));
    uint64_t x = inst.scalar_or("x", 0);
    if (!shape_fits(tfs2("pnp").y_shape(inst), y) || !shape_fits(tfs2("pnp").z_shape(inst), z))
      return false;
    PnpRun run = pnp_run_from_fields(m, inst, x, y.data());
    if (!pnp_run_valid(m, inst, x, run)) return false;
    return !check_pnp_counterexample(m, inst, x, run, static_cast<unsigned>(z[0]), z[1]);
  };
  p.brute = [](const Instance& inst) {
    const PnpMachine& m = pnp_machine(inst.tag("machine"));
    PnpRun run = run_pnp(m, inst, inst.scalar_or("x", 0), honest_np_oracle());
    Solution y(run.replies.begin(), run.replies.end());
    y.insert(y.end(), run.witnesses.begin(), run.witnesses.end());
    return y;
  };
  return p;
}

namespace {

struct Rwpp2View {
  const PnpMachine* f;
  const PnpMachine* g;
  unsigned tf, wf, tg, wg;
};

Rwpp2View rwpp2_view(const Instance& inst) {
  Rwpp2View v;
  v.f = &pnp_machine(inst.tag("F"));
  v.g = &pnp_machine(inst.tag("G"));
  v.tf = v.f->queries(inst);
  v.wf = v.f->witness_bits(inst);
  v.tg = v.g->queries(inst);
  v.wg = v.g->witness_bits(inst);
  return v;
}

}  // namespace

Tfs2Problem make_rwpp2_problem() {
  Tfs2Problem p;
  p.name = "rwpp2";
  p.validate = [](const Instance& inst) {
    if (inst.n < 1 || inst.n > 16) throw std::runtime_error("instance: size parameter out of range");
    Rwpp2View v = rwpp2_view(inst);
    if (v.f->in_bits(inst) != inst.n || v.f->out_bits(inst) != inst.n + 1)
      throw std::runtime_error("instance: F must map pigeons to holes");
    if (v.g->in_bits(inst) != inst.n + 1 || v.g->out_bits(inst) != inst.n)
      throw std::runtime_error("instance: G must map holes to pigeons");
    if (v.tf > 16 || v.tg > 16 || v.wf > 20 || v.wg > 20)
      throw std::runtime_error("instance: machine budgets too large");
  };
  p.y_shape = [](const Instance& inst) {
    Rwpp2View v = rwpp2_view(inst);
    Shape s{inst.n + 1};
    Shape gs = pnp_run_shape(v.tg, v.wg);
    Shape fs = pnp_run_shape(v.tf, v.wf);
    s.insert(s.end(), gs.begin(), gs.end());
    s.insert(s.end(), fs.begin(), fs.end());
    return s;
  };
  p.z_shape = [](const Instance& inst) {
    Rwpp2View v = rwpp2_view(inst);
    return Shape{1, bits_for_count(std::max(v.tf, v.tg)), std::max(v.wf, v.wg)};
  };
  p.rel = [](const Instance& inst, const Solution& y, const Solution& z) {
    if (!shape_fits(tfs2("rwpp2").y_shape(inst), y) || !shape_fits(tfs2("rwpp2").z_shape(inst), z))
      return false;
    Rwpp2View v = rwpp2_view(inst);
    uint64_t hole = y[0];
    PnpRun grun = pnp_run_from_fields(*v.g, inst, hole, y.data() + 1);
    if (!pnp_run_valid(*v.g, inst, hole, grun)) return false;
    uint64_t pigeon = grun.output;
    PnpRun frun = pnp_run_from_fields(*v.f, inst, pigeon, y.data() + 1 + 2 * v.tg);
    if (!pnp_run_valid(*v.f, inst, pigeon, frun)) return false;
    if (frun.output == hole) return false;
    unsigned idx = static_cast<unsigned>(z[1]);
    if (z[0] == 0)
      return !check_pnp_counterexample(*v.g, inst, hole, grun, idx, z[2]);
    return !check_pnp_counterexample(*v.f, inst, pigeon, frun, idx, z[2]);
  };
  p.brute = [](const Instance& inst) {
    Rwpp2View v = rwpp2_view(inst);
    NpOracle oracle = honest_np_oracle();
    for (uint64_t hole = 0; hole < pow2(inst.n + 1); ++hole) {
      PnpRun grun = run_pnp(*v.g, inst, hole, oracle);
      PnpRun frun = run_pnp(*v.f, inst, grun.output, oracle);
      if (frun.output != hole) {
        Solution y{hole};
        y.insert(y.end(), grun.replies.begin(), grun.replies.end());
        y.insert(y.end(), grun.witnesses.begin(), grun.witnesses.end());
        y.insert(y.end(), frun.replies.begin(), frun.replies.end());
        y.insert(y.end(), frun.witnesses.begin(), frun.witnesses.end());
        return y;
      }
    }
    throw std::logic_error("rwpp2 brute: every hole hit, contradicting counting");
  };
  return p;
}

}  // namespace detail

}  // namespace owb
