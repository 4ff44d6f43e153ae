#include "owb/reductions.hpp"

#include <sstream>
#include <stdexcept>

namespace owb {

namespace {

std::string sol_text(const Solution& sol) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < sol.size(); ++i) os << (i ? " " : "") << sol[i];
  os << ']';
  return os.str();
}

}  // namespace

// --- solution packing --------------------------------------------------

unsigned shape_bits(const Shape& shape) {
  unsigned total = 0;
  for (unsigned w : shape) total += w;
  return total;
}

uint64_t pack_solution(const Shape& shape, const Solution& sol) {
  if (!shape_fits(shape, sol)) throw std::invalid_argument("pack_solution: tuple does not fit shape");
  if (shape_bits(shape) > 64) throw std::invalid_argument("pack_solution: shape too wide");
  uint64_t acc = 0;
  for (size_t i = 0; i < shape.size(); ++i) acc = (acc << shape[i]) | sol[i];
  return acc;
}

Solution unpack_solution(const Shape& shape, uint64_t bits) {
  if (shape_bits(shape) > 64) throw std::invalid_argument("unpack_solution: shape too wide");
  Solution sol(shape.size(), 0);
  for (size_t i = shape.size(); i-- > 0;) {
    uint64_t mask = shape[i] >= 64 ? ~uint64_t(0) : ((uint64_t(1) << shape[i]) - 1);
    sol[i] = bits & mask;
    bits >>= shape[i];
  }
  if (bits) throw std::invalid_argument("unpack_solution: leftover bits");
  return sol;
}

Bytes encode_solution(const Solution& sol) {
  ByteWriter w;
  w.varint(sol.size());
  for (uint64_t v : sol) w.varint(v);
  return w.out;
}

Solution decode_solution(const Bytes& bytes) {
  ByteReader r(bytes);
  uint64_t n = r.varint();
  Solution sol;
  sol.reserve(n);
  for (uint64_t i = 0; i < n; ++i) sol.push_back(r.varint());
  if (!r.done()) throw std::runtime_error("decode_solution: trailing bytes");
  return sol;
}

std::string CxReduction::source_name() const {
  if (tfnp_source) return tfnp_source->name;
  if (tfs2_source) return tfs2_source->name;
  throw std::logic_error("cx reduction has no source problem");
}

// --- reports -----------------------------------------------------------

void ReductionReport::fail(std::string what) {
  pass = false;
  violations.push_back(std::move(what));
}

std::string ReductionReport::to_text() const {
  std::ostringstream os;
  os << "report " << name << ": " << (pass ? "PASS" : "FAIL") << " instances=" << instances
     << " checks=" << checks << " violations=" << violations.size() << "\n";
  for (const std::string& v : violations) os << "violation " << v << "\n";
  return os.str();
}

// --- harnesses ----------------------------------------------------------

ReductionReport verify_many_one(const ManyOneReduction& red, const std::vector<Instance>& corpus,
                                unsigned cap_bits) {
  ReductionReport rep;
  rep.name = red.name;
  for (size_t i = 0; i < corpus.size(); ++i) {
    const Instance& u = corpus[i];
    ++rep.instances;
    std::string where = "instance " + std::to_string(i);
    try {
      red.source.validate(u);
      Instance t = red.f(u);
      red.target.validate(t);
      Shape ys = red.target.sol_shape(t);
      if (shape_bits(ys) > cap_bits) throw std::runtime_error("target solution space exceeds cap");
      Solution y = zero_of_shape(ys);
      do {
        if (!red.target.check(t, y)) continue;
        ++rep.checks;
        Solution v = red.g(u, y);
        if (!red.source.check(u, v))
          rep.fail(where + ": y=" + sol_text(y) + " maps to bad v=" + sol_text(v));
      } while (next_in_shape(ys, y));
    } catch (const std::exception& e) {
      rep.fail(where + ": " + e.what());
    }
  }
  return rep;
}

ReductionReport verify_cx(const CxReduction& red, const std::vector<Instance>& corpus,
                          unsigned cap_bits) {
  ReductionReport rep;
  rep.name = red.name;
  if (!red.tfnp_source == !red.tfs2_source)
    throw std::invalid_argument("cx reduction must have exactly one source problem");
  for (size_t i = 0; i < corpus.size(); ++i) {
    const Instance& u = corpus[i];
    ++rep.instances;
    std::string where = "instance " + std::to_string(i);
    try {
      if (red.tfnp_source)
        red.tfnp_source->validate(u);
      else
        red.tfs2_source->validate(u);
      Instance t = red.f(u);
      red.target.validate(t);
      Shape ys = red.target.y_shape(t);
      unsigned total = shape_bits(ys);
      Shape ws;
      if (red.tfs2_source) {
        ws = red.tfs2_source->z_shape(u);
        total += shape_bits(ws);
      }
      if (total > cap_bits) throw std::runtime_error("(y, w) space exceeds cap");
      Solution y = zero_of_shape(ys);
      do {
        Solution v = red.g(u, y);
        if (red.tfnp_source) {
          ++rep.checks;
          if (red.tfnp_source->check(u, v)) continue;
          Solution z = red.h(u, y, {});
          if (red.target.rel(t, y, z))
            rep.fail(where + ": y=" + sol_text(y) + " unsolved but z=" + sol_text(z) +
                     " fails to refute");
        } else {
          Solution w = zero_of_shape(ws);
          do {
            ++rep.checks;
            if (red.tfs2_source->rel(u, v, w)) continue;
            Solution z = red.h(u, y, w);
            if (red.target.rel(t, y, z))
              rep.fail(where + ": y=" + sol_text(y) + " w=" + sol_text(w) + " refutes v but z=" +
                       sol_text(z) + " fails to refute y");
          } while (next_in_shape(ws, w));
        }
      } while (next_in_shape(ys, y));
    } catch (const std::exception& e) {
      rep.fail(where + ": " + e.what());
    }
  }
  return rep;
}

ReductionReport verify_solver(const GammaSolver& solver, const std::vector<Instance>& corpus,
                              const std::vector<uint64_t>& seeds) {
  ReductionReport rep;
  rep.name = solver.name;
  for (size_t i = 0; i < corpus.size(); ++i) {
    const Instance& u = corpus[i];
    ++rep.instances;
    std::string where = "instance " + std::to_string(i);
    try {
      solver.problem.validate(u);
      Protocol proto = solver.build(u);
      GameResult honest = run_game(proto, honest_adversary(solver.gamma), solver.gamma);
      ++rep.checks;
      if (honest.kind != GameResult::Kind::Solved)
        rep.fail(where + ": honest run did not solve (" + honest.diagnostic + ")");
      else if (!solver.problem.check(u, decode_solution(honest.solution)))
        rep.fail(where + ": honest run returned bad solution " +
                 sol_text(decode_solution(honest.solution)));
      for (uint64_t seed : seeds) {
        ++rep.checks;
        GameResult r = run_game(proto, seeded_adversary(seed), solver.gamma);
        if (r.kind == GameResult::Kind::Failure) continue;  // witness already checked by run_game
        if (r.kind == GameResult::Kind::Solved) {
          if (!solver.problem.check(u, decode_solution(r.solution)))
            rep.fail(where + ": seed " + std::to_string(seed) + " returned bad solution");
          continue;
        }
        rep.fail(where + ": seed " + std::to_string(seed) + " ended " +
                 (r.kind == GameResult::Kind::Exhausted ? "exhausted" : "malformed") + " (" +
                 r.diagnostic + ")");
      }
    } catch (const std::exception& e) {
      rep.fail(where + ": " + e.what());
    }
  }
  return rep;
}

// --- checkable -----------------------------------------------------------

TfnpProblem checkable(const Tfs2Problem& r) {
  TfnpProblem p;
  p.name = "checkable_" + r.name;
  p.validate = [r](const Instance& inst) {
    r.validate(inst);
    const Func& c = inst.func("chk");
    if (c.in_bits != shape_bits(r.y_shape(inst)) || c.out_bits != shape_bits(r.z_shape(inst)))
      throw std::runtime_error("instance: checking circuit arity mismatch");
  };
  p.sol_shape = [r](const Instance& inst) { return r.y_shape(inst); };
  p.check = [r](const Instance& inst, const Solution& y) {
    Shape ys = r.y_shape(inst);
    if (!shape_fits(ys, y)) return false;
    Solution z = unpack_solution(r.z_shape(inst), inst.func("chk")(pack_solution(ys, y)));
    return r.rel(inst, y, z);
  };
  TfnpProblem base = p;  // brute only needs the pieces above
  p.brute = [base](const Instance& inst) { return brute_first(base, inst); };
  return p;
}

Instance checkable_instance(const Tfs2Problem& r, const Instance& inst, const MultiCircuit& chk) {
  unsigned yb = shape_bits(r.y_shape(inst)), zb = shape_bits(r.z_shape(inst));
  if (chk.free_inputs().size() != yb || chk.outputs.size() != zb)
    throw std::runtime_error("checkable_instance: circuit arity mismatch");
  Instance out = inst;
  out.problem = "checkable_" + r.name;
  out.funcs["chk"] = Func::from_circuit(chk);
  return out;
}

MultiCircuit cx_check_circuit(const CxReduction& red, const Instance& u) {
  if (!red.tfnp_source)
    throw std::invalid_argument("cx_check_circuit: needs a single-round source problem");
  Instance t = red.f(u);
  Shape ys = red.target.y_shape(t), zs = red.target.z_shape(t);
  unsigned yb = shape_bits(ys);
  if (yb > 20) throw std::runtime_error("cx_check_circuit: solution space exceeds cap");
  std::vector<uint64_t> table(uint64_t(1) << yb);
  for (uint64_t py = 0; py < table.size(); ++py) {
    Solution z = red.h(u, unpack_solution(ys, py), {});
    if (!shape_fits(zs, z)) throw std::runtime_error("cx_check_circuit: h output off-shape");
    table[py] = pack_solution(zs, z);
  }
  return table_multicircuit(yb, shape_bits(zs), table);
}

ManyOneReduction cx_to_checkable(const CxReduction& red) {
  if (!red.tfnp_source)
    throw std::invalid_argument("cx_to_checkable: needs a single-round source problem");
  ManyOneReduction out;
  out.name = red.name + "__checkable";
  out.source = *red.tfnp_source;
  out.target = checkable(red.target);
  CxReduction cx = red;
  out.f = [cx](const Instance& u) {
    return checkable_instance(cx.target, cx.f(u), cx_check_circuit(cx, u));
  };
  out.g = [g = red.g](const Instance& u, const Solution& y) { return g(u, y); };
  return out;
}

CxReduction checkable_to_cx(const Tfs2Problem& r, const ManyOneReduction& red) {
  CxReduction out;
  out.name = red.name + "__cx";
  out.tfnp_source = red.source;
  out.target = r;
  out.f = red.f;
  out.g = red.g;
  out.h = [r, f = red.f](const Instance& u, const Solution& y, const Solution&) {
    Instance t = f(u);
    Shape ys = r.y_shape(t), zs = r.z_shape(t);
    if (!shape_fits(ys, y)) return zero_of_shape(zs);
    return unpack_solution(zs, t.func("chk")(pack_solution(ys, y)));
  };
  return out;
}

ManyOneReduction compose_checkable(const CxReduction& red) {
  if (!red.tfs2_source)
    throw std::invalid_argument("compose_checkable: needs a two-round source problem");
  Tfs2Problem q = *red.tfs2_source, r = red.target;
  ManyOneReduction out;
  out.name = red.name + "__checkable";
  out.source = checkable(q);
  out.target = checkable(r);
  CxReduction cx = red;
  out.f = [cx, q, r](const Instance& u) {
    Instance t = cx.f(u);
    Shape ysr = r.y_shape(t), zsr = r.z_shape(t);
    Shape ysq = q.y_shape(u), zsq = q.z_shape(u);
    unsigned yb = shape_bits(ysr);
    if (yb > 20) throw std::runtime_error("compose_checkable: solution space exceeds cap");
    const Func& c = u.func("chk");
    std::vector<uint64_t> table(uint64_t(1) << yb);
    for (uint64_t py = 0; py < table.size(); ++py) {
      Solution y = unpack_solution(ysr, py);
      Solution v = cx.g(u, y);
      Solution w = shape_fits(ysq, v) ? unpack_solution(zsq, c(pack_solution(ysq, v)))
                                      : zero_of_shape(zsq);
      Solution z = cx.h(u, y, w);
      if (!shape_fits(zsr, z)) throw std::runtime_error("compose_checkable: h output off-shape");
      table[py] = pack_solution(zsr, z);
    }
    return checkable_instance(r, t, table_multicircuit(yb, shape_bits(zsr), table));
  };
  out.g = [g = red.g](const Instance& u, const Solution& y) { return g(u, y); };
  return out;
}

// --- absorbing local-search post-processing --------------------------------

namespace {

struct AbsorbedView {
  const PnpMachine* g0;
  const PnpMachine* f;
  unsigned tg, tf, ns;
};

AbsorbedView absorbed_view(const Instance& inst,
                           const std::function<unsigned(const Instance&)>& search_bits) {
  AbsorbedView v;
  v.g0 = &pnp_machine(inst.tag("G0"));
  v.f = &pnp_machine(inst.tag("F"));
  v.tg = v.g0->queries(inst);
  v.tf = v.f->queries(inst);
  v.ns = search_bits(inst);
  return v;
}

}  // namespace

CxReduction pls_absorb(const PlsCxData& data) {
  static int counter = 0;
  std::string gname = "pls_absorbed_" + data.name + "_" + std::to_string(counter++);

  PnpMachine m;
  m.name = gname;
  auto sb = data.search_bits;
  auto set_inst = data.set_instance;
  m.in_bits = [](const Instance& inst) { return pnp_machine(inst.tag("G0")).in_bits(inst); };
  m.out_bits = [](const Instance& inst) { return pnp_machine(inst.tag("G0")).out_bits(inst); };
  m.queries = [sb](const Instance& inst) {
    AbsorbedView v = absorbed_view(inst, sb);
    return v.tg + v.tf + v.ns;
  };
  m.witness_bits = [sb](const Instance& inst) {
    AbsorbedView v = absorbed_view(inst, sb);
    return std::max({v.g0->witness_bits(inst), v.f->witness_bits(inst), v.ns});
  };
  m.query = [sb, set_inst](const Instance& inst, uint64_t x, const std::vector<Bit>& replies) {
    AbsorbedView v = absorbed_view(inst, sb);
    unsigned q = static_cast<unsigned>(replies.size());
    if (q < v.tg) return v.g0->query(inst, x, replies);
    std::vector<Bit> grep(replies.begin(), replies.begin() + v.tg);
    if (q < v.tg + v.tf) {
      uint64_t pigeon = v.g0->output(inst, x, grep);
      std::vector<Bit> frep(replies.begin() + v.tg, replies.end());
      return v.f->query(inst, pigeon, frep);
    }
    std::vector<Bit> sim(replies.begin(), replies.begin() + v.tg + v.tf);
    Instance setter = set_inst(inst, x, sim);
    if (setter.func("S").in_bits != v.ns)
      throw std::runtime_error("pls_absorb: set instance has the wrong width");
    std::vector<Bit> srep(replies.begin() + v.tg + v.tf, replies.end());
    return pnp_machine("binary_search_least").query(setter, 0, srep);
  };
  m.output = [sb](const Instance& inst, uint64_t x, const std::vector<Bit>& replies) {
    AbsorbedView v = absorbed_view(inst, sb);
    std::vector<Bit> grep(replies.begin(), replies.begin() + v.tg);
    return v.g0->output(inst, x, grep);
  };
  register_pnp_machine(m);

  auto make_target = [f0 = data.f, gname](const Instance& u) {
    Instance t = f0(u);
    t.tags["G0"] = t.tag("G");
    t.tags["G"] = gname;
    return t;
  };

  // Slices a claimed rwpp2 solution of the instrumented instance back into
  // the simulated G and F runs and the least-member result s.
  auto slice = [sb](const Instance& t, const Solution& y, PnpRun& grun, PnpRun& frun,
                    uint64_t& s) {
    AbsorbedView v = absorbed_view(t, sb);
    unsigned total = v.tg + v.tf + v.ns;
    const uint64_t* fields = y.data() + 1;  // y[0] is the hole
    grun.replies.assign(fields, fields + v.tg);
    grun.witnesses.assign(fields + total, fields + total + v.tg);
    grun.output = v.g0->output(t, y[0], grun.replies);
    frun.replies.assign(fields + v.tg, fields + v.tg + v.tf);
    frun.witnesses.assign(fields + total + v.tg, fields + total + v.tg + v.tf);
    frun.output = v.f->output(t, grun.output, frun.replies);
    s = 0;
    for (unsigned j = 0; j < v.ns; ++j) {
      Bit reply = static_cast<Bit>(fields[v.tg + v.tf + j]);
      s |= uint64_t(reply ? 0 : 1) << (v.ns - 1 - j);
    }
  };

  CxReduction red;
  red.name = "pls_absorb_" + data.name;
  red.tfnp_source = data.source;
  red.target = tfs2("rwpp2");
  red.f = make_target;
  red.g = [data, make_target, slice](const Instance& u, const Solution& y) {
    Solution fallback = zero_of_shape(data.source.sol_shape(u));
    try {
      Instance t = make_target(u);
      PnpRun grun, frun;
      uint64_t s = 0;
      slice(t, y, grun, frun, s);
      PlsExtract e = data.extract(u, y[0], grun, frun, s);
      if (e.is_solution) return e.solution;
    } catch (const std::exception&) {
    }
    return fallback;
  };
  red.h = [data, make_target, slice](const Instance& u, const Solution& y, const Solution&) {
    const Tfs2Problem& target = tfs2("rwpp2");
    Instance t = make_target(u);
    Solution fallback = zero_of_shape(target.z_shape(t));
    try {
      if (!shape_fits(target.y_shape(t), y)) return fallback;
      PnpRun grun, frun;
      uint64_t s = 0;
      slice(t, y, grun, frun, s);
      PlsExtract e = data.extract(u, y[0], grun, frun, s);
      if (!e.is_solution) {
        // The extraction refuted the embedded G-then-F simulation; the same
        // query index names the same NO reply inside the instrumented run.
        Solution z{0, e.bad_index, e.bad_witness};
        if (!target.rel(t, y, z)) return z;
      }
      // Otherwise scan both recorded runs for a reply falsely claimed NO.
      const PnpMachine& gp = pnp_machine(t.tag("G"));
      const PnpMachine& fp = pnp_machine(t.tag("F"));
      unsigned tgp = gp.queries(t), tfp = fp.queries(t);
      PnpRun gprun = pnp_run_from_fields(gp, t, y[0], y.data() + 1);
      PnpRun fprun = pnp_run_from_fields(fp, t, gprun.output, y.data() + 1 + 2 * tgp);
      uint64_t wcap = uint64_t(1) << std::max(gp.witness_bits(t), fp.witness_bits(t));
      for (unsigned idx = 0; idx < tgp; ++idx)
        for (uint64_t w = 0; w < wcap; ++w)
          if (check_pnp_counterexample(gp, t, y[0], gprun, idx, w)) return Solution{0, idx, w};
      for (unsigned idx = 0; idx < tfp; ++idx)
        for (uint64_t w = 0; w < wcap; ++w)
          if (check_pnp_counterexample(fp, t, gprun.output, fprun, idx, w))
            return Solution{1, idx, w};
    } catch (const std::exception&) {
    }
    return fallback;
  };
  return red;
}

}  // namespace owb
