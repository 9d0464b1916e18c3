#include "gapped1d/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "gapped1d/boundary.hpp"
#include "gapped1d/sdp.hpp"

namespace gapped1d {

namespace {

// Effective boundary bond: the configured budget capped by the true
// Schmidt bound at this cut.
int effective_bond(int B, int d, int cut, int n) {
  const int half = std::min(cut, n - cut);
  long long cap = 1;
  for (int k = 0; k < half; ++k) {
    cap *= d;
    if (cap >= B) return B;
  }
  return static_cast<int>(std::min<long long>(B, cap));
}

bool near_duplicate(const MpsState& candidate,
                    const std::vector<MpsState>& kept, double overlap_cap) {
  for (const MpsState& k : kept)
    if (std::abs(inner(k, candidate)) > overlap_cap) return true;
  return false;
}

// Keeps transient bond growth within the configured envelope.
MpsState enforce_bond_envelope(const MpsState& s, int bond_cap,
                               const NumericsConfig& nm) {
  if (s.max_bond() <= bond_cap) return s;
  MpsState t = trim_all(s, bond_cap, nm);
  const double nr = norm(t);
  if (nr < nm.drop_norm)
    throw std::runtime_error("bond envelope trim annihilated a state");
  t.scale(cxd(1.0 / nr, 0.0));
  return t;
}

}  // namespace

ViableSet extend(const ViableSet& s, int d) {
  ViableSet out;
  out.cut = s.cut + 1;
  if (s.vectors.empty()) {
    if (s.cut != 0)
      throw std::invalid_argument("extend: empty set must sit at cut 0");
    for (int p = 0; p < d; ++p)
      out.vectors.push_back(MpsState::product_basis_state(1, d, {p}));
    return out;
  }
  for (const MpsState& v : s.vectors) {
    for (int p = 0; p < d; ++p) {
      std::vector<SiteTensor> sites;
      sites.reserve(v.n() + 1);
      for (int k = 0; k < v.n(); ++k) sites.push_back(v.site(k));
      SiteTensor sel = SiteTensor::zero(1, d, 1);
      sel.blocks[p](0, 0) = cxd(1.0, 0.0);
      sites.push_back(std::move(sel));
      out.vectors.emplace_back(std::move(sites), d);
    }
  }
  return out;
}

CardinalityOutcome cardinality_reduce(const ViableSet& s1,
                                      const LocalHamiltonian& h,
                                      const RunConfig& cfg,
                                      std::uint64_t net_seed) {
  const NumericsConfig& nm = cfg.numerics;
  const int i = s1.cut;
  const int n = h.n();
  const int d = h.d();
  if (i < 1 || i > n)
    throw std::invalid_argument("cardinality_reduce: cut out of range");
  if (s1.vectors.empty())
    throw IterationAbort(i, "size trimming received an empty family");

  const SpanBasis basis = orthonormalize(s1.vectors, nm.gram_threshold, nm);
  if (basis.rank == 0)
    throw IterationAbort(i, "size trimming found a degenerate span");

  const int B_eff = effective_bond(cfg.net.B, d, i, n);
  NetSpec ns;
  ns.B = B_eff;
  ns.d = d;
  ns.eta = cfg.net.eta;
  ns.mode = net_mode_from_string(cfg.net.mode);
  ns.sample_count = cfg.net.count;
  ns.seed = net_seed;
  ns.full_grid_cap = cfg.net.cap;
  const std::vector<Matrix> net = build_net(ns);

  const SdpProblem base = assemble(basis, h, i, B_eff, net[0], cfg.radius, nm);

  struct Cand {
    bool feasible = false;
    double objective = 0.0;
    std::vector<MpsState> comps;
  };
  std::vector<Cand> cands(net.size());
  parallel_for(static_cast<long long>(net.size()), [&](long long x) {
    SdpProblem p = base;
    p.target = net[static_cast<std::size_t>(x)];
    const SdpSolution sol = solve(p, cfg.solver);
    Cand& c = cands[static_cast<std::size_t>(x)];
    if (sol.status == SdpStatus::Infeasible ||
        sol.feasibility_residual > cfg.solver.feas_tol)
      return;
    c.feasible = true;
    c.objective = sol.objective_value;
    const LeadingComponents lc = leading_components(sol, basis, B_eff, nm);
    for (const MpsState& u : lc.components) {
      const double nr = norm(u);
      if (nr < nm.drop_norm) continue;
      MpsState w = u;
      w.scale(cxd(1.0 / nr, 0.0));
      c.comps.push_back(std::move(w));
    }
  });

  CardinalityOutcome out;
  out.tried = static_cast<int>(net.size());
  std::vector<std::size_t> order;
  for (std::size_t x = 0; x < cands.size(); ++x)
    if (cands[x].feasible) order.push_back(x);
  out.feasible = static_cast<int>(order.size());
  if (order.empty())
    throw IterationAbort(
        i, "size trimming found no feasible net element (net too coarse or "
           "radius too tight)");
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return cands[a].objective < cands[b].objective;
                   });

  std::vector<MpsState> kept;
  const std::size_t cap = static_cast<std::size_t>(cfg.caps.s_cap);
  for (std::size_t x : order) {
    for (const MpsState& c : cands[x].comps) {
      if (kept.size() >= cap) break;
      if (near_duplicate(c, kept, nm.dedupe_overlap)) continue;
      kept.push_back(c);
    }
    if (kept.size() >= cap) break;
  }
  // Unused budget goes to the inputs so the span cannot shrink merely
  // because the feasible optima cluster.
  for (const MpsState& v : s1.vectors) {
    if (kept.size() >= cap) break;
    if (near_duplicate(v, kept, nm.dedupe_overlap)) continue;
    kept.push_back(v);
  }
  out.set.cut = i;
  out.set.vectors = std::move(kept);
  return out;
}

ViableSet bond_trim_step(const ViableSet& s2, int b_cap,
                         const NumericsConfig& nm, long long* dropped) {
  ViableSet out;
  out.cut = s2.cut;
  long long removed = 0;
  for (const MpsState& v : s2.vectors) {
    MpsState t = trim_all(v, b_cap, nm);
    const double nr = norm(t);
    if (nr < nm.drop_norm) {
      ++removed;
      continue;
    }
    t.scale(cxd(1.0 / nr, 0.0));
    out.vectors.push_back(std::move(t));
  }
  if (dropped) *dropped = removed;
  if (out.vectors.empty())
    throw IterationAbort(s2.cut, "bond trimming annihilated the family");
  return out;
}

ErrorReduceOutcome error_reduce(const ViableSet& s3,
                                const LocalHamiltonian& h,
                                const RunConfig& cfg, std::uint64_t agsp_seed,
                                bool final_iter, double epsilon0_known) {
  const NumericsConfig& nm = cfg.numerics;
  const int i = s3.cut;
  const int n = h.n();
  const int d = h.d();
  if (s3.vectors.empty())
    throw IterationAbort(i, "error reduction received an empty family");

  AgspConfig acfg;
  acfg.m = final_iter ? cfg.agsp.final_m : cfg.agsp.m;
  acfg.ell = final_iter ? cfg.agsp.final_ell : cfg.agsp.ell;
  acfg.kappa_cap = cfg.agsp.kappa_cap;
  acfg.seed = agsp_seed;
  acfg.scale_mode = scale_mode_from_string(cfg.agsp.scale_mode);
  acfg.strict = cfg.agsp.strict;
  acfg.epsilon0 = epsilon0_known;

  ErrorReduceOutcome out;
  const std::vector<SampledTerm> terms = sample_terms(h, acfg, &out.stats);
  const double scale = agsp_scale(h, acfg);
  const CutDecomposition dec =
      decompose_across_cut(terms, h, i, scale, cfg.agsp.branch_cap, nm);

  const long long V = static_cast<long long>(s3.vectors.size());
  const long long total = static_cast<long long>(dec.branches.size()) * V;
  const double floor_norm = 1e-250;  // representability, not significance

  // First pass scores every (branch, vector) slot without retaining the
  // states; winners are recomputed below so peak memory stays flat even
  // when the decomposition fans out.
  std::vector<double> slot_norm(static_cast<std::size_t>(total), 0.0);
  parallel_for(total, [&](long long idx) {
    const std::size_t ib = static_cast<std::size_t>(idx / V);
    const std::size_t iv = static_cast<std::size_t>(idx % V);
    slot_norm[static_cast<std::size_t>(idx)] = norm(apply_branch_left(
        s3.vectors[iv], dec.branches[ib], nm, cfg.compress_tol));
  });

  // Candidates ranked by pre-normalization weight; at the closing cut the
  // branch sums come first so equal weights favor them.
  struct Cand {
    double weight = 0.0;
    long long slot = -1;  // negative marks an entry of sums
    int sum_index = -1;
  };
  std::vector<Cand> cands;
  std::vector<MpsState> sums;
  if (final_iter && i == n) {
    std::vector<MpsState> sum_state(static_cast<std::size_t>(V));
    std::vector<double> sum_norm(static_cast<std::size_t>(V), 0.0);
    parallel_for(V, [&](long long iv) {
      MpsState acc;
      bool has = false;
      for (std::size_t ib = 0; ib < dec.branches.size(); ++ib) {
        const std::size_t idx = ib * static_cast<std::size_t>(V) +
                                static_cast<std::size_t>(iv);
        if (!std::isfinite(slot_norm[idx]) || slot_norm[idx] <= floor_norm)
          continue;
        MpsState o = apply_branch_left(s3.vectors[static_cast<std::size_t>(iv)],
                                       dec.branches[ib], nm, cfg.compress_tol);
        if (!has) {
          acc = std::move(o);
          has = true;
        } else {
          acc = linear_combination({acc, o}, {cxd(1, 0), cxd(1, 0)}, nm,
                                   cfg.compress_tol);
        }
      }
      if (!has) return;
      const double nr = norm(acc);
      if (!std::isfinite(nr) || nr <= floor_norm) return;
      acc.scale(cxd(1.0 / nr, 0.0));
      sum_norm[static_cast<std::size_t>(iv)] = nr;
      sum_state[static_cast<std::size_t>(iv)] = std::move(acc);
    });
    for (long long iv = 0; iv < V; ++iv) {
      if (sum_norm[static_cast<std::size_t>(iv)] <= floor_norm) continue;
      Cand c;
      c.weight = sum_norm[static_cast<std::size_t>(iv)];
      c.sum_index = static_cast<int>(sums.size());
      cands.push_back(c);
      sums.push_back(std::move(sum_state[static_cast<std::size_t>(iv)]));
    }
  }
  for (long long idx = 0; idx < total; ++idx) {
    const double nr = slot_norm[static_cast<std::size_t>(idx)];
    if (!std::isfinite(nr) || nr <= floor_norm) {
      ++out.dropped_outputs;
      continue;
    }
    Cand c;
    c.weight = nr;
    c.slot = idx;
    cands.push_back(c);
  }
  if (cands.empty())
    throw IterationAbort(i, "error reduction annihilated every output");

  std::vector<std::size_t> order(cands.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return cands[a].weight > cands[b].weight;
                   });

  const std::size_t cap = static_cast<std::size_t>(cfg.caps.growth_cap) *
                          static_cast<std::size_t>(cfg.caps.s_cap);
  const int bond_cap = cfg.caps.growth_cap * cfg.caps.b_cap;
  std::vector<MpsState> kept;
  for (std::size_t x : order) {
    if (kept.size() >= cap) break;
    MpsState v;
    if (cands[x].slot < 0) {
      v = sums[static_cast<std::size_t>(cands[x].sum_index)];
    } else {
      const std::size_t ib =
          static_cast<std::size_t>(cands[x].slot / V);
      const std::size_t iv =
          static_cast<std::size_t>(cands[x].slot % V);
      v = apply_branch_left(s3.vectors[iv], dec.branches[ib], nm,
                            cfg.compress_tol);
      v.scale(cxd(1.0 / cands[x].weight, 0.0));
    }
    try {
      v = enforce_bond_envelope(v, bond_cap, nm);
    } catch (const std::runtime_error&) {
      ++out.dropped_outputs;
      continue;
    }
    if (near_duplicate(v, kept, nm.dedupe_overlap)) continue;
    kept.push_back(std::move(v));
  }
  if (kept.empty())
    throw IterationAbort(i, "error reduction annihilated every output");
  out.set.cut = i;
  out.set.vectors = std::move(kept);

  if (cfg.measure_k) {
    long long dim = 1;
    bool fits_cap = true;
    for (int k = 0; k < n; ++k) {
      dim *= d;
      if (dim > nm.dense_cap_dim) {
        fits_cap = false;
        break;
      }
    }
    if (fits_cap && dim <= 64) {
      const KvsAReport rep =
          verify_k_vs_a(h, terms, acfg.m, acfg.scale_mode, epsilon0_known, nm);
      out.k_error = rep.op_norm_error;
      out.k_exact = true;
    } else if (fits_cap) {
      out.k_error = estimate_k_minus_a(
          h, terms, acfg.m, scale,
          derive_seed(agsp_seed, seed_purpose::agsp, 1 << 20), 12, nm);
      out.k_exact = false;
    }
  }
  return out;
}

FinalExtract final_extract(const ViableSet& sn, const LocalHamiltonian& h,
                           const RunConfig& cfg) {
  if (sn.cut != h.n())
    throw std::invalid_argument("final_extract: set must cover the chain");
  if (sn.vectors.empty())
    throw std::invalid_argument("final_extract: empty family");
  const NumericsConfig& nm = cfg.numerics;
  const SpanBasis basis = orthonormalize(sn.vectors, nm.gram_threshold, nm);
  const SdpProblem p =
      assemble(basis, h, h.n(), 1, Matrix(), infinite_radius(), nm);
  const SdpSolution sol = solve(p, cfg.solver);
  const LeadingComponents lc = leading_components(sol, basis, 1, nm);
  if (lc.components.empty())
    throw std::runtime_error("final_extract: no usable component");
  FinalExtract out;
  out.state = normalized(lc.components[0], nm);
  out.energy = sol.objective_value;
  return out;
}

double span_fidelity(const ViableSet& s, const Vector& ground, int d,
                     const NumericsConfig& nm) {
  if (s.vectors.empty()) return 0.0;
  long long dl = 1;
  for (int k = 0; k < s.cut; ++k) {
    dl *= d;
    if (dl > nm.dense_cap_dim)
      throw std::invalid_argument("span_fidelity: left half too large");
  }
  if (ground.size() % dl != 0)
    throw std::invalid_argument("span_fidelity: dimension mismatch");
  const long long dr = ground.size() / dl;

  Matrix a(dl, static_cast<Eigen::Index>(s.vectors.size()));
  for (std::size_t k = 0; k < s.vectors.size(); ++k)
    a.col(static_cast<Eigen::Index>(k)) = s.vectors[k].to_dense(nm);
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  if (rank == 0) return 0.0;
  const Matrix q = qr.householderQ() * Matrix::Identity(dl, rank);

  Matrix m(dl, dr);
  for (long long x = 0; x < dl; ++x)
    for (long long y = 0; y < dr; ++y) m(x, y) = ground(x * dr + y);
  return (q.adjoint() * m).norm();
}

RunResult run(const RunConfig& cfg) {
  validate_config(cfg);
  const NumericsConfig& nm = cfg.numerics;
  const LocalHamiltonian h = LocalHamiltonian::build(cfg.model).normalized();
  const int n = h.n();
  const int d = h.d();

  RunResult res;
  RunReport& rep = res.report;
  rep.effective_config = cfg.to_json();
  rep.model_name = cfg.model.name();
  rep.oracle = cfg.oracle;

  double eps0 = 0.0;
  double gap = cfg.epsilon;
  ExactSolution sol;
  bool have_oracle = false;
  if (cfg.oracle) {
    long long dim = 1;
    for (int k = 0; k < n; ++k) {
      dim *= d;
      if (dim > nm.dense_cap_dim)
        throw ConfigError(
            "oracle mode needs the dense dimension within "
            "numerics.dense_cap_dim");
    }
    sol = solve_exact(h, nm);
    have_oracle = true;
    rep.epsilon0 = sol.epsilon0;
    rep.epsilon1 = sol.epsilon1;
    rep.degenerate_gap = sol.degenerate;
    eps0 = sol.epsilon0;
    if (gap <= 0.0) gap = sol.epsilon1 - sol.epsilon0;
  }
  rep.theory = theory_block(cfg, gap, cfg.theory_mode);

  ViableSet cur;
  for (int i = 1; i <= n; ++i) {
    IterationReport ir;
    ir.i = i;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    for (int attempt = 0; attempt <= 1 && !ok; ++attempt) {
      const std::uint64_t root =
          attempt == 0 ? cfg.seed
                       : derive_seed(cfg.seed, seed_purpose::retry, i);
      const std::uint64_t net_seed = derive_seed(root, seed_purpose::net, i);
      const std::uint64_t agsp_seed = derive_seed(root, seed_purpose::agsp, i);
      ir.retries = attempt;
      try {
        const ViableSet s1 = extend(cur, d);
        ir.size_extend = static_cast<int>(s1.vectors.size());
        ir.bond_extend = s1.vectors.empty() ? 0 : s1.vectors[0].max_bond();
        for (const MpsState& v : s1.vectors)
          ir.bond_extend = std::max(ir.bond_extend, v.max_bond());

        const CardinalityOutcome co = cardinality_reduce(s1, h, cfg, net_seed);
        ir.net_tried = co.tried;
        ir.net_feasible = co.feasible;
        ir.size_cardinality = static_cast<int>(co.set.vectors.size());
        ir.bond_cardinality = 0;
        for (const MpsState& v : co.set.vectors)
          ir.bond_cardinality = std::max(ir.bond_cardinality, v.max_bond());

        long long trimmed = 0;
        const ViableSet s3 =
            bond_trim_step(co.set, cfg.caps.b_cap, nm, &trimmed);
        ir.size_bond = static_cast<int>(s3.vectors.size());
        ir.bond_bond = 0;
        for (const MpsState& v : s3.vectors)
          ir.bond_bond = std::max(ir.bond_bond, v.max_bond());

        const ErrorReduceOutcome eo =
            error_reduce(s3, h, cfg, agsp_seed, i == n, eps0);
        ir.size_error = static_cast<int>(eo.set.vectors.size());
        ir.bond_error = 0;
        for (const MpsState& v : eo.set.vectors)
          ir.bond_error = std::max(ir.bond_error, v.max_bond());
        ir.dropped_outputs = trimmed + eo.dropped_outputs;
        ir.sample_violations = eo.stats.violating_words;
        ir.sample_max_occurrence = eo.stats.max_occurrence;
        ir.k_error = eo.k_error;
        ir.k_error_exact = eo.k_exact;

        cur = eo.set;
        ok = true;
      } catch (const IterationAbort& e) {
        if (attempt == 1) {
          ir.seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
          rep.iterations.push_back(ir);
          rep.exit_code = 2;
          rep.aborted_iteration = i;
          rep.diagnostic = e.what();
          res.energy = 0.0;
          res.model_energy = 0.0;
          return res;
        }
      }
    }
    if (have_oracle)
      ir.witness_fidelity = span_fidelity(cur, sol.ground, d, nm);
    ir.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    rep.iterations.push_back(ir);
  }

  const FinalExtract fx = final_extract(cur, h, cfg);
  res.state = fx.state;
  res.energy = fx.energy;
  res.model_energy = h.model_energy(expectation_terms(fx.state, h));
  rep.final_energy = fx.energy;
  rep.final_model_energy = res.model_energy;
  rep.final_bond = fx.state.max_bond();
  rep.final_span = static_cast<int>(cur.vectors.size());
  if (have_oracle) rep.final_fidelity = fidelity(fx.state, sol, nm);
  rep.exit_code = 0;
  return res;
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json j;
  j["schema"] = "viable-set-run/1";
  j["model"] = model_name;
  j["effective_config"] = effective_config;
  j["oracle"] = oracle;
  if (oracle) {
    j["epsilon0"] = epsilon0;
    j["epsilon1"] = epsilon1;
    j["degenerate_gap"] = degenerate_gap;
  }
  nlohmann::json its = nlohmann::json::array();
  for (const IterationReport& ir : iterations) {
    nlohmann::json r;
    r["i"] = ir.i;
    r["retries"] = ir.retries;
    r["sizes"] = {{"extend", ir.size_extend},
                  {"cardinality", ir.size_cardinality},
                  {"bond", ir.size_bond},
                  {"error", ir.size_error}};
    r["bonds"] = {{"extend", ir.bond_extend},
                  {"cardinality", ir.bond_cardinality},
                  {"bond", ir.bond_bond},
                  {"error", ir.bond_error}};
    r["net"] = {{"tried", ir.net_tried}, {"feasible", ir.net_feasible}};
    r["sample"] = {{"violations", ir.sample_violations},
                   {"max_occurrence", ir.sample_max_occurrence}};
    r["dropped_outputs"] = ir.dropped_outputs;
    if (ir.k_error >= 0.0) {
      r["k_error"] = ir.k_error;
      r["k_error_exact"] = ir.k_error_exact;
    }
    if (ir.witness_fidelity >= 0.0)
      r["witness_fidelity"] = ir.witness_fidelity;
    its.push_back(std::move(r));
  }
  j["iterations"] = its;
  nlohmann::json fin;
  fin["energy"] = final_energy;
  fin["model_energy"] = final_model_energy;
  if (final_fidelity >= 0.0) fin["fidelity"] = final_fidelity;
  fin["bond"] = final_bond;
  fin["span"] = final_span;
  j["final"] = fin;
  j["status"] = {{"exit_code", exit_code},
                 {"aborted_iteration", aborted_iteration},
                 {"diagnostic", diagnostic}};
  j["artifact"] = artifact;
  j["theory"] = theory;
  return j;
}

std::string RunReport::summary_text() const {
  std::ostringstream os;
  os << "viable-set sweep: " << model_name << "\n";
  if (oracle) {
    os << std::setprecision(12) << "exact: epsilon0 " << epsilon0
       << ", epsilon1 " << epsilon1;
    if (degenerate_gap) os << " (degenerate gap)";
    os << "\n";
  }
  os << "\n  it  step               |S|  bond  notes\n";
  double total = 0.0;
  for (const IterationReport& ir : iterations) {
    total += ir.seconds;
    std::ostringstream notes1, notes4;
    notes1 << "net " << ir.net_feasible << "/" << ir.net_tried << " feasible";
    if (ir.retries > 0) notes1 << ", retried";
    if (ir.k_error >= 0.0)
      notes4 << "k_err " << std::scientific << std::setprecision(2)
             << ir.k_error << (ir.k_error_exact ? " exact" : " est");
    if (ir.witness_fidelity >= 0.0)
      notes4 << (notes4.str().empty() ? "" : ", ") << "fidelity "
             << std::fixed << std::setprecision(6) << ir.witness_fidelity;
    struct Row {
      const char* name;
      int size;
      int bond;
      std::string notes;
    };
    const Row rows[] = {
        {"extension", ir.size_extend, ir.bond_extend, notes1.str()},
        {"size trimming", ir.size_cardinality, ir.bond_cardinality, ""},
        {"bond trimming", ir.size_bond, ir.bond_bond, ""},
        {"error reduction", ir.size_error, ir.bond_error, notes4.str()},
    };
    for (std::size_t r = 0; r < 4; ++r) {
      os << std::setw(4) << (r == 0 ? std::to_string(ir.i) : "") << "  "
         << std::left << std::setw(17) << rows[r].name << std::right
         << std::setw(5) << rows[r].size << std::setw(6) << rows[r].bond
         << "  " << rows[r].notes;
      if (r == 3)
        os << (rows[r].notes.empty() ? "" : "  ") << "(" << std::fixed
           << std::setprecision(1) << ir.seconds << "s)";
      os << "\n";
    }
  }
  os << "\n";
  if (exit_code == 0) {
    os << std::setprecision(12) << "final: energy " << final_energy
       << " (normalized), " << final_model_energy << " (model)";
    if (final_fidelity >= 0.0)
      os << ", fidelity " << std::setprecision(6) << final_fidelity;
    os << ", bond " << final_bond << ", span " << final_span << "\n";
    os << "status: ok\n";
  } else {
    os << "status: aborted at iteration " << aborted_iteration << " ("
       << diagnostic << ")\n";
  }
  os << "total: " << std::fixed << std::setprecision(1) << total << " s\n";
  return os.str();
}

}  // namespace gapped1d
