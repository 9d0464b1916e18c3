#include "gapped1d/agsp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "gapped1d/oracle.hpp"

namespace gapped1d {

namespace {

// Dense operators are quadratic in the Hilbert dimension, so they get a
// tighter cap than dense vectors.
constexpr long long kDenseMatrixCap = 1024;

long long checked_dim(const LocalHamiltonian& h, const NumericsConfig& nm,
                      bool matrix) {
  long long dim = 1;
  for (int k = 0; k < h.n(); ++k) {
    dim *= h.d();
    if (dim > nm.dense_cap_dim)
      throw std::invalid_argument("agsp: dense cap exceeded");
  }
  if (matrix && dim > kDenseMatrixCap)
    throw std::invalid_argument("agsp: dense matrix cap exceeded");
  return dim;
}

double spectral_norm(const Matrix& m) {
  if (m.rows() <= 64) return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
  return Eigen::BDCSVD<Matrix>(m).singularValues()(0);
}

int occurrences(const SampledTerm& term, int idx) {
  int c = 0;
  for (int v : term.indices) c += (v == idx) ? 1 : 0;
  return c;
}

}  // namespace

double agsp_scale(const LocalHamiltonian& h, const AgspConfig& cfg) {
  if (cfg.scale_mode == AgspScaleMode::UnnormalizedScale) return 1.0;
  const double base = static_cast<double>(h.term_count());
  if (!(cfg.epsilon0 >= 0) || cfg.epsilon0 >= base)
    throw std::invalid_argument("agsp_scale: epsilon0 outside [0, N)");
  return 1.0 / (1.0 - cfg.epsilon0 / base);
}

AgspPlan choose_parameters(int n, int d, double epsilon, double q_target,
                           double epsilon0, double c_eps_override) {
  if (!(epsilon > 0))
    throw std::invalid_argument("choose_parameters: epsilon must be > 0");
  if (!(q_target >= 1))
    throw std::invalid_argument("choose_parameters: q_target must be >= 1");
  if (n < 2) throw std::invalid_argument("choose_parameters: n must be >= 2");
  AgspPlan plan;
  plan.c_eps = c_eps_override > 0 ? c_eps_override
                                  : (epsilon / 169.0) * (epsilon / 169.0);
  plan.m = static_cast<long long>(
      std::ceil((1.0 / epsilon) * n * std::log(q_target / plan.c_eps)));
  plan.m = std::max<long long>(plan.m, 1);
  const double base = static_cast<double>(n - 1);
  plan.scale = 1.0 / (1.0 - epsilon0 / base);
  const double log_dim = std::log(4.0) + n * std::log(static_cast<double>(d));
  plan.ell_exact = std::pow(plan.scale, 2.0 * static_cast<double>(plan.m)) *
                   q_target * q_target * log_dim;
  if (std::isfinite(plan.ell_exact) && plan.ell_exact < 1e18) {
    plan.ell = std::max<long long>(
        static_cast<long long>(std::ceil(plan.ell_exact)), 1);
  } else {
    plan.ell = static_cast<long long>(1e18);
    plan.ell_clamped = true;
  }
  return plan;
}

std::vector<SampledTerm> sample_terms(const LocalHamiltonian& h,
                                      const AgspConfig& cfg,
                                      SampleStats* stats) {
  if (cfg.m < 0) throw std::invalid_argument("sample_terms: m must be >= 0");
  if (cfg.ell < 1) throw std::invalid_argument("sample_terms: ell must be >= 1");
  const int k = h.term_count();
  std::mt19937_64 rng(cfg.seed);
  SampleStats local;
  std::vector<SampledTerm> out;
  out.reserve(static_cast<std::size_t>(cfg.ell));
  std::vector<int> counts(k);
  for (long long w = 0; w < cfg.ell; ++w) {
    SampledTerm term;
    bool violates = false;
    // Resampling only when more than one interaction exists; a two-site
    // chain has a single possible word.
    const bool can_resample = cfg.strict && cfg.kappa_cap > 0 && k > 1;
    for (int attempt = 0; attempt < 10000; ++attempt) {
      term.indices.assign(static_cast<std::size_t>(cfg.m), 0);
      std::fill(counts.begin(), counts.end(), 0);
      int max_occ = 0;
      for (int j = 0; j < cfg.m; ++j) {
        const int idx = static_cast<int>(uniform_index(rng, k));
        term.indices[static_cast<std::size_t>(j)] = idx;
        max_occ = std::max(max_occ, ++counts[idx]);
      }
      violates = cfg.kappa_cap > 0 && max_occ > cfg.kappa_cap;
      if (!violates || !can_resample) {
        local.max_occurrence = std::max(local.max_occurrence, max_occ);
        break;
      }
      ++local.resampled_words;
    }
    if (violates) ++local.violating_words;
    out.push_back(std::move(term));
  }
  if (stats) *stats = local;
  return out;
}

std::vector<SampledTerm> enumerate_all_terms(int term_count, int m) {
  if (term_count < 1)
    throw std::invalid_argument("enumerate_all_terms: empty alphabet");
  if (m < 0) throw std::invalid_argument("enumerate_all_terms: m < 0");
  double total = std::pow(static_cast<double>(term_count),
                          static_cast<double>(m));
  if (!(total <= 1e7))
    throw std::invalid_argument("enumerate_all_terms: too many words");
  std::vector<SampledTerm> out;
  out.reserve(static_cast<std::size_t>(total));
  SampledTerm cur;
  cur.indices.assign(static_cast<std::size_t>(m), 0);
  while (true) {
    out.push_back(cur);
    int pos = m - 1;
    while (pos >= 0 && cur.indices[static_cast<std::size_t>(pos)] ==
                           term_count - 1)
      cur.indices[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
    ++cur.indices[static_cast<std::size_t>(pos)];
  }
  return out;
}

Matrix exact_a(const LocalHamiltonian& h, int m, AgspScaleMode mode,
               double epsilon0, const NumericsConfig& nm) {
  const long long dim = checked_dim(h, nm, true);
  const double base = static_cast<double>(h.term_count());
  AgspConfig cfg;
  cfg.scale_mode = mode;
  cfg.epsilon0 = epsilon0;
  const double c = agsp_scale(h, cfg);
  Matrix hd = dense_hamiltonian(h, nm);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hd);
  RVector f(dim);
  for (long long i = 0; i < dim; ++i) {
    const double lam = std::max(0.0, 1.0 - eig.eigenvalues()(i) / base);
    f(i) = std::pow(c * lam, m);
  }
  return eig.eigenvectors() * f.asDiagonal() *
         eig.eigenvectors().adjoint();
}

Vector apply_a_dense(const LocalHamiltonian& h, int m, double factor_scale,
                     Vector psi) {
  const double base = static_cast<double>(h.term_count());
  for (int j = 0; j < m; ++j)
    psi = factor_scale * (psi - apply_hamiltonian_dense(h, psi) / base);
  return psi;
}

Vector apply_word_dense(const LocalHamiltonian& h, const SampledTerm& term,
                        double factor_scale, Vector psi, bool adjoint) {
  const int m = static_cast<int>(term.indices.size());
  const int n = h.n(), d = h.d();
  // The word product applies its last letter first; the adjoint reverses
  // the order (every P_t is Hermitian).
  for (int step = 0; step < m; ++step) {
    const int j = adjoint ? step : m - 1 - step;
    const int t = term.indices[static_cast<std::size_t>(j)];
    psi = factor_scale *
          (psi - apply_two_site_dense(psi, n, d, t, h.term(t)));
  }
  return psi;
}

Matrix dense_word(const LocalHamiltonian& h, const SampledTerm& term,
                  double factor_scale, const NumericsConfig& nm) {
  const long long dim = checked_dim(h, nm, true);
  Matrix out(dim, dim);
  for (long long x = 0; x < dim; ++x) {
    Vector e = Vector::Zero(dim);
    e(x) = cxd(1, 0);
    out.col(x) = apply_word_dense(h, term, factor_scale, std::move(e));
  }
  return out;
}

Matrix dense_sampled_k(const LocalHamiltonian& h,
                       const std::vector<SampledTerm>& terms,
                       double factor_scale, const NumericsConfig& nm) {
  const long long dim = checked_dim(h, nm, true);
  if (terms.empty())
    throw std::invalid_argument("dense_sampled_k: no sampled terms");
  Matrix out = Matrix::Zero(dim, dim);
  for (const SampledTerm& term : terms) {
    for (long long x = 0; x < dim; ++x) {
      Vector e = Vector::Zero(dim);
      e(x) = cxd(1, 0);
      out.col(x) += apply_word_dense(h, term, factor_scale, std::move(e));
    }
  }
  out /= static_cast<double>(terms.size());
  return out;
}

KvsAReport verify_k_vs_a(const LocalHamiltonian& h,
                         const std::vector<SampledTerm>& terms, int m,
                         AgspScaleMode mode, double epsilon0,
                         const NumericsConfig& nm) {
  AgspConfig cfg;
  cfg.scale_mode = mode;
  cfg.epsilon0 = epsilon0;
  const double c = agsp_scale(h, cfg);
  Matrix a = exact_a(h, m, mode, epsilon0, nm);
  Matrix k = dense_sampled_k(h, terms, c, nm);
  KvsAReport rep;
  rep.op_norm_error = spectral_norm(k - a);
  ExactEigs eig = exact_eigs(h, 2, nm);
  if (eig.vectors.cols() > 1) {
    const Vector v1 = eig.vectors.col(1);
    rep.shrinkage_measured = std::real(v1.dot(a * v1));
    const double base = static_cast<double>(h.term_count());
    rep.shrinkage_bound =
        std::pow(c * std::max(0.0, 1.0 - eig.values(1) / base), m);
  }
  rep.exact_norm = true;
  return rep;
}

double estimate_k_minus_a(const LocalHamiltonian& h,
                          const std::vector<SampledTerm>& terms, int m,
                          double factor_scale, std::uint64_t seed, int iters,
                          const NumericsConfig& nm) {
  const long long dim = checked_dim(h, nm, false);
  if (terms.empty()) return 0.0;
  std::mt19937_64 rng(seed);
  Vector x(dim);
  for (long long i = 0; i < dim; ++i)
    x(i) = cxd(normal_double(rng), normal_double(rng));
  x.normalize();
  const double inv_ell = 1.0 / static_cast<double>(terms.size());
  auto apply_m = [&](const Vector& v, bool adjoint) {
    Vector acc = Vector::Zero(dim);
    for (const SampledTerm& term : terms)
      acc += apply_word_dense(h, term, factor_scale, v, adjoint);
    acc *= inv_ell;
    acc -= apply_a_dense(h, m, factor_scale, v);
    return acc;
  };
  double est = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vector y = apply_m(x, false);
    Vector z = apply_m(y, true);
    const double nz = z.norm();
    if (nz < 1e-300) return 0.0;
    est = std::sqrt(nz);
    x = z / nz;
  }
  return est;
}

// ---------------------------------------------------------------------
// cut decomposition
// ---------------------------------------------------------------------

CutDecomposition decompose_across_cut(const std::vector<SampledTerm>& terms,
                                      const LocalHamiltonian& h, int cut,
                                      double factor_scale,
                                      long long branch_cap,
                                      const NumericsConfig& nm) {
  const int n = h.n(), d = h.d();
  if (cut < 1 || cut > n)
    throw std::invalid_argument("decompose_across_cut: invalid cut");
  CutDecomposition dec;
  dec.cut = cut;
  dec.factor_scale = factor_scale;
  if (terms.empty()) return dec;
  dec.m = static_cast<int>(terms.front().indices.size());
  for (const SampledTerm& term : terms)
    if (static_cast<int>(term.indices.size()) != dec.m)
      throw std::invalid_argument("decompose_across_cut: ragged word lengths");

  const Matrix id2 = Matrix::Identity(d * d, d * d);
  std::vector<Matrix> p_gates(static_cast<std::size_t>(h.term_count()));
  for (int t = 0; t < h.term_count(); ++t)
    p_gates[static_cast<std::size_t>(t)] = id2 - h.term(t);

  const int boundary = cut - 1;  // interaction crossing the cut, if any
  std::vector<std::pair<Matrix, Matrix>> split;
  if (boundary <= n - 2)
    split = operator_schmidt_split(
        p_gates[static_cast<std::size_t>(boundary)], d, d, nm);
  const int rank = static_cast<int>(split.size());

  double predicted = 0.0;
  for (const SampledTerm& term : terms)
    predicted += std::pow(static_cast<double>(std::max(rank, 1)),
                          static_cast<double>(occurrences(term, boundary)));
  if (!(predicted <= static_cast<double>(branch_cap))) {
    std::ostringstream msg;
    msg << "decompose_across_cut: " << predicted
        << " branches exceed cap " << branch_cap
        << " (boundary occurrences grow the count by up to d^2 each)";
    throw std::invalid_argument(msg.str());
  }

  const double weight =
      std::pow(factor_scale, dec.m) / static_cast<double>(terms.size());
  for (std::size_t iw = 0; iw < terms.size(); ++iw) {
    const SampledTerm& term = terms[iw];
    const int occ = occurrences(term, boundary);
    long long combos = 1;
    for (int j = 0; j < occ; ++j) combos *= rank;
    std::vector<int> digits(static_cast<std::size_t>(std::max(occ, 1)), 0);
    for (long long combo = 0; combo < std::max<long long>(combos, 1);
         ++combo) {
      long long rem = combo;
      for (int j = 0; j < occ; ++j) {
        digits[static_cast<std::size_t>(j)] = static_cast<int>(rem % rank);
        rem /= rank;
      }
      ExpandedBranch br;
      br.weight = weight;
      br.word = static_cast<long long>(iw);
      br.factors.reserve(term.indices.size() + occ);
      int occ_seen = 0;
      for (int step = dec.m - 1; step >= 0; --step) {
        const int t = term.indices[static_cast<std::size_t>(step)];
        if (t < boundary) {
          br.factors.push_back(
              {t, true, true, p_gates[static_cast<std::size_t>(t)]});
        } else if (t == boundary) {
          const auto& ef =
              split[static_cast<std::size_t>(
                  digits[static_cast<std::size_t>(occ_seen++)])];
          br.factors.push_back({boundary, false, true, ef.first});
          br.factors.push_back({cut, false, false, ef.second});
        } else {
          br.factors.push_back(
              {t, true, false, p_gates[static_cast<std::size_t>(t)]});
        }
      }
      dec.branches.push_back(std::move(br));
    }
  }
  return dec;
}

MpsState apply_branch_left(const MpsState& s, const ExpandedBranch& b,
                           const NumericsConfig& nm, double compress_tol) {
  MpsState out = s;
  for (const BranchFactor& f : b.factors) {
    if (!f.left_side) continue;
    if (f.two_site) {
      if (f.site < 0 || f.site > s.n() - 2)
        throw std::invalid_argument("apply_branch_left: site-range mismatch");
      out = apply_two_site_op(out, f.site, f.op, nm, compress_tol);
    } else {
      if (f.site < 0 || f.site > s.n() - 1)
        throw std::invalid_argument("apply_branch_left: site-range mismatch");
      out = apply_one_site_op(out, f.site, f.op);
    }
  }
  out.scale(cxd(b.weight, 0));
  return out;
}

std::vector<MpsState> apply_left_parts(const CutDecomposition& dec,
                                       const std::vector<MpsState>& vectors,
                                       const NumericsConfig& nm,
                                       double compress_tol,
                                       long long* dropped) {
  for (const MpsState& v : vectors)
    if (v.n() != dec.cut)
      throw std::invalid_argument("apply_left_parts: site-range mismatch");
  const long long total =
      static_cast<long long>(dec.branches.size()) *
      static_cast<long long>(vectors.size());
  std::vector<MpsState> slots(static_cast<std::size_t>(total));
  parallel_for(total, [&](long long idx) {
    const std::size_t ib = static_cast<std::size_t>(
        idx / static_cast<long long>(vectors.size()));
    const std::size_t iv = static_cast<std::size_t>(
        idx % static_cast<long long>(vectors.size()));
    slots[static_cast<std::size_t>(idx)] = apply_branch_left(
        vectors[iv], dec.branches[ib], nm, compress_tol);
  });
  std::vector<MpsState> out;
  out.reserve(slots.size());
  long long removed = 0;
  for (MpsState& s : slots) {
    if (norm(s) < 1e-12) {
      ++removed;
      continue;
    }
    out.push_back(std::move(s));
  }
  if (dropped) *dropped = removed;
  return out;
}

namespace {

Vector apply_one_site_dense(const Vector& psi, int n, int d, int site,
                            const Matrix& op) {
  long long left = 1, right = 1;
  for (int k = 0; k < site; ++k) left *= d;
  for (int k = site + 1; k < n; ++k) right *= d;
  Vector out = Vector::Zero(psi.size());
  for (long long l = 0; l < left; ++l)
    for (int p_out = 0; p_out < d; ++p_out)
      for (int p_in = 0; p_in < d; ++p_in) {
        const cxd g = op(p_out, p_in);
        if (g == cxd(0, 0)) continue;
        out.segment((l * d + p_out) * right, right) +=
            g * psi.segment((l * d + p_in) * right, right);
      }
  return out;
}

}  // namespace

Matrix dense_branch(const ExpandedBranch& b, int n, int d,
                    const NumericsConfig& nm) {
  long long dim = 1;
  for (int k = 0; k < n; ++k) {
    dim *= d;
    if (dim > nm.dense_cap_dim)
      throw std::invalid_argument("dense_branch: dense cap exceeded");
  }
  if (dim > kDenseMatrixCap)
    throw std::invalid_argument("dense_branch: dense matrix cap exceeded");
  Matrix out(dim, dim);
  for (long long x = 0; x < dim; ++x) {
    Vector v = Vector::Zero(dim);
    v(x) = cxd(1, 0);
    for (const BranchFactor& f : b.factors) {
      if (f.two_site)
        v = apply_two_site_dense(v, n, d, f.site, f.op);
      else
        v = apply_one_site_dense(v, n, d, f.site, f.op);
    }
    out.col(x) = v;
  }
  return out * b.weight;
}

}  // namespace gapped1d
