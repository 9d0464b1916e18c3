#include "gapped1d/checks.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>

#include "gapped1d/boundary.hpp"
#include "gapped1d/hamiltonian.hpp"
#include "gapped1d/mps.hpp"
#include "gapped1d/oracle.hpp"

namespace gapped1d {

namespace {

constexpr double kTol = 1e-9;

struct Instance {
  LocalHamiltonian h;
  int n = 0;
  int d = 2;
  double eps0 = 0.0;
  double eps1 = 0.0;
  Vector ground;
  Vector excited;
  Instance() : h(2, 2, {Matrix::Zero(4, 4)}) {}
};

Matrix random_hermitian(std::mt19937_64& rng, int dim) {
  Matrix a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      a(r, c) = cxd(normal_double(rng), normal_double(rng));
  return 0.5 * (a + a.adjoint());
}

Vector random_unit(std::mt19937_64& rng, long long dim) {
  Vector v(dim);
  for (long long k = 0; k < dim; ++k)
    v(k) = cxd(normal_double(rng), normal_double(rng));
  return v / v.norm();
}

LocalHamiltonian random_model(std::mt19937_64& rng, int min_n, int max_n) {
  ModelSpec spec;
  spec.n = min_n + static_cast<int>(
                       uniform_index(rng, static_cast<std::uint64_t>(
                                              max_n - min_n + 1)));
  spec.d = 2;
  switch (uniform_index(rng, 3)) {
    case 0:
      spec.kind = ModelKind::Tfim;
      spec.g = 0.5 + 2.5 * uniform_double(rng);
      break;
    case 1:
      spec.kind = ModelKind::Xxz;
      spec.delta = 0.5 + 2.0 * uniform_double(rng);
      spec.h = uniform_double(rng);
      break;
    default:
      spec.kind = ModelKind::Explicit;
      for (int t = 0; t + 1 < spec.n; ++t)
        spec.explicit_terms.push_back(random_hermitian(rng, 4));
      break;
  }
  return LocalHamiltonian::build(spec).normalized();
}

// Resamples until the gap clears 1e-3 so overlap arguments are stable.
Instance gapped_instance(std::mt19937_64& rng, int min_n, int max_n,
                         const NumericsConfig& nm) {
  for (int attempt = 0; attempt < 256; ++attempt) {
    Instance inst;
    inst.h = random_model(rng, min_n, max_n);
    inst.n = inst.h.n();
    inst.d = inst.h.d();
    const ExactEigs ee = exact_eigs(inst.h, 2, nm);
    inst.eps0 = ee.values(0);
    inst.eps1 = ee.values(1);
    if (inst.eps1 - inst.eps0 < 1e-3) continue;
    inst.ground = ee.vectors.col(0);
    inst.excited = ee.vectors.col(1);
    return inst;
  }
  throw std::runtime_error("gapped_instance: no gapped sample found");
}

Matrix reshape(const Vector& v, long long dl, long long dr) {
  Matrix m(dl, dr);
  for (long long x = 0; x < dl; ++x)
    for (long long y = 0; y < dr; ++y) m(x, y) = v(x * dr + y);
  return m;
}

Vector flatten(const Matrix& m) {
  Vector v(m.rows() * m.cols());
  for (long long x = 0; x < m.rows(); ++x)
    for (long long y = 0; y < m.cols(); ++y) v(x * m.cols() + y) = m(x, y);
  return v;
}

// Unnormalized Schmidt truncation of a dense vector.
Vector trim_dense(const Vector& v, long long dl, long long dr, int keep) {
  Eigen::JacobiSVD<Matrix> svd(reshape(v, dl, dr),
                               Eigen::ComputeThinU | Eigen::ComputeThinV);
  const int r = static_cast<int>(svd.singularValues().size());
  Matrix out = Matrix::Zero(dl, dr);
  for (int j = 0; j < std::min(keep, r); ++j)
    out += svd.singularValues()(j) * svd.matrixU().col(j) *
           svd.matrixV().col(j).adjoint();
  return flatten(out);
}

RVector schmidt_values(const Vector& v, long long dl, long long dr) {
  Eigen::JacobiSVD<Matrix> svd(reshape(v, dl, dr));
  return svd.singularValues();
}

Vector random_low_rank(std::mt19937_64& rng, long long dl, long long dr,
                       int rank) {
  Matrix x(dl, rank), y(dr, rank);
  for (long long r = 0; r < dl; ++r)
    for (int c = 0; c < rank; ++c)
      x(r, c) = cxd(normal_double(rng), normal_double(rng));
  for (long long r = 0; r < dr; ++r)
    for (int c = 0; c < rank; ++c)
      y(r, c) = cxd(normal_double(rng), normal_double(rng));
  Vector v = flatten(x * y.adjoint());
  return v / v.norm();
}

long long ipow(int b, int e) {
  long long out = 1;
  for (int k = 0; k < e; ++k) out *= b;
  return out;
}

Matrix dense_term_range(const LocalHamiltonian& h, int lo, int hi, int n,
                        const NumericsConfig& nm) {
  const long long dim = ipow(h.d(), n);
  Matrix out = Matrix::Zero(dim, dim);
  for (int t = lo; t <= hi; ++t)
    out += embed_two_site(h.term(t), n, h.d(), t, nm);
  return out;
}

Matrix random_density(std::mt19937_64& rng, long long dim) {
  Matrix a(dim, dim);
  for (long long r = 0; r < dim; ++r)
    for (long long c = 0; c < dim; ++c)
      a(r, c) = cxd(normal_double(rng), normal_double(rng));
  Matrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

CheckResult finish(std::string name, int instances, double worst,
                   double tol) {
  CheckResult r;
  r.name = std::move(name);
  r.instances = instances;
  r.worst = worst;
  r.tolerance = tol;
  r.pass = worst <= tol;
  return r;
}

}  // namespace

CheckResult check_energy_overlap(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const NumericsConfig nm;
  double worst = 0.0;
  for (int k = 0; k < instances; ++k) {
    const Instance inst = gapped_instance(rng, 2, 6, nm);
    const double eps = inst.eps1 - inst.eps0;
    const Matrix hd = dense_hamiltonian(inst.h, nm);
    Vector v;
    double delta = 0.0;
    bool found = false;
    for (int attempt = 0; attempt < 64 && !found; ++attempt) {
      const double phi = 0.5 * 3.141592653589793 * uniform_double(rng);
      Vector r = random_unit(rng, inst.ground.size());
      r -= inst.ground * inst.ground.dot(r);
      const double rn = r.norm();
      if (rn < 1e-8) continue;
      r /= rn;
      v = std::cos(phi) * inst.ground + std::sin(phi) * r;
      v /= v.norm();
      delta = (v.dot(hd * v)).real() - inst.eps0;
      found = delta <= eps;
    }
    if (!found) continue;
    const double ov = std::abs(inst.ground.dot(v));
    // The hypothesis gives the overlap bound, and the spectral split
    // behind it holds for every state.
    worst = std::max(worst, (1.0 - delta / eps) - ov);
    const double energy = inst.eps0 + delta;
    worst = std::max(worst, inst.eps0 * ov * ov +
                                inst.eps1 * (1.0 - ov * ov) - energy);
  }
  return finish("energy forces overlap", instances, worst, kTol);
}

CheckResult check_overlap_triangle(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < instances; ++k) {
    const long long dim = 4 + 4 * uniform_index(rng, 8);
    const Vector w = random_unit(rng, dim);
    auto near_w = [&](double max_angle) {
      Vector r = random_unit(rng, dim);
      r -= w * w.dot(r);
      r /= r.norm();
      const double phi = max_angle * uniform_double(rng);
      Vector v = std::cos(phi) * w + std::sin(phi) * r;
      return Vector(v / v.norm());
    };
    const Vector v = near_w(1.0 * uniform_double(rng));
    const Vector vp = near_w(1.0 * uniform_double(rng));
    const double delta = std::max(0.0, 1.0 - std::abs(v.dot(w)));
    const double deltap = std::max(0.0, 1.0 - std::abs(vp.dot(w)));
    const double lhs = std::abs(v.dot(vp));
    worst = std::max(worst, (1.0 - 2.0 * (delta + deltap)) - lhs);
  }
  return finish("overlap triangle", instances, worst, kTol);
}

CheckResult check_best_truncation(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < instances; ++k) {
    const int n = 2 + static_cast<int>(uniform_index(rng, 5));
    const int c = 1 + static_cast<int>(uniform_index(rng, n - 1));
    const long long dl = ipow(2, c), dr = ipow(2, n - c);
    const Vector v = random_unit(rng, dl * dr);
    const int maxrank = static_cast<int>(std::min(dl, dr));
    const int D = 1 + static_cast<int>(uniform_index(rng, maxrank));
    Vector tr = trim_dense(v, dl, dr, D);
    const double trn = tr.norm();
    if (trn < 1e-12) continue;
    tr /= trn;
    const double base = std::abs(tr.dot(v));
    for (int w = 0; w < 100; ++w) {
      Vector comp = random_low_rank(rng, dl, dr, D);
      if (w % 2 == 1) {
        // Perturbed truncations probe the optimum from nearby.
        comp = tr + 0.05 * comp;
        comp = trim_dense(comp, dl, dr, D);
        const double cn = comp.norm();
        if (cn < 1e-12) continue;
        comp /= cn;
      }
      worst = std::max(worst, std::abs(comp.dot(v)) - base);
    }
  }
  return finish("truncation optimality", instances, worst, kTol);
}

CheckResult check_trim_overlap_loss(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double eps_grid[] = {0.1, 0.25, 0.5};
  double worst = 0.0;
  for (int k = 0; k < instances; ++k) {
    const int n = 4 + static_cast<int>(uniform_index(rng, 3));
    const int c = n / 2;
    const long long dl = ipow(2, c), dr = ipow(2, n - c);
    const int D = 1 + static_cast<int>(uniform_index(rng, 2));
    const double eps = eps_grid[k % 3];
    const Vector v = random_low_rank(rng, dl, dr, D);
    Vector u = random_unit(rng, dl * dr);
    if (k % 2 == 1) {
      u = u + 2.0 * v;  // correlated probes stress the bound harder
      u /= u.norm();
    }
    const int keep = static_cast<int>(std::ceil(D / eps));
    const Vector tu = trim_dense(u, dl, dr, keep);
    worst = std::max(worst,
                     std::abs(u.dot(v)) - eps - std::abs(tu.dot(v)));
  }
  return finish("trimmed-tail overlap loss", instances, worst, kTol);
}

CheckResult check_trim_rank_monotone(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const NumericsConfig nm;
  double worst = 0.0;
  for (int k = 0; k < instances; ++k) {
    const int n = 3 + static_cast<int>(uniform_index(rng, 4));
    const long long dim = ipow(2, n);
    const MpsState u = MpsState::from_dense(random_unit(rng, dim), n, 2, nm);
    const int c = 1 + static_cast<int>(uniform_index(rng, n - 1));
    const int keep = 1 + static_cast<int>(uniform_index(rng, 3));
    const MpsState t = trim(u, c, keep, nm);
    const std::vector<int> before = schmidt_ranks(u, nm);
    const std::vector<int> after = schmidt_ranks(t, nm);
    for (std::size_t j = 0; j < before.size(); ++j)
      worst = std::max(worst, static_cast<double>(after[j] - before[j]));
  }
  return finish("trim rank monotonicity", instances, worst, kTol);
}

namespace {

struct GlueInstance {
  Instance inst;
  int c = 0;
  long long r = 0;  // realized boundary rank
  Vector v_dense;
  MpsState v;
  Matrix sigma;
  Matrix glued;
};

GlueInstance glue_instance(std::mt19937_64& rng, const NumericsConfig& nm) {
  GlueInstance g;
  g.inst = gapped_instance(rng, 3, 6, nm);
  const int n = g.inst.n;
  g.c = 2 + static_cast<int>(uniform_index(rng, n - 2));
  const long long dl = ipow(2, g.c), dr = ipow(2, n - g.c);
  const int B = 1 + static_cast<int>(uniform_index(rng, 2));
  Vector vd = trim_dense(random_unit(rng, dl * dr), dl, dr, B);
  vd /= vd.norm();
  g.v_dense = vd;
  g.v = MpsState::from_dense(vd, n, 2, nm);
  g.r = schmidt(g.v, g.c, nm).rank();
  g.sigma = random_density(rng, dl * g.r);
  g.glued = glue(g.sigma, g.v, g.c, nm);
  return g;
}

}  // namespace

CheckResult check_glue_left_reduction(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const NumericsConfig nm;
  double worst = 0.0;
  for (int k = 0; k < instances; ++k) {
    const GlueInstance g = glue_instance(rng, nm);
    const long long dl = ipow(2, g.c);
    const long long dr = ipow(2, g.inst.n - g.c);
    const Matrix lhs = partial_trace_right(g.glued, dl, dr);
    const Matrix rhs = partial_trace_right(g.sigma, dl, g.r);
    worst = std::max(worst, (lhs - rhs).norm());
  }
  return finish("glue keeps the left reduction", instances, worst, kTol);
}

CheckResult check_glue_boundary_distance(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const NumericsConfig nm;
  double worst = 0.0;
  for (int k = 0; k < instances; ++k) {
    const GlueInstance g = glue_instance(rng, nm);
    const long long head = ipow(2, g.c - 1);
    const long long dr = ipow(2, g.inst.n - g.c);
    const Matrix vv = g.v_dense * g.v_dense.adjoint();
    const double lhs = trace_norm(partial_trace_left(g.glued, head, 2 * dr) -
                                  partial_trace_left(vv, head, 2 * dr));
    const double rhs =
        trace_norm(partial_trace_left(g.sigma, head, 2 * g.r) -
                   contraction(g.v, g.c, nm).matrix);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return finish("glue boundary distance", instances, worst, kTol);
}

CheckResult check_glue_energy(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const NumericsConfig nm;
  double worst = 0.0;
  for (int k = 0; k < instances; ++k) {
    const GlueInstance g = glue_instance(rng, nm);
    const int n = g.inst.n;
    const long long dl = ipow(2, g.c);
    const long long head = ipow(2, g.c - 1);
    const long long dr = ipow(2, n - g.c);
    const Matrix hd = dense_hamiltonian(g.inst.h, nm);
    const double glued_energy = (g.glued * hd).trace().real();
    double left_energy = 0.0;
    if (g.c >= 2) {
      const Matrix hl = dense_term_range(g.inst.h, 0, g.c - 2, g.c, nm);
      left_energy =
          (partial_trace_right(g.sigma, dl, g.r) * hl).trace().real();
    }
    const Matrix h_cut_right = dense_term_range(g.inst.h, g.c - 1, n - 2, n, nm);
    const double v_energy = (g.v_dense.dot(h_cut_right * g.v_dense)).real();
    const double dist =
        trace_norm(partial_trace_left(g.sigma, head, 2 * g.r) -
                   contraction(g.v, g.c, nm).matrix);
    worst = std::max(worst,
                     glued_energy - (left_energy + v_energy + n * dist));
  }
  return finish("glue energy bound", instances, worst, kTol);
}

CheckResult check_post_trim_energy(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const NumericsConfig nm;
  double worst = 0.0;
  for (int k = 0; k < instances; ++k) {
    const Instance inst = gapped_instance(rng, 2, 6, nm);
    const int n = inst.n;
    const double eps = inst.eps1 - inst.eps0;
    const int c = 1 + static_cast<int>(uniform_index(rng, n - 1));
    const long long dl = ipow(2, c), dr = ipow(2, n - c);
    const double frac = k % 2 == 0 ? 0.5 : 1.0;
    const double delta = frac * eps / (2.0 * (1.0 + eps));

    // Empirical sufficient rank: smallest truncation of the ground state
    // keeping overlap at least 1 - delta.
    const RVector lam = schmidt_values(inst.ground, dl, dr);
    int b_delta = static_cast<int>(lam.size());
    double cum = 0.0;
    for (int j = 0; j < lam.size(); ++j) {
      cum += lam(j) * lam(j);
      if (std::sqrt(cum) >= 1.0 - delta) {
        b_delta = j + 1;
        break;
      }
    }

    const double sin2 = 0.9 * delta / eps;
    const double s = std::sqrt(sin2), cth = std::sqrt(1.0 - sin2);
    const Vector w = cth * inst.ground + s * inst.excited;
    Vector t = trim_dense(w, dl, dr, b_delta);
    const double tn = t.norm();
    if (tn < 1e-12) continue;
    t /= tn;
    const Matrix hd = dense_hamiltonian(inst.h, nm);
    const double energy = (t.dot(hd * t)).real();
    worst = std::max(worst,
                     energy - (inst.eps0 + 6.0 * std::sqrt(delta)));
  }
  return finish("post-trim energy", instances, worst, kTol);
}

CheckResult check_fixture_file(const std::string& path) {
  const NumericsConfig nm;
  const std::vector<SpectrumFixture> fixtures = load_spectrum_fixtures(path);
  const std::vector<FixtureReport> reps =
      check_spectrum_fixtures(fixtures, kTol, nm);
  double worst = 0.0;
  bool pass = !reps.empty();
  for (const FixtureReport& r : reps) {
    worst = std::max(worst, std::max(r.err0, r.err1));
    pass = pass && r.pass;
  }
  CheckResult out = finish("spectrum fixtures", static_cast<int>(reps.size()),
                           worst, kTol);
  out.pass = pass;
  return out;
}

std::vector<CheckResult> lemma_checks(int instances_per_check,
                                      std::uint64_t seed) {
  std::vector<CheckResult> out;
  std::uint64_t state = seed;
  auto next = [&]() { return splitmix64(state); };
  out.push_back(check_energy_overlap(instances_per_check, next()));
  out.push_back(check_overlap_triangle(instances_per_check, next()));
  out.push_back(check_best_truncation(instances_per_check, next()));
  out.push_back(check_trim_overlap_loss(instances_per_check, next()));
  out.push_back(check_trim_rank_monotone(instances_per_check, next()));
  out.push_back(check_glue_left_reduction(instances_per_check, next()));
  out.push_back(check_glue_boundary_distance(instances_per_check, next()));
  out.push_back(check_glue_energy(instances_per_check, next()));
  out.push_back(check_post_trim_energy(instances_per_check, next()));
  return out;
}

}  // namespace gapped1d
