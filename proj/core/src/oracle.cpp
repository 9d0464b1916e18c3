#include "gapped1d/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace gapped1d {

Matrix embed_two_site(const Matrix& gate, int n, int d, int t,
                      const NumericsConfig& nm) {
  if (t < 0 || t > n - 2) throw std::out_of_range("embed_two_site: bad site");
  if (gate.rows() != d * d || gate.cols() != d * d)
    throw std::invalid_argument("embed_two_site: gate shape mismatch");
  const long long dim = pow_ll(d, n);
  if (dim > nm.dense_cap_dim)
    throw std::invalid_argument("embed_two_site: exceeds dense cap");
  const long long left = pow_ll(d, t);
  const long long right = pow_ll(d, n - t - 2);
  Matrix il = Matrix::Identity(left, left);
  Matrix ir = Matrix::Identity(right, right);
  return kron(kron(il, gate), ir);
}

Matrix dense_hamiltonian(const LocalHamiltonian& h, const NumericsConfig& nm) {
  const long long dim = pow_ll(h.d(), h.n());
  if (dim > nm.dense_cap_dim)
    throw std::invalid_argument("dense_hamiltonian: exceeds dense cap");
  Matrix out = Matrix::Zero(dim, dim);
  for (int t = 0; t < h.term_count(); ++t)
    out += embed_two_site(h.term(t), h.n(), h.d(), t, nm);
  return out;
}

Vector apply_two_site_dense(const Vector& psi, int n, int d, int t,
                            const Matrix& gate) {
  if (t < 0 || t > n - 2)
    throw std::out_of_range("apply_two_site_dense: bad site");
  const long long dim = pow_ll(d, n);
  if (psi.size() != dim)
    throw std::invalid_argument("apply_two_site_dense: size mismatch");
  const int dd = d * d;
  if (gate.rows() != dd || gate.cols() != dd)
    throw std::invalid_argument("apply_two_site_dense: gate shape mismatch");
  const long long left = pow_ll(d, t);
  const long long right = pow_ll(d, n - t - 2);
  Vector out(dim);
  using RowMat =
      Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  for (long long l = 0; l < left; ++l) {
    Eigen::Map<const RowMat> src(psi.data() + l * dd * right, dd, right);
    Eigen::Map<RowMat> dst(out.data() + l * dd * right, dd, right);
    dst = gate * src;
  }
  return out;
}

Vector apply_hamiltonian_dense(const LocalHamiltonian& h, const Vector& psi) {
  Vector out = Vector::Zero(psi.size());
  for (int t = 0; t < h.term_count(); ++t)
    out += apply_two_site_dense(psi, h.n(), h.d(), t, h.term(t));
  return out;
}

ExactEigs exact_eigs(const LocalHamiltonian& h, int count,
                     const NumericsConfig& nm) {
  if (count < 1) throw std::invalid_argument("exact_eigs: count must be >= 1");
  Matrix hm = dense_hamiltonian(h, nm);
  Eigen::SelfAdjointEigenSolver<Matrix> es(hm);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("exact_eigs: eigensolver failed");
  const int dim = static_cast<int>(hm.rows());
  const int k = std::min(count, dim);
  ExactEigs out;
  out.values = es.eigenvalues().head(k);
  out.vectors = es.eigenvectors().leftCols(k);
  return out;
}

GapInfo exact_gap(const LocalHamiltonian& h, const NumericsConfig& nm) {
  ExactEigs eig = exact_eigs(h, 2, nm);
  GapInfo g;
  g.epsilon0 = eig.values(0);
  g.epsilon1 = eig.values.size() > 1 ? eig.values(1) : eig.values(0);
  return g;
}

Vector exact_ground_state(const LocalHamiltonian& h, const NumericsConfig& nm) {
  return exact_eigs(h, 1, nm).vectors.col(0);
}

ExactSolution solve_exact(const LocalHamiltonian& h, const NumericsConfig& nm) {
  ExactEigs eig = exact_eigs(h, 2, nm);
  ExactSolution sol;
  sol.epsilon0 = eig.values(0);
  sol.epsilon1 = eig.values.size() > 1 ? eig.values(1) : eig.values(0);
  sol.ground = eig.vectors.col(0);
  sol.degenerate = (sol.epsilon1 - sol.epsilon0) < 1e-8;
  return sol;
}

double fidelity(const MpsState& s, const ExactSolution& sol,
                const NumericsConfig& nm) {
  Vector psi = s.to_dense(nm);
  if (psi.size() != sol.ground.size())
    throw std::invalid_argument("fidelity: dimension mismatch");
  return std::abs(sol.ground.dot(psi));
}

std::vector<ModelSpec> standard_fixture_models() {
  std::vector<ModelSpec> models;
  for (int n : {2, 4, 6, 8, 10})
    for (double g : {1.5, 2.0}) {
      ModelSpec m;
      m.kind = ModelKind::Tfim;
      m.n = n;
      m.d = 2;
      m.g = g;
      models.push_back(m);
    }
  for (int n : {4, 6, 8}) {
    ModelSpec m;
    m.kind = ModelKind::Xxz;
    m.n = n;
    m.d = 2;
    m.delta = 1.5;
    m.h = 0.5;
    models.push_back(m);
  }
  return models;
}

std::vector<SpectrumFixture> compute_spectrum_fixtures(
    const NumericsConfig& nm) {
  std::vector<SpectrumFixture> out;
  for (const ModelSpec& m : standard_fixture_models()) {
    LocalHamiltonian h = LocalHamiltonian::build(m).normalized();
    GapInfo g = exact_gap(h, nm);
    SpectrumFixture f;
    f.model = m;
    f.epsilon0 = g.epsilon0;
    f.epsilon1 = g.epsilon1;
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<FixtureReport> check_spectrum_fixtures(
    const std::vector<SpectrumFixture>& fixtures, double tol,
    const NumericsConfig& nm) {
  std::vector<FixtureReport> out;
  for (const SpectrumFixture& f : fixtures) {
    LocalHamiltonian h = LocalHamiltonian::build(f.model).normalized();
    GapInfo g = exact_gap(h, nm);
    FixtureReport r;
    r.model = f.model.name();
    r.err0 = std::abs(g.epsilon0 - f.epsilon0);
    r.err1 = std::abs(g.epsilon1 - f.epsilon1);
    r.pass = r.err0 <= tol && r.err1 <= tol;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace gapped1d
