#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>
#include <vector>

#include "dense_ref.hpp"
#include "doctest.h"
#include "gapped1d/mps.hpp"
#include "gapped1d/oracle.hpp"

using namespace gapped1d;

namespace {

const NumericsConfig nm{};

LocalHamiltonian tfim(int n, double g) {
  ModelSpec spec;
  spec.kind = ModelKind::Tfim;
  spec.n = n;
  spec.g = g;
  return LocalHamiltonian::build(spec);
}

dense_ref::Mat reference_dense(const LocalHamiltonian& h) {
  std::vector<dense_ref::Mat> terms;
  for (int t = 0; t < h.term_count(); ++t) terms.push_back(h.term(t));
  return dense_ref::chain(terms, h.n(), h.d());
}

}  // namespace

TEST_CASE("dense assembly matches an independent chain build") {
  const LocalHamiltonian h = tfim(4, 1.2).normalized();
  CHECK((Matrix(dense_hamiltonian(h, nm)) - Matrix(reference_dense(h))).norm() <
        1e-12);
}

TEST_CASE("embedding a gate matches the independent embedding") {
  const dense_ref::Mat gate = dense_ref::random_matrix(11, 4, 4);
  for (int t = 0; t < 3; ++t)
    CHECK((Matrix(embed_two_site(gate, 4, 2, t, nm)) -
           Matrix(dense_ref::embed(gate, 4, 2, t)))
              .norm() < 1e-14);
}

TEST_CASE("structured applications equal matrix action") {
  const LocalHamiltonian h = tfim(5, 2.0).normalized();
  const dense_ref::Vec psi = dense_ref::random_state(13, 32);
  const Vector via_struct = apply_hamiltonian_dense(h, psi);
  const Vector via_matrix = Matrix(reference_dense(h)) * Vector(psi);
  CHECK((via_struct - via_matrix).norm() < 1e-12);

  const dense_ref::Mat gate = dense_ref::random_matrix(14, 4, 4);
  const Vector one = apply_two_site_dense(psi, 5, 2, 2, gate);
  const Vector two = Matrix(dense_ref::embed(gate, 5, 2, 2)) * Vector(psi);
  CHECK((one - two).norm() < 1e-12);
}

TEST_CASE("exact eigendata matches a direct solver") {
  const LocalHamiltonian h = tfim(4, 2.0).normalized();
  const ExactEigs eigs = exact_eigs(h, 3, nm);
  Eigen::SelfAdjointEigenSolver<dense_ref::Mat> es(reference_dense(h));
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(eigs.values(k) - es.eigenvalues()(k)) < 1e-11);
    const double overlap =
        std::abs(dense_ref::Vec(es.eigenvectors().col(k))
                     .dot(dense_ref::Vec(eigs.vectors.col(k))));
    CHECK(overlap > 1.0 - 1e-9);
  }
  CHECK(eigs.values(0) <= eigs.values(1));
  CHECK(eigs.values(1) <= eigs.values(2));
}

TEST_CASE("gap report and solution bundle agree") {
  const LocalHamiltonian h = tfim(4, 2.0).normalized();
  const GapInfo gap = exact_gap(h, nm);
  const ExactSolution sol = solve_exact(h, nm);
  CHECK(gap.epsilon0 == doctest::Approx(sol.epsilon0).epsilon(1e-12));
  CHECK(gap.epsilon1 == doctest::Approx(sol.epsilon1).epsilon(1e-12));
  CHECK(gap.gap() > 0.01);
  CHECK(!sol.degenerate);
  const Vector ground = exact_ground_state(h, nm);
  CHECK(std::abs(std::abs(ground.dot(sol.ground)) - 1.0) < 1e-10);

  const double residual =
      (apply_hamiltonian_dense(h, sol.ground) - sol.epsilon0 * sol.ground)
          .norm();
  CHECK(residual < 1e-10);
}

TEST_CASE("a fully constant chain is flagged as degenerate") {
  std::vector<Matrix> terms(2, Matrix::Zero(4, 4));
  const LocalHamiltonian h(3, 2, terms);
  const ExactSolution sol = solve_exact(h, nm);
  CHECK(sol.degenerate);
}

TEST_CASE("fidelity measures ground state overlap") {
  const LocalHamiltonian h = tfim(4, 2.0).normalized();
  const ExactSolution sol = solve_exact(h, nm);
  const MpsState ground = MpsState::from_dense(sol.ground, 4, 2, nm);
  CHECK(fidelity(ground, sol, nm) == doctest::Approx(1.0).epsilon(1e-10));

  // an orthogonal excited state scores near zero
  const ExactEigs eigs = exact_eigs(h, 2, nm);
  const MpsState excited = MpsState::from_dense(eigs.vectors.col(1), 4, 2, nm);
  CHECK(fidelity(excited, sol, nm) < 1e-8);
}

TEST_CASE("the dense path refuses chains beyond the cap") {
  NumericsConfig small = nm;
  small.dense_cap_dim = 8;
  const LocalHamiltonian h = tfim(5, 2.0).normalized();
  CHECK_THROWS(dense_hamiltonian(h, small));
  CHECK_THROWS(exact_eigs(h, 1, small));
}

TEST_CASE("frozen spectrum fixtures still reproduce") {
  const std::string path = std::string(GAPPED1D_FIXTURE_DIR) + "/spectra.json";
  const std::vector<SpectrumFixture> fixtures = load_spectrum_fixtures(path);
  REQUIRE(!fixtures.empty());
  REQUIRE(fixtures.size() == standard_fixture_models().size());
  const std::vector<FixtureReport> reports =
      check_spectrum_fixtures(fixtures, 1e-9, nm);
  for (const FixtureReport& r : reports) {
    INFO(r.model);
    CHECK(r.pass);
    CHECK(r.err0 < 1e-9);
    CHECK(r.err1 < 1e-9);
  }
}

TEST_CASE("recomputing fixtures matches the frozen file") {
  const std::string path = std::string(GAPPED1D_FIXTURE_DIR) + "/spectra.json";
  const std::vector<SpectrumFixture> frozen = load_spectrum_fixtures(path);
  const std::vector<SpectrumFixture> fresh = compute_spectrum_fixtures(nm);
  REQUIRE(frozen.size() == fresh.size());
  for (std::size_t k = 0; k < frozen.size(); ++k) {
    CHECK(frozen[k].model.name() == fresh[k].model.name());
    CHECK(std::abs(frozen[k].epsilon0 - fresh[k].epsilon0) < 1e-9);
    CHECK(std::abs(frozen[k].epsilon1 - fresh[k].epsilon1) < 1e-9);
  }
}
