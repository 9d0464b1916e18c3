#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <vector>

#include "dense_ref.hpp"
#include "doctest.h"
#include "gapped1d/boundary.hpp"
#include "gapped1d/mps.hpp"

using namespace gapped1d;

namespace {

const NumericsConfig nm{};

MpsState random_mps(std::uint64_t seed, int n, int d) {
  long long dim = 1;
  for (int k = 0; k < n; ++k) dim *= d;
  return MpsState::from_dense(dense_ref::random_state(seed, dim), n, d, nm);
}

dense_ref::Mat random_density(std::uint64_t seed, Eigen::Index dim) {
  const dense_ref::Mat a = dense_ref::random_matrix(seed, dim, dim);
  dense_ref::Mat rho = a * a.adjoint();
  rho /= rho.trace();
  return rho;
}

std::vector<double> hermitian_params(const Matrix& m) {
  std::vector<double> out;
  for (Eigen::Index p = 0; p < m.rows(); ++p) out.push_back(m(p, p).real());
  for (Eigen::Index p = 0; p < m.rows(); ++p)
    for (Eigen::Index q = p + 1; q < m.cols(); ++q) {
      out.push_back(m(p, q).real());
      out.push_back(m(p, q).imag());
    }
  return out;
}

double param_gap(const Matrix& a, const Matrix& b) {
  const std::vector<double> pa = hermitian_params(a);
  const std::vector<double> pb = hermitian_params(b);
  double worst = 0.0;
  for (std::size_t k = 0; k < pa.size(); ++k)
    worst = std::max(worst, std::abs(pa[k] - pb[k]));
  return worst;
}

}  // namespace

TEST_CASE("trace norm and trace distance match dense singular values") {
  const dense_ref::Mat m = dense_ref::random_matrix(3, 6, 6);
  CHECK(trace_norm(m) == doctest::Approx(dense_ref::trace_norm(m)).epsilon(1e-12));
  const dense_ref::Mat a = dense_ref::random_matrix(4, 5, 5);
  const dense_ref::Mat b = dense_ref::random_matrix(5, 5, 5);
  CHECK(trace_distance(a, b) == doctest::Approx(trace_distance(b, a)));
  CHECK(trace_distance(a, a) < 1e-14);
}

TEST_CASE("partial traces match the independent implementations") {
  const dense_ref::Mat rho = dense_ref::random_matrix(7, 12, 12);
  CHECK((partial_trace_left(rho, 3, 4) - dense_ref::ptrace_left(rho, 3, 4))
            .norm() < 1e-13);
  CHECK((partial_trace_right(rho, 3, 4) - dense_ref::ptrace_right(rho, 3, 4))
            .norm() < 1e-13);
  CHECK(std::abs(partial_trace_left(rho, 3, 4).trace() - rho.trace()) < 1e-12);
}

TEST_CASE("weighted left families carry the Schmidt data of the state") {
  const int n = 5, d = 2, cut = 3;
  const MpsState v = random_mps(11, n, d);
  const LeftState ls = left_state(v, cut, nm);
  const SchmidtData sd = schmidt(v, cut, nm);
  CHECK(ls.cut == cut);
  REQUIRE(ls.bond == sd.rank());

  const Vector psi = ls.state.to_dense(nm);
  long long dl = 1;
  for (int k = 0; k < cut; ++k) dl *= d;
  REQUIRE(psi.size() == dl * ls.bond);
  const dense_ref::Mat outer = dense_ref::Vec(psi) * dense_ref::Vec(psi).adjoint();

  // tracing out the sites leaves the squared coefficients on the selector
  const dense_ref::Mat on_selector = dense_ref::ptrace_left(outer, dl, ls.bond);
  for (int j = 0; j < ls.bond; ++j)
    for (int k = 0; k < ls.bond; ++k) {
      const double want = (j == k) ? sd.coefficients(j) * sd.coefficients(j)
                                   : 0.0;
      CHECK(std::abs(on_selector(j, k) - dense_ref::Cx(want, 0)) < 1e-10);
    }

  // tracing out the selector leaves the left reduced density of v
  const dense_ref::Vec vd = v.to_dense(nm);
  const dense_ref::Mat vv = vd * vd.adjoint();
  const dense_ref::Mat left_red =
      dense_ref::ptrace_right(vv, dl, vd.size() / dl);
  CHECK((dense_ref::ptrace_right(outer, dl, ls.bond) - left_red).norm() <
        1e-10);
}

TEST_CASE("the boundary contraction is a unit trace reduced density") {
  const int n = 5, d = 2, cut = 3;
  const MpsState v = random_mps(13, n, d);
  const BoundaryContraction c = contraction(v, cut, nm);
  CHECK(c.cut == cut);
  CHECK(c.d == d);
  REQUIRE(c.matrix.rows() == static_cast<Eigen::Index>(d) * c.bond);
  CHECK((c.matrix - c.matrix.adjoint()).norm() < 1e-12);
  CHECK(std::abs(c.matrix.trace() - dense_ref::Cx(1, 0)) < 1e-10);
  Eigen::SelfAdjointEigenSolver<Matrix> es(c.matrix);
  CHECK(es.eigenvalues().minCoeff() > -1e-10);

  // consistency with the dense reduction of the weighted left family
  const LeftState ls = left_state(v, cut, nm);
  const Vector psi = ls.state.to_dense(nm);
  const dense_ref::Mat outer =
      dense_ref::Vec(psi) * dense_ref::Vec(psi).adjoint();
  long long head = 1;
  for (int k = 0; k < cut - 1; ++k) head *= d;
  const dense_ref::Mat want = dense_ref::ptrace_left(
      outer, head, static_cast<Eigen::Index>(d) * ls.bond);
  CHECK((c.matrix - want).norm() < 1e-10);
}

TEST_CASE("product states contract to an exact rank one answer") {
  const int c = 2, tail = 2, d = 2;
  const dense_ref::Vec a = dense_ref::random_state(17, 4);
  const dense_ref::Vec b = dense_ref::random_state(18, 4);
  dense_ref::Vec prod(16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) prod(i * 4 + j) = a(i) * b(j);
  const MpsState v = MpsState::from_dense(prod, c + tail, d, nm);
  const BoundaryContraction cont = contraction(v, c, nm);
  REQUIRE(cont.bond == 1);
  const dense_ref::Mat aa = a * a.adjoint();
  const dense_ref::Mat want = dense_ref::ptrace_left(aa, 2, 2);
  CHECK((cont.matrix - want).norm() < 1e-10);
}

TEST_CASE("contraction at the full cut reduces onto the last site") {
  const int n = 4, d = 2;
  const MpsState v = random_mps(19, n, d);
  const BoundaryContraction c = contraction(v, n, nm);
  REQUIRE(c.bond == 1);
  const dense_ref::Vec vd = v.to_dense(nm);
  const dense_ref::Mat want =
      dense_ref::ptrace_left(vd * vd.adjoint(), vd.size() / d, d);
  CHECK((c.matrix - want).norm() < 1e-10);
}

TEST_CASE("gluing preserves the left block and total trace") {
  const int n = 5, d = 2, cut = 3;
  const MpsState raw = random_mps(23, n, d);
  const MpsState v = trim(raw, cut, 2, nm);
  const SchmidtData sd = schmidt(v, cut, nm);
  const int r = sd.rank();
  long long dl = 1;
  for (int k = 0; k < cut; ++k) dl *= d;
  const dense_ref::Mat sigma = random_density(24, dl * r);

  const Matrix glued = glue(sigma, v, cut, nm);
  REQUIRE(glued.rows() == 32);
  CHECK(std::abs(glued.trace() - sigma.trace()) < 1e-10);
  CHECK((glued - glued.adjoint()).norm() < 1e-12);

  const long long dr = 32 / dl;
  CHECK((dense_ref::ptrace_right(glued, dl, dr) -
         dense_ref::ptrace_right(sigma, dl, r))
            .norm() < 1e-10);
}

TEST_CASE("gluing turns bond distance into physical distance") {
  const int n = 5, d = 2, cut = 3;
  const MpsState raw = random_mps(29, n, d);
  const MpsState v = trim(raw, cut, 2, nm);
  const SchmidtData sd = schmidt(v, cut, nm);
  const int r = sd.rank();
  long long dl = 1;
  for (int k = 0; k < cut; ++k) dl *= d;
  const dense_ref::Mat sigma = random_density(30, dl * r);
  const Matrix glued = glue(sigma, v, cut, nm);

  const dense_ref::Vec vd = v.to_dense(nm);
  const dense_ref::Mat vv = vd * vd.adjoint();
  const long long head = dl / d;
  const long long dr = (32 / dl);

  const double physical = trace_norm(
      Matrix(dense_ref::ptrace_left(glued, head, d * dr) -
             dense_ref::ptrace_left(vv, head, d * dr)));
  const BoundaryContraction cont = contraction(v, cut, nm);
  const double bond_side = trace_norm(
      Matrix(dense_ref::ptrace_left(sigma, head, d * r) -
             dense_ref::Mat(cont.matrix)));
  CHECK(std::abs(physical - bond_side) < 1e-9);
}

TEST_CASE("gluing rejects shape mismatches") {
  const MpsState v = random_mps(31, 4, 2);
  CHECK_THROWS(glue(Matrix::Identity(4, 4), v, 4, nm));
  CHECK_THROWS(glue(Matrix::Identity(3, 3), v, 2, nm));
}

TEST_CASE("the reporting formula counts the one site qubit grid") {
  NetSpec spec;
  spec.B = 1;
  spec.d = 2;
  spec.eta = 0.5;
  CHECK(net_cardinality_formula(spec) == doctest::Approx(6561.0));
  CHECK(net_grid_size(spec) == doctest::Approx(6561.0));
}

TEST_CASE("the full grid net enumerates deterministically within budget") {
  NetSpec spec;
  spec.B = 1;
  spec.d = 2;
  spec.eta = 0.5;
  spec.mode = NetSpec::Mode::FullGrid;
  const std::vector<Matrix> net = build_net(spec);
  CHECK(net.size() > 100);
  CHECK(static_cast<double>(net.size()) <= net_cardinality_formula(spec));

  bool has_zero = false;
  for (const Matrix& m : net) {
    CHECK((m - m.adjoint()).norm() < 1e-14);
    CHECK(trace_norm(m) <= 1.5 + 1e-9);
    for (double p : hermitian_params(m)) {
      const double snapped = std::round(p / 0.25) * 0.25;
      CHECK(std::abs(p - snapped) < 1e-12);
    }
    if (m.norm() < 1e-14) has_zero = true;
  }
  CHECK(has_zero);

  const std::vector<Matrix> again = build_net(spec);
  REQUIRE(again.size() == net.size());
  for (std::size_t k = 0; k < net.size(); ++k)
    CHECK((net[k] - again[k]).norm() == 0.0);
}

TEST_CASE("an oversized full grid is refused rather than truncated") {
  NetSpec spec;
  spec.B = 2;
  spec.d = 2;
  spec.eta = 0.5;
  spec.mode = NetSpec::Mode::FullGrid;
  CHECK_THROWS(build_net(spec));
}

TEST_CASE("sampled nets are seeded, snapped, and filtered") {
  NetSpec spec;
  spec.B = 2;
  spec.d = 2;
  spec.eta = 0.5;
  spec.mode = NetSpec::Mode::RandomSample;
  spec.sample_count = 64;
  spec.seed = 99;
  const std::vector<Matrix> net = build_net(spec);
  REQUIRE(static_cast<long long>(net.size()) == 64);
  for (const Matrix& m : net) {
    CHECK((m - m.adjoint()).norm() < 1e-14);
    CHECK(trace_norm(m) <= 1.5 + 1e-9);
    // snapping a net element is a fixed point
    CHECK((net_nearest(spec, m) - m).norm() < 1e-12);
  }
  const std::vector<Matrix> same = build_net(spec);
  for (std::size_t k = 0; k < net.size(); ++k)
    CHECK((net[k] - same[k]).norm() == 0.0);

  NetSpec other = spec;
  other.seed = 100;
  const std::vector<Matrix> shifted = build_net(other);
  double diff = 0.0;
  for (std::size_t k = 0; k < net.size(); ++k)
    diff += (net[k] - shifted[k]).norm();
  CHECK(diff > 1e-6);
}

TEST_CASE("per parameter rounding is a true nearest neighbour") {
  NetSpec spec;
  spec.B = 1;
  spec.d = 2;
  spec.eta = 0.5;
  spec.mode = NetSpec::Mode::FullGrid;
  const std::vector<Matrix> net = build_net(spec);

  for (int trial = 0; trial < 20; ++trial) {
    Matrix y = dense_ref::random_hermitian(500 + trial, 2);
    y /= trace_norm(y);
    const Matrix snap = net_nearest(spec, y);
    CHECK(param_gap(y, snap) <= 0.125 + 1e-12);
    CHECK(trace_norm(Matrix(y - snap)) <= 0.5 + 1e-12);

    // the snapped point is inside the filtered net
    bool member = false;
    double brute = 1e9;
    for (const Matrix& x : net) {
      brute = std::min(brute, param_gap(y, x));
      if ((x - snap).norm() < 1e-12) member = true;
    }
    CHECK(member);
    CHECK(param_gap(y, snap) <= brute + 1e-12);
  }
}
