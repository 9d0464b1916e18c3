#include <cmath>
#include <complex>
#include <vector>

#include "dense_ref.hpp"
#include "doctest.h"
#include "gapped1d/mps.hpp"

using namespace gapped1d;

namespace {

const NumericsConfig nm{};

std::vector<std::vector<dense_ref::Mat>> raw_blocks(const MpsState& s) {
  std::vector<std::vector<dense_ref::Mat>> out(s.n());
  for (int k = 0; k < s.n(); ++k) {
    const SiteTensor& t = s.site(k);
    for (int p = 0; p < t.phys; ++p) out[k].push_back(t.blocks[p]);
  }
  return out;
}

MpsState random_mps(std::uint64_t seed, int n, int d) {
  long long dim = 1;
  for (int k = 0; k < n; ++k) dim *= d;
  return MpsState::from_dense(dense_ref::random_state(seed, dim), n, d, nm);
}

double dense_gap(const Vector& a, const dense_ref::Vec& b) {
  return (a - b).norm();
}

}  // namespace

TEST_CASE("dense round trip matches an independent block contraction") {
  for (int n = 1; n <= 6; ++n) {
    const int d = (n <= 3) ? 3 : 2;
    long long dim = 1;
    for (int k = 0; k < n; ++k) dim *= d;
    const dense_ref::Vec psi = dense_ref::random_state(1000 + n, dim);
    const MpsState s = MpsState::from_dense(psi, n, d, nm);
    CHECK(dense_gap(s.to_dense(nm), psi) < 1e-12);
    CHECK(dense_gap(s.to_dense(nm), dense_ref::contract_blocks(raw_blocks(s))) <
          1e-12);
  }
}

TEST_CASE("from_dense produces left-orthonormal site matrices") {
  const MpsState s = random_mps(7, 5, 2);
  for (int k = 0; k + 1 < s.n(); ++k) {
    const Matrix a = s.site(k).left_mat();
    CHECK((a.adjoint() * a - Matrix::Identity(a.cols(), a.cols())).norm() <
          1e-12);
  }
  CHECK(std::abs(norm(s) - 1.0) < 1e-12);
}

TEST_CASE("inner and norm agree with the dense values") {
  const int n = 5, d = 2;
  const MpsState a = random_mps(21, n, d);
  const MpsState b = random_mps(22, n, d);
  const dense_ref::Vec da = a.to_dense(nm), db = b.to_dense(nm);
  // antilinear in the first argument
  CHECK(std::abs(inner(a, b) - da.dot(db)) < 1e-12);
  CHECK(std::abs(norm(a) - da.norm()) < 1e-12);

  MpsState c = a;
  c.scale(cxd(0.25, -0.5));
  CHECK(std::abs(norm(c) - std::abs(cxd(0.25, -0.5))) < 1e-12);
}

TEST_CASE("schmidt coefficients match the dense singular values at every cut") {
  const int n = 6, d = 2;
  const MpsState s = random_mps(31, n, d);
  const dense_ref::Vec psi = s.to_dense(nm);
  for (int cut = 1; cut < n; ++cut) {
    long long dl = 1;
    for (int k = 0; k < cut; ++k) dl *= d;
    const std::vector<double> ref =
        dense_ref::schmidt_coefficients(psi, dl, psi.size() / dl);
    const SchmidtData sd = schmidt(s, cut, nm);
    REQUIRE(sd.rank() <= static_cast<int>(ref.size()));
    for (int j = 0; j < sd.rank(); ++j)
      CHECK(std::abs(sd.coefficients(j) - ref[j]) < 1e-10);
    double tail = 0.0;
    for (std::size_t j = sd.rank(); j < ref.size(); ++j) tail += ref[j] * ref[j];
    CHECK(tail < 1e-20);
  }
}

TEST_CASE("schmidt families are orthonormal and reassemble the state") {
  const int n = 5, d = 2;
  const MpsState s = random_mps(33, n, d);
  const int cut = 2;
  const SchmidtData sd = schmidt(s, cut, nm);
  long long dl = 1;
  for (int k = 0; k < cut; ++k) dl *= d;
  const long long dr = s.dense_dim() / dl;

  std::vector<Vector> left(sd.rank()), right(sd.rank());
  for (int j = 0; j < sd.rank(); ++j) {
    left[j] = sd.left_vector(j).to_dense(nm);
    right[j] = sd.right_vector(j).to_dense(nm);
    REQUIRE(left[j].size() == dl);
    REQUIRE(right[j].size() == dr);
  }
  for (int a = 0; a < sd.rank(); ++a)
    for (int b = 0; b < sd.rank(); ++b) {
      const cxd gl = left[a].dot(left[b]);
      const cxd gr = right[a].dot(right[b]);
      const double want = (a == b) ? 1.0 : 0.0;
      CHECK(std::abs(gl - cxd(want, 0)) < 1e-10);
      CHECK(std::abs(gr - cxd(want, 0)) < 1e-10);
    }

  Vector rebuilt = Vector::Zero(s.dense_dim());
  for (int j = 0; j < sd.rank(); ++j)
    for (long long l = 0; l < dl; ++l)
      for (long long r = 0; r < dr; ++r)
        rebuilt(l * dr + r) += sd.coefficients(j) * left[j](l) * right[j](r);
  CHECK((rebuilt - s.to_dense(nm)).norm() < 1e-10);
}

TEST_CASE("trim at a cut equals the dense unnormalized truncation") {
  const int n = 6, d = 2;
  const MpsState s = random_mps(41, n, d);
  const dense_ref::Vec psi = s.to_dense(nm);
  for (int cut = 1; cut < n; ++cut) {
    for (int keep : {1, 2, 3}) {
      long long dl = 1;
      for (int k = 0; k < cut; ++k) dl *= d;
      const dense_ref::Vec ref =
          dense_ref::keep_leading(psi, dl, psi.size() / dl, keep);
      const MpsState t = trim(s, cut, keep, nm);
      CHECK(dense_gap(t.to_dense(nm), ref) < 1e-10);
      const std::vector<int> ranks = schmidt_ranks(t, nm);
      CHECK(ranks[cut - 1] <= keep);
    }
  }
}

TEST_CASE("trim error is the Schmidt tail, so no rank-D vector does better") {
  const int n = 5, d = 2;
  const MpsState s = random_mps(47, n, d);
  const dense_ref::Vec psi = s.to_dense(nm);
  const int cut = 2, keep = 2;
  long long dl = 1;
  for (int k = 0; k < cut; ++k) dl *= d;
  const std::vector<double> sv =
      dense_ref::schmidt_coefficients(psi, dl, psi.size() / dl);
  double tail = 0.0;
  for (std::size_t j = keep; j < sv.size(); ++j) tail += sv[j] * sv[j];
  const MpsState t = trim(s, cut, keep, nm);
  CHECK(std::abs((t.to_dense(nm) - Vector(psi)).norm() - std::sqrt(tail)) <
        1e-10);
}

TEST_CASE("trim_all caps every bond") {
  const MpsState s = random_mps(53, 6, 2);
  const MpsState t = trim_all(s, 2, nm);
  for (int cut = 1; cut < 6; ++cut) CHECK(t.bond_dim(cut) <= 2);
  CHECK(t.max_bond() <= 2);
}

TEST_CASE("two site gates act like their dense embedding") {
  const int n = 5, d = 2;
  const MpsState s = random_mps(61, n, d);
  const dense_ref::Mat gate = dense_ref::random_matrix(62, d * d, d * d);
  for (int t = 0; t < n - 1; ++t) {
    const MpsState out = apply_two_site_op(s, t, gate, nm, 0.0);
    const dense_ref::Vec ref =
        dense_ref::embed(gate, n, d, t) * dense_ref::Vec(s.to_dense(nm));
    CHECK(dense_gap(out.to_dense(nm), ref) < 1e-10);
  }
}

TEST_CASE("one site gates act like their dense embedding") {
  const int n = 4, d = 2;
  const MpsState s = random_mps(63, n, d);
  const dense_ref::Mat op = dense_ref::random_matrix(64, d, d);
  for (int t = 0; t < n; ++t) {
    const MpsState out = apply_one_site_op(s, t, op);
    Eigen::Index left = 1, right = 1;
    for (int k = 0; k < t; ++k) left *= d;
    for (int k = t + 1; k < n; ++k) right *= d;
    const dense_ref::Mat full = dense_ref::kron(
        dense_ref::kron(dense_ref::identity(left), op),
        dense_ref::identity(right));
    CHECK(dense_gap(out.to_dense(nm), full * dense_ref::Vec(s.to_dense(nm))) <
          1e-10);
  }
}

TEST_CASE("linear combinations match the dense sum") {
  const int n = 4, d = 2;
  const MpsState a = random_mps(71, n, d);
  const MpsState b = random_mps(72, n, d);
  const MpsState c = random_mps(73, n, d);
  const cxd ca(0.5, -1.0), cb(-0.25, 0.75), cc(2.0, 0.0);
  const MpsState sum = linear_combination({a, b, c}, {ca, cb, cc}, nm, 0.0);
  const Vector ref =
      ca * a.to_dense(nm) + cb * b.to_dense(nm) + cc * c.to_dense(nm);
  CHECK((sum.to_dense(nm) - ref).norm() < 1e-10);
}

TEST_CASE("compress preserves the state and never inflates bonds") {
  const int n = 5, d = 2;
  const MpsState a = random_mps(81, n, d);
  const MpsState b = random_mps(82, n, d);
  const MpsState padded =
      linear_combination({a, b}, {cxd(1, 0), cxd(1e-14, 0)}, nm, 0.0);
  const MpsState tight = compress(padded, nm, 1e-10);
  CHECK((tight.to_dense(nm) - Vector(padded.to_dense(nm))).norm() < 1e-9);
  CHECK(tight.max_bond() <= padded.max_bond());
  // the tiny admixture is numerically invisible, so ranks return to a's
  CHECK(tight.max_bond() <= a.max_bond());
}

TEST_CASE("expectation values match dense quadratic forms") {
  const int n = 4, d = 2;
  const MpsState s = random_mps(91, n, d);
  std::vector<dense_ref::Mat> terms;
  std::vector<Matrix> lib_terms;
  for (int t = 0; t < n - 1; ++t) {
    dense_ref::Mat g = dense_ref::random_hermitian(400 + t, d * d);
    g = (g + dense_ref::Mat::Identity(4, 4) * 2.0) / 4.0;
    terms.push_back(g);
    lib_terms.push_back(g);
  }
  const LocalHamiltonian h(n, d, lib_terms);
  const dense_ref::Vec psi = s.to_dense(nm);
  const dense_ref::Mat hd = dense_ref::chain(terms, n, d);
  const double want = std::real(psi.dot(hd * psi));
  CHECK(std::abs(expectation(s, h) - want) < 1e-10);

  const std::vector<double> per = expectation_terms(s, h);
  double total = 0.0;
  for (int t = 0; t < n - 1; ++t) {
    const double one =
        std::real(psi.dot(dense_ref::embed(terms[t], n, d, t) * psi));
    CHECK(std::abs(per[t] - one) < 1e-10);
    total += per[t];
  }
  CHECK(std::abs(total - want) < 1e-10);
}

TEST_CASE("expectation refuses unnormalized states") {
  MpsState s = random_mps(97, 3, 2);
  s.scale(cxd(2.0, 0.0));
  const LocalHamiltonian h =
      LocalHamiltonian::build(ModelSpec{ModelKind::Tfim, 3, 2}).normalized();
  CHECK_THROWS_AS(expectation(s, h), std::invalid_argument);
}

TEST_CASE("cross term values match dense sandwiches") {
  const int n = 4, d = 2;
  const MpsState bra = random_mps(101, n, d);
  const MpsState ket = random_mps(102, n, d);
  const dense_ref::Mat g = dense_ref::random_matrix(103, d * d, d * d);
  for (int t = 0; t < n - 1; ++t) {
    const dense_ref::Vec vb = bra.to_dense(nm), vk = ket.to_dense(nm);
    const cxd want = vb.dot(dense_ref::embed(g, n, d, t) * vk);
    CHECK(std::abs(cross_term_value(bra, ket, t, g) - want) < 1e-10);
  }
}

TEST_CASE("cross reduced operators are partial traces of the outer product") {
  const int n = 5, d = 2;
  const MpsState bra = random_mps(111, n, d);
  const MpsState ket = random_mps(112, n, d);
  const dense_ref::Vec vb = bra.to_dense(nm), vk = ket.to_dense(nm);
  const dense_ref::Mat outer = vk * vb.adjoint();

  const Matrix last = cross_reduced_last_site(bra, ket);
  CHECK((last - dense_ref::ptrace_left(outer, outer.rows() / d, d)).norm() <
        1e-10);

  const Matrix tail2 = cross_reduced_tail(bra, ket, 2);
  CHECK((tail2 -
         dense_ref::ptrace_left(outer, outer.rows() / (d * d), d * d))
            .norm() < 1e-10);
}

TEST_CASE("json round trip preserves the state exactly") {
  const MpsState s = random_mps(121, 4, 2);
  const MpsState back = mps_from_json(mps_to_json(s));
  REQUIRE(back.n() == s.n());
  CHECK((back.to_dense(nm) - Vector(s.to_dense(nm))).norm() == 0.0);
}

TEST_CASE("product basis states hit the right dense coordinate") {
  const MpsState s = MpsState::product_basis_state(3, 2, {1, 0, 1});
  const Vector v = s.to_dense(nm);
  for (long long x = 0; x < 8; ++x)
    CHECK(std::abs(v(x) - cxd(x == 5 ? 1.0 : 0.0, 0.0)) < 1e-15);
}

TEST_CASE("operator splitting reassembles the gate with balanced factors") {
  const dense_ref::Mat g = dense_ref::random_hermitian(131, 4);
  const auto parts = operator_schmidt_split(g, 2, 2, nm);
  REQUIRE(!parts.empty());
  dense_ref::Mat sum = dense_ref::Mat::Zero(4, 4);
  for (const auto& [e, f] : parts) {
    sum += dense_ref::kron(e, f);
    CHECK(std::abs(e.norm() - f.norm()) < 1e-10);
  }
  CHECK((sum - g).norm() < 1e-10);
}

TEST_CASE("mpo application agrees with its dense form") {
  const int n = 4, d = 2;
  const dense_ref::Mat g = dense_ref::random_matrix(141, d * d, d * d);
  const MpoOperator op = MpoOperator::from_two_site_gate(n, d, 1, g, nm);
  const MpsState s = random_mps(142, n, d);
  const Vector via_mpo = op.apply(s, nm, 0.0).to_dense(nm);
  const Vector via_dense =
      Matrix(op.to_dense(nm)) * Vector(s.to_dense(nm));
  CHECK((via_mpo - via_dense).norm() < 1e-10);
  CHECK((Matrix(op.to_dense(nm)) -
         Matrix(dense_ref::embed(g, n, d, 1)))
            .norm() < 1e-10);
}
