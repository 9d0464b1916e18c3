#pragma once

// Independent dense reference used by the test suites.  Everything here is
// built directly on Eigen and its own RNG so it shares no code with the
// library paths it checks.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dense_ref {

using Cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Deterministic generator, deliberately distinct from the library's helpers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  double gauss() {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) *
           std::cos(6.283185307179586476925286766559 * v);
  }

 private:
  std::uint64_t state_;
};

// First factor most significant, matching site-0-major dense ordering.
inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Mat identity(Eigen::Index n) { return Mat::Identity(n, n); }

// Two-site gate on sites (t, t+1) of an n-site chain, identity elsewhere.
inline Mat embed(const Mat& gate, int n, int d, int t) {
  if (t < 0 || t > n - 2) throw std::invalid_argument("embed: bad site");
  Eigen::Index dl = 1, dr = 1;
  for (int k = 0; k < t; ++k) dl *= d;
  for (int k = t + 2; k < n; ++k) dr *= d;
  return kron(kron(identity(dl), gate), identity(dr));
}

inline Mat chain(const std::vector<Mat>& terms, int n, int d) {
  Eigen::Index dim = 1;
  for (int k = 0; k < n; ++k) dim *= d;
  Mat h = Mat::Zero(dim, dim);
  for (int t = 0; t < static_cast<int>(terms.size()); ++t)
    h += embed(terms[t], n, d, t);
  return h;
}

// Contracts raw per-site block lists (blocks[site][p] is left x right with
// unit boundary bonds) into the dense vector, site 0 most significant.
inline Vec contract_blocks(const std::vector<std::vector<Mat>>& blocks) {
  const int n = static_cast<int>(blocks.size());
  std::vector<int> phys(n);
  Eigen::Index dim = 1;
  for (int k = 0; k < n; ++k) {
    phys[k] = static_cast<int>(blocks[k].size());
    dim *= phys[k];
  }
  Vec out(dim);
  std::vector<int> idx(n, 0);
  for (Eigen::Index x = 0; x < dim; ++x) {
    Eigen::Index rem = x;
    for (int k = n - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(rem % phys[k]);
      rem /= phys[k];
    }
    Mat acc = blocks[0][idx[0]];
    for (int k = 1; k < n; ++k) acc = acc * blocks[k][idx[k]];
    out(x) = acc(0, 0);
  }
  return out;
}

inline Vec random_state(std::uint64_t seed, Eigen::Index dim) {
  Rng rng(seed);
  Vec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = Cx(rng.gauss(), rng.gauss());
  v /= v.norm();
  return v;
}

inline Mat random_matrix(std::uint64_t seed, Eigen::Index r, Eigen::Index c) {
  Rng rng(seed);
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = Cx(rng.gauss(), rng.gauss());
  return m;
}

inline Mat random_hermitian(std::uint64_t seed, Eigen::Index n) {
  const Mat m = random_matrix(seed, n, n);
  return (m + m.adjoint()) / 2.0;
}

// v(l * dr + r) -> element (l, r); left index most significant.
inline Mat reshape(const Vec& v, Eigen::Index dl, Eigen::Index dr) {
  if (v.size() != dl * dr) throw std::invalid_argument("reshape: size");
  Mat m(dl, dr);
  for (Eigen::Index l = 0; l < dl; ++l)
    for (Eigen::Index r = 0; r < dr; ++r) m(l, r) = v(l * dr + r);
  return m;
}

inline Vec flatten(const Mat& m) {
  Vec v(m.rows() * m.cols());
  for (Eigen::Index l = 0; l < m.rows(); ++l)
    for (Eigen::Index r = 0; r < m.cols(); ++r) v(l * m.cols() + r) = m(l, r);
  return v;
}

inline std::vector<double> schmidt_coefficients(const Vec& v, Eigen::Index dl,
                                                Eigen::Index dr) {
  Eigen::JacobiSVD<Mat> svd(reshape(v, dl, dr));
  std::vector<double> out(svd.singularValues().data(),
                          svd.singularValues().data() +
                              svd.singularValues().size());
  return out;
}

// Unnormalized rank truncation at the (dl, dr) split.
inline Vec keep_leading(const Vec& v, Eigen::Index dl, Eigen::Index dr,
                        int keep) {
  Eigen::JacobiSVD<Mat> svd(reshape(v, dl, dr),
                            Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd s = svd.singularValues();
  for (Eigen::Index i = keep; i < s.size(); ++i) s(i) = 0.0;
  const Mat cut = svd.matrixU() * s.cast<Cx>().asDiagonal() *
                  svd.matrixV().adjoint();
  return flatten(cut);
}

inline Mat ptrace_left(const Mat& rho, Eigen::Index dl, Eigen::Index dr) {
  Mat out = Mat::Zero(dr, dr);
  for (Eigen::Index l = 0; l < dl; ++l)
    for (Eigen::Index a = 0; a < dr; ++a)
      for (Eigen::Index b = 0; b < dr; ++b)
        out(a, b) += rho(l * dr + a, l * dr + b);
  return out;
}

inline Mat ptrace_right(const Mat& rho, Eigen::Index dl, Eigen::Index dr) {
  Mat out = Mat::Zero(dl, dl);
  for (Eigen::Index a = 0; a < dl; ++a)
    for (Eigen::Index b = 0; b < dl; ++b)
      for (Eigen::Index r = 0; r < dr; ++r)
        out(a, b) += rho(a * dr + r, b * dr + r);
  return out;
}

inline double trace_norm(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues().sum();
}

inline Mat matpow(const Mat& base, long long e) {
  Mat out = Mat::Identity(base.rows(), base.cols());
  for (long long i = 0; i < e; ++i) out = out * base;
  return out;
}

// Pauli and spin conveniences for building models by hand in tests.
inline Mat pauli_x() {
  Mat m(2, 2);
  m << Cx(0, 0), Cx(1, 0), Cx(1, 0), Cx(0, 0);
  return m;
}

inline Mat pauli_y() {
  Mat m(2, 2);
  m << Cx(0, 0), Cx(0, -1), Cx(0, 1), Cx(0, 0);
  return m;
}

inline Mat pauli_z() {
  Mat m(2, 2);
  m << Cx(1, 0), Cx(0, 0), Cx(0, 0), Cx(-1, 0);
  return m;
}

}  // namespace dense_ref
