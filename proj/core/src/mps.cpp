#include "gapped1d/mps.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace gapped1d {

namespace {

struct SvdResult {
  Matrix U;       // rows x k
  RVector sigma;  // k, descending
  Matrix V;       // cols x k;  M ~ U * diag(sigma) * V.adjoint()
};

// Thin SVD with a relative discard threshold and an optional per-bond
// fidelity budget (drop the tail while its norm stays below tol * total).
SvdResult truncated_svd(const Matrix& m, double rel_discard, double tol) {
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  const int full = static_cast<int>(s.size());
  int keep = 0;
  const double smax = full > 0 ? s(0) : 0.0;
  for (int i = 0; i < full; ++i)
    if (s(i) > rel_discard * smax) ++keep;
  if (keep == 0) keep = 1;  // zero matrix: keep one null direction
  if (tol > 0.0 && keep > 1) {
    double total_sq = s.squaredNorm();
    double budget = tol * tol * total_sq;
    double tail = 0.0;
    while (keep > 1) {
      double cand = tail + s(keep - 1) * s(keep - 1);
      if (cand > budget) break;
      tail = cand;
      --keep;
    }
  }
  SvdResult r;
  r.U = svd.matrixU().leftCols(keep);
  r.sigma = s.head(keep);
  r.V = svd.matrixV().leftCols(keep);
  return r;
}

// Thin QR: m = Q * R with Q having orthonormal columns.
void thin_qr(const Matrix& m, Matrix& q, Matrix& r) {
  const Eigen::Index k = std::min(m.rows(), m.cols());
  Eigen::HouseholderQR<Matrix> qr(m);
  q = qr.householderQ() * Matrix::Identity(m.rows(), k);
  r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
}

// m = L * Q with Q having orthonormal rows.
void thin_lq(const Matrix& m, Matrix& l, Matrix& q) {
  Matrix qt, rt;
  thin_qr(m.adjoint(), qt, rt);
  l = rt.adjoint();
  q = qt.adjoint();
}

}  // namespace

// ---------------------------------------------------------------------
// SiteTensor
// ---------------------------------------------------------------------

SiteTensor SiteTensor::zero(int l, int p, int r) {
  SiteTensor t;
  t.left = l;
  t.phys = p;
  t.right = r;
  t.blocks.assign(p, Matrix::Zero(l, r));
  return t;
}

Matrix SiteTensor::left_mat() const {
  Matrix m(static_cast<Eigen::Index>(left) * phys, right);
  for (int a = 0; a < left; ++a)
    for (int p = 0; p < phys; ++p) m.row(a * phys + p) = blocks[p].row(a);
  return m;
}

Matrix SiteTensor::right_mat() const {
  Matrix m(left, static_cast<Eigen::Index>(phys) * right);
  for (int p = 0; p < phys; ++p)
    for (int b = 0; b < right; ++b) m.col(p * right + b) = blocks[p].col(b);
  return m;
}

SiteTensor SiteTensor::from_left_mat(const Matrix& m, int l, int p, int r) {
  if (m.rows() != static_cast<Eigen::Index>(l) * p || m.cols() != r)
    throw std::invalid_argument("from_left_mat: shape mismatch");
  SiteTensor t = zero(l, p, r);
  for (int a = 0; a < l; ++a)
    for (int q = 0; q < p; ++q) t.blocks[q].row(a) = m.row(a * p + q);
  return t;
}

SiteTensor SiteTensor::from_right_mat(const Matrix& m, int l, int p, int r) {
  if (m.rows() != l || m.cols() != static_cast<Eigen::Index>(p) * r)
    throw std::invalid_argument("from_right_mat: shape mismatch");
  SiteTensor t = zero(l, p, r);
  for (int q = 0; q < p; ++q)
    for (int b = 0; b < r; ++b) t.blocks[q].col(b) = m.col(q * r + b);
  return t;
}

// ---------------------------------------------------------------------
// MpsState basics
// ---------------------------------------------------------------------

MpsState::MpsState(std::vector<SiteTensor> sites, int nominal_d)
    : sites_(std::move(sites)), d_(nominal_d) {
  if (sites_.empty()) throw std::invalid_argument("MpsState: no sites");
  if (sites_.front().left != 1 || sites_.back().right != 1)
    throw std::invalid_argument("MpsState: boundary bonds must be 1");
  for (std::size_t k = 0; k + 1 < sites_.size(); ++k)
    if (sites_[k].right != sites_[k + 1].left)
      throw std::invalid_argument("MpsState: bond chain mismatch");
  for (const auto& t : sites_) {
    if (t.phys < 1 || static_cast<int>(t.blocks.size()) != t.phys)
      throw std::invalid_argument("MpsState: bad physical dimension");
    for (const auto& b : t.blocks)
      if (b.rows() != t.left || b.cols() != t.right)
        throw std::invalid_argument("MpsState: block shape mismatch");
  }
}

int MpsState::bond_dim(int cut) const {
  if (cut < 0 || cut > n()) throw std::out_of_range("bond_dim: bad cut");
  if (cut == 0) return sites_.front().left;
  return sites_[cut - 1].right;
}

int MpsState::max_bond() const {
  int m = 1;
  for (int c = 0; c <= n(); ++c) m = std::max(m, bond_dim(c));
  return m;
}

long long MpsState::dense_dim() const {
  long long dim = 1;
  for (const auto& t : sites_) {
    if (dim > (1LL << 62) / t.phys) throw std::overflow_error("dense_dim");
    dim *= t.phys;
  }
  return dim;
}

void MpsState::scale(cxd factor) {
  for (auto& b : sites_.back().blocks) b *= factor;
}

MpsState MpsState::from_dense(const Vector& psi, int n, int d,
                              const NumericsConfig& nm) {
  if (n < 1 || d < 2) throw std::invalid_argument("from_dense: bad n or d");
  const long long dim = pow_ll(d, n);
  if (psi.size() != dim) throw std::invalid_argument("from_dense: size mismatch");
  if (dim > nm.dense_cap_dim)
    throw std::invalid_argument("from_dense: dimension exceeds dense cap");

  std::vector<SiteTensor> sites;
  sites.reserve(n);
  // carry(b, j) holds the not-yet-factored tail, j a row-major multi-index
  Matrix carry(1, dim);
  for (long long i = 0; i < dim; ++i) carry(0, i) = psi(i);
  for (int k = 0; k < n - 1; ++k) {
    const Eigen::Index B = carry.rows();
    const Eigen::Index cols = carry.cols() / d;
    Matrix m(B * d, cols);
    for (Eigen::Index b = 0; b < B; ++b)
      for (int p = 0; p < d; ++p)
        m.row(b * d + p) = carry.row(b).segment(p * cols, cols);
    SvdResult svd = truncated_svd(m, nm.svd_discard, 0.0);
    sites.push_back(SiteTensor::from_left_mat(
        svd.U, static_cast<int>(B), d, static_cast<int>(svd.sigma.size())));
    carry = svd.sigma.cast<cxd>().asDiagonal() * svd.V.adjoint();
  }
  SiteTensor last = SiteTensor::zero(static_cast<int>(carry.rows()), d, 1);
  for (int p = 0; p < d; ++p) last.blocks[p] = carry.col(p);
  sites.push_back(std::move(last));
  return MpsState(std::move(sites), d);
}

MpsState MpsState::product_basis_state(int n, int d,
                                       const std::vector<int>& levels) {
  if (static_cast<int>(levels.size()) != n)
    throw std::invalid_argument("product_basis_state: need one level per site");
  std::vector<SiteTensor> sites;
  for (int k = 0; k < n; ++k) {
    if (levels[k] < 0 || levels[k] >= d)
      throw std::invalid_argument("product_basis_state: level out of range");
    SiteTensor t = SiteTensor::zero(1, d, 1);
    t.blocks[levels[k]](0, 0) = 1.0;
    sites.push_back(std::move(t));
  }
  return MpsState(std::move(sites), d);
}

Vector MpsState::to_dense(const NumericsConfig& nm) const {
  const long long dim = dense_dim();
  if (dim > nm.dense_cap_dim)
    throw std::invalid_argument("to_dense: dimension exceeds dense cap");
  Matrix L = Matrix::Ones(1, 1);
  for (const auto& t : sites_) {
    Matrix next(L.rows() * t.phys, t.right);
    for (int p = 0; p < t.phys; ++p) {
      Matrix tmp = L * t.blocks[p];
      for (Eigen::Index i = 0; i < L.rows(); ++i)
        next.row(i * t.phys + p) = tmp.row(i);
    }
    L = std::move(next);
  }
  return L.col(0);
}

// ---------------------------------------------------------------------
// inner products and norms
// ---------------------------------------------------------------------

cxd inner(const MpsState& a, const MpsState& b) {
  if (a.n() != b.n()) throw std::invalid_argument("inner: site count mismatch");
  Matrix e = Matrix::Ones(1, 1);
  for (int k = 0; k < a.n(); ++k) {
    const SiteTensor& ta = a.site(k);
    const SiteTensor& tb = b.site(k);
    if (ta.phys != tb.phys)
      throw std::invalid_argument("inner: physical dimension mismatch");
    Matrix next = Matrix::Zero(ta.right, tb.right);
    for (int p = 0; p < ta.phys; ++p)
      next += ta.blocks[p].adjoint() * e * tb.blocks[p];
    e = std::move(next);
  }
  return e(0, 0);
}

double norm(const MpsState& s) {
  double v = std::real(inner(s, s));
  return std::sqrt(std::max(0.0, v));
}

MpsState normalized(const MpsState& s, const NumericsConfig&) {
  const double nn = norm(s);
  if (nn < 1e-300) throw std::runtime_error("normalized: zero state");
  MpsState out = s;
  out.scale(cxd(1.0 / nn, 0.0));
  return out;
}

// ---------------------------------------------------------------------
// canonical forms
// ---------------------------------------------------------------------

namespace {

struct MixedForm {
  std::vector<SiteTensor> left;   // left-canonical, sites [0, cut)
  Matrix center;                  // D_l x D_r
  std::vector<SiteTensor> right;  // right-canonical, sites [cut, n)
};

MixedForm mixed_canonical(const MpsState& s, int cut) {
  const int n = s.n();
  if (cut < 0 || cut > n) throw std::out_of_range("mixed_canonical: bad cut");
  MixedForm f;
  Matrix carry_r = Matrix::Ones(1, 1);
  for (int k = 0; k < cut; ++k) {
    SiteTensor t = s.site(k);
    for (auto& b : t.blocks) b = carry_r * b;
    t.left = static_cast<int>(carry_r.rows());
    Matrix q, r;
    thin_qr(t.left_mat(), q, r);
    f.left.push_back(SiteTensor::from_left_mat(q, t.left, t.phys,
                                               static_cast<int>(q.cols())));
    carry_r = std::move(r);
  }
  Matrix carry_l = Matrix::Ones(1, 1);
  for (int k = n - 1; k >= cut; --k) {
    SiteTensor t = s.site(k);
    for (auto& b : t.blocks) b = b * carry_l;
    t.right = static_cast<int>(carry_l.cols());
    Matrix l, q;
    thin_lq(t.right_mat(), l, q);
    f.right.insert(f.right.begin(),
                   SiteTensor::from_right_mat(q, static_cast<int>(q.rows()),
                                              t.phys, t.right));
    carry_l = std::move(l);
  }
  f.center = carry_r * carry_l;
  return f;
}

}  // namespace

std::vector<int> schmidt_ranks(const MpsState& s, const NumericsConfig& nm) {
  const int n = s.n();
  std::vector<int> ranks(std::max(0, n - 1), 1);
  if (n < 2) return ranks;
  // left QR sweep, then a right SVD sweep recording kept ranks
  std::vector<SiteTensor> sites;
  sites.reserve(n);
  Matrix carry = Matrix::Ones(1, 1);
  for (int k = 0; k < n; ++k) {
    SiteTensor t = s.site(k);
    for (auto& b : t.blocks) b = carry * b;
    t.left = static_cast<int>(carry.rows());
    if (k == n - 1) {
      sites.push_back(std::move(t));
      break;
    }
    Matrix q, r;
    thin_qr(t.left_mat(), q, r);
    sites.push_back(SiteTensor::from_left_mat(q, t.left, t.phys,
                                              static_cast<int>(q.cols())));
    carry = std::move(r);
  }
  Matrix carry_l;
  for (int k = n - 1; k >= 1; --k) {
    SiteTensor& t = sites[k];
    SvdResult svd = truncated_svd(t.right_mat(), nm.svd_discard, 0.0);
    ranks[k - 1] = static_cast<int>(svd.sigma.size());
    t = SiteTensor::from_right_mat(svd.V.adjoint(), ranks[k - 1], t.phys,
                                   t.right);
    carry_l = svd.U * svd.sigma.cast<cxd>().asDiagonal();
    SiteTensor& prev = sites[k - 1];
    for (auto& b : prev.blocks) b = b * carry_l;
    prev.right = ranks[k - 1];
  }
  return ranks;
}

SchmidtData schmidt(const MpsState& s, int cut, const NumericsConfig& nm) {
  const int n = s.n();
  if (cut < 1 || cut > n - 1) throw std::out_of_range("schmidt: bad cut");
  MixedForm f = mixed_canonical(s, cut);
  SvdResult svd = truncated_svd(f.center, nm.svd_discard, 0.0);
  const int rank = static_cast<int>(svd.sigma.size());

  SchmidtData out;
  out.cut = cut;
  out.coefficients = svd.sigma;

  std::vector<SiteTensor> lf = f.left;
  {
    SiteTensor& t = lf.back();
    for (auto& b : t.blocks) b = b * svd.U;
    t.right = rank;
    SiteTensor sel = SiteTensor::zero(rank, rank, 1);
    for (int j = 0; j < rank; ++j) sel.blocks[j](j, 0) = 1.0;
    lf.push_back(std::move(sel));
  }
  out.left_family = MpsState(std::move(lf), s.d());

  std::vector<SiteTensor> rf = f.right;
  {
    SiteTensor& t = rf.front();
    Matrix vadj = svd.V.adjoint();
    for (auto& b : t.blocks) b = vadj * b;
    t.left = rank;
    SiteTensor sel = SiteTensor::zero(1, rank, rank);
    for (int j = 0; j < rank; ++j) sel.blocks[j](0, j) = 1.0;
    rf.insert(rf.begin(), std::move(sel));
  }
  out.right_family = MpsState(std::move(rf), s.d());
  return out;
}

MpsState SchmidtData::left_vector(int j) const {
  if (j < 0 || j >= rank()) throw std::out_of_range("left_vector");
  std::vector<SiteTensor> sites;
  const int m = left_family.n() - 1;  // drop the selector site
  for (int k = 0; k < m; ++k) sites.push_back(left_family.site(k));
  SiteTensor& t = sites.back();
  SiteTensor cutcol = SiteTensor::zero(t.left, t.phys, 1);
  for (int p = 0; p < t.phys; ++p) cutcol.blocks[p] = t.blocks[p].col(j);
  t = std::move(cutcol);
  return MpsState(std::move(sites), left_family.d());
}

MpsState SchmidtData::right_vector(int j) const {
  if (j < 0 || j >= rank()) throw std::out_of_range("right_vector");
  std::vector<SiteTensor> sites;
  const int m = right_family.n();
  for (int k = 1; k < m; ++k) sites.push_back(right_family.site(k));
  SiteTensor& t = sites.front();
  SiteTensor cutrow = SiteTensor::zero(1, t.phys, t.right);
  for (int p = 0; p < t.phys; ++p) cutrow.blocks[p] = t.blocks[p].row(j);
  t = std::move(cutrow);
  return MpsState(std::move(sites), right_family.d());
}

MpsState trim(const MpsState& s, int cut, int D, const NumericsConfig& nm) {
  const int n = s.n();
  if (cut < 1 || cut > n - 1) throw std::out_of_range("trim: bad cut");
  if (D < 1) throw std::invalid_argument("trim: D must be >= 1");
  MixedForm f = mixed_canonical(s, cut);
  SvdResult svd = truncated_svd(f.center, nm.svd_discard, 0.0);
  const int keep = std::min<int>(D, static_cast<int>(svd.sigma.size()));
  // absorb the kept factors on each side so the bond dimension itself
  // drops to keep, not just the numerical rank
  const Matrix push_l =
      svd.U.leftCols(keep) * svd.sigma.head(keep).cast<cxd>().asDiagonal();
  const Matrix push_r = svd.V.leftCols(keep).adjoint();
  std::vector<SiteTensor> sites = f.left;
  SiteTensor& lt = sites.back();
  for (auto& b : lt.blocks) b = b * push_l;
  lt.right = keep;
  std::vector<SiteTensor> right = f.right;
  SiteTensor& rt = right.front();
  for (auto& b : rt.blocks) b = push_r * b;
  rt.left = keep;
  sites.insert(sites.end(), right.begin(), right.end());
  return MpsState(std::move(sites), s.d());
}

MpsState trim_all(const MpsState& s, int D, const NumericsConfig& nm) {
  MpsState out = s;
  for (int cut = 1; cut <= s.n() - 1; ++cut) out = trim(out, cut, D, nm);
  return out;
}

// ---------------------------------------------------------------------
// operator application and compression
// ---------------------------------------------------------------------

MpsState apply_one_site_op(const MpsState& s, int t, const Matrix& op) {
  const SiteTensor& st = s.site(t);
  if (op.rows() != st.phys || op.cols() != st.phys)
    throw std::invalid_argument("apply_one_site_op: shape mismatch");
  MpsState out = s;
  SiteTensor& tt = out.site(t);
  std::vector<Matrix> nb(tt.phys, Matrix::Zero(tt.left, tt.right));
  for (int p = 0; p < tt.phys; ++p)
    for (int q = 0; q < tt.phys; ++q)
      if (op(p, q) != cxd(0, 0)) nb[p] += op(p, q) * tt.blocks[q];
  tt.blocks = std::move(nb);
  return out;
}

MpsState apply_two_site_op(const MpsState& s, int t, const Matrix& gate,
                           const NumericsConfig& nm, double compress_tol) {
  const int n = s.n();
  if (t < 0 || t > n - 2) throw std::out_of_range("apply_two_site_op: bad site");
  const int P1 = s.phys_dim(t), P2 = s.phys_dim(t + 1);
  if (gate.rows() != P1 * P2 || gate.cols() != P1 * P2)
    throw std::invalid_argument("apply_two_site_op: gate shape mismatch");

  std::vector<SiteTensor> sites(s.n());
  for (int k = 0; k < n; ++k) sites[k] = s.site(k);

  // orthogonalize the environment so the bond SVD is globally valid
  Matrix carry = Matrix::Ones(1, 1);
  for (int k = 0; k < t; ++k) {
    SiteTensor& tk = sites[k];
    for (auto& b : tk.blocks) b = carry * b;
    tk.left = static_cast<int>(carry.rows());
    Matrix q, r;
    thin_qr(tk.left_mat(), q, r);
    tk = SiteTensor::from_left_mat(q, tk.left, tk.phys,
                                   static_cast<int>(q.cols()));
    carry = std::move(r);
  }
  {
    SiteTensor& tk = sites[t];
    for (auto& b : tk.blocks) b = carry * b;
    tk.left = static_cast<int>(carry.rows());
  }
  Matrix carry_l = Matrix::Ones(1, 1);
  for (int k = n - 1; k > t + 1; --k) {
    SiteTensor& tk = sites[k];
    for (auto& b : tk.blocks) b = b * carry_l;
    tk.right = static_cast<int>(carry_l.cols());
    Matrix l, q;
    thin_lq(tk.right_mat(), l, q);
    tk = SiteTensor::from_right_mat(q, static_cast<int>(q.rows()), tk.phys,
                                    tk.right);
    carry_l = std::move(l);
  }
  {
    SiteTensor& tk = sites[t + 1];
    for (auto& b : tk.blocks) b = b * carry_l;
    tk.right = static_cast<int>(carry_l.cols());
  }

  const int l = sites[t].left, r = sites[t + 1].right;
  std::vector<Matrix> theta(P1 * P2);
  for (int p1 = 0; p1 < P1; ++p1)
    for (int p2 = 0; p2 < P2; ++p2)
      theta[p1 * P2 + p2] = sites[t].blocks[p1] * sites[t + 1].blocks[p2];
  std::vector<Matrix> mixed(P1 * P2, Matrix::Zero(l, r));
  for (int out = 0; out < P1 * P2; ++out)
    for (int in = 0; in < P1 * P2; ++in)
      if (gate(out, in) != cxd(0, 0)) mixed[out] += gate(out, in) * theta[in];

  Matrix m(static_cast<Eigen::Index>(l) * P1, static_cast<Eigen::Index>(P2) * r);
  for (int a = 0; a < l; ++a)
    for (int p1 = 0; p1 < P1; ++p1)
      for (int p2 = 0; p2 < P2; ++p2)
        for (int b = 0; b < r; ++b)
          m(a * P1 + p1, p2 * r + b) = mixed[p1 * P2 + p2](a, b);

  SvdResult svd = truncated_svd(m, nm.svd_discard, compress_tol);
  const int k = static_cast<int>(svd.sigma.size());
  sites[t] = SiteTensor::from_left_mat(svd.U, l, P1, k);
  Matrix sv = svd.sigma.cast<cxd>().asDiagonal() * svd.V.adjoint();
  sites[t + 1] = SiteTensor::from_right_mat(sv, k, P2, r);
  return MpsState(std::move(sites), s.d());
}

MpsState compress(const MpsState& s, const NumericsConfig& nm, double tol) {
  const int n = s.n();
  if (n == 1) return s;
  std::vector<SiteTensor> sites(n);
  for (int k = 0; k < n; ++k) sites[k] = s.site(k);

  Matrix carry = Matrix::Ones(1, 1);
  for (int k = 0; k < n; ++k) {
    SiteTensor& t = sites[k];
    for (auto& b : t.blocks) b = carry * b;
    t.left = static_cast<int>(carry.rows());
    if (k == n - 1) break;
    Matrix q, r;
    thin_qr(t.left_mat(), q, r);
    t = SiteTensor::from_left_mat(q, t.left, t.phys, static_cast<int>(q.cols()));
    carry = std::move(r);
  }
  for (int k = n - 1; k >= 1; --k) {
    SiteTensor& t = sites[k];
    SvdResult svd = truncated_svd(t.right_mat(), nm.svd_discard, tol);
    const int keep = static_cast<int>(svd.sigma.size());
    t = SiteTensor::from_right_mat(svd.V.adjoint(), keep, t.phys, t.right);
    Matrix push = svd.U * svd.sigma.cast<cxd>().asDiagonal();
    SiteTensor& prev = sites[k - 1];
    for (auto& b : prev.blocks) b = b * push;
    prev.right = keep;
  }
  // restore the default left-canonical form (ranks unchanged by QR)
  carry = Matrix::Ones(1, 1);
  for (int k = 0; k < n; ++k) {
    SiteTensor& t = sites[k];
    for (auto& b : t.blocks) b = carry * b;
    t.left = static_cast<int>(carry.rows());
    if (k == n - 1) break;
    Matrix q, r;
    thin_qr(t.left_mat(), q, r);
    t = SiteTensor::from_left_mat(q, t.left, t.phys, static_cast<int>(q.cols()));
    carry = std::move(r);
  }
  return MpsState(std::move(sites), s.d());
}

// ---------------------------------------------------------------------
// expectations
// ---------------------------------------------------------------------

namespace {

// E environments between a bra and a ket chain: e[k] covers sites [0, k),
// indexed (bra bond, ket bond).
std::vector<Matrix> left_envs(const MpsState& bra, const MpsState& ket) {
  std::vector<Matrix> e(bra.n() + 1);
  e[0] = Matrix::Ones(1, 1);
  for (int k = 0; k < bra.n(); ++k) {
    const SiteTensor& tb = bra.site(k);
    const SiteTensor& tk = ket.site(k);
    Matrix next = Matrix::Zero(tb.right, tk.right);
    for (int p = 0; p < tb.phys; ++p)
      next += tb.blocks[p].adjoint() * e[k] * tk.blocks[p];
    e[k + 1] = std::move(next);
  }
  return e;
}

// F environments: f[k] covers sites [k, n), indexed (ket bond, bra bond).
std::vector<Matrix> right_envs(const MpsState& bra, const MpsState& ket) {
  const int n = bra.n();
  std::vector<Matrix> f(n + 1);
  f[n] = Matrix::Ones(1, 1);
  for (int k = n - 1; k >= 0; --k) {
    const SiteTensor& tb = bra.site(k);
    const SiteTensor& tk = ket.site(k);
    Matrix next = Matrix::Zero(tk.left, tb.left);
    for (int p = 0; p < tb.phys; ++p)
      next += tk.blocks[p] * f[k + 1] * tb.blocks[p].adjoint();
    f[k] = std::move(next);
  }
  return f;
}

cxd term_value_with_envs(const MpsState& bra, const MpsState& ket, int t,
                         const Matrix& gate, const Matrix& e, const Matrix& f) {
  const int P1 = bra.phys_dim(t), P2 = bra.phys_dim(t + 1);
  std::vector<Matrix> theta_k(P1 * P2), theta_b(P1 * P2);
  for (int p1 = 0; p1 < P1; ++p1)
    for (int p2 = 0; p2 < P2; ++p2) {
      theta_k[p1 * P2 + p2] = ket.site(t).blocks[p1] * ket.site(t + 1).blocks[p2];
      theta_b[p1 * P2 + p2] = bra.site(t).blocks[p1] * bra.site(t + 1).blocks[p2];
    }
  cxd val(0, 0);
  for (int out = 0; out < P1 * P2; ++out)
    for (int in = 0; in < P1 * P2; ++in) {
      if (gate(out, in) == cxd(0, 0)) continue;
      val += gate(out, in) *
             (theta_b[out].adjoint() * e * theta_k[in] * f).trace();
    }
  return val;
}

}  // namespace

cxd cross_term_value(const MpsState& bra, const MpsState& ket, int t,
                     const Matrix& gate) {
  if (bra.n() != ket.n()) throw std::invalid_argument("cross_term_value: n");
  auto e = left_envs(bra, ket);
  auto f = right_envs(bra, ket);
  return term_value_with_envs(bra, ket, t, gate, e[t], f[t + 2]);
}

std::vector<double> expectation_terms(const MpsState& s,
                                      const LocalHamiltonian& h) {
  if (s.n() != h.n()) throw std::invalid_argument("expectation: n mismatch");
  auto e = left_envs(s, s);
  auto f = right_envs(s, s);
  std::vector<double> vals(h.term_count());
  for (int t = 0; t < h.term_count(); ++t)
    vals[t] = std::real(term_value_with_envs(s, s, t, h.term(t), e[t], f[t + 2]));
  return vals;
}

double expectation(const MpsState& s, const LocalHamiltonian& h) {
  // Contract is norm 1 to 1e-8; enforcement is looser so accumulated
  // compression drift does not reject honest states.
  if (std::abs(norm(s) - 1.0) > 1e-6)
    throw std::invalid_argument("expectation: state is not normalized");
  double total = 0.0;
  for (double v : expectation_terms(s, h)) total += v;
  return total;
}

Matrix cross_reduced_last_site(const MpsState& bra, const MpsState& ket) {
  if (bra.n() != ket.n())
    throw std::invalid_argument("cross_reduced_last_site: n mismatch");
  const int n = bra.n();
  Matrix e = Matrix::Ones(1, 1);
  for (int k = 0; k < n - 1; ++k) {
    const SiteTensor& tb = bra.site(k);
    const SiteTensor& tk = ket.site(k);
    Matrix next = Matrix::Zero(tb.right, tk.right);
    for (int p = 0; p < tb.phys; ++p)
      next += tb.blocks[p].adjoint() * e * tk.blocks[p];
    e = std::move(next);
  }
  const SiteTensor& lb = bra.site(n - 1);
  const SiteTensor& lk = ket.site(n - 1);
  Matrix out(lk.phys, lb.phys);
  for (int p = 0; p < lk.phys; ++p)
    for (int q = 0; q < lb.phys; ++q)
      out(p, q) = (lb.blocks[q].adjoint() * e * lk.blocks[p])(0, 0);
  return out;
}

Matrix cross_reduced_tail(const MpsState& bra, const MpsState& ket,
                          int tail_sites) {
  if (bra.n() != ket.n())
    throw std::invalid_argument("cross_reduced_tail: n mismatch");
  const int n = bra.n();
  if (tail_sites < 1 || tail_sites > n)
    throw std::invalid_argument("cross_reduced_tail: tail size");
  const int head = n - tail_sites;
  Matrix e = Matrix::Ones(1, 1);
  for (int k = 0; k < head; ++k) {
    const SiteTensor& tb = bra.site(k);
    const SiteTensor& tk = ket.site(k);
    if (tb.phys != tk.phys)
      throw std::invalid_argument("cross_reduced_tail: phys dim mismatch");
    Matrix next = Matrix::Zero(tb.right, tk.right);
    for (int p = 0; p < tb.phys; ++p)
      next += tb.blocks[p].adjoint() * e * tk.blocks[p];
    e = std::move(next);
  }
  // Column vector of the tail for every dense tail index, earliest tail
  // site most significant.
  auto tail_columns = [&](const MpsState& s) {
    std::vector<Matrix> cur;
    cur.push_back(Matrix::Identity(s.site(head).left, s.site(head).left));
    for (int k = head; k < n; ++k) {
      std::vector<Matrix> next;
      next.reserve(cur.size() * s.phys_dim(k));
      for (const Matrix& m : cur)
        for (int p = 0; p < s.phys_dim(k); ++p)
          next.push_back(m * s.site(k).blocks[p]);
      cur = std::move(next);
    }
    return cur;
  };
  const auto tk = tail_columns(ket);
  const auto tb = tail_columns(bra);
  std::vector<Matrix> pushed(tk.size());
  for (std::size_t x = 0; x < tk.size(); ++x) pushed[x] = e * tk[x];
  Matrix out(static_cast<long>(tk.size()), static_cast<long>(tb.size()));
  for (std::size_t x = 0; x < tk.size(); ++x)
    for (std::size_t y = 0; y < tb.size(); ++y)
      out(static_cast<long>(x), static_cast<long>(y)) =
          (tb[y].adjoint() * pushed[x])(0, 0);
  return out;
}

// ---------------------------------------------------------------------
// linear combinations
// ---------------------------------------------------------------------

MpsState linear_combination(const std::vector<MpsState>& states,
                            const std::vector<cxd>& coeffs,
                            const NumericsConfig& nm, double compress_tol) {
  if (states.empty()) throw std::invalid_argument("linear_combination: empty");
  if (states.size() != coeffs.size())
    throw std::invalid_argument("linear_combination: coefficient count");
  const int n = states.front().n();
  const int d = states.front().d();
  for (const auto& s : states) {
    if (s.n() != n || s.d() != d)
      throw std::invalid_argument("linear_combination: shape mismatch");
    for (int k = 0; k < n; ++k)
      if (s.phys_dim(k) != states.front().phys_dim(k))
        throw std::invalid_argument("linear_combination: phys dim mismatch");
  }
  if (states.size() == 1) {
    MpsState out = states.front();
    out.scale(coeffs.front());
    return compress(out, nm, compress_tol);
  }
  if (n == 1) {
    SiteTensor t = SiteTensor::zero(1, states.front().phys_dim(0), 1);
    for (std::size_t i = 0; i < states.size(); ++i)
      for (int p = 0; p < t.phys; ++p)
        t.blocks[p] += coeffs[i] * states[i].site(0).blocks[p];
    return MpsState({t}, d);
  }

  std::vector<SiteTensor> sites;
  for (int k = 0; k < n; ++k) {
    const int P = states.front().phys_dim(k);
    int lsum = 0, rsum = 0;
    for (const auto& s : states) {
      lsum += s.site(k).left;
      rsum += s.site(k).right;
    }
    if (k == 0) {
      SiteTensor t = SiteTensor::zero(1, P, rsum);
      int off = 0;
      for (std::size_t i = 0; i < states.size(); ++i) {
        const SiteTensor& src = states[i].site(k);
        for (int p = 0; p < P; ++p)
          t.blocks[p].block(0, off, 1, src.right) = coeffs[i] * src.blocks[p];
        off += src.right;
      }
      sites.push_back(std::move(t));
    } else if (k == n - 1) {
      SiteTensor t = SiteTensor::zero(lsum, P, 1);
      int off = 0;
      for (const auto& s : states) {
        const SiteTensor& src = s.site(k);
        for (int p = 0; p < P; ++p)
          t.blocks[p].block(off, 0, src.left, 1) = src.blocks[p];
        off += src.left;
      }
      sites.push_back(std::move(t));
    } else {
      SiteTensor t = SiteTensor::zero(lsum, P, rsum);
      int loff = 0, roff = 0;
      for (const auto& s : states) {
        const SiteTensor& src = s.site(k);
        for (int p = 0; p < P; ++p)
          t.blocks[p].block(loff, roff, src.left, src.right) = src.blocks[p];
        loff += src.left;
        roff += src.right;
      }
      sites.push_back(std::move(t));
    }
  }
  return compress(MpsState(std::move(sites), d), nm, compress_tol);
}

// ---------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------

nlohmann::json mps_to_json(const MpsState& s) {
  nlohmann::json j;
  j["n"] = s.n();
  j["d"] = s.d();
  nlohmann::json tensors = nlohmann::json::array();
  for (int k = 0; k < s.n(); ++k) {
    const SiteTensor& t = s.site(k);
    nlohmann::json tj;
    tj["shape"] = {t.left, t.phys, t.right};
    std::vector<double> data;
    data.reserve(2LL * t.left * t.phys * t.right);
    for (int a = 0; a < t.left; ++a)
      for (int p = 0; p < t.phys; ++p)
        for (int b = 0; b < t.right; ++b) {
          data.push_back(t.blocks[p](a, b).real());
          data.push_back(t.blocks[p](a, b).imag());
        }
    tj["data"] = data;
    tensors.push_back(std::move(tj));
  }
  j["tensors"] = std::move(tensors);
  return j;
}

MpsState mps_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const int d = j.at("d").get<int>();
  const auto& tensors = j.at("tensors");
  if (static_cast<int>(tensors.size()) != n)
    throw std::invalid_argument("mps_from_json: tensor count mismatch");
  std::vector<SiteTensor> sites;
  for (const auto& tj : tensors) {
    const auto shape = tj.at("shape").get<std::vector<int>>();
    if (shape.size() != 3) throw std::invalid_argument("mps_from_json: shape");
    SiteTensor t = SiteTensor::zero(shape[0], shape[1], shape[2]);
    const auto data = tj.at("data").get<std::vector<double>>();
    if (static_cast<long long>(data.size()) !=
        2LL * shape[0] * shape[1] * shape[2])
      throw std::invalid_argument("mps_from_json: data size mismatch");
    std::size_t i = 0;
    for (int a = 0; a < t.left; ++a)
      for (int p = 0; p < t.phys; ++p)
        for (int b = 0; b < t.right; ++b) {
          t.blocks[p](a, b) = cxd(data[i], data[i + 1]);
          i += 2;
        }
    sites.push_back(std::move(t));
  }
  return MpsState(std::move(sites), d);
}

// ---------------------------------------------------------------------
// MPO
// ---------------------------------------------------------------------

MpoOperator::MpoOperator(std::vector<MpoSiteTensor> sites, int nominal_d)
    : sites_(std::move(sites)), d_(nominal_d) {
  if (sites_.empty()) throw std::invalid_argument("MpoOperator: no sites");
  if (sites_.front().left != 1 || sites_.back().right != 1)
    throw std::invalid_argument("MpoOperator: boundary bonds must be 1");
  for (std::size_t k = 0; k + 1 < sites_.size(); ++k)
    if (sites_[k].right != sites_[k + 1].left)
      throw std::invalid_argument("MpoOperator: bond chain mismatch");
}

MpoOperator MpoOperator::identity(int n, int d) {
  std::vector<MpoSiteTensor> sites(n);
  for (auto& t : sites) {
    t.left = t.right = 1;
    t.phys = d;
    t.w.assign(d, std::vector<Matrix>(d, Matrix::Zero(1, 1)));
    for (int p = 0; p < d; ++p) t.w[p][p](0, 0) = 1.0;
  }
  return MpoOperator(std::move(sites), d);
}

MpoOperator MpoOperator::from_two_site_gate(int n, int d, int t,
                                            const Matrix& gate,
                                            const NumericsConfig& nm) {
  if (t < 0 || t > n - 2)
    throw std::out_of_range("MpoOperator::from_two_site_gate: bad site");
  auto factors = operator_schmidt_split(gate, d, d, nm);
  const int R = static_cast<int>(factors.size());
  MpoOperator out = identity(n, d);
  MpoSiteTensor a;
  a.left = 1;
  a.right = R;
  a.phys = d;
  a.w.assign(d, std::vector<Matrix>(d, Matrix::Zero(1, R)));
  MpoSiteTensor b;
  b.left = R;
  b.right = 1;
  b.phys = d;
  b.w.assign(d, std::vector<Matrix>(d, Matrix::Zero(R, 1)));
  for (int k = 0; k < R; ++k)
    for (int p = 0; p < d; ++p)
      for (int q = 0; q < d; ++q) {
        a.w[p][q](0, k) = factors[k].first(p, q);
        b.w[p][q](k, 0) = factors[k].second(p, q);
      }
  out.sites_[t] = std::move(a);
  out.sites_[t + 1] = std::move(b);
  return out;
}

MpsState MpoOperator::apply(const MpsState& s, const NumericsConfig& nm,
                            double compress_tol) const {
  if (s.n() != n()) throw std::invalid_argument("MpoOperator::apply: n");
  std::vector<SiteTensor> sites;
  for (int k = 0; k < n(); ++k) {
    const MpoSiteTensor& w = sites_[k];
    const SiteTensor& t = s.site(k);
    if (t.phys != w.phys)
      throw std::invalid_argument("MpoOperator::apply: phys mismatch");
    SiteTensor nt = SiteTensor::zero(w.left * t.left, w.phys, w.right * t.right);
    for (int pout = 0; pout < w.phys; ++pout)
      for (int pin = 0; pin < w.phys; ++pin) {
        const Matrix& wm = w.w[pout][pin];
        if (wm.cwiseAbs().maxCoeff() == 0.0) continue;
        nt.blocks[pout] += kron(wm, t.blocks[pin]);
      }
    sites.push_back(std::move(nt));
  }
  return compress(MpsState(std::move(sites), s.d()), nm, compress_tol);
}

Matrix MpoOperator::to_dense(const NumericsConfig& nm) const {
  long long dim = 1;
  for (const auto& t : sites_) dim *= t.phys;
  if (dim > nm.dense_cap_dim)
    throw std::invalid_argument("MpoOperator::to_dense: exceeds dense cap");
  std::vector<Matrix> carry{Matrix::Ones(1, 1)};
  long long cur = 1;
  for (const auto& w : sites_) {
    std::vector<Matrix> next(w.right,
                             Matrix::Zero(cur * w.phys, cur * w.phys));
    for (int b = 0; b < w.left; ++b)
      for (int bp = 0; bp < w.right; ++bp)
        for (int pout = 0; pout < w.phys; ++pout)
          for (int pin = 0; pin < w.phys; ++pin) {
            const cxd c = w.w[pout][pin](b, bp);
            if (c == cxd(0, 0)) continue;
            for (long long i = 0; i < cur; ++i)
              for (long long jj = 0; jj < cur; ++jj) {
                const cxd base = carry[b](i, jj);
                if (base == cxd(0, 0)) continue;
                next[bp](i * w.phys + pout, jj * w.phys + pin) += base * c;
              }
          }
    carry = std::move(next);
    cur *= w.phys;
  }
  return carry[0];
}

std::vector<std::pair<Matrix, Matrix>> operator_schmidt_split(
    const Matrix& gate, int d1, int d2, const NumericsConfig& nm) {
  if (gate.rows() != d1 * d2 || gate.cols() != d1 * d2)
    throw std::invalid_argument("operator_schmidt_split: shape mismatch");
  Matrix g(static_cast<Eigen::Index>(d1) * d1, static_cast<Eigen::Index>(d2) * d2);
  for (int p1 = 0; p1 < d1; ++p1)
    for (int q1 = 0; q1 < d1; ++q1)
      for (int p2 = 0; p2 < d2; ++p2)
        for (int q2 = 0; q2 < d2; ++q2)
          g(p1 * d1 + q1, p2 * d2 + q2) = gate(p1 * d2 + p2, q1 * d2 + q2);
  SvdResult svd = truncated_svd(g, nm.svd_discard, 0.0);
  std::vector<std::pair<Matrix, Matrix>> out;
  for (int k = 0; k < static_cast<int>(svd.sigma.size()); ++k) {
    if (svd.sigma(k) <= 0.0) continue;
    const double w = std::sqrt(svd.sigma(k));
    Matrix e(d1, d1), f(d2, d2);
    for (int p1 = 0; p1 < d1; ++p1)
      for (int q1 = 0; q1 < d1; ++q1) e(p1, q1) = w * svd.U(p1 * d1 + q1, k);
    for (int p2 = 0; p2 < d2; ++p2)
      for (int q2 = 0; q2 < d2; ++q2)
        f(p2, q2) = w * std::conj(svd.V(p2 * d2 + q2, k));
    out.emplace_back(std::move(e), std::move(f));
  }
  return out;
}

}  // namespace gapped1d
