#pragma once

#include <nlohmann/json.hpp>
#include <vector>

#include "gapped1d/common.hpp"
#include "gapped1d/hamiltonian.hpp"

namespace gapped1d {

// =====================================================================
// Matrix product states over an open chain.
//
// Conventions used throughout:
//   - site 0 is the most significant factor of dense multi-indices;
//   - a site tensor holds one (left x right) block per physical level;
//   - boundary bonds are 1, so an n-site state contracts to a scalar
//     amplitude: psi(p_0..p_{n-1}) = A_0[p_0] * ... * A_{n-1}[p_{n-1}];
//   - left matricization groups rows as l*P + p, right matricization
//     groups columns as p*R + r (bond major on the left, phys major on
//     the right), matching the dense ordering above;
//   - the default canonical form after construction is left-canonical
//     with the norm carried in the last tensor;
//   - physical dimensions may vary per site (needed for states that
//     carry an explicit boundary-bond label as a final site).
// =====================================================================

struct SiteTensor {
  int left = 1;
  int phys = 1;
  int right = 1;
  std::vector<Matrix> blocks;  // blocks[p] is left x right

  static SiteTensor zero(int l, int p, int r);
  Matrix left_mat() const;               // (left*phys) x right
  Matrix right_mat() const;              // left x (phys*right)
  static SiteTensor from_left_mat(const Matrix& m, int l, int p, int r);
  static SiteTensor from_right_mat(const Matrix& m, int l, int p, int r);
};

class MpsState {
 public:
  MpsState() = default;
  explicit MpsState(std::vector<SiteTensor> sites, int nominal_d);

  int n() const { return static_cast<int>(sites_.size()); }
  int d() const { return d_; }
  int phys_dim(int site) const { return sites_.at(site).phys; }
  int bond_dim(int cut) const;           // cut in [0, n]
  int max_bond() const;
  const SiteTensor& site(int k) const { return sites_.at(k); }
  SiteTensor& site(int k) { return sites_.at(k); }

  long long dense_dim() const;

  static MpsState from_dense(const Vector& psi, int n, int d,
                             const NumericsConfig& nm);
  static MpsState product_basis_state(int n, int d,
                                      const std::vector<int>& levels);
  Vector to_dense(const NumericsConfig& nm) const;

  void scale(cxd factor);                // multiplies the last tensor

 private:
  std::vector<SiteTensor> sites_;
  int d_ = 2;
};

// Schmidt data at a cut c in [1, n-1]: cut c separates sites [0, c) from
// [c, n).  The left family is a (c+1)-site state whose last site has
// physical dimension equal to the Schmidt rank D and selects the family
// member; the right family mirrors this with a leading selector site.
struct SchmidtData {
  int cut = 0;
  RVector coefficients;        // descending, discarded below threshold
  MpsState left_family;        // c+1 sites, last phys dim = rank
  MpsState right_family;       // n-c+1 sites, first phys dim = rank
  int rank() const { return static_cast<int>(coefficients.size()); }
  MpsState left_vector(int j) const;    // |a_j> on sites [0, c)
  MpsState right_vector(int j) const;   // |b_j> on sites [c, n)
};

cxd inner(const MpsState& a, const MpsState& b);   // <a|b>, antilinear in a
double norm(const MpsState& s);
MpsState normalized(const MpsState& s, const NumericsConfig& nm);

// Ranks at every cut after the relative discard threshold.
std::vector<int> schmidt_ranks(const MpsState& s, const NumericsConfig& nm);

SchmidtData schmidt(const MpsState& s, int cut, const NumericsConfig& nm);

// Unnormalized top-D truncation at one cut; D >= rank returns the same
// state (up to re-canonicalization).
MpsState trim(const MpsState& s, int cut, int D, const NumericsConfig& nm);

// Sequential trims at cuts 1..n-1; ranks at already-trimmed cuts cannot
// regrow, so the result has every bond <= D.
MpsState trim_all(const MpsState& s, int D, const NumericsConfig& nm);

// Exact application of a two-site gate at sites (t, t+1); gate rows and
// columns are (p_t * P_{t+1} + p_{t+1}).  compress_tol > 0 additionally
// truncates the affected bond to that relative fidelity.
MpsState apply_two_site_op(const MpsState& s, int t, const Matrix& gate,
                           const NumericsConfig& nm, double compress_tol = 0.0);

// Single-site operator at site t; never changes bonds.
MpsState apply_one_site_op(const MpsState& s, int t, const Matrix& op);

// Two-pass (QR then SVD) compression; tol is a per-bond relative
// fidelity budget, 0 keeps only the exact-zero discards.
MpsState compress(const MpsState& s, const NumericsConfig& nm, double tol);

// <s|H|s> without normalization; sums the per-term values below.
double expectation(const MpsState& s, const LocalHamiltonian& h);
std::vector<double> expectation_terms(const MpsState& s,
                                      const LocalHamiltonian& h);

// <bra| G_{t,t+1} |ket> for states sharing site dimensions.
cxd cross_term_value(const MpsState& bra, const MpsState& ket, int t,
                     const Matrix& gate);

// tr over sites [0, n-1) of |ket><bra|: out(p, p') = sum_x psi_ket(x,p) *
// conj(psi_bra(x,p')), a matrix on the last site.
Matrix cross_reduced_last_site(const MpsState& bra, const MpsState& ket);

// Same trace kept over the last tail_sites sites; rows and columns are the
// dense index over those sites, earliest site most significant.
Matrix cross_reduced_tail(const MpsState& bra, const MpsState& ket,
                          int tail_sites);

// Direct sum of scaled states followed by compression.
MpsState linear_combination(const std::vector<MpsState>& states,
                            const std::vector<cxd>& coeffs,
                            const NumericsConfig& nm, double compress_tol);

nlohmann::json mps_to_json(const MpsState& s);
MpsState mps_from_json(const nlohmann::json& j);

// =====================================================================
// Matrix product operators; a thin carrier used for building operators
// out of local gates and checking them densely.
// =====================================================================

struct MpoSiteTensor {
  int left = 1;
  int phys = 1;
  int right = 1;
  // w[p_out][p_in] is left x right
  std::vector<std::vector<Matrix>> w;
};

class MpoOperator {
 public:
  MpoOperator() = default;
  MpoOperator(std::vector<MpoSiteTensor> sites, int nominal_d);

  int n() const { return static_cast<int>(sites_.size()); }
  int d() const { return d_; }
  const MpoSiteTensor& site(int k) const { return sites_.at(k); }

  static MpoOperator identity(int n, int d);
  // Embeds a two-site gate at (t, t+1) via its operator-Schmidt factors.
  static MpoOperator from_two_site_gate(int n, int d, int t, const Matrix& gate,
                                        const NumericsConfig& nm);

  MpsState apply(const MpsState& s, const NumericsConfig& nm,
                 double compress_tol = 0.0) const;
  Matrix to_dense(const NumericsConfig& nm) const;

 private:
  std::vector<MpoSiteTensor> sites_;
  int d_ = 2;
};

// G = sum_k E_k (x) F_k with as few factors as the discard threshold
// allows (at most d1^2 factors); gate rows are (p1 * d2 + p2).
std::vector<std::pair<Matrix, Matrix>> operator_schmidt_split(
    const Matrix& gate, int d1, int d2, const NumericsConfig& nm);

}  // namespace gapped1d
