#pragma once

#include <cstdint>
#include <vector>

#include "gapped1d/common.hpp"
#include "gapped1d/hamiltonian.hpp"
#include "gapped1d/mps.hpp"

namespace gapped1d {

// =====================================================================
// Sampling approximate ground state projection.
//
// With N the interaction count, the exact operator is
//   A = (c * (Id - H/N))^m,  Id - H/N = E_t[P_t],  P_t = Id - H_t,
// so expanding the power writes A as the average over all N^m words of
// c^m * P_{t_1} ... P_{t_m}.  K averages ell sampled words instead.
// The per-factor scalar c is 1/(1 - eps0/N) when eps0 is known (then
// ||A|| = 1 and A fixes the ground state) and 1 otherwise (callers
// normalize vectors afterwards).
// =====================================================================

enum class AgspScaleMode { KnownEpsilon0, UnnormalizedScale };

struct AgspConfig {
  int m = 12;
  long long ell = 64;
  int kappa_cap = 8;  // per-word occurrence cap on any index; <= 0 disables
  std::uint64_t seed = 0;
  AgspScaleMode scale_mode = AgspScaleMode::UnnormalizedScale;
  bool strict = true;     // resample words that violate the cap
  double epsilon0 = 0.0;  // consumed by KnownEpsilon0
};

// Indices are 0-based interaction labels in [0, term_count).  A word acts
// as the product P_{I[0]} * P_{I[1]} * ... so I.back() is applied first.
struct SampledTerm {
  std::vector<int> indices;
};

struct SampleStats {
  long long resampled_words = 0;
  long long violating_words = 0;
  int max_occurrence = 0;
};

double agsp_scale(const LocalHamiltonian& h, const AgspConfig& cfg);

// Theory-mode parameter selection; the run report prints these next to
// whatever desk values actually run.
struct AgspPlan {
  long long m = 0;
  long long ell = 0;
  double ell_exact = 0.0;
  double c_eps = 0.0;
  double scale = 1.0;
  bool ell_clamped = false;
};

AgspPlan choose_parameters(int n, int d, double epsilon, double q_target,
                           double epsilon0, double c_eps_override = -1.0);

std::vector<SampledTerm> sample_terms(const LocalHamiltonian& h,
                                      const AgspConfig& cfg,
                                      SampleStats* stats = nullptr);

// Every word in {0..term_count-1}^m, odometer order; the exhaustive
// average reproduces A exactly.
std::vector<SampledTerm> enumerate_all_terms(int term_count, int m);

// Dense paths, guarded by the numerics cap and a matrix-size cap.
Matrix exact_a(const LocalHamiltonian& h, int m, AgspScaleMode mode,
               double epsilon0, const NumericsConfig& nm);
Vector apply_a_dense(const LocalHamiltonian& h, int m, double factor_scale,
                     Vector psi);
Vector apply_word_dense(const LocalHamiltonian& h, const SampledTerm& term,
                        double factor_scale, Vector psi,
                        bool adjoint = false);
Matrix dense_word(const LocalHamiltonian& h, const SampledTerm& term,
                  double factor_scale, const NumericsConfig& nm);
Matrix dense_sampled_k(const LocalHamiltonian& h,
                       const std::vector<SampledTerm>& terms,
                       double factor_scale, const NumericsConfig& nm);

struct KvsAReport {
  double op_norm_error = 0.0;
  double shrinkage_measured = 0.0;  // first excited expectation under A
  double shrinkage_bound = 0.0;     // per-factor ratio to the m-th power
  bool exact_norm = true;           // false when estimated iteratively
};

KvsAReport verify_k_vs_a(const LocalHamiltonian& h,
                         const std::vector<SampledTerm>& terms, int m,
                         AgspScaleMode mode, double epsilon0,
                         const NumericsConfig& nm);

// Structured power-iteration estimate of ||K - A|| for chains too large
// to hold dense operators; biased low by early stopping.
double estimate_k_minus_a(const LocalHamiltonian& h,
                          const std::vector<SampledTerm>& terms, int m,
                          double factor_scale, std::uint64_t seed, int iters,
                          const NumericsConfig& nm);

// =====================================================================
// Cut decomposition: each word becomes a sum over operator-Schmidt
// branches of the boundary factor, every branch an ordered product of
// factors that act strictly left or strictly right of the cut.
// =====================================================================

struct BranchFactor {
  int site = 0;         // leftmost site the factor touches
  bool two_site = false;
  bool left_side = true;
  Matrix op;            // d^2 x d^2 when two_site, else d x d
};

struct ExpandedBranch {
  std::vector<BranchFactor> factors;  // application order, first applied first
  double weight = 1.0;                // factor_scale^m / ell
  long long word = 0;                 // originating sampled-term index
};

struct CutDecomposition {
  int cut = 0;
  int m = 0;
  double factor_scale = 1.0;
  std::vector<ExpandedBranch> branches;
};

CutDecomposition decompose_across_cut(const std::vector<SampledTerm>& terms,
                                      const LocalHamiltonian& h, int cut,
                                      double factor_scale,
                                      long long branch_cap,
                                      const NumericsConfig& nm);

// Applies the left-side factors (and the branch weight) to a cut-site
// state.
MpsState apply_branch_left(const MpsState& s, const ExpandedBranch& b,
                           const NumericsConfig& nm, double compress_tol);

// All branches applied to all vectors, (branch, vector)-ordered; outputs
// below the drop threshold are removed.  dropped, when given, receives
// that count.
std::vector<MpsState> apply_left_parts(const CutDecomposition& dec,
                                       const std::vector<MpsState>& vectors,
                                       const NumericsConfig& nm,
                                       double compress_tol,
                                       long long* dropped = nullptr);

// Dense embedding of one branch, both sides, weight included.
Matrix dense_branch(const ExpandedBranch& b, int n, int d,
                    const NumericsConfig& nm);

}  // namespace gapped1d
