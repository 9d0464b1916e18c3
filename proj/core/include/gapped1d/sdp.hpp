#pragma once

#include <limits>
#include <string>
#include <vector>

#include "gapped1d/boundary.hpp"
#include "gapped1d/common.hpp"
#include "gapped1d/hamiltonian.hpp"
#include "gapped1d/mps.hpp"

namespace gapped1d {

// Orthonormal basis of a span of MPS, kept as coefficients over the
// source vectors: |f_k> = sum_a basis_coeffs(a, k) |s_a>.
struct SpanBasis {
  std::vector<MpsState> source_vectors;
  Matrix basis_coeffs;  // |S| x rank
  int rank = 0;
  double gram_threshold = 1e-10;
};

SpanBasis orthonormalize(const std::vector<MpsState>& s, double threshold,
                         const NumericsConfig& nm);

// min tr(H_L sigma) over density matrices on span (x) C^B subject to
// ||reduce(sigma) - X||_1 <= radius.  Indices pair as k*B + j on the
// problem side and p*B + j on the reduced side.
struct SdpProblem {
  int rank = 0;
  int B = 1;
  int d = 2;
  Matrix objective;                     // (rank*B) x (rank*B), Hermitian
  std::vector<std::vector<Matrix>> w;   // w[k][l]: d x d reduced pair blocks
  Matrix target;                        // (d*B) x (d*B)
  double radius = 0.0;
  bool unconstrained = false;           // infinite radius: plain eigenproblem
};

// basis vectors live on sites [0, cut); the objective sums interactions
// 0..cut-2.  An infinite radius drops the boundary constraint entirely.
SdpProblem assemble(const SpanBasis& basis, const LocalHamiltonian& h,
                    int cut, int B, const Matrix& target, double radius,
                    const NumericsConfig& nm);

Matrix reduce_apply(const SdpProblem& p, const Matrix& sigma);
Matrix reduce_adjoint(const SdpProblem& p, const Matrix& g);

RVector project_simplex(const RVector& v);
Matrix project_spectraplex(const Matrix& m);

struct SolverConfig {
  double feas_tol = 1e-6;
  double obj_tol = 1e-8;
  int max_iter = 5000;
  double penalty_init = 1.0;
  double penalty_growth = 2.0;
  double penalty_max = 1e8;
  int window = 25;  // iterations per penalty epoch and stall window
  std::string step_rule = "norm_sqrt";
};

enum class SdpStatus { Converged, MaxIter, Infeasible };

struct SdpSolution {
  Matrix sigma;
  double objective_value = 0.0;
  double feasibility_residual = 0.0;  // max(0, ||reduce - X||_1 - radius)
  int iterations = 0;
  SdpStatus status = SdpStatus::MaxIter;
};

SdpSolution solve(const SdpProblem& p, const SolverConfig& cfg);

struct LeadingComponents {
  std::vector<MpsState> components;  // u_j, selector slot order, short ones dropped
  bool degenerate_top = false;       // top eigenvalue tied within 1e-10
  double top_eigenvalue = 0.0;
};

LeadingComponents leading_components(const SdpSolution& sol,
                                     const SpanBasis& basis, int B,
                                     const NumericsConfig& nm);

inline double infinite_radius() {
  return std::numeric_limits<double>::infinity();
}

}  // namespace gapped1d
