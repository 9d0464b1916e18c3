#include "gapped1d/sdp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace gapped1d {

SpanBasis orthonormalize(const std::vector<MpsState>& s, double threshold,
                         const NumericsConfig& nm) {
  (void)nm;
  if (s.empty()) throw std::invalid_argument("orthonormalize: empty span");
  const int count = static_cast<int>(s.size());
  for (const MpsState& v : s)
    if (v.n() != s.front().n() || v.d() != s.front().d())
      throw std::invalid_argument("orthonormalize: shape mismatch");
  Matrix gram(count, count);
  for (int a = 0; a < count; ++a)
    for (int b = 0; b < count; ++b)
      gram(a, b) = inner(s[static_cast<std::size_t>(a)],
                         s[static_cast<std::size_t>(b)]);
  gram = (gram + gram.adjoint().eval()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  std::vector<int> keep;
  for (int i = count - 1; i >= 0; --i)  // descending eigenvalue order
    if (eig.eigenvalues()(i) > threshold) keep.push_back(i);
  if (keep.empty())
    throw std::invalid_argument("orthonormalize: span is degenerate");
  SpanBasis basis;
  basis.source_vectors = s;
  basis.gram_threshold = threshold;
  basis.rank = static_cast<int>(keep.size());
  basis.basis_coeffs = Matrix(count, basis.rank);
  for (int k = 0; k < basis.rank; ++k) {
    const int idx = keep[static_cast<std::size_t>(k)];
    basis.basis_coeffs.col(k) =
        eig.eigenvectors().col(idx) / std::sqrt(eig.eigenvalues()(idx));
  }
  return basis;
}

SdpProblem assemble(const SpanBasis& basis, const LocalHamiltonian& h,
                    int cut, int B, const Matrix& target, double radius,
                    const NumericsConfig& nm) {
  (void)nm;
  if (cut < 1 || cut > h.n())
    throw std::invalid_argument("assemble: invalid cut");
  if (B < 1) throw std::invalid_argument("assemble: B must be >= 1");
  if (basis.source_vectors.empty() ||
      basis.source_vectors.front().n() != cut)
    throw std::invalid_argument("assemble: basis does not live on the cut");
  const int d = basis.source_vectors.front().phys_dim(cut - 1);
  SdpProblem p;
  p.rank = basis.rank;
  p.B = B;
  p.d = d;
  p.radius = radius;
  p.unconstrained = !std::isfinite(radius);
  if (!p.unconstrained) {
    if (target.rows() != d * B || target.cols() != d * B)
      throw std::invalid_argument("assemble: target shape mismatch");
    p.target = target;
  }

  const int count = static_cast<int>(basis.source_vectors.size());
  // Source-pair quantities once, then the change of basis.
  Matrix src_obj = Matrix::Zero(count, count);
  for (int a = 0; a < count; ++a)
    for (int b = 0; b < count; ++b)
      for (int t = 0; t + 1 < cut; ++t)
        src_obj(a, b) += cross_term_value(
            basis.source_vectors[static_cast<std::size_t>(a)],
            basis.source_vectors[static_cast<std::size_t>(b)], t, h.term(t));
  Matrix obj_f = basis.basis_coeffs.adjoint() * src_obj * basis.basis_coeffs;
  obj_f = (obj_f + obj_f.adjoint().eval()) / 2.0;
  p.objective = Matrix::Zero(p.rank * B, p.rank * B);
  for (int k = 0; k < p.rank; ++k)
    for (int l = 0; l < p.rank; ++l)
      for (int j = 0; j < B; ++j)
        p.objective(k * B + j, l * B + j) = obj_f(k, l);

  if (!p.unconstrained) {
    std::vector<std::vector<Matrix>> src_w(
        static_cast<std::size_t>(count),
        std::vector<Matrix>(static_cast<std::size_t>(count)));
    for (int a = 0; a < count; ++a)
      for (int b = 0; b < count; ++b)
        src_w[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
            cross_reduced_last_site(
                basis.source_vectors[static_cast<std::size_t>(b)],
                basis.source_vectors[static_cast<std::size_t>(a)]);
    p.w.assign(static_cast<std::size_t>(p.rank),
               std::vector<Matrix>(static_cast<std::size_t>(p.rank)));
    for (int k = 0; k < p.rank; ++k)
      for (int l = 0; l < p.rank; ++l) {
        Matrix acc = Matrix::Zero(d, d);
        for (int a = 0; a < count; ++a)
          for (int b = 0; b < count; ++b)
            acc += basis.basis_coeffs(a, k) *
                   std::conj(basis.basis_coeffs(b, l)) *
                   src_w[static_cast<std::size_t>(a)]
                        [static_cast<std::size_t>(b)];
        p.w[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] = acc;
      }
  }
  return p;
}

Matrix reduce_apply(const SdpProblem& p, const Matrix& sigma) {
  const int B = p.B, d = p.d;
  Matrix out = Matrix::Zero(d * B, d * B);
  for (int k = 0; k < p.rank; ++k)
    for (int l = 0; l < p.rank; ++l) {
      const Matrix& w =
          p.w[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
      for (int j = 0; j < B; ++j)
        for (int jp = 0; jp < B; ++jp) {
          const cxd s = sigma(k * B + j, l * B + jp);
          if (s == cxd(0, 0)) continue;
          for (int q = 0; q < d; ++q)
            for (int qp = 0; qp < d; ++qp)
              out(q * B + j, qp * B + jp) += s * w(q, qp);
        }
    }
  return out;
}

Matrix reduce_adjoint(const SdpProblem& p, const Matrix& g) {
  const int B = p.B, d = p.d;
  Matrix out = Matrix::Zero(p.rank * B, p.rank * B);
  for (int k = 0; k < p.rank; ++k)
    for (int l = 0; l < p.rank; ++l) {
      const Matrix& w =
          p.w[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
      for (int j = 0; j < B; ++j)
        for (int jp = 0; jp < B; ++jp) {
          cxd acc(0, 0);
          for (int q = 0; q < d; ++q)
            for (int qp = 0; qp < d; ++qp)
              acc += std::conj(w(q, qp)) * g(q * B + j, qp * B + jp);
          out(k * B + j, l * B + jp) = acc;
        }
    }
  return out;
}

RVector project_simplex(const RVector& v) {
  const long n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double run = 0.0, tau = 0.0;
  int rho = 0;
  for (long j = 0; j < n; ++j) {
    run += u[static_cast<std::size_t>(j)];
    const double cand = (1.0 - run) / static_cast<double>(j + 1);
    if (u[static_cast<std::size_t>(j)] + cand > 0) {
      rho = static_cast<int>(j + 1);
      tau = cand;
    }
  }
  (void)rho;
  RVector out(n);
  for (long j = 0; j < n; ++j) out(j) = std::max(0.0, v(j) + tau);
  return out;
}

Matrix project_spectraplex(const Matrix& m) {
  Matrix h = (m + m.adjoint().eval()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  RVector lam = project_simplex(eig.eigenvalues());
  return eig.eigenvectors() * lam.asDiagonal() *
         eig.eigenvectors().adjoint();
}

namespace {

double excess_residual(const SdpProblem& p, const Matrix& sigma,
                       Matrix* diff_out) {
  Matrix diff = reduce_apply(p, sigma) - p.target;
  const double tn = trace_norm(diff);
  if (diff_out) *diff_out = std::move(diff);
  return std::max(0.0, tn - p.radius);
}

}  // namespace

SdpSolution solve(const SdpProblem& p, const SolverConfig& cfg) {
  if (cfg.step_rule != "norm_sqrt")
    throw std::invalid_argument("solve: unknown step_rule");
  const int dim = p.rank * p.B;
  SdpSolution sol;
  if (p.unconstrained) {
    // No boundary constraint: the minimum over the spectraplex is the
    // bottom eigenpair of the objective.
    Eigen::SelfAdjointEigenSolver<Matrix> eig(p.objective);
    const Vector v = eig.eigenvectors().col(0);
    sol.sigma = v * v.adjoint();
    sol.objective_value = eig.eigenvalues()(0);
    sol.feasibility_residual = 0.0;
    sol.iterations = 0;
    sol.status = SdpStatus::Converged;
    return sol;
  }

  Eigen::SelfAdjointEigenSolver<Matrix> obj_eig(p.objective);
  double lips = 0.0;
  for (long i = 0; i < obj_eig.eigenvalues().size(); ++i)
    lips = std::max(lips, std::abs(obj_eig.eigenvalues()(i)));
  lips = std::max(lips, 1e-12);

  Matrix sigma = Matrix::Identity(dim, dim) / static_cast<double>(dim);
  double mu = cfg.penalty_init;

  bool have_feasible = false;
  Matrix best_feasible;
  double best_feasible_obj = 0.0, best_feasible_res = 0.0;
  Matrix best_res_sigma = sigma;
  double best_res = std::numeric_limits<double>::infinity();
  double best_res_obj = 0.0;

  int last_improve = 0;
  bool converged = false, infeasible = false;
  double epoch_min_res = std::numeric_limits<double>::infinity();
  double prev_epoch_min = std::numeric_limits<double>::infinity();
  int stalled_epochs = 0;
  int it = 0;

  for (it = 1; it <= cfg.max_iter; ++it) {
    Matrix diff;
    const double res = excess_residual(p, sigma, &diff);
    const double obj = std::real((p.objective * sigma).trace());
    epoch_min_res = std::min(epoch_min_res, res);
    if (res < best_res) {
      best_res = res;
      best_res_sigma = sigma;
      best_res_obj = obj;
    }
    if (res <= cfg.feas_tol) {
      if (!have_feasible || obj < best_feasible_obj - cfg.obj_tol) {
        if (!have_feasible || obj < best_feasible_obj) last_improve = it;
        have_feasible = true;
        best_feasible = sigma;
        best_feasible_obj = obj;
        best_feasible_res = res;
      } else if (obj < best_feasible_obj) {
        best_feasible = sigma;
        best_feasible_obj = obj;
        best_feasible_res = res;
      }
      if (it - last_improve >= cfg.window) {
        converged = true;
        break;
      }
    }

    Matrix grad = p.objective;
    if (res > 0) {
      // Trace-norm subgradient through the reduction's adjoint; inside
      // the constraint the subgradient is zero.
      Eigen::JacobiSVD<Matrix> svd(
          diff, Eigen::ComputeThinU | Eigen::ComputeThinV);
      grad += mu * reduce_adjoint(
                       p, svd.matrixU() * svd.matrixV().adjoint());
    }
    // Normalized subgradient step: the penalty scales the direction, not
    // the step length, or a large mu would overshoot the spectraplex.
    const double gnorm = std::max(lips, grad.norm());
    const double step = 1.0 / (gnorm * std::sqrt(static_cast<double>(it)));
    sigma = project_spectraplex(sigma - step * grad);

    if (it % cfg.window == 0) {
      if (epoch_min_res > cfg.feas_tol) {
        if (mu >= cfg.penalty_max) {
          if (epoch_min_res > prev_epoch_min - 1e-12) {
            if (++stalled_epochs >= 2 && !have_feasible) {
              infeasible = true;
              break;
            }
          } else {
            stalled_epochs = 0;
          }
        }
        mu = std::min(mu * cfg.penalty_growth, cfg.penalty_max);
      }
      prev_epoch_min = epoch_min_res;
      epoch_min_res = std::numeric_limits<double>::infinity();
    }
  }

  sol.iterations = std::min(it, cfg.max_iter);
  if (have_feasible) {
    sol.sigma = best_feasible;
    sol.objective_value = best_feasible_obj;
    sol.feasibility_residual = best_feasible_res;
    sol.status = converged ? SdpStatus::Converged : SdpStatus::MaxIter;
  } else {
    sol.sigma = best_res_sigma;
    sol.objective_value = best_res_obj;
    sol.feasibility_residual = best_res;
    sol.status = infeasible ? SdpStatus::Infeasible : SdpStatus::MaxIter;
  }
  return sol;
}

LeadingComponents leading_components(const SdpSolution& sol,
                                     const SpanBasis& basis, int B,
                                     const NumericsConfig& nm) {
  const int dim = static_cast<int>(sol.sigma.rows());
  if (dim != basis.rank * B)
    throw std::invalid_argument("leading_components: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sol.sigma);
  LeadingComponents out;
  out.top_eigenvalue = eig.eigenvalues()(dim - 1);
  out.degenerate_top =
      dim > 1 && (eig.eigenvalues()(dim - 1) - eig.eigenvalues()(dim - 2)) <
                     1e-10;
  const Vector top = eig.eigenvectors().col(dim - 1);
  const int count = static_cast<int>(basis.source_vectors.size());
  for (int j = 0; j < B; ++j) {
    std::vector<cxd> coeffs(static_cast<std::size_t>(count), cxd(0, 0));
    for (int a = 0; a < count; ++a) {
      cxd acc(0, 0);
      for (int k = 0; k < basis.rank; ++k)
        acc += basis.basis_coeffs(a, k) * top(k * B + j);
      coeffs[static_cast<std::size_t>(a)] = acc;
    }
    MpsState u = linear_combination(
        basis.source_vectors, coeffs, nm, 0.0);
    if (norm(u) < 1e-10) continue;
    out.components.push_back(std::move(u));
  }
  return out;
}

}  // namespace gapped1d
