#include "gapped1d/boundary.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <utility>

namespace gapped1d {

namespace {

void check_cut(const MpsState& s, int cut) {
  if (cut < 1 || cut > s.n())
    throw std::invalid_argument("left_state: cut must be in [1, n]");
}

}  // namespace

LeftState left_state(const MpsState& s, int cut, const NumericsConfig& nm) {
  check_cut(s, cut);
  if (cut == s.n()) {
    // No right half to rotate; attach a trivial selector of dimension 1.
    std::vector<SiteTensor> sites;
    sites.reserve(s.n() + 1);
    for (int k = 0; k < s.n(); ++k) sites.push_back(s.site(k));
    SiteTensor sel = SiteTensor::zero(1, 1, 1);
    sel.blocks[0](0, 0) = cxd(1, 0);
    sites.push_back(std::move(sel));
    return LeftState{cut, 1, MpsState(std::move(sites), s.d())};
  }
  SchmidtData sd = schmidt(s, cut, nm);
  MpsState fam = sd.left_family;
  // The family selector is unweighted; ls(v) carries the Schmidt
  // coefficients on the selector legs.
  SiteTensor& sel = fam.site(cut);
  for (int j = 0; j < sel.phys; ++j) sel.blocks[j] *= sd.coefficients(j);
  return LeftState{cut, sd.rank(), std::move(fam)};
}

BoundaryContraction contraction(const MpsState& s, int cut,
                                const NumericsConfig& nm) {
  LeftState ls = left_state(s, cut, nm);
  BoundaryContraction out;
  out.cut = cut;
  out.bond = ls.bond;
  out.d = s.phys_dim(cut - 1);
  out.matrix = cross_reduced_tail(ls.state, ls.state, 2);
  return out;
}

double trace_norm(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues().sum();
}

double trace_distance(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw std::invalid_argument("trace_distance: shape mismatch");
  return trace_norm(x - y);
}

Matrix partial_trace_left(const Matrix& rho, long long dim_left,
                          long long dim_right) {
  if (rho.rows() != rho.cols() || rho.rows() != dim_left * dim_right)
    throw std::invalid_argument("partial_trace_left: shape mismatch");
  Matrix out = Matrix::Zero(dim_right, dim_right);
  for (long long l = 0; l < dim_left; ++l)
    out += rho.block(l * dim_right, l * dim_right, dim_right, dim_right);
  return out;
}

Matrix partial_trace_right(const Matrix& rho, long long dim_left,
                           long long dim_right) {
  if (rho.rows() != rho.cols() || rho.rows() != dim_left * dim_right)
    throw std::invalid_argument("partial_trace_right: shape mismatch");
  Matrix out(dim_left, dim_left);
  for (long long a = 0; a < dim_left; ++a)
    for (long long b = 0; b < dim_left; ++b)
      out(a, b) =
          rho.block(a * dim_right, b * dim_right, dim_right, dim_right).trace();
  return out;
}

Matrix glue(const Matrix& sigma, const MpsState& v, int cut,
            const NumericsConfig& nm) {
  check_cut(v, cut);
  if (cut >= v.n())
    throw std::invalid_argument("glue: cut must leave a nonempty right half");
  if (v.dense_dim() > nm.dense_cap_dim)
    throw std::invalid_argument("glue: dense cap exceeded");
  SchmidtData sd = schmidt(v, cut, nm);
  long long dim_left = 1, dim_right = 1;
  for (int k = 0; k < cut; ++k) dim_left *= v.phys_dim(k);
  for (int k = cut; k < v.n(); ++k) dim_right *= v.phys_dim(k);
  const int B = sd.rank();
  if (sigma.rows() != sigma.cols() || sigma.rows() != dim_left * B)
    throw std::invalid_argument("glue: bond mismatch");
  Matrix u(dim_right, B);
  for (int j = 0; j < B; ++j) u.col(j) = sd.right_vector(j).to_dense(nm);
  Matrix w = kron(Matrix::Identity(dim_left, dim_left), u);
  return w * sigma * w.adjoint();
}

// ---------------------------------------------------------------------
// epsilon-net
// ---------------------------------------------------------------------

namespace {

struct GridGeometry {
  int q = 1;        // B*d
  int params = 1;   // q^2 independent real parameters
  double step = 1;  // grid pitch per parameter
  long long half = 1;  // values are k*step with |k| <= half
};

GridGeometry geometry(const NetSpec& spec) {
  if (spec.B < 1 || spec.d < 1)
    throw std::invalid_argument("build_net: B and d must be >= 1");
  if (!(spec.eta > 0))
    throw std::invalid_argument("build_net: eta must be > 0");
  GridGeometry g;
  g.q = spec.B * spec.d;
  g.params = g.q * g.q;
  g.step = spec.eta / g.q;
  g.half = static_cast<long long>(std::floor(g.q / spec.eta + 1e-9));
  return g;
}

// Canonical parameter order: the real diagonal first, then for each upper
// entry (i, j), i < j, its real then imaginary part.
Matrix params_to_matrix(const GridGeometry& g, const std::vector<double>& p) {
  Matrix x = Matrix::Zero(g.q, g.q);
  int idx = 0;
  for (int i = 0; i < g.q; ++i) x(i, i) = p[idx++];
  for (int i = 0; i < g.q; ++i)
    for (int j = i + 1; j < g.q; ++j) {
      const cxd v(p[idx], p[idx + 1]);
      idx += 2;
      x(i, j) = v;
      x(j, i) = std::conj(v);
    }
  return x;
}

std::vector<double> matrix_to_params(const GridGeometry& g, const Matrix& y) {
  std::vector<double> p(g.params);
  int idx = 0;
  for (int i = 0; i < g.q; ++i) p[idx++] = y(i, i).real();
  for (int i = 0; i < g.q; ++i)
    for (int j = i + 1; j < g.q; ++j) {
      p[idx++] = y(i, j).real();
      p[idx++] = y(i, j).imag();
    }
  return p;
}

double snap_value(const GridGeometry& g, double v) {
  long long k = std::llround(v / g.step);
  if (k > g.half) k = g.half;
  if (k < -g.half) k = -g.half;
  return static_cast<double>(k) * g.step;
}

}  // namespace

double net_cardinality_formula(const NetSpec& spec) {
  const int q = spec.B * spec.d;
  const double per = 2.0 * std::ceil(q / spec.eta - 1e-9) + 1.0;
  return std::pow(per, 2.0 * q);
}

double net_grid_size(const NetSpec& spec) {
  const GridGeometry g = geometry(spec);
  return std::pow(2.0 * static_cast<double>(g.half) + 1.0, g.params);
}

std::vector<Matrix> build_net(const NetSpec& spec) {
  const GridGeometry g = geometry(spec);
  const double bound = 1.0 + spec.eta + 1e-12;
  std::vector<Matrix> out;
  if (spec.mode == NetSpec::Mode::FullGrid) {
    const double size = net_grid_size(spec);
    if (!(size <= static_cast<double>(spec.full_grid_cap))) {
      std::ostringstream msg;
      msg << "build_net: full grid has " << size << " points (cap "
          << spec.full_grid_cap << ", cardinality bound "
          << net_cardinality_formula(spec) << "); use RandomSample";
      throw std::invalid_argument(msg.str());
    }
    const int per = static_cast<int>(2 * g.half + 1);
    std::vector<int> odo(g.params, 0);  // digit k encodes value (k-half)*step
    std::vector<double> p(g.params);
    while (true) {
      for (int i = 0; i < g.params; ++i)
        p[i] = static_cast<double>(odo[i] - g.half) * g.step;
      Matrix x = params_to_matrix(g, p);
      if (trace_norm(x) <= bound) out.push_back(std::move(x));
      int pos = g.params - 1;
      while (pos >= 0 && odo[pos] == per - 1) odo[pos--] = 0;
      if (pos < 0) break;
      ++odo[pos];
    }
    return out;
  }
  if (spec.sample_count < 1)
    throw std::invalid_argument("build_net: sample_count must be >= 1");
  std::mt19937_64 rng(spec.seed);
  const long long max_attempts = 10000 * spec.sample_count;
  long long attempts = 0;
  std::vector<double> p(g.params);
  while (static_cast<long long>(out.size()) < spec.sample_count) {
    if (++attempts > max_attempts)
      throw std::runtime_error("build_net: rejection sampling stalled");
    // Grid points are sampled near the unit-trace PSD slice, where the
    // boundary contractions of normalized states live; points elsewhere
    // in the ball are never within a small radius of a reachable
    // reduction.  rho = G G^* / tr with a random rank profile spreads
    // draws from near-pure to near-maximally-mixed.
    const int rank = 1 + static_cast<int>(rng() % static_cast<unsigned>(g.q));
    Matrix gauss(g.q, rank);
    for (int r = 0; r < g.q; ++r)
      for (int c = 0; c < rank; ++c)
        gauss(r, c) = cxd(normal_double(rng), normal_double(rng));
    Matrix rho = gauss * gauss.adjoint();
    rho /= rho.trace().real();
    p = matrix_to_params(g, rho);
    for (int i = 0; i < g.params; ++i) p[i] = snap_value(g, p[i]);
    Matrix x = params_to_matrix(g, p);
    if (trace_norm(x) <= bound) out.push_back(std::move(x));
  }
  return out;
}

Matrix net_nearest(const NetSpec& spec, const Matrix& y) {
  const GridGeometry g = geometry(spec);
  if (y.rows() != g.q || y.cols() != g.q)
    throw std::invalid_argument("net_nearest: shape mismatch");
  std::vector<double> p = matrix_to_params(g, y);
  for (double& v : p) v = snap_value(g, v);
  return params_to_matrix(g, p);
}

}  // namespace gapped1d
