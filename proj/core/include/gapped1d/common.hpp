#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace gapped1d {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Shared numerical knobs. Thresholds that shape ranks are relative to the
// largest singular value of whatever is being decomposed, so they are
// scale-invariant; norm-like cutoffs (drop_norm) are absolute.
struct NumericsConfig {
  double svd_discard = 1e-12;     // singular values below svd_discard * s_max are dropped
  double gram_threshold = 1e-10;  // Gram eigenvalues below this are outside the span
  double drop_norm = 1e-10;       // vectors shorter than this are discarded
  double dedupe_overlap = 1.0 - 1e-10;  // |<a|b>| above this counts as the same direction
  int dense_cap_dim = 20000;      // largest Hilbert dimension dense paths will touch
                                  // (d=2 -> n=14, d=3 -> n=9)

  int max_dense_sites(int d) const {
    if (d < 2) throw std::invalid_argument("max_dense_sites: d must be >= 2");
    int n = 0;
    long long dim = 1;
    while (dim * d <= dense_cap_dim) {
      dim *= d;
      ++n;
    }
    return n;
  }
};

inline long long pow_ll(int base, int exp) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > (1LL << 62) / base) throw std::overflow_error("pow_ll overflow");
    r *= base;
  }
  return r;
}

// Kronecker product with the first argument most significant, matching the
// site-0-major dense ordering used everywhere.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// splitmix64 step; the basis of all seed derivation in the project.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic seed splitting: one run seed fans out to independent streams
// keyed by (purpose, index). Documented scheme: two splitmix64 absorptions.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t purpose,
                                 std::uint64_t index = 0) {
  std::uint64_t s = root;
  std::uint64_t a = splitmix64(s);
  s ^= purpose * 0x9e3779b97f4a7c15ULL;
  std::uint64_t b = splitmix64(s);
  s ^= index + 0x632be59bd9b4e019ULL;
  std::uint64_t c = splitmix64(s);
  return a ^ (b << 1) ^ c;
}

// Purpose tags for derive_seed.
namespace seed_purpose {
constexpr std::uint64_t net = 0x4e45;
constexpr std::uint64_t agsp = 0x4147;
constexpr std::uint64_t retry = 0x5254;
}  // namespace seed_purpose

// Unbiased index draw in [0, k); rejection keeps the distribution exact and
// the byte stream identical across standard libraries.
template <typename Rng>
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t k) {
  if (k == 0) throw std::invalid_argument("uniform_index: k must be > 0");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % k);
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % k;
}

// Uniform double in [0, 1) with 53 bits, independent of distribution
// implementations shipped with the standard library.
template <typename Rng>
inline double uniform_double(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller normal draw; consumes two uniforms per pair, caller keeps no
// state so successive calls are independent draws.
template <typename Rng>
inline double normal_double(Rng& rng) {
  double u1;
  do {
    u1 = uniform_double(rng);
  } while (u1 <= 0.0);
  const double u2 = uniform_double(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

// Runs fn(i) for i in [0, count) on up to GAPPED1D_THREADS workers.
// Each index writes only its own output slot, and callers must merge results
// in index order, so the outcome is independent of the thread count.
void parallel_for(long long count, const std::function<void(long long)>& fn);

// Worker cap currently in effect (env GAPPED1D_THREADS, default hardware).
int worker_count();

}  // namespace gapped1d
