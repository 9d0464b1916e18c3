#pragma once

#include <cstdint>
#include <vector>

#include "gapped1d/common.hpp"
#include "gapped1d/mps.hpp"

namespace gapped1d {

// ls(v): the right half of v rotated onto an abstract bond index, realized
// as a (cut+1)-site MPS whose last site has physical dimension B.  The
// Schmidt weights ride along, so ||ls(v)|| = ||v||.
struct LeftState {
  int cut = 0;
  int bond = 1;
  MpsState state;
};

// cut in [1, n]; cut == n appends a trivial bond so the shape contract
// stays uniform.
LeftState left_state(const MpsState& s, int cut, const NumericsConfig& nm);

// cont(v): reduced density matrix of ls(v) on (site cut-1 x bond), indexed
// p * B + j.  Hermitian PSD with trace ||v||^2.
struct BoundaryContraction {
  int cut = 0;
  int bond = 1;
  int d = 2;
  Matrix matrix;
};

BoundaryContraction contraction(const MpsState& s, int cut,
                                const NumericsConfig& nm);

double trace_norm(const Matrix& m);
double trace_distance(const Matrix& x, const Matrix& y);

// Dense partial traces over a bipartition, left factor most significant.
Matrix partial_trace_left(const Matrix& rho, long long dim_left,
                          long long dim_right);
Matrix partial_trace_right(const Matrix& rho, long long dim_left,
                           long long dim_right);

// Gluing construction for verification at small n: sigma lives on
// H_[0,cut) (x) C^B, v supplies the isometry from its Schmidt vectors, the
// result acts on the full chain.
Matrix glue(const Matrix& sigma, const MpsState& v, int cut,
            const NumericsConfig& nm);

// Epsilon-net over Hermitian matrices on C^(B*d), netting every
// independent real parameter on a uniform grid.
struct NetSpec {
  enum class Mode { FullGrid, RandomSample };
  int B = 1;
  int d = 2;
  double eta = 0.5;
  Mode mode = Mode::RandomSample;
  long long sample_count = 256;
  std::uint64_t seed = 0;
  long long full_grid_cap = 1000000;
};

// Reporting bound (2*ceil(B*d/eta)+1)^(2*B*d); saturates to +inf on
// overflow.
double net_cardinality_formula(const NetSpec& spec);

// Size of the actual parameter grid before the trace-norm filter:
// (2*floor(B*d/eta)+1)^((B*d)^2).
double net_grid_size(const NetSpec& spec);

// FullGrid: deterministic enumeration, filtered to trace norm <= 1+eta,
// refused when the grid size exceeds the cap.  RandomSample: seeded draws
// snapped to the same grid and filtered the same way.
std::vector<Matrix> build_net(const NetSpec& spec);

// Nearest net element by per-parameter rounding; exact nearest neighbour
// for a product grid under any entrywise-monotone distance.
Matrix net_nearest(const NetSpec& spec, const Matrix& y);

}  // namespace gapped1d
