#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "gapped1d/hamiltonian.hpp"
#include "gapped1d/mps.hpp"

namespace {

using namespace gapped1d;

const NumericsConfig nm{};

MpsState random_chain(int n, int bond, std::uint64_t seed) {
  // A product state pushed through random two-site gates until every
  // interior bond saturates the requested rank.
  std::uint64_t state = seed;
  auto next = [&state]() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  auto gate = [&next]() {
    Matrix g(4, 4);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        g(r, c) = cxd((next() >> 11) * 0x1.0p-53 - 0.5,
                      (next() >> 11) * 0x1.0p-53 - 0.5);
    return g;
  };
  MpsState s = MpsState::product_basis_state(n, 2, std::vector<int>(n, 0));
  for (int sweep = 0; sweep < 2 * n; ++sweep)
    for (int t = 0; t + 1 < n; ++t)
      s = apply_two_site_op(s, t, gate(), nm, 0.0);
  s = trim_all(s, bond, nm);
  return normalized(s, nm);
}

void bm_two_site_apply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int bond = static_cast<int>(state.range(1));
  const MpsState s = random_chain(n, bond, 11);
  Matrix g = Matrix::Identity(4, 4);
  g(1, 2) = cxd(0.25, 0.0);
  g(2, 1) = cxd(0.25, 0.0);
  for (auto _ : state) {
    MpsState out = apply_two_site_op(s, n / 2, g, nm, 1e-12);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(bm_two_site_apply)
    ->Args({8, 8})
    ->Args({16, 16})
    ->Args({24, 32})
    ->Unit(benchmark::kMicrosecond);

void bm_schmidt(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int bond = static_cast<int>(state.range(1));
  const MpsState s = random_chain(n, bond, 12);
  for (auto _ : state) {
    SchmidtData sd = schmidt(s, n / 2, nm);
    benchmark::DoNotOptimize(sd);
  }
}
BENCHMARK(bm_schmidt)
    ->Args({8, 8})
    ->Args({16, 16})
    ->Args({24, 32})
    ->Unit(benchmark::kMicrosecond);

void bm_linear_combination(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int bond = static_cast<int>(state.range(1));
  std::vector<MpsState> terms;
  std::vector<cxd> coeffs;
  for (int k = 0; k < 4; ++k) {
    terms.push_back(random_chain(n, bond, 20 + static_cast<std::uint64_t>(k)));
    coeffs.push_back(cxd(1.0 / (k + 1.0), 0.0));
  }
  for (auto _ : state) {
    MpsState out = linear_combination(terms, coeffs, nm, 1e-12);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(bm_linear_combination)
    ->Args({8, 8})
    ->Args({16, 16})
    ->Unit(benchmark::kMicrosecond);

void bm_expectation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int bond = static_cast<int>(state.range(1));
  ModelSpec spec;
  spec.kind = ModelKind::Tfim;
  spec.n = n;
  spec.g = 2.0;
  const LocalHamiltonian h = LocalHamiltonian::build(spec).normalized();
  const MpsState s = random_chain(n, bond, 31);
  for (auto _ : state) {
    double e = expectation(s, h);
    benchmark::DoNotOptimize(e);
  }
}
BENCHMARK(bm_expectation)
    ->Args({8, 8})
    ->Args({16, 16})
    ->Args({24, 32})
    ->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
