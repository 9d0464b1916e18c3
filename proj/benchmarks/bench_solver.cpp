#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "gapped1d/agsp.hpp"
#include "gapped1d/boundary.hpp"
#include "gapped1d/hamiltonian.hpp"
#include "gapped1d/mps.hpp"
#include "gapped1d/sdp.hpp"

namespace {

using namespace gapped1d;

const NumericsConfig nm{};

LocalHamiltonian tfim(int n) {
  ModelSpec spec;
  spec.kind = ModelKind::Tfim;
  spec.n = n;
  spec.g = 2.0;
  return LocalHamiltonian::build(spec).normalized();
}

std::vector<MpsState> basis_states(int n, int count) {
  std::vector<MpsState> out;
  for (int k = 0; k < count; ++k) {
    std::vector<int> levels(n, 0);
    for (int site = 0; site < n; ++site)
      levels[n - 1 - site] = (k >> site) & 1;
    out.push_back(MpsState::product_basis_state(n, 2, levels));
  }
  return out;
}

void bm_sdp_solve(benchmark::State& state) {
  const int cut = static_cast<int>(state.range(0));
  const int B = static_cast<int>(state.range(1));
  const LocalHamiltonian h = tfim(cut + 2);
  const SpanBasis basis =
      orthonormalize(basis_states(cut, std::min(1 << cut, 6)),
                     nm.gram_threshold, nm);
  Matrix target = Matrix::Zero(2 * B, 2 * B);
  for (int j = 0; j < B; ++j) target(j, j) = cxd(1.0 / B, 0.0);
  const SdpProblem p = assemble(basis, h, cut, B, target, 0.5, nm);
  SolverConfig cfg;
  cfg.max_iter = 600;
  for (auto _ : state) {
    SdpSolution sol = solve(p, cfg);
    benchmark::DoNotOptimize(sol);
  }
}
BENCHMARK(bm_sdp_solve)
    ->Args({3, 2})
    ->Args({4, 2})
    ->Args({5, 4})
    ->Unit(benchmark::kMillisecond);

void bm_word_sampling(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LocalHamiltonian h = tfim(n);
  AgspConfig cfg;
  cfg.m = 12;
  cfg.ell = static_cast<long long>(state.range(1));
  cfg.seed = 7;
  for (auto _ : state) {
    std::vector<SampledTerm> words = sample_terms(h, cfg);
    benchmark::DoNotOptimize(words);
  }
}
BENCHMARK(bm_word_sampling)
    ->Args({8, 256})
    ->Args({16, 1024})
    ->Unit(benchmark::kMicrosecond);

void bm_cut_decomposition(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LocalHamiltonian h = tfim(n);
  AgspConfig cfg;
  cfg.m = 10;
  cfg.ell = state.range(1);
  cfg.seed = 9;
  const std::vector<SampledTerm> words = sample_terms(h, cfg);
  for (auto _ : state) {
    CutDecomposition dec =
        decompose_across_cut(words, h, n / 2, 1.0, 1 << 22, nm);
    benchmark::DoNotOptimize(dec);
  }
}
BENCHMARK(bm_cut_decomposition)
    ->Args({8, 64})
    ->Args({12, 128})
    ->Unit(benchmark::kMillisecond);

void bm_boundary_contraction(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 5;
  auto next = [&seed]() {
    seed += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = seed;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  Matrix g(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      g(r, c) = cxd((next() >> 11) * 0x1.0p-53 - 0.5,
                    (next() >> 11) * 0x1.0p-53 - 0.5);
  MpsState s = MpsState::product_basis_state(n, 2, std::vector<int>(n, 0));
  for (int sweep = 0; sweep < n; ++sweep)
    for (int t = 0; t + 1 < n; ++t) s = apply_two_site_op(s, t, g, nm, 1e-10);
  s = normalized(trim_all(s, 16, nm), nm);
  for (auto _ : state) {
    BoundaryContraction cont = contraction(s, n / 2, nm);
    benchmark::DoNotOptimize(cont);
  }
}
BENCHMARK(bm_boundary_contraction)
    ->Args({8})
    ->Args({16})
    ->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
