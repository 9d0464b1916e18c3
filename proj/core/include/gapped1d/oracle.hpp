#pragma once

#include <string>
#include <vector>

#include "gapped1d/common.hpp"
#include "gapped1d/hamiltonian.hpp"
#include "gapped1d/mps.hpp"

namespace gapped1d {

// =====================================================================
// Dense small-chain reference: full matrices, exact eigendata, and
// structured dense applications that avoid building the full matrix.
// Everything here is capped by NumericsConfig::dense_cap_dim.
// =====================================================================

// Gate at sites (t, t+1) embedded into the full chain.
Matrix embed_two_site(const Matrix& gate, int n, int d, int t,
                      const NumericsConfig& nm);

Matrix dense_hamiltonian(const LocalHamiltonian& h, const NumericsConfig& nm);

// (Id (x) gate (x) Id) psi without forming the embedded matrix.
Vector apply_two_site_dense(const Vector& psi, int n, int d, int t,
                            const Matrix& gate);

Vector apply_hamiltonian_dense(const LocalHamiltonian& h, const Vector& psi);

struct ExactEigs {
  RVector values;  // ascending, lowest count entries
  Matrix vectors;  // dim x count, matching columns
};

// Full self-adjoint diagonalization, truncated to the lowest count pairs.
ExactEigs exact_eigs(const LocalHamiltonian& h, int count,
                     const NumericsConfig& nm);

GapInfo exact_gap(const LocalHamiltonian& h, const NumericsConfig& nm);
Vector exact_ground_state(const LocalHamiltonian& h, const NumericsConfig& nm);

// One-stop bundle for runs that track ground-truth quality.
struct ExactSolution {
  double epsilon0 = 0.0;
  double epsilon1 = 0.0;
  Vector ground;
  bool degenerate = false;  // gap below 1e-8; fidelity then depends on the
                            // eigensolver's basis choice
};

ExactSolution solve_exact(const LocalHamiltonian& h, const NumericsConfig& nm);

// |<ground|s>| for a normalized MPS; callers normalize first.
double fidelity(const MpsState& s, const ExactSolution& sol,
                const NumericsConfig& nm);

// The frozen regression set shipped under tests/fixtures: both built-in
// models across the sizes the desk runs exercise.
std::vector<ModelSpec> standard_fixture_models();
std::vector<SpectrumFixture> compute_spectrum_fixtures(
    const NumericsConfig& nm);

struct FixtureReport {
  std::string model;
  double err0 = 0.0;
  double err1 = 0.0;
  bool pass = false;
};

std::vector<FixtureReport> check_spectrum_fixtures(
    const std::vector<SpectrumFixture>& fixtures, double tol,
    const NumericsConfig& nm);

}  // namespace gapped1d
