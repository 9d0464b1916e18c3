#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "gapped1d/common.hpp"

namespace gapped1d {

// =====================================================================
// Nearest-neighbour chain Hamiltonians H = sum_t H_t, term t acting on
// sites (t, t+1), t in [0, n-2].  Sites are 0-based everywhere in code;
// site 0 is the most significant factor in all Kronecker orderings.
// =====================================================================

enum class ModelKind { Tfim, Xxz, Explicit };

struct ModelSpec {
  ModelKind kind = ModelKind::Tfim;
  int n = 4;
  int d = 2;
  double g = 2.0;       // Tfim transverse field
  double delta = 1.5;   // Xxz anisotropy
  double h = 0.5;       // Xxz longitudinal field
  std::vector<Matrix> explicit_terms;  // Explicit: n-1 matrices, (d*d)x(d*d)

  static ModelSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  std::string name() const;
};

// Per-term affine record: raw_term = scale * normalized_term + shift * Id.
struct AffineScale {
  double shift = 0.0;
  double scale = 1.0;
};

struct GapInfo {
  double epsilon0 = 0.0;
  double epsilon1 = 0.0;
  double gap() const { return epsilon1 - epsilon0; }
};

class LocalHamiltonian {
 public:
  // Open-boundary conventions, single-site fields split across the two
  // adjacent terms (full weight at the chain ends):
  //   Tfim(g):  -Z(x)Z - g*(a_t X(x)I + b_t I(x)X)
  //   Xxz(d,h):  X(x)X + Y(x)Y + d Z(x)Z - h*(a_t Z(x)I + b_t I(x)Z)
  // with a_0 = 1, a_t = 1/2 otherwise; b_{n-2} = 1, b_t = 1/2 otherwise.
  static LocalHamiltonian build(const ModelSpec& spec);

  // Per-term affine rescale onto [0,1]: H_t -> (H_t - lmin)/(lmax - lmin).
  // The recorded AffineScale maps term energies back to model units.
  LocalHamiltonian normalized() const;

  int n() const { return n_; }
  int d() const { return d_; }
  int term_count() const { return n_ - 1; }
  bool is_normalized() const { return normalized_; }

  const Matrix& term(int t) const;            // couples sites (t, t+1)
  const std::vector<AffineScale>& scales() const { return scales_; }

  // Id - H_t; requires a normalized Hamiltonian so that 0 <= P_t <= Id.
  Matrix projection_term(int t) const;

  // Sum of raw-unit term energies recovered from normalized-unit ones.
  double model_energy(const std::vector<double>& normalized_term_energies) const;

  // Constructor for explicit term lists (also used by tests).
  LocalHamiltonian(int n, int d, std::vector<Matrix> terms);

 private:
  int n_ = 0;
  int d_ = 0;
  std::vector<Matrix> terms_;
  std::vector<AffineScale> scales_;
  bool normalized_ = false;
};

// Frozen (model, n) -> (epsilon0, epsilon1) records used as regression
// anchors for the exact oracle.
struct SpectrumFixture {
  ModelSpec model;
  double epsilon0 = 0.0;
  double epsilon1 = 0.0;
};

std::vector<SpectrumFixture> load_spectrum_fixtures(const std::string& path);
void save_spectrum_fixtures(const std::string& path,
                            const std::vector<SpectrumFixture>& fixtures);

}  // namespace gapped1d
