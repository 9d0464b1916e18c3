#pragma once

#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "gapped1d/agsp.hpp"
#include "gapped1d/config.hpp"
#include "gapped1d/hamiltonian.hpp"
#include "gapped1d/mps.hpp"
#include "gapped1d/oracle.hpp"

namespace gapped1d {

// =====================================================================
// The viable-set sweep.  The chain grows one site per iteration while a
// small family of left-half states keeps the ground state's left Schmidt
// subspace inside its span.  Each iteration runs four steps: extension,
// size trimming against a net of boundary contractions, bond trimming,
// and error reduction by a sampled spectral amplifier.
// =====================================================================

// Family of normalized states on sites [0, cut).
struct ViableSet {
  int cut = 0;
  std::vector<MpsState> vectors;
};

// An iteration that cannot continue (no feasible net element, or every
// amplifier output annihilated).  The driver retries once with fresh
// randomness before giving up.
struct IterationAbort : std::runtime_error {
  int iteration;
  IterationAbort(int i, const std::string& what)
      : std::runtime_error(what), iteration(i) {}
};

struct IterationReport {
  int i = 0;
  int retries = 0;
  int size_extend = 0, bond_extend = 0;
  int size_cardinality = 0, bond_cardinality = 0;
  int size_bond = 0, bond_bond = 0;
  int size_error = 0, bond_error = 0;
  int net_tried = 0;
  int net_feasible = 0;
  long long dropped_outputs = 0;
  long long sample_violations = 0;
  int sample_max_occurrence = 0;
  double k_error = -1.0;           // averaged-operator distance; -1 unmeasured
  bool k_error_exact = false;      // dense value rather than an estimate
  double witness_fidelity = -1.0;  // span overlap with the exact ground state
  double seconds = 0.0;            // shown in the text summary only
};

struct RunReport {
  nlohmann::json effective_config;
  std::string model_name;
  bool oracle = false;
  bool degenerate_gap = false;
  double epsilon0 = 0.0;
  double epsilon1 = 0.0;
  std::vector<IterationReport> iterations;
  double final_energy = 0.0;        // normalized units
  double final_model_energy = 0.0;  // model units
  double final_fidelity = -1.0;
  int final_bond = 0;
  int final_span = 0;
  int exit_code = 0;  // 0 ok, 2 aborted after retry
  int aborted_iteration = -1;
  std::string diagnostic;
  std::string artifact;  // state file path, set by the writer
  nlohmann::json theory;

  // Deterministic: identical runs serialize byte-identically, so wall
  // times stay out of this document.
  nlohmann::json to_json() const;

  // Per-iteration chart, one row per pipeline step, plus totals.
  std::string summary_text() const;
};

struct RunResult {
  MpsState state;
  double energy = 0.0;        // normalized units
  double model_energy = 0.0;  // model units
  RunReport report;
};

// ---------------------------------------------------------------------
// Individual steps, exposed for tests.  All operate on normalized
// vectors and return normalized vectors.
// ---------------------------------------------------------------------

// Tensor every member with every basis state of the next site; from an
// empty set produces the d single-site basis states.
ViableSet extend(const ViableSet& s, int d);

struct CardinalityOutcome {
  ViableSet set;
  int tried = 0;
  int feasible = 0;
};

// Size trimming: for every net point, minimize the left-half energy over
// the span subject to boundary-contraction proximity; keep the leading
// components of the best solutions, then top up with the inputs until
// the cardinality cap is met.
CardinalityOutcome cardinality_reduce(const ViableSet& s1,
                                      const LocalHamiltonian& h,
                                      const RunConfig& cfg,
                                      std::uint64_t net_seed);

ViableSet bond_trim_step(const ViableSet& s2, int b_cap,
                         const NumericsConfig& nm, long long* dropped);

struct ErrorReduceOutcome {
  ViableSet set;
  SampleStats stats;
  long long dropped_outputs = 0;
  double k_error = -1.0;
  bool k_exact = false;
};

// Error reduction: sample amplifier words, split them across the working
// cut, and replace the family with the largest left-side branch images.
// At the closing cut the per-input branch sums (the full amplifier
// applied to each input) join the candidate pool.
ErrorReduceOutcome error_reduce(const ViableSet& s3,
                                const LocalHamiltonian& h,
                                const RunConfig& cfg, std::uint64_t agsp_seed,
                                bool final_iter, double epsilon0_known);

struct FinalExtract {
  MpsState state;
  double energy = 0.0;  // normalized units
};

// Exact minimization of the full energy over the final span.
FinalExtract final_extract(const ViableSet& sn, const LocalHamiltonian& h,
                           const RunConfig& cfg);

// Largest overlap a unit vector with left half confined to the span can
// have with the given dense state.
double span_fidelity(const ViableSet& s, const Vector& ground, int d,
                     const NumericsConfig& nm);

// Full sweep.  Failures that survive a retry are recorded in the report
// (exit_code 2) rather than thrown; configuration problems throw
// ConfigError.
RunResult run(const RunConfig& cfg);

}  // namespace gapped1d
