#pragma once

#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>

#include "gapped1d/agsp.hpp"
#include "gapped1d/boundary.hpp"
#include "gapped1d/common.hpp"
#include "gapped1d/hamiltonian.hpp"
#include "gapped1d/sdp.hpp"

namespace gapped1d {

// =====================================================================
// Run configuration: one JSON document that pins every knob of a solve.
// The effective config (every default filled in) is embedded in reports
// and must re-parse to an identical configuration.
// =====================================================================

// Invalid configuration, unknown key, or violated theory-mode premise.
// The CLI maps this to exit code 3; the message names the offender.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CapsConfig {
  int s_cap = 12;      // viable-set cardinality after size trimming
  int b_cap = 10;      // bond cap after bond trimming
  int growth_cap = 2;  // allowed factor of transient growth per iteration
};

struct NetConfig {
  int B = 2;                  // boundary bond budget (effective B is capped
                              // by the true Schmidt bound at each cut)
  double eta = 0.5;           // net resolution
  std::string mode = "random";  // "full" | "random"
  int count = 256;            // RandomSample draw count
  long long cap = 1000000;    // FullGrid refusal threshold
};

struct AgspRunConfig {
  int m = 12;                   // Chebyshev-free power degree, mid iterations
  long long ell = 64;           // sampled words per average, mid iterations
  int kappa_cap = 8;            // per-word occurrence cap; <= 0 disables
  bool strict = true;           // resample capped words instead of keeping them
  std::string scale_mode = "unnormalized";  // "unnormalized" | "known_epsilon0"
  int final_m = 96;             // degree for the closing iteration
  long long final_ell = 64;     // word budget for the closing iteration
  long long branch_cap = 200000;  // cut-decomposition branch refusal threshold
};

struct RunConfig {
  ModelSpec model;
  std::uint64_t seed = 1;
  bool oracle = false;       // dense cross-checks and fidelity tracking
  bool theory_mode = false;  // enforce the small-epsilon premises
  double epsilon = 0.0;      // gap estimate; 0 defers to the oracle gap
  double c_eps_override = -1.0;  // < 0: use the default (epsilon/169)^2
  double radius = 0.25;      // trace-norm proximity radius for size trimming
  double final_q = 0.0;      // closing accuracy target; 0 defers to n * s_cap
  double r_proxy = 16.0;     // stand-in for the theory bond polynomial r(n)
  double compress_tol = 0.0;  // extra relative truncation during applies
  bool measure_k = true;     // record per-iteration averaged-operator error
  CapsConfig caps;
  NetConfig net;
  AgspRunConfig agsp;
  SolverConfig solver;
  NumericsConfig numerics;

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Reads a config file, overlays it on the defaults, applies overrides of
// the form "dotted.key=value" in order, and validates.  Unknown keys and
// type mismatches throw ConfigError naming the key.
RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides = {});

// Same pipeline starting from an in-memory document.
RunConfig config_from_document(const nlohmann::json& user,
                               const std::vector<std::string>& overrides = {});

// Range and consistency checks; throws ConfigError naming the key.
void validate_config(const RunConfig& cfg);

// Theory-scale parameter block evaluated at gap epsilon: the fraction
// c_eps, the premise inequalities, and the resulting degree / word-count
// plan at accuracy target q.  In theory mode a violated premise throws
// ConfigError naming the inequality.
nlohmann::json theory_block(const RunConfig& cfg, double epsilon,
                            bool enforce);

NetSpec::Mode net_mode_from_string(const std::string& mode);
AgspScaleMode scale_mode_from_string(const std::string& mode);

}  // namespace gapped1d
