#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gapped1d {

// =====================================================================
// Desk-scale property suites: every structural fact the sweep relies on,
// checked against dense linear algebra on random small chains.  Shared
// by the verify subcommand and the acceptance tests.
// =====================================================================

struct CheckResult {
  std::string name;
  int instances = 0;
  double worst = 0.0;  // largest observed violation
  double tolerance = 0.0;
  bool pass = false;
};

// Low energy forces ground-state overlap.
CheckResult check_energy_overlap(int instances, std::uint64_t seed);

// Two states close to a third are close to each other.
CheckResult check_overlap_triangle(int instances, std::uint64_t seed);

// Schmidt truncation beats every competitor of the same rank.
CheckResult check_best_truncation(int instances, std::uint64_t seed);

// Truncating to rank D/eps loses at most eps of the overlap with any
// rank-D state.
CheckResult check_trim_overlap_loss(int instances, std::uint64_t seed);

// Truncation across one cut never raises the rank across another.
CheckResult check_trim_rank_monotone(int instances, std::uint64_t seed);

// Boundary gluing: the left reduction is unchanged.
CheckResult check_glue_left_reduction(int instances, std::uint64_t seed);

// Boundary gluing: the site-and-boundary reduction moves exactly as far
// as the boundary contraction does.
CheckResult check_glue_boundary_distance(int instances, std::uint64_t seed);

// Boundary gluing: the glued energy is controlled by the left energy,
// the reference state's right energy, and the contraction distance.
CheckResult check_glue_energy(int instances, std::uint64_t seed);

// Truncating a low-energy state at an empirically sufficient rank keeps
// the energy within 6*sqrt(delta) of the ground energy.
CheckResult check_post_trim_energy(int instances, std::uint64_t seed);

// Frozen spectrum fixtures still match fresh dense diagonalization.
CheckResult check_fixture_file(const std::string& path);

std::vector<CheckResult> lemma_checks(int instances_per_check = 120,
                                      std::uint64_t seed = 0x4c454d4d41ull);

}  // namespace gapped1d
