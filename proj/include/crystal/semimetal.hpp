#pragma once

#include <string>
#include <vector>

#include "crystal/lattice.hpp"
#include "crystal/models.hpp"

namespace crystal {

struct DiracPoint {
  Vec2 k = Vec2::Zero();
  /// λ_{N+1} − λ_N at k after polishing.
  double gap = 0.0;
  /// Mean of gap(k + r ê) / 2r over directions ê, r = 1e-4.
  double vF = 0.0;
};

/// Locates band touchings between bands N−1 and N (N = occupation at mu_F)
/// by Newton iteration on gap² seeded from the grid's local gap minima.
/// Points with polished gap ≤ tol are kept, one per R* class, sorted by
/// fractional coordinates.
std::vector<DiracPoint> find_dirac_points(const BlochModel& model, double mu_F, int seed_n = 60, double tol = 1e-10);

enum class Phase { insulator, metal, semimetal };

std::string to_string(Phase p);

struct PhaseReport {
  Phase phase = Phase::insulator;
  int n_occ_min = 0;
  int n_occ_max = 0;
  /// Smallest λ_{N+1} − λ_N on the grid (meaningful for constant N).
  double min_gap = 0.0;
  std::vector<DiracPoint> dirac_points;
};

/// Insulator: constant occupation with a gap everywhere. Metal: occupation
/// varies over the grid. Semimetal: constant occupation with isolated band
/// touchings (found by find_dirac_points).
PhaseReport classify_phase(const BlochModel& model, double mu_F, const BZGrid& grid);

}  // namespace crystal
