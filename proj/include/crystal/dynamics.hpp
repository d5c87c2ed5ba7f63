#pragma once

#include <vector>

#include "crystal/models.hpp"

namespace crystal {

enum class Scheme { exp_midpoint, rk4_check };

struct IntegratorOptions {
  /// Base step. 0 selects default_dt at the initial fiber.
  double dt = 0.0;
  Scheme scheme = Scheme::exp_midpoint;
  double unitarity_tol = 1e-9;
};

/// Propagated occupied states at one output time. phi is M×N.
struct PropagationFrame {
  Vec2 k = Vec2::Zero();
  double t = 0.0;
  CMatrix phi;
};

/// min(0.01, 0.1 / spectral radius of H_k).
double default_dt(const BlochModel& model, const Vec2& k);

/// exp(−i·dt·H) for Hermitian H (closed form for 2×2, eigendecomposition otherwise).
CMatrix expm_hermitian(const CMatrix& H, double dt);

/// phi ← exp(−i·dt·H_mid)·phi.
void step_exp_midpoint(const CMatrix& H_mid, double dt, CMatrix& phi);

/// ‖φ†φ − I‖_max.
double unitarity_defect(const CMatrix& phi);

/// Solves i∂_tφ = H_{k−ε e_β t} φ from t = 0. Steps are equal within each
/// interval between requested output times and land on them exactly.
class FramePropagator {
 public:
  FramePropagator(const BlochModel& model, const Vec2& k, double eps, const Vec2& e_beta, CMatrix phi0,
                  IntegratorOptions opts = {});

  /// Advances to time t ≥ time(). Throws UnitarityBreachError if the
  /// unitarity defect exceeds the tolerance at t.
  void advance_to(double t);

  double time() const { return t_; }
  const CMatrix& phi() const { return phi_; }
  /// Base step in use.
  double dt() const { return dt_; }
  /// k − ε e_β t at the current time.
  Vec2 shifted_k() const { return k_ - eps_ * t_ * e_beta_; }

 private:
  void step(double s);
  void advance_haldane(long nsteps, double s);

  const BlochModel& model_;
  const HaldaneModel* haldane_;
  Vec2 k_, e_beta_;
  double eps_;
  IntegratorOptions opts_;
  double dt_;
  double t_ = 0.0;
  CMatrix phi_;
  CMatrix h_, scratch_;
};

/// Frames at each requested time for the initial occupied eigencolumns at
/// mu_F. times must be ascending with times[0] = 0.
std::vector<PropagationFrame> propagate_frame(const BlochModel& model, const Vec2& k, double eps,
                                              const Vec2& e_beta, double mu_F, const std::vector<double>& times,
                                              IntegratorOptions opts = {});

/// Same, but all M eigencolumns are propagated (the full propagator applied
/// to the eigenbasis of H_k).
std::vector<PropagationFrame> propagate_full_frame(const BlochModel& model, const Vec2& k, double eps,
                                                   const Vec2& e_beta, const std::vector<double>& times,
                                                   IntegratorOptions opts = {});

}  // namespace crystal
