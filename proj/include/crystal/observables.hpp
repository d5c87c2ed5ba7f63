#pragma once

#include <vector>

#include "crystal/dynamics.hpp"
#include "crystal/lattice.hpp"
#include "crystal/models.hpp"
#include "crystal/spectral.hpp"

namespace crystal {

/// Current per unit volume as a function of time.
struct CurrentTrace {
  std::vector<double> times;
  std::vector<double> j_inst;
  /// Trapezoidal running mean (1/t)∫₀ᵗ j_inst.
  std::vector<double> j_runavg;
  /// (2π)^{-2} Σ_k w |integrand_k|, a magnitude scale for j_inst.
  std::vector<double> j_l1;
  double eps = 0.0;
  Vec2 e_alpha = Vec2::Zero();
  Vec2 e_beta = Vec2::Zero();
  double mu_F = 0.0;
  int grid_n = 0;
};

struct SweepOptions {
  IntegratorOptions integrator;
  std::size_t block_size = 64;
};

/// −Re Tr(∂_αH_{k−εe_βt} φφ†) for the frame phi propagated to time t at k.
double current_integrand(const BlochModel& model, const Vec2& k, double t, double eps, const Vec2& e_alpha,
                         const Vec2& e_beta, const CMatrix& phi);

/// j(t) = (2π)^{-2} Σ_k w_k current_integrand(...), parallel over k-blocks with
/// a fixed-order compensated fold (bitwise independent of the thread count).
/// times must start at 0 and ascend.
CurrentTrace current_trace(const BlochModel& model, const BZGrid& grid, double eps, const Vec2& e_alpha,
                           const Vec2& e_beta, double mu_F, const std::vector<double>& times,
                           const SweepOptions& opts = {});

/// Serial reference for current_trace: one compensated sum in k order.
CurrentTrace current_trace_reference(const BlochModel& model, const BZGrid& grid, double eps, const Vec2& e_alpha,
                                     const Vec2& e_beta, double mu_F, const std::vector<double>& times,
                                     const IntegratorOptions& opts = {});

/// Trapezoidal running mean of j over the sample times; out[0] = j[0].
std::vector<double> running_average(const std::vector<double>& times, const std::vector<double>& j);
/// Recomputes trace.j_runavg from trace.j_inst.
CurrentTrace running_average(CurrentTrace trace);

/// Evenly spaced 0, dt, 2dt, ..., t_max (t_max included).
std::vector<double> sample_times(double t_max, double dt);

struct HallResult {
  /// σ⊥ = (chern / 2π) [[0, 1], [−1, 0]] in Cartesian components.
  Eigen::Matrix2d sigma;
  /// e_αᵀ σ⊥ e_β.
  double contracted = 0.0;
  int chern = 0;
  /// (2π)^{-2} Σ_k w Ω_12(k) from the analytic curvature on the grid.
  double sigma12_quadrature = 0.0;
};

/// Transverse conductivity of an insulator. The plaquette Chern number is
/// cross-checked against quadrature of the analytic curvature
/// (|quad − chern/2π| ≤ 0.05/2π, else InconsistencyError).
HallResult hall_sigma(const BlochModel& model, double mu_F, const BZGrid& grid, const Vec2& e_alpha,
                      const Vec2& e_beta);

struct BallisticResult {
  double D = 0.0;
  /// Volume form (2π)^{-2} Σ w 1(occ) ∂_α∂_β λ.
  double volume = 0.0;
  /// Slope of the predictor P(s) at s = 0.
  double slope = 0.0;
  /// |volume(n) − volume(n/2)|.
  double error_estimate = 0.0;
};

/// Ballistic coefficient D_αβ of a metal, with j ≈ D ε t in the ballistic
/// regime. Throws InconsistencyError if the two routes disagree by more than
/// 3× the refinement error estimate.
BallisticResult ballistic_D(const BlochModel& model, double mu_F, const BZGrid& grid, const Vec2& e_alpha,
                            const Vec2& e_beta);

/// (2π)^{-2} Σ_k w ∂_α∂_β Σ_{n ≤ N_k} λ_n(k), occupation fixed at k, by a
/// 4-point central difference with step h.
double band_sum_hessian(const BlochModel& model, double mu_F, const BZGrid& grid, const Vec2& e_alpha,
                        const Vec2& e_beta, double h);

/// −(2π)^{-2} Σ_k w Σ_{n ≤ N_k} ∂_αλ_n(k − εe_βt) at each time. Requires one
/// partially filled band separated from its neighbours on the grid
/// (GapClosureError otherwise).
std::vector<double> bloch_predictor(const BlochModel& model, double mu_F, const BZGrid& grid, double eps,
                                    const Vec2& e_beta, const Vec2& e_alpha, const std::vector<double>& times);

/// (n_dirac / 16) e_α·e_β.
double semimetal_sigma(int n_dirac, const Vec2& e_alpha, const Vec2& e_beta);

/// First-order-in-ε current per unit field: the BZ sum of kubo_current plus
/// the ballistic term t·band_sum_hessian. j_inst holds the instantaneous
/// response and j_runavg its exact running mean (t/2 for the ballistic term).
/// Throws GapClosureError on a zero-gap grid fiber.
CurrentTrace kubo_trace(const BlochModel& model, const BZGrid& grid, double mu_F, const Vec2& e_alpha,
                        const Vec2& e_beta, const std::vector<double>& times, std::size_t block_size = 64);

struct AdiabaticTerms {
  double adiabatic = 0.0;
  double static_term = 0.0;
  double oscillatory = 0.0;
  double residual = 0.0;
};

/// Splits current_integrand at fiber k and time t into the adiabatic,
/// static and oscillatory parts plus the residual. full_frame is the full
/// M×M propagated eigenbasis from propagate_full_frame.
AdiabaticTerms adiabatic_decomposition(const BlochModel& model, const Vec2& k, double eps, const Vec2& e_alpha,
                                       const Vec2& e_beta, double mu_F, double t, const CMatrix& full_frame);

/// Time-averaged Dirac-cone response (1/t)∫₀ᵗ I^D(δ, t') dt' over the disc of
/// radius delta: composite 10-point Gauss–Legendre in r (n_radial panels)
/// and a uniform angular rule. Diagonal → iπ²/4 for δ vF t ≫ 1.
Eigen::Matrix2cd dirac_timeavg(double delta, double vF, double t, int n_radial = 200, int n_angular = 64);

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace crystal
