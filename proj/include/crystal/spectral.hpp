#pragma once

#include <limits>
#include <vector>

#include "crystal/lattice.hpp"
#include "crystal/models.hpp"

namespace crystal {

/// Eigenstructure of one fiber. vectors columns are u_{n,k}, ascending λ.
struct FiberSpectrum {
  Vec2 k = Vec2::Zero();
  Eigen::VectorXd lambdas;
  CMatrix vectors;
  int n_occ = 0;
  double gap = std::numeric_limits<double>::infinity();

  int dim() const { return static_cast<int>(lambdas.size()); }
  /// First n_occ eigencolumns.
  CMatrix occupied() const { return vectors.leftCols(n_occ); }
};

/// Ascending eigenvalues and orthonormal eigenvectors, each column phased so
/// that its largest-magnitude entry is real positive. Occupation is left at 0.
/// Throws InvalidArgument if ‖H − H†‖ > 1e-8 ‖H‖.
FiberSpectrum eigensystem(const CMatrix& H, const Vec2& k = Vec2::Zero());

/// Sets n_occ = #{λ ≤ mu_F} and the gap λ_{N+1} − λ_N (+∞ if N is 0 or M).
void set_occupation(FiberSpectrum& s, double mu_F);

/// eigensystem(model.fiber(k)) with occupation at mu_F.
FiberSpectrum fiber_spectrum(const BlochModel& model, const Vec2& k, double mu_F);

struct GroundProjector {
  CMatrix P;
  int rank = 0;
};

/// P = Σ_{λ_n ≤ mu_F} u_n u_n†.
GroundProjector ground_projector(const FiberSpectrum& s, double mu_F);

/// Result of the plaquette (link-variable) Chern computation.
struct ChernResult {
  /// Berry flux through each plaquette (i, j) → (i+1, j+1), index i·n + j,
  /// signed in the Cartesian orientation.
  std::vector<double> plaquette_flux;
  /// Σ flux / 2π before rounding.
  double winding = 0.0;
  int chern = 0;
};

/// Chern number of the occupied bundle at mu_F. Wrap-around neighbours are
/// brought into the same gauge with quasi_period_unitary.
/// Throws GapClosureError if the occupation varies over the grid or any grid
/// fiber has gap < 1e-8.
ChernResult berry_chern(const BlochModel& model, double mu_F, const BZGrid& grid);

/// Occupied-bundle Berry curvature Ω_ab = −i Tr(P [∂_a P, ∂_b P]) at k, with
/// ∂P from first-order perturbation theory. With the Cartesian unit vectors
/// as e_a, e_b, ∫_B Ω d²k = 2π · chern.
double berry_curvature(const BlochModel& model, const Vec2& k, double mu_F, const Vec2& ea, const Vec2& eb);

/// ∂_e P at k by perturbation theory. Requires a positive gap at mu_F.
CMatrix projector_derivative(const FiberSpectrum& s, const CMatrix& dH);

/// [H, A].
CMatrix liouvillian_apply(const CMatrix& H, const CMatrix& A);

/// Partial inverse of the Liouvillian with respect to the splitting after
/// the first n_occ eigenvalues: in the eigenbasis
/// (L⁺A)_ij = A_ij / (λ_i − λ_j) when i, j lie in different blocks, else 0.
/// Throws GapClosureError when λ_{n_occ+1} − λ_{n_occ} ≤ 1e-14 ‖H‖.
CMatrix liouvillian_pinv(const FiberSpectrum& s, int n_occ, const CMatrix& A);

/// Time kernel for one transition of frequency ω: e^{−iωt} − 1, or its running
/// mean (e^{−iωt} − 1)/(−iωt) − 1 when averaged.
cplx kubo_kernel(double omega, double t, bool averaged);

/// Linear-response current per unit field of one fiber (before BZ weighting):
/// i Tr(∂_αH (e^{−itL} − 1) L⁺ ∂_βγ(0)) as the double sum over occupied n and
/// empty m. Returns the real part; throws InconsistencyError if the imaginary
/// residual exceeds 1e-10 (relative) and GapClosureError on a zero gap.
double kubo_current(const FiberSpectrum& s, const CMatrix& dHa, const CMatrix& dHb, double mu_F, double t,
                    bool averaged);

}  // namespace crystal
