#include "crystal/observables.hpp"

#include <cmath>
#include <sstream>

#include "crystal/bz_sum.hpp"
#include "crystal/errors.hpp"

namespace crystal {

namespace {

constexpr double kInvTwoPiSq = 1.0 / (kTwoPi * kTwoPi);

// Σ_{n < nocc} λ_n(k) with the band indices fixed.
double band_sum(const BlochModel& model, const Vec2& k, int nocc) {
  const FiberSpectrum s = eigensystem(model.fiber(k), k);
  double acc = 0.0;
  for (int n = 0; n < nocc; ++n) acc += s.lambdas[n];
  return acc;
}

// Hellmann–Feynman Σ_{n < nocc} ⟨n|∂_e H|n⟩ at k.
double band_sum_slope(const BlochModel& model, const Vec2& k, const Vec2& e, int nocc) {
  if (nocc == 0) return 0.0;
  const FiberSpectrum s = eigensystem(model.fiber(k), k);
  const CMatrix u = s.vectors.leftCols(nocc);
  return (u.adjoint() * model.deriv(k, e) * u).trace().real();
}

int occupation(const BlochModel& model, const Vec2& k, double mu_F) { return fiber_spectrum(model, k, mu_F).n_occ; }

BZGrid coarser(const BZGrid& grid) {
  const int n = grid.n_per_dim();
  const int half = std::max(1, n / 2);
  return BZGrid(grid.lattice(), half, grid.fractional_shift() * (static_cast<double>(n) / half));
}

std::string where(const Vec2& k) {
  std::ostringstream os;
  os.precision(17);
  os << "k=(" << k.x() << "," << k.y() << ")";
  return os.str();
}

}  // namespace

HallResult hall_sigma(const BlochModel& model, double mu_F, const BZGrid& grid, const Vec2& e_alpha,
                      const Vec2& e_beta) {
  const ChernResult ch = berry_chern(model, mu_F, grid);
  HallResult r;
  r.chern = ch.chern;
  const double s12 = ch.chern / kTwoPi;
  r.sigma << 0.0, s12, -s12, 0.0;
  r.contracted = e_alpha.dot(r.sigma * e_beta);
  const auto sum = bz_block_sum(grid.size(), 1, [&](std::size_t idx, std::span<double> out) {
    out[0] = berry_curvature(model, grid.point(idx), mu_F, Vec2(1.0, 0.0), Vec2(0.0, 1.0));
  });
  r.sigma12_quadrature = sum[0] * grid.weight() * kInvTwoPiSq;
  if (std::abs(r.sigma12_quadrature - s12) > 0.05 / kTwoPi) {
    std::ostringstream os;
    os << "hall_sigma: curvature quadrature " << r.sigma12_quadrature << " disagrees with chern " << ch.chern;
    throw InconsistencyError(os.str());
  }
  return r;
}

double band_sum_hessian(const BlochModel& model, double mu_F, const BZGrid& grid, const Vec2& e_alpha,
                        const Vec2& e_beta, double h) {
  const auto sum = bz_block_sum(grid.size(), 1, [&](std::size_t idx, std::span<double> out) {
    const Vec2& k = grid.point(idx);
    const int nocc = occupation(model, k, mu_F);
    if (nocc == 0) {
      out[0] = 0.0;
      return;
    }
    const Vec2 ha = h * e_alpha, hb = h * e_beta;
    const double fpp = band_sum(model, k + ha + hb, nocc);
    const double fpm = band_sum(model, k + ha - hb, nocc);
    const double fmp = band_sum(model, k - ha + hb, nocc);
    const double fmm = band_sum(model, k - ha - hb, nocc);
    out[0] = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
  });
  return sum[0] * grid.weight() * kInvTwoPiSq;
}

BallisticResult ballistic_D(const BlochModel& model, double mu_F, const BZGrid& grid, const Vec2& e_alpha,
                            const Vec2& e_beta) {
  const double b1 = grid.lattice().b1().norm();
  auto volume = [&](const BZGrid& g) {
    return band_sum_hessian(model, mu_F, g, e_alpha, e_beta, b1 / (8.0 * g.n_per_dim()));
  };
  BallisticResult r;
  r.volume = volume(grid);
  r.error_estimate = std::abs(r.volume - volume(coarser(grid)));

  const double s = b1 / (8.0 * grid.n_per_dim());
  const auto p = bz_block_sum(grid.size(), 2, [&](std::size_t idx, std::span<double> out) {
    const Vec2& k = grid.point(idx);
    const int nocc = occupation(model, k, mu_F);
    out[0] = -band_sum_slope(model, k - s * e_beta, e_alpha, nocc);
    out[1] = -band_sum_slope(model, k + s * e_beta, e_alpha, nocc);
  });
  r.slope = (p[0] - p[1]) / (2.0 * s) * grid.weight() * kInvTwoPiSq;
  r.D = r.volume;

  const double tol = 3.0 * r.error_estimate + 1e-9 * std::max(1.0, std::abs(r.volume));
  if (std::abs(r.volume - r.slope) > tol) {
    std::ostringstream os;
    os.precision(10);
    os << "ballistic_D: volume form " << r.volume << " and predictor slope " << r.slope
       << " differ beyond 3x the refinement error " << r.error_estimate;
    throw InconsistencyError(os.str());
  }
  return r;
}

std::vector<double> bloch_predictor(const BlochModel& model, double mu_F, const BZGrid& grid, double eps,
                                    const Vec2& e_beta, const Vec2& e_alpha, const std::vector<double>& times) {
  const std::size_t npts = grid.size();
  std::vector<int> occ(npts);
  std::vector<Eigen::VectorXd> lam(npts);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(npts); ++idx) {
    const FiberSpectrum s = fiber_spectrum(model, grid.point(idx), mu_F);
    occ[idx] = s.n_occ;
    lam[idx] = s.lambdas;
  }
  const auto [lo, hi] = std::minmax_element(occ.begin(), occ.end());
  if (*hi - *lo > 1) throw GapClosureError("bloch_predictor: more than one band crosses the Fermi level");
  const int nb = *lo;
  const int m = model.dim();
  if (nb < m) {
    for (std::size_t idx = 0; idx < npts; ++idx) {
      const bool below = nb == 0 || lam[idx][nb] - lam[idx][nb - 1] > 1e-8;
      const bool above = nb + 1 >= m || lam[idx][nb + 1] - lam[idx][nb] > 1e-8;
      if (!below || !above)
        throw GapClosureError("bloch_predictor: band at the Fermi level is not isolated at " +
                              where(grid.point(idx)));
    }
  }
  const auto sums = bz_block_sum(npts, times.size(), [&](std::size_t idx, std::span<double> out) {
    const Vec2& k = grid.point(idx);
    for (std::size_t i = 0; i < times.size(); ++i)
      out[i] = -band_sum_slope(model, k - eps * times[i] * e_beta, e_alpha, occ[idx]);
  });
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) out[i] = sums[i] * grid.weight() * kInvTwoPiSq;
  return out;
}

double semimetal_sigma(int n_dirac, const Vec2& e_alpha, const Vec2& e_beta) {
  if (n_dirac < 0) throw InvalidArgument("semimetal_sigma: negative Dirac point count");
  return n_dirac / 16.0 * e_alpha.dot(e_beta);
}

CurrentTrace kubo_trace(const BlochModel& model, const BZGrid& grid, double mu_F, const Vec2& e_alpha,
                        const Vec2& e_beta, const std::vector<double>& times, std::size_t block_size) {
  const std::size_t nt = times.size();
  const auto sums = bz_block_sum(
      grid.size(), 2 * nt,
      [&](std::size_t idx, std::span<double> out) {
        const Vec2& k = grid.point(idx);
        const FiberSpectrum s = fiber_spectrum(model, k, mu_F);
        if (s.n_occ > 0 && s.n_occ < s.dim() && s.gap < 1e-10)
          throw GapClosureError("kubo_trace: zero gap at grid point " + where(k));
        const CMatrix da = model.deriv(k, e_alpha);
        const CMatrix db = model.deriv(k, e_beta);
        for (std::size_t i = 0; i < nt; ++i) {
          out[i] = kubo_current(s, da, db, mu_F, times[i], false);
          out[nt + i] = kubo_current(s, da, db, mu_F, times[i], true);
        }
      },
      block_size);
  const double ballistic = band_sum_hessian(model, mu_F, grid, e_alpha, e_beta, 1e-4);
  CurrentTrace tr;
  tr.times = times;
  tr.j_inst.resize(nt);
  tr.j_runavg.resize(nt);
  tr.j_l1.assign(nt, 0.0);
  const double scale = grid.weight() * kInvTwoPiSq;
  for (std::size_t i = 0; i < nt; ++i) {
    tr.j_inst[i] = scale * sums[i] + ballistic * times[i];
    tr.j_runavg[i] = scale * sums[nt + i] + 0.5 * ballistic * times[i];
  }
  tr.e_alpha = e_alpha;
  tr.e_beta = e_beta;
  tr.mu_F = mu_F;
  tr.grid_n = grid.n_per_dim();
  return tr;
}

AdiabaticTerms adiabatic_decomposition(const BlochModel& model, const Vec2& k, double eps, const Vec2& e_alpha,
                                       const Vec2& e_beta, double mu_F, double t, const CMatrix& full_frame) {
  const int m = model.dim();
  if (full_frame.rows() != m || full_frame.cols() != m)
    throw InvalidArgument("adiabatic_decomposition: full_frame must be M x M");
  const FiberSpectrum s0 = fiber_spectrum(model, k, mu_F);
  const int nocc = s0.n_occ;
  const Vec2 kt = k - eps * t * e_beta;
  FiberSpectrum st = eigensystem(model.fiber(kt), kt);
  st.n_occ = nocc;
  const cplx I(0.0, 1.0);
  const CMatrix da_t = model.deriv(kt, e_alpha);

  AdiabaticTerms r;
  const CMatrix ut = st.vectors.leftCols(nocc);
  r.adiabatic = -(ut.adjoint() * da_t * ut).trace().real();

  const CMatrix phi = full_frame.leftCols(nocc);
  const double full = -(phi.adjoint() * da_t * phi).trace().real();

  if (nocc > 0 && nocc < m) {
    const CMatrix x_t = liouvillian_pinv(st, nocc, projector_derivative(st, model.deriv(kt, e_beta)));
    r.static_term = (I * eps * (da_t * x_t).trace()).real();
    const CMatrix x_0 = liouvillian_pinv(s0, nocc, projector_derivative(s0, model.deriv(k, e_beta)));
    const CMatrix x_0_eig = s0.vectors.adjoint() * x_0 * s0.vectors;
    const CMatrix moved = full_frame * x_0_eig * full_frame.adjoint();
    r.oscillatory = (-I * eps * (da_t * moved).trace()).real();
  }
  r.residual = full - r.adiabatic - r.static_term - r.oscillatory;
  return r;
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw InvalidArgument("gauss_legendre: n must be positive");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

Eigen::Matrix2cd dirac_timeavg(double delta, double vF, double t, int n_radial, int n_angular) {
  if (!(delta > 0.0) || !(t > 0.0) || !(vF > 0.0)) throw InvalidArgument("dirac_timeavg: need delta, vF, t > 0");
  if (n_radial < 1 || n_angular < 1) throw InvalidArgument("dirac_timeavg: need positive node counts");
  std::vector<double> gx, gw;
  gauss_legendre(10, gx, gw);
  const double panel = delta / n_radial;
  const double dtheta = kTwoPi / n_angular;
  const std::array<Eigen::Matrix2cd, 2> dh = {dirac_deriv(Vec2(1.0, 0.0), vF), dirac_deriv(Vec2(0.0, 1.0), vF)};
  std::array<CompensatedSum, 8> acc;
  for (int a = 0; a < n_angular; ++a) {
    const double th = (a + 0.5) * dtheta;
    for (int p = 0; p < n_radial; ++p) {
      for (int q = 0; q < 10; ++q) {
        const double r = panel * (p + 0.5 * (gx[q] + 1.0));
        const double wr = 0.5 * panel * gw[q] * dtheta;
        const FiberSpectrum s = eigensystem(dirac_fiber(Vec2(r * std::cos(th), r * std::sin(th)), vF));
        const CVector um = s.vectors.col(0), up = s.vectors.col(1);
        const double omega = -2.0 * vF * r;
        const cplx ker = kubo_kernel(omega, t, true);
        const double den = 4.0 * vF * vF * r * r;
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) {
            const cplx z = um.dot(dh[j] * up) * up.dot(dh[i] * um);
            const double v = 2.0 * (ker * z).imag() / den * r * wr;
            acc[2 * (2 * i + j)].add(v);
          }
        }
      }
    }
  }
  Eigen::Matrix2cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out(i, j) = cplx(0.0, acc[2 * (2 * i + j)].value());
  return out;
}

}  // namespace crystal
