#include "crystal/spectral.hpp"

#include <cmath>
#include <sstream>

#include "crystal/errors.hpp"

namespace crystal {

namespace {

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

std::string where(const Vec2& k) {
  std::ostringstream os;
  os.precision(17);
  os << "k=(" << k.x() << "," << k.y() << ")";
  return os.str();
}

}  // namespace

FiberSpectrum eigensystem(const CMatrix& H, const Vec2& k) {
  if (H.rows() != H.cols()) throw InvalidArgument("eigensystem: matrix is not square");
  const double scale = max_abs(H);
  if (max_abs(H - H.adjoint()) > 1e-8 * scale) throw InvalidArgument("eigensystem: matrix is not Hermitian");
  FiberSpectrum s;
  s.k = k;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  if (es.info() != Eigen::Success) throw InvalidArgument("eigensystem: solver failed at " + where(k));
  s.lambdas = es.eigenvalues();
  s.vectors = es.eigenvectors();
  for (int c = 0; c < s.vectors.cols(); ++c) {
    Eigen::Index r = 0;
    s.vectors.col(c).cwiseAbs().maxCoeff(&r);
    const cplx z = s.vectors(r, c);
    s.vectors.col(c) *= std::conj(z) / std::abs(z);
    s.vectors(r, c) = cplx(s.vectors(r, c).real(), 0.0);
  }
  return s;
}

void set_occupation(FiberSpectrum& s, double mu_F) {
  int n = 0;
  while (n < s.dim() && s.lambdas[n] <= mu_F) ++n;
  s.n_occ = n;
  s.gap = (n == 0 || n == s.dim()) ? std::numeric_limits<double>::infinity() : s.lambdas[n] - s.lambdas[n - 1];
}

FiberSpectrum fiber_spectrum(const BlochModel& model, const Vec2& k, double mu_F) {
  FiberSpectrum s = eigensystem(model.fiber(k), k);
  set_occupation(s, mu_F);
  return s;
}

GroundProjector ground_projector(const FiberSpectrum& s, double mu_F) {
  GroundProjector g;
  int n = 0;
  while (n < s.dim() && s.lambdas[n] <= mu_F) ++n;
  const CMatrix u = s.vectors.leftCols(n);
  g.P = u * u.adjoint();
  g.rank = n;
  return g;
}

ChernResult berry_chern(const BlochModel& model, double mu_F, const BZGrid& grid) {
  const int n = grid.n_per_dim();
  const std::size_t npts = grid.size();
  std::vector<CMatrix> frames(npts);
  std::vector<int> occ(npts);
  std::vector<double> gaps(npts);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(npts); ++idx) {
    const FiberSpectrum s = fiber_spectrum(model, grid.point(idx), mu_F);
    frames[idx] = s.occupied();
    occ[idx] = s.n_occ;
    gaps[idx] = s.gap;
  }
  for (std::size_t idx = 0; idx < npts; ++idx) {
    if (occ[idx] != occ[0] || gaps[idx] < 1e-8)
      throw GapClosureError("berry_chern: gap closes or occupation changes at " + where(grid.point(idx)));
  }
  ChernResult res;
  res.plaquette_flux.assign(npts, 0.0);
  if (occ[0] == 0) return res;

  const Lattice2D& lat = grid.lattice();
  const CMatrix t1 = quasi_period_unitary(model, lat.b1());
  const CMatrix t2 = quasi_period_unitary(model, lat.b2());
  const double orient = lat.reciprocal_orientation();

  auto frame = [&](int i, int j) -> CMatrix {
    CMatrix u = frames[static_cast<std::size_t>(i % n) * n + (j % n)];
    if (i >= n) u = t1 * u;
    if (j >= n) u = t2 * u;
    return u;
  };
  auto link = [](const CMatrix& a, const CMatrix& b) {
    const cplx z = (a.adjoint() * b).determinant();
    if (std::abs(z) < 1e-12) throw GapClosureError("berry_chern: vanishing link variable, grid too coarse");
    return z / std::abs(z);
  };

  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const CMatrix u0 = frame(i, j), u1 = frame(i + 1, j), u12 = frame(i + 1, j + 1), u2 = frame(i, j + 1);
      const cplx w = link(u0, u1) * link(u1, u12) * link(u12, u2) * link(u2, u0);
      const double f = orient * std::arg(w);
      res.plaquette_flux[static_cast<std::size_t>(i) * n + j] = f;
      total += f;
    }
  }
  res.winding = total / kTwoPi;
  res.chern = static_cast<int>(std::lround(res.winding));
  return res;
}

CMatrix liouvillian_apply(const CMatrix& H, const CMatrix& A) { return H * A - A * H; }

CMatrix liouvillian_pinv(const FiberSpectrum& s, int n_occ, const CMatrix& A) {
  const int m = s.dim();
  if (n_occ < 0 || n_occ > m) throw InvalidArgument("liouvillian_pinv: n_occ out of range");
  if (n_occ == 0 || n_occ == m) return CMatrix::Zero(m, m);
  const double scale = std::max(std::abs(s.lambdas[0]), std::abs(s.lambdas[m - 1]));
  if (s.lambdas[n_occ] - s.lambdas[n_occ - 1] <= 1e-14 * std::max(scale, 1.0))
    throw GapClosureError("liouvillian_pinv: zero gap at " + where(s.k));
  CMatrix x = s.vectors.adjoint() * A * s.vectors;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if ((i < n_occ) == (j < n_occ))
        x(i, j) = 0.0;
      else
        x(i, j) /= s.lambdas[i] - s.lambdas[j];
    }
  }
  return s.vectors * x * s.vectors.adjoint();
}

CMatrix projector_derivative(const FiberSpectrum& s, const CMatrix& dH) {
  const CMatrix u = s.occupied();
  const CMatrix p = u * u.adjoint();
  return liouvillian_pinv(s, s.n_occ, p * dH - dH * p);
}

double berry_curvature(const BlochModel& model, const Vec2& k, double mu_F, const Vec2& ea, const Vec2& eb) {
  const FiberSpectrum s = fiber_spectrum(model, k, mu_F);
  if (s.n_occ == 0 || s.n_occ == s.dim()) return 0.0;
  const CMatrix u = s.occupied();
  const CMatrix p = u * u.adjoint();
  const CMatrix da = projector_derivative(s, model.deriv(k, ea));
  const CMatrix db = projector_derivative(s, model.deriv(k, eb));
  const cplx tr = (p * (da * db - db * da)).trace();
  return (cplx(0.0, -1.0) * tr).real();
}

cplx kubo_kernel(double omega, double t, bool averaged) {
  const double x = omega * t;
  if (!averaged) return cplx(std::cos(x) - 1.0, -std::sin(x));
  if (std::abs(x) < 1e-4) return cplx(-x * x / 6.0, -x / 2.0 + x * x * x / 24.0);
  return cplx(std::cos(x) - 1.0, -std::sin(x)) / cplx(0.0, -x) - 1.0;
}

double kubo_current(const FiberSpectrum& s, const CMatrix& dHa, const CMatrix& dHb, double mu_F, double t,
                    bool averaged) {
  int nocc = 0;
  while (nocc < s.dim() && s.lambdas[nocc] <= mu_F) ++nocc;
  if (nocc == 0 || nocc == s.dim()) return 0.0;
  const CMatrix a = s.vectors.adjoint() * dHa * s.vectors;
  const CMatrix b = s.vectors.adjoint() * dHb * s.vectors;
  const cplx I(0.0, 1.0);
  cplx sum(0.0, 0.0);
  double mag = 0.0;
  for (int n = 0; n < nocc; ++n) {
    for (int m = nocc; m < s.dim(); ++m) {
      const double w = s.lambdas[m] - s.lambdas[n];
      if (!(w > 0.0)) throw GapClosureError("kubo_current: zero gap at " + where(s.k));
      const cplx ker = kubo_kernel(w, t, averaged);
      const cplx term = I * (ker * a(n, m) * b(m, n) - std::conj(ker) * a(m, n) * b(n, m)) / (w * w);
      sum += term;
      mag += std::abs(term);
    }
  }
  if (std::abs(sum.imag()) > 1e-10 * std::max(1.0, mag))
    throw InconsistencyError("kubo_current: complex result at " + where(s.k));
  return sum.real();
}

}  // namespace crystal
