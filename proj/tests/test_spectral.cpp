#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "crystal/errors.hpp"
#include "crystal/spectral.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace crystal;
using testing::max_abs;

namespace {

FiberSpectrum diag_spectrum(std::initializer_list<double> lam) {
  CMatrix h = CMatrix::Zero(lam.size(), lam.size());
  int i = 0;
  for (double l : lam) h(i, i) = l, ++i;
  return eigensystem(h);
}

// Random Hermitian matrix with a gap after the first n eigenvalues.
FiberSpectrum random_gapped(int m, int n) {
  FiberSpectrum s;
  do {
    s = eigensystem(testing::random_hermitian(m));
  } while (s.lambdas[n] - s.lambdas[n - 1] < 0.05);
  s.n_occ = n;
  return s;
}

}  // namespace

TEST_CASE("eigensystem examples") {
  Eigen::Matrix2cd s3;
  s3 << 1, 0, 0, -1;
  const FiberSpectrum a = eigensystem(s3);
  CHECK(a.lambdas[0] == doctest::Approx(-1));
  CHECK(a.lambdas[1] == doctest::Approx(1));

  const FiberSpectrum b = eigensystem(haldane_fiber(Vec2::Zero(), {1.0, 0.0}));
  CHECK(b.lambdas[0] == doctest::Approx(-std::sqrt(10.0)));
  CHECK(b.lambdas[1] == doctest::Approx(std::sqrt(10.0)));

  const FiberSpectrum c = eigensystem(dirac_fiber(Vec2(0.25, 0.0), 1.0));
  CHECK(c.lambdas[0] == doctest::Approx(-0.25));
  CHECK(c.lambdas[1] == doctest::Approx(0.25));
}

TEST_CASE("eigensystem invariants and phase convention") {
  for (int i = 0; i < 100; ++i) {
    const int m = 2 + i % 4;
    const CMatrix h = testing::random_hermitian(m);
    const FiberSpectrum s = eigensystem(h);
    const double scale = max_abs(h);
    for (int n = 0; n < m; ++n) {
      CHECK((h * s.vectors.col(n) - s.lambdas[n] * s.vectors.col(n)).norm() <= 1e-10 * scale);
      Eigen::Index r = 0;
      s.vectors.col(n).cwiseAbs().maxCoeff(&r);
      CHECK(s.vectors(r, n).imag() == 0.0);
      CHECK(s.vectors(r, n).real() > 0.0);
      if (n > 0) CHECK(s.lambdas[n] >= s.lambdas[n - 1]);
    }
    CHECK(max_abs(s.vectors.adjoint() * s.vectors - CMatrix::Identity(m, m)) <= 1e-10);
  }
}

TEST_CASE("non-Hermitian input rejected") {
  CMatrix h(2, 2);
  h << 1, 2, 0, 1;
  CHECK_THROWS_AS(eigensystem(h), InvalidArgument);
}

TEST_CASE("ground projector") {
  const FiberSpectrum s = eigensystem(haldane_fiber(Vec2(0.3, 0.1), {1.0, 0.0}));
  CHECK(ground_projector(s, -10.0).rank == 0);
  CHECK(max_abs(ground_projector(s, -10.0).P) == 0.0);

  const HaldaneModel a({1.0, 0.0});
  const BZGrid g = make_grid(a.lattice(), 20);
  int lo = 2, hi = 0;
  for (const auto& k : g.points()) {
    const auto s0 = fiber_spectrum(a, k, 0.0);
    CHECK(ground_projector(s0, 0.0).rank == 1);
    const int r = ground_projector(s0, -2.0).rank;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(lo == 0);
  CHECK(hi == 1);

  for (int i = 0; i < 50; ++i) {
    const FiberSpectrum r = eigensystem(testing::random_hermitian(4));
    const GroundProjector p = ground_projector(r, 0.0);
    CHECK(max_abs(p.P * p.P - p.P) <= 1e-10);
    CHECK(max_abs(p.P - p.P.adjoint()) <= 1e-14);
    CHECK(std::abs(p.P.trace() - double(p.rank)) <= 1e-10);
  }
}

TEST_CASE("projector is invariant under eigenvector phases") {
  FiberSpectrum s = eigensystem(testing::random_hermitian(3));
  const CMatrix p0 = ground_projector(s, 0.0).P;
  for (int c = 0; c < 3; ++c) s.vectors.col(c) *= std::polar(1.0, 0.7 * (c + 1));
  CHECK(max_abs(ground_projector(s, 0.0).P - p0) <= 1e-10);
}

TEST_CASE("chern numbers of the insulating phases") {
  const HaldaneModel a({1.0, 0.0}), b({1.0, -1.0}), c({1.0, 1.0});
  const BZGrid g = make_grid(a.lattice(), 50);
  CHECK(berry_chern(a, 0.0, g).chern == 0);
  CHECK(berry_chern(b, 0.0, g).chern == 1);
  CHECK(berry_chern(c, 0.0, g).chern == -1);
  const ChernResult r = berry_chern(b, 0.0, g);
  CHECK(std::abs(r.winding - 1.0) < 1e-10);
}

TEST_CASE("chern number is stable under grid refinement") {
  const HaldaneModel b({1.0, -1.0});
  for (int n : {17, 18, 31, 32}) CHECK(berry_chern(b, 0.0, make_grid(b.lattice(), n)).chern == 1);
  const TightBindingModel tb(haldane_hoppings({1.0, -1.0}));
  CHECK(berry_chern(tb, 0.0, make_grid(tb.lattice(), 24)).chern == 1);
}

TEST_CASE("gap closure rejected by the chern computation") {
  const HaldaneModel d({0.0, 0.0});
  CHECK_THROWS_AS(berry_chern(d, 0.0, make_grid(d.lattice(), 30)), GapClosureError);
  const HaldaneModel c({1.0, 0.0});
  CHECK_THROWS_AS(berry_chern(c, -2.0, make_grid(c.lattice(), 30)), GapClosureError);
}

TEST_CASE("curvature is odd under k -> -k without t2") {
  const HaldaneModel a({1.0, 0.0});
  for (int i = 0; i < 50; ++i) {
    const Vec2 k = testing::random_vec();
    const double o1 = berry_curvature(a, k, 0.0, Vec2(1, 0), Vec2(0, 1));
    const double o2 = berry_curvature(a, -k, 0.0, Vec2(1, 0), Vec2(0, 1));
    CHECK(std::abs(o1 + o2) <= 1e-10);
  }
  const int n = 24;
  const ChernResult r = berry_chern(a, 0.0, make_grid(a.lattice(), n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int ii = (2 * n - i - 1) % n, jj = (2 * n - j - 1) % n;
      CHECK(std::abs(r.plaquette_flux[i * n + j] + r.plaquette_flux[ii * n + jj]) <= 1e-10);
    }
}

TEST_CASE("curvature integrates to 2 pi chern") {
  const HaldaneModel b({1.0, -1.0});
  const BZGrid g = make_grid(b.lattice(), 60, half_cell_shift(60));
  double sum = 0;
  for (const auto& k : g.points()) sum += berry_curvature(b, k, 0.0, Vec2(1, 0), Vec2(0, 1));
  CHECK(sum * g.weight() / kTwoPi == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("projector derivative matches finite differences") {
  const HaldaneModel b({1.0, -1.0});
  for (int i = 0; i < 20; ++i) {
    const Vec2 k = testing::random_vec(), e = testing::random_vec(1.0);
    const double h = 1e-5;
    const CMatrix fd = (ground_projector(fiber_spectrum(b, k + h * e, 0.0), 0.0).P -
                        ground_projector(fiber_spectrum(b, k - h * e, 0.0), 0.0).P) /
                       (2 * h);
    CHECK(max_abs(projector_derivative(fiber_spectrum(b, k, 0.0), b.deriv(k, e)) - fd) < 1e-7);
  }
}

TEST_CASE("liouvillian") {
  const CMatrix h = testing::random_hermitian(3);
  CHECK(max_abs(liouvillian_apply(h, CMatrix::Identity(3, 3))) == 0.0);
  CHECK(max_abs(liouvillian_apply(h, h)) < 1e-15);
  CMatrix d = CMatrix::Zero(2, 2);
  d(1, 1) = 1.0;
  CMatrix a = CMatrix::Zero(2, 2);
  a(1, 0) = 1.0;
  CHECK(max_abs(liouvillian_apply(d, a) - a) == 0.0);
}

TEST_CASE("liouvillian is self-adjoint on Hilbert-Schmidt space") {
  for (int i = 0; i < 50; ++i) {
    const CMatrix h = testing::random_hermitian(4);
    const CMatrix a = testing::random_matrix(4), b = testing::random_matrix(4);
    const cplx lhs = (liouvillian_apply(h, a).adjoint() * b).trace();
    const cplx rhs = (a.adjoint() * liouvillian_apply(h, b)).trace();
    CHECK(std::abs(lhs - rhs) <= 1e-10);
  }
}

TEST_CASE("partial inverse examples") {
  const double gap = 0.8;
  const FiberSpectrum s = diag_spectrum({0.0, gap});
  Eigen::Matrix2cd s1;
  s1 << 0, 1, 1, 0;
  Eigen::Matrix2cd expect;
  expect << 0, -1, 1, 0;
  const CMatrix x = liouvillian_pinv(s, 1, s1);
  CHECK(max_abs(x - expect / gap) < 1e-15);
  Eigen::JacobiSVD<CMatrix> svd(x);
  CHECK(svd.singularValues()[0] == doctest::Approx(1.0 / gap));

  Eigen::Matrix2cd block;
  block << 2.0, 0, 0, -1.0;
  CHECK(max_abs(liouvillian_pinv(s, 1, block)) == 0.0);

  CHECK_THROWS_AS(liouvillian_pinv(diag_spectrum({1.0, 1.0}), 1, s1), GapClosureError);
}

TEST_CASE("partial inverse identities on random gapped fibers") {
  for (int i = 0; i < 200; ++i) {
    const int m = 2 + i % 4, n = 1 + i % (m - 1);
    const FiberSpectrum s = random_gapped(m, n);
    const CMatrix h = s.vectors * s.lambdas.cast<cplx>().asDiagonal() * s.vectors.adjoint();
    const CMatrix p = s.vectors.leftCols(n) * s.vectors.leftCols(n).adjoint();
    const CMatrix q = CMatrix::Identity(m, m) - p;
    const CMatrix a = testing::random_matrix(m);
    const CMatrix off = p * a * q + q * a * p;
    CHECK(max_abs(liouvillian_apply(h, liouvillian_pinv(s, n, a)) - off) <= 1e-10);
    CHECK(max_abs(liouvillian_pinv(s, n, liouvillian_apply(h, a)) - off) <= 1e-10);
    Eigen::JacobiSVD<CMatrix> svd(liouvillian_pinv(s, n, a));
    int rank = 0;
    for (Eigen::Index r = 0; r < svd.singularValues().size(); ++r) rank += svd.singularValues()[r] > 1e-10;
    CHECK(rank <= 2 * n);
  }
}

TEST_CASE("kubo current trivial cases") {
  const HaldaneModel a({1.0, 0.0});
  const Vec2 k(0.3, 0.9);
  const FiberSpectrum s = fiber_spectrum(a, k, 0.0);
  const CMatrix da = a.deriv(k, Vec2(1, 0)), db = a.deriv(k, Vec2(0, 1));
  CHECK(kubo_current(s, da, db, 0.0, 0.0, false) == 0.0);
  CHECK(kubo_current(s, da, db, 0.0, 0.0, true) == 0.0);
  CHECK(kubo_current(s, da, db, 10.0, 3.0, false) == 0.0);
}

TEST_CASE("kubo current of a two-level fiber oscillates at the gap") {
  const double gap = 1.7;
  const FiberSpectrum s = diag_spectrum({-0.5, -0.5 + gap});
  const CMatrix da = testing::random_hermitian(2), db = testing::random_hermitian(2);
  const double period = kTwoPi / gap;
  for (double t : {0.3, 1.1, 2.9}) {
    CHECK(kubo_current(s, da, db, 0.0, t + period, false) ==
          doctest::Approx(kubo_current(s, da, db, 0.0, t, false)).epsilon(1e-10));
  }
}

TEST_CASE("kubo current equals -i Tr(dH_a (exp(-itL) - 1) L+ dgamma_b)") {
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 3, n = 1 + trial % 2;
    const CMatrix h0 = testing::random_hermitian(m);
    const FiberSpectrum s0 = eigensystem(h0);
    const double mu = 0.5 * (s0.lambdas[n - 1] + s0.lambdas[n]);
    FiberSpectrum s = s0;
    set_occupation(s, mu);
    if (s.gap < 0.1) continue;
    const CMatrix da = testing::random_hermitian(m), db = testing::random_hermitian(m);
    // ∂_βγ by central differences along db.
    const double h = 1e-6;
    const CMatrix dgam = (ground_projector(eigensystem(h0 + h * db), mu).P -
                          ground_projector(eigensystem(h0 - h * db), mu).P) /
                         (2 * h);
    // e^{−itL} on vec(A) = (I ⊗ H − Hᵀ ⊗ I) vec(A).
    const CMatrix id = CMatrix::Identity(m, m);
    CMatrix L(m * m, m * m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        L.block(i * m, j * m, m, m) = (i == j ? cplx(1) : cplx(0)) * h0 - h0(j, i) * id;
      }
    for (double t : {0.7, 4.0}) {
      const CMatrix x = liouvillian_pinv(s, n, dgam);
      const CMatrix prop = (cplx(0, -t) * L).exp();
      Eigen::Map<const CVector> vx(x.data(), m * m);
      const CVector vy = prop * vx - vx;
      Eigen::Map<const CMatrix> y(vy.data(), m, m);
      const double expect = (cplx(0, -1) * (da * y).trace()).real();
      CHECK(kubo_current(s, da, db, mu, t, false) == doctest::Approx(expect).epsilon(1e-6));
    }
  }
}

TEST_CASE("averaged kernel is the running mean of the instantaneous one") {
  for (double w : {0.3, 2.0, -1.4}) {
    for (double t : {0.5, 7.0, 40.0}) {
      const int n = 20000;
      cplx acc = 0;
      for (int i = 0; i < n; ++i) acc += kubo_kernel(w, (i + 0.5) * t / n, false);
      CHECK(std::abs(acc / double(n) - kubo_kernel(w, t, true)) < 1e-6);
    }
  }
  CHECK(kubo_kernel(1.0, 0.0, true) == cplx(0, 0));
  CHECK(std::abs(kubo_kernel(1e-5, 1.0, true) - (cplx(std::cos(1e-5) - 1, -std::sin(1e-5)) / cplx(0, -1e-5) - 1.0)) <
        1e-12);
}
