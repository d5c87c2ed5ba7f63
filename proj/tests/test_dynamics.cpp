#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "crystal/dynamics.hpp"
#include "crystal/errors.hpp"
#include "crystal/spectral.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace crystal;
using testing::max_abs;

namespace {

CMatrix projector(const CMatrix& phi) { return phi * phi.adjoint(); }

// Time-ordered product of exact exponentials of H at the step midpoints.
CMatrix brute_force(const BlochModel& m, const Vec2& k, double eps, const Vec2& eb, CMatrix phi, double t,
                    double dt) {
  const long n = std::lround(t / dt);
  for (long i = 0; i < n; ++i) {
    const CMatrix h = m.fiber(k - eps * (i + 0.5) * dt * eb);
    phi = (cplx(0, -dt) * h).exp() * phi;
  }
  return phi;
}

}  // namespace

TEST_CASE("single exponential-midpoint steps") {
  CMatrix phi = testing::random_matrix(3).leftCols(2);
  const CMatrix before = phi;
  step_exp_midpoint(CMatrix::Zero(3, 3), 0.1, phi);
  CHECK(max_abs(phi - before) == 0.0);

  for (int m : {2, 3}) {
    CMatrix h = CMatrix::Zero(m, m);
    for (int i = 0; i < m; ++i) h(i, i) = 0.3 * (i + 1) - 0.5;
    CMatrix p = testing::random_matrix(m);
    const CMatrix p0 = p;
    step_exp_midpoint(h, 0.7, p);
    for (int i = 0; i < m; ++i)
      CHECK((p.row(i) - std::polar(1.0, -h(i, i).real() * 0.7) * p0.row(i)).norm() < 1e-14);
  }
}

TEST_CASE("closed-form and generic exponentials agree with the matrix exponential") {
  for (int m : {2, 3, 4}) {
    for (int i = 0; i < 20; ++i) {
      const CMatrix h = testing::random_hermitian(m) + testing::uniform(-2, 2) * CMatrix::Identity(m, m);
      const double dt = testing::uniform(0.01, 1.0);
      CHECK(max_abs(expm_hermitian(h, dt) - (cplx(0, -dt) * h).exp()) < 1e-13);
    }
  }
}

TEST_CASE("zero field reproduces exp(-iHt)") {
  const HaldaneModel m({1.0, -1.0});
  const Vec2 k(0.4, 1.1);
  const auto frames = propagate_full_frame(m, k, 0.0, Vec2(1, 0), {0.0, 3.0, 17.5});
  const FiberSpectrum s = eigensystem(m.fiber(k));
  for (const auto& f : frames) {
    const CMatrix exact = (cplx(0, -f.t) * m.fiber(k)).exp() * s.vectors;
    CHECK(max_abs(f.phi - exact) < 1e-11);
  }
  const auto occ = propagate_frame(m, k, 0.0, Vec2(1, 0), 0.0, {0.0, 5.0, 50.0});
  for (const auto& f : occ) CHECK(max_abs(projector(f.phi) - projector(occ[0].phi)) <= 1e-9);
  CHECK(max_abs(occ[0].phi - s.vectors.leftCols(1)) == 0.0);
}

TEST_CASE("frames stay orthonormal") {
  const TightBindingModel tb(testing::random_hoppings());
  const auto frames = propagate_frame(tb, Vec2(0.2, -0.7), 1e-2, Vec2(1, 0.5), 0.0, {0.0, 1.0, 10.0, 40.0});
  for (const auto& f : frames) CHECK(unitarity_defect(f.phi) <= 1e-9);
}


TEST_CASE("fine-step oracle over the full window") {
  const HaldaneModel m({1.0, -1.0});
  const Vec2 eb = m.lattice().b1(), k(0.3, 0.2);
  const auto frames = propagate_frame(m, k, 1e-2, eb, 0.0, {0.0, 200.0});
  const CMatrix ref = brute_force(m, k, 1e-2, eb, frames[0].phi, 200.0, 1e-4);
  CHECK(max_abs(projector(frames[1].phi) - projector(ref)) <= 1e-6);
}

TEST_CASE("haldane fast path agrees with the generic fiber path") {
  const HaldaneParams p{1.0, -1.0};
  const HaldaneModel hal(p);
  const TightBindingModel tb(haldane_hoppings(p));
  const Vec2 eb = hal.lattice().b1() + hal.lattice().b2();
  for (const Vec2& k : {Vec2(0.3, 0.2), Vec2(-1.0, 2.5)}) {
    const auto a = propagate_frame(hal, k, 1e-2, eb, 0.0, {0.0, 7.3, 100.0});
    const auto b = propagate_frame(tb, k, 1e-2, eb, 0.0, {0.0, 7.3, 100.0});
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(max_abs(projector(a[i].phi) - projector(b[i].phi)) < 1e-10);
  }
}

TEST_CASE("rk4 cross-check") {
  const HaldaneModel m({1.0, 0.0});
  IntegratorOptions rk;
  rk.scheme = Scheme::rk4_check;
  rk.dt = 0.002;
  const Vec2 k(0.5, 0.5), eb(1, 0);
  const auto a = propagate_frame(m, k, 1e-2, eb, 0.0, {0.0, 20.0});
  const auto b = propagate_frame(m, k, 1e-2, eb, 0.0, {0.0, 20.0}, rk);
  CHECK(max_abs(projector(a[1].phi) - projector(b[1].phi)) < 1e-5);
}

TEST_CASE("unitarity breach is reported") {
  IntegratorOptions rk;
  rk.scheme = Scheme::rk4_check;
  rk.dt = 0.9;
  const HaldaneModel m({1.0, 0.0});
  CHECK_THROWS_AS(propagate_frame(m, Vec2::Zero(), 1e-2, Vec2(1, 0), 0.0, {0.0, 50.0}, rk), UnitarityBreachError);
}

TEST_CASE("output times are hit exactly") {
  const HaldaneModel m({1.0, 0.0});
  FramePropagator prop(m, Vec2(0.1, 0.1), 1e-2, Vec2(1, 0), fiber_spectrum(m, Vec2(0.1, 0.1), 0.0).occupied());
  CHECK(prop.dt() == doctest::Approx(0.01));
  prop.advance_to(0.123);
  CHECK(prop.time() == 0.123);
  CHECK_THROWS_AS(prop.advance_to(0.1), InvalidArgument);
  CHECK_THROWS_AS(propagate_frame(m, Vec2::Zero(), 0.0, Vec2(1, 0), 0.0, {1.0}), InvalidArgument);
}

TEST_CASE("gauge covariance under reciprocal translations") {
  const HaldaneModel m({1.0, -1.0});
  const Lattice2D& lat = m.lattice();
  const Vec2 eb = lat.b2(), k(0.7, -0.3);
  for (const Vec2& K : {lat.b1(), Vec2(lat.b1() - 2 * lat.b2())}) {
    const CMatrix t = quasi_period_unitary(m, K);
    const auto a = propagate_frame(m, k, 1e-2, eb, 0.0, {0.0, 30.0});
    const auto b = propagate_frame(m, k + K, 1e-2, eb, 0.0, {0.0, 30.0});
    CHECK(max_abs(projector(b[1].phi) - t * projector(a[1].phi) * t.adjoint()) <= 1e-9);
  }
}

TEST_CASE("initial-frame gauge invariance") {
  const TightBindingModel tb(testing::random_hoppings(4));
  const Vec2 k(0.3, 0.4), eb(0.5, 1.0);
  const FiberSpectrum s = fiber_spectrum(tb, k, 0.0);
  REQUIRE(s.n_occ >= 1);
  const CMatrix u = s.occupied();
  Eigen::HouseholderQR<CMatrix> qr(testing::random_matrix(s.n_occ));
  const CMatrix w = qr.householderQ();
  FramePropagator a(tb, k, 1e-2, eb, u), b(tb, k, 1e-2, eb, u * w);
  a.advance_to(25.0);
  b.advance_to(25.0);
  CHECK(max_abs(projector(a.phi()) - projector(b.phi())) <= 1e-10);
}

TEST_CASE("adiabatic deviation is first order in the field") {
  const HaldaneModel m({1.0, 0.0});
  const Vec2 k(0.2, 0.9), eb = m.lattice().b1();
  std::vector<double> dev;
  for (double eps : {1e-2, 5e-3, 2.5e-3}) {
    const double t = 0.5 / eps;
    const auto f = propagate_frame(m, k, eps, eb, 0.0, {0.0, t});
    const CMatrix p = ground_projector(fiber_spectrum(m, k - eps * t * eb, 0.0), 0.0).P;
    dev.push_back(max_abs(projector(f[1].phi) - p));
  }
  CHECK(dev[0] / dev[1] == doctest::Approx(2.0).epsilon(0.2));
  CHECK(dev[1] / dev[2] == doctest::Approx(2.0).epsilon(0.2));
}
