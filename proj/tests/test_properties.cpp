#include <omp.h>

#include <cmath>

#include "crystal/bz_sum.hpp"
#include "crystal/dynamics.hpp"
#include "crystal/errors.hpp"
#include "crystal/observables.hpp"
#include "crystal/spectral.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace crystal;
using testing::max_abs;

namespace {

constexpr int kDraws = 25;

CMatrix random_unitary(int n) {
  const FiberSpectrum s = eigensystem(testing::random_hermitian(n));
  return s.vectors;
}

Vec2 random_reciprocal(const Lattice2D& lat) {
  const int n1 = static_cast<int>(std::floor(testing::uniform(-3, 4)));
  const int n2 = static_cast<int>(std::floor(testing::uniform(-3, 4)));
  return n1 * lat.b1() + n2 * lat.b2();
}

}  // namespace

TEST_CASE("random tight-binding fibers are hermitian and quasi-periodic") {
  for (int d = 0; d < kDraws; ++d) {
    const TightBindingModel m(testing::random_hoppings(3));
    const Vec2 k = testing::random_vec(), K = random_reciprocal(m.lattice());
    const CMatrix h = m.fiber(k);
    CHECK(max_abs(h - h.adjoint()) <= 1e-14);
    const CMatrix T = quasi_period_unitary(m, K);
    CHECK(max_abs(m.fiber(k + K) - T * h * T.adjoint()) <= 1e-12);
    CHECK(max_abs(T * T.adjoint() - CMatrix::Identity(3, 3)) <= 1e-14);
  }
}

TEST_CASE("derivatives are linear in the direction and match differences") {
  for (int d = 0; d < kDraws; ++d) {
    const TightBindingModel m(testing::random_hoppings(3));
    const Vec2 k = testing::random_vec(), u = testing::random_vec(1), v = testing::random_vec(1);
    const double a = testing::uniform(-2, 2);
    CHECK(max_abs(m.deriv(k, a * u + v) - (a * m.deriv(k, u) + m.deriv(k, v))) <= 1e-12);
    const double h = 1e-5;
    const CMatrix fd = (m.fiber(k + h * u) - m.fiber(k - h * u)) / (2 * h);
    CHECK(max_abs(fd - m.deriv(k, u)) <= 1e-8);
  }
}

TEST_CASE("eigensystem reconstructs random hermitian matrices") {
  for (int d = 0; d < kDraws; ++d) {
    const int n = 2 + d % 4;
    const CMatrix h = testing::random_hermitian(n);
    const FiberSpectrum s = eigensystem(h);
    CHECK(max_abs(s.vectors * s.lambdas.cast<cplx>().asDiagonal() * s.vectors.adjoint() - h) <= 1e-13);
    for (int i = 1; i < n; ++i) CHECK(s.lambdas[i] >= s.lambdas[i - 1]);
  }
}

TEST_CASE("liouvillian partial inverse undoes the liouvillian off the diagonal blocks") {
  for (int d = 0; d < kDraws; ++d) {
    const int n = 3 + d % 3;
    const CMatrix h = testing::random_hermitian(n);
    FiberSpectrum s = eigensystem(h);
    const int occ = 1 + d % (n - 1);
    set_occupation(s, 0.5 * (s.lambdas[occ - 1] + s.lambdas[occ]));
    REQUIRE(s.n_occ == occ);
    const CMatrix P = s.occupied() * s.occupied().adjoint();
    const CMatrix Q = CMatrix::Identity(n, n) - P;
    const CMatrix a = testing::random_matrix(n);
    const CMatrix off = P * a * Q + Q * a * P;
    CHECK(max_abs(liouvillian_pinv(s, occ, liouvillian_apply(h, off)) - off) <= 1e-10);
    CHECK(max_abs(liouvillian_apply(h, liouvillian_pinv(s, occ, off)) - off) <= 1e-10);
  }
}

TEST_CASE("projector derivative matches a finite difference") {
  int checked = 0;
  for (int d = 0; d < kDraws; ++d) {
    const TightBindingModel m(testing::random_hoppings(3));
    const Vec2 k = testing::random_vec(), u = testing::random_vec(1);
    FiberSpectrum s = fiber_spectrum(m, k, 0.0);
    if (s.lambdas[1] - s.lambdas[0] < 0.1) continue;
    const double mu = 0.5 * (s.lambdas[0] + s.lambdas[1]);
    set_occupation(s, mu);
    auto proj = [&](const Vec2& q) {
      FiberSpectrum t = fiber_spectrum(m, q, mu);
      return CMatrix(t.occupied() * t.occupied().adjoint());
    };
    const double h = 1e-5;
    const CMatrix fd = (proj(k + h * u) - proj(k - h * u)) / (2 * h);
    CHECK(max_abs(projector_derivative(s, m.deriv(k, u)) - fd) <= 1e-6);
    ++checked;
  }
  CHECK(checked > 5);
}

TEST_CASE("linear response vanishes for perturbations commuting with the fiber") {
  for (int d = 0; d < kDraws; ++d) {
    const CMatrix h = testing::random_hermitian(3);
    const FiberSpectrum s = eigensystem(h);
    const double mu = 0.5 * (s.lambdas[0] + s.lambdas[1]);
    const CMatrix da = testing::random_hermitian(3);
    const double t = testing::uniform(0, 20);
    FiberSpectrum occ = s;
    set_occupation(occ, mu);
    CHECK(std::abs(kubo_current(occ, da, h, mu, t, false)) <= 1e-12);
    const double a = testing::uniform(-2, 2);
    const CMatrix db = testing::random_hermitian(3);
    CHECK(kubo_current(occ, a * da, db, mu, t, true) ==
          doctest::Approx(a * kubo_current(occ, da, db, mu, t, true)).epsilon(1e-10));
  }
}

TEST_CASE("propagation of random models stays unitary") {
  for (int d = 0; d < 10; ++d) {
    const TightBindingModel m(testing::random_hoppings(3));
    const Vec2 k = testing::random_vec(), e = testing::random_vec(1);
    const auto f = propagate_full_frame(m, k, testing::uniform(0, 0.05), e, {0.0, 30.0});
    CHECK(unitarity_defect(f.back().phi) <= 1e-9);
  }
}

TEST_CASE("zero field leaves the occupied projector invariant") {
  for (int d = 0; d < 10; ++d) {
    const TightBindingModel m(testing::random_hoppings(3));
    const Vec2 k = testing::random_vec();
    const auto f = propagate_frame(m, k, 0.0, Vec2(1, 0), 0.0, {0.0, 25.0});
    const CMatrix p0 = f[0].phi * f[0].phi.adjoint(), p1 = f[1].phi * f[1].phi.adjoint();
    CHECK(max_abs(p1 - p0) <= 1e-10);
  }
}

TEST_CASE("current integrand is invariant under occupied-frame rotations") {
  for (int d = 0; d < kDraws; ++d) {
    const TightBindingModel m(testing::random_hoppings(4));
    const Vec2 k = testing::random_vec(), ea = testing::random_vec(1), eb = testing::random_vec(1);
    const double t = testing::uniform(0, 50), eps = testing::uniform(0, 0.1);
    const CMatrix phi = random_unitary(4).leftCols(2);
    const CMatrix u = random_unitary(2);
    CHECK(current_integrand(m, k, t, eps, ea, eb, phi * u) ==
          doctest::Approx(current_integrand(m, k, t, eps, ea, eb, phi)).epsilon(1e-12));
  }
}

TEST_CASE("block sums do not depend on the thread count") {
  std::vector<double> data(5000);
  for (double& x : data) x = testing::uniform(-1, 1) * std::pow(10.0, testing::uniform(-8, 8));
  auto per_k = [&](std::size_t i, std::span<double> out) {
    out[0] = data[i];
    out[1] = data[i] * data[(i * 7) % data.size()];
  };
  const auto serial = bz_serial_sum(data.size(), 2, per_k);
  const int saved = omp_get_max_threads();
  for (std::size_t block : {1, 7, 64, 1000, 9000}) {
    std::vector<std::vector<double>> runs;
    for (int n : {1, 2, 5, 8}) {
      omp_set_num_threads(n);
      runs.push_back(bz_block_sum(data.size(), 2, per_k, block));
    }
    for (const auto& r : runs) CHECK(r == runs[0]);
    for (int v = 0; v < 2; ++v) CHECK(runs[0][v] == doctest::Approx(serial[v]).epsilon(1e-14));
  }
  omp_set_num_threads(saved);
}

TEST_CASE("block sums rethrow the lowest failing block") {
  auto per_k = [](std::size_t i, std::span<double> out) {
    if (i == 900 || i == 300) throw InvalidArgument("bad " + std::to_string(i));
    out[0] = 1.0;
  };
  try {
    bz_block_sum(1000, 1, per_k, 16);
    FAIL("expected a throw");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("bad 300") != std::string::npos);
  }
}

TEST_CASE("random-model current traces match the serial reference") {
  for (int d = 0; d < 3; ++d) {
    const TightBindingModel m(testing::random_hoppings(3));
    const BZGrid g = make_grid(m.lattice(), 8);
    const Vec2 ea = testing::random_vec(1), eb = testing::random_vec(1);
    const auto times = sample_times(3.0, 0.5);
    const auto par = current_trace(m, g, 1e-2, ea, eb, 0.0, times);
    const auto ref = current_trace_reference(m, g, 1e-2, ea, eb, 0.0, times);
    for (std::size_t i = 0; i < times.size(); ++i)
      CHECK(std::abs(par.j_inst[i] - ref.j_inst[i]) <= 1e-13 * std::max(1.0, ref.j_l1[i]));
  }
}

TEST_CASE("running average of affine data") {
  for (int d = 0; d < kDraws; ++d) {
    const double a = testing::uniform(-3, 3), b = testing::uniform(-3, 3);
    const auto t = sample_times(testing::uniform(1, 20), testing::uniform(0.05, 0.5));
    std::vector<double> j(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) j[i] = a + b * t[i];
    const auto avg = running_average(t, j);
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(avg[i] == doctest::Approx(a + 0.5 * b * t[i]).epsilon(1e-12));
  }
}
