#pragma once

#include <random>

#include "crystal/lattice.hpp"
#include "crystal/models.hpp"

namespace testing {

using crystal::cplx;
using crystal::CMatrix;
using crystal::Vec2;

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240517);
  return g;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline Vec2 random_vec(double scale = 5.0) { return Vec2(uniform(-scale, scale), uniform(-scale, scale)); }

inline CMatrix random_matrix(int n) {
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(uniform(-1, 1), uniform(-1, 1));
  return m;
}

inline CMatrix random_hermitian(int n) {
  const CMatrix a = random_matrix(n);
  return 0.5 * (a + a.adjoint());
}

inline double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

/// A 3-orbital Hermitian hopping table on the square lattice with random amplitudes.
inline crystal::HoppingList random_hoppings(int m = 3) {
  std::vector<Vec2> tau;
  for (int a = 0; a < m; ++a) tau.emplace_back(uniform(0, 1), uniform(0, 1));
  std::vector<crystal::Hopping> hops;
  for (int a = 0; a < m; ++a) hops.push_back({a, a, Eigen::Vector2i(0, 0), cplx(uniform(-1, 1), 0.0)});
  const Eigen::Vector2i cells[] = {{0, 0}, {1, 0}, {0, 1}, {1, -1}};
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (const auto& r : cells) {
        if (a == b && r == Eigen::Vector2i(0, 0)) continue;
        if (a > b && r == Eigen::Vector2i(0, 0)) continue;
        const cplx t(uniform(-1, 1), uniform(-1, 1));
        hops.push_back({a, b, r, t});
        hops.push_back({b, a, -r, std::conj(t)});
      }
  return crystal::HoppingList(crystal::Lattice2D::square(), tau, hops);
}

}  // namespace testing
