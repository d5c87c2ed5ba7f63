#include "crystal/lattice.hpp"

#include <cmath>
#include <string>

#include "crystal/errors.hpp"

namespace crystal {

std::pair<Vec2, Vec2> reciprocal_basis(const Vec2& a1, const Vec2& a2) {
  const double det = cross(a1, a2);
  if (std::abs(det) < 1e-14) {
    throw DegenerateBasisError("lattice vectors are linearly dependent (|a1 x a2| = " +
                               std::to_string(std::abs(det)) + ")");
  }
  // b1 ⟂ a2 and b2 ⟂ a1, scaled so that a_i · b_i = 2π.
  const Vec2 b1 = (kTwoPi / det) * Vec2(a2.y(), -a2.x());
  const Vec2 b2 = (kTwoPi / det) * Vec2(-a1.y(), a1.x());
  return {b1, b2};
}

Lattice2D::Lattice2D(const Vec2& a1, const Vec2& a2) : a1_(a1), a2_(a2) {
  std::tie(b1_, b2_) = reciprocal_basis(a1, a2);
  cell_area_ = std::abs(cross(a1_, a2_));
  bz_area_ = std::abs(cross(b1_, b2_));
}

Lattice2D Lattice2D::honeycomb() {
  const double s = std::sqrt(3.0) / 2.0;
  return Lattice2D(Vec2(s, 0.5), Vec2(s, -0.5));
}

Lattice2D Lattice2D::square() { return Lattice2D(Vec2(1.0, 0.0), Vec2(0.0, 1.0)); }

Vec2 Lattice2D::to_fractional(const Vec2& k) const {
  // a_i · b_j = 2π δ_ij, so c_i = a_i · k / 2π.
  return Vec2(a1_.dot(k), a2_.dot(k)) / kTwoPi;
}

bool Lattice2D::is_reciprocal_vector(const Vec2& K, double tol) const {
  const Vec2 c = to_fractional(K);
  return std::abs(c.x() - std::round(c.x())) <= tol && std::abs(c.y() - std::round(c.y())) <= tol;
}

Direction::Direction(const Vec2& e) : e_(e) {
  if (!(e.norm() > 0.0) || !e.allFinite()) {
    throw InvalidArgument("direction vector must be nonzero and finite");
  }
}

BZGrid::BZGrid(const Lattice2D& lattice, int n, const Vec2& fractional_shift)
    : lattice_(lattice), n_(n), shift_(fractional_shift) {
  if (n < 1) throw InvalidArgument("grid size must be >= 1, got " + std::to_string(n));
  weight_ = lattice.bz_area() / (static_cast<double>(n) * n);
  points_.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 c(static_cast<double>(i) / n + shift_.x(), static_cast<double>(j) / n + shift_.y());
      points_.push_back(lattice.from_fractional(c));
    }
  }
}

BZGrid make_grid(const Lattice2D& lattice, int n, const Vec2& fractional_shift) {
  return BZGrid(lattice, n, fractional_shift);
}

}  // namespace crystal
