#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace crystal {

using Vec2 = Eigen::Vector2d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// z-component of the 2-D cross product.
inline double cross(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }

/// Reciprocal basis with a_i · b_j = 2π δ_ij. Throws DegenerateBasisError
/// when |a1 × a2| < 1e-14.
std::pair<Vec2, Vec2> reciprocal_basis(const Vec2& a1, const Vec2& a2);

/// Direct and reciprocal geometry of a 2-D Bravais lattice.
class Lattice2D {
 public:
  Lattice2D(const Vec2& a1, const Vec2& a2);

  /// Honeycomb (graphene) lattice: a1 = (√3/2, 1/2), a2 = (√3/2, −1/2).
  static Lattice2D honeycomb();
  /// Unit square lattice.
  static Lattice2D square();

  const Vec2& a1() const { return a1_; }
  const Vec2& a2() const { return a2_; }
  const Vec2& b1() const { return b1_; }
  const Vec2& b2() const { return b2_; }
  double cell_area() const { return cell_area_; }
  double bz_area() const { return bz_area_; }

  /// Sign of b1 × b2: +1 when the reciprocal basis is right-handed.
  double reciprocal_orientation() const { return cross(b1_, b2_) > 0 ? 1.0 : -1.0; }

  /// Coordinates of k in the reciprocal basis: k = c1 b1 + c2 b2.
  Vec2 to_fractional(const Vec2& k) const;
  Vec2 from_fractional(const Vec2& c) const { return c.x() * b1_ + c.y() * b2_; }

  /// True when K ∈ R* (fractional coordinates integral to within tol).
  bool is_reciprocal_vector(const Vec2& K, double tol = 1e-8) const;

 private:
  Vec2 a1_, a2_, b1_, b2_;
  double cell_area_, bz_area_;
};

/// Field or measurement direction. Not normalized; must be nonzero.
class Direction {
 public:
  explicit Direction(const Vec2& e);
  Direction(double x, double y) : Direction(Vec2(x, y)) {}
  const Vec2& vec() const { return e_; }
  operator const Vec2&() const { return e_; }

 private:
  Vec2 e_;
};

/// Uniform n×n sampling of the Brillouin zone,
/// k_{ij} = (i/n + s1) b1 + (j/n + s2) b2, stored at index i·n + j.
class BZGrid {
 public:
  BZGrid(const Lattice2D& lattice, int n, const Vec2& fractional_shift);

  int n_per_dim() const { return n_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<Vec2>& points() const { return points_; }
  const Vec2& point(std::size_t idx) const { return points_[idx]; }
  const Vec2& point(int i, int j) const { return points_[static_cast<std::size_t>(i) * n_ + j]; }
  /// Quadrature weight bz_area / n² (identical for every point).
  double weight() const { return weight_; }
  const Vec2& fractional_shift() const { return shift_; }
  const Lattice2D& lattice() const { return lattice_; }

 private:
  Lattice2D lattice_;
  int n_;
  Vec2 shift_;
  double weight_;
  std::vector<Vec2> points_;
};

BZGrid make_grid(const Lattice2D& lattice, int n, const Vec2& fractional_shift = Vec2::Zero());

/// Half-cell shift (0.5/n, 0.5/n) used for semimetal runs so that no grid point
/// lands on a high-symmetry crossing.
inline Vec2 half_cell_shift(int n) { return Vec2(0.5 / n, 0.5 / n); }

}  // namespace crystal
