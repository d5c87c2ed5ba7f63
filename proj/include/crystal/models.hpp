#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "crystal/lattice.hpp"

namespace crystal {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// A family k ↦ H_k of M×M Hermitian fibers over a 2-D lattice, with
/// directional derivatives e·∇_k H_k. The current-operator fiber is −∂_e H_k.
///
/// Fibers use the orbital-embedded gauge, H(k)_{ab} ∝ e^{ik·(R+τ_b−τ_a)}, so
/// H_{k+K} = T_K H_k T_K† with a diagonal T_K (see quasi_period_unitary).
class BlochModel {
 public:
  virtual ~BlochModel() = default;

  virtual int dim() const = 0;
  virtual std::string name() const = 0;

  /// Writes H_k into out (resized to dim×dim if needed).
  virtual void fiber_into(const Vec2& k, CMatrix& out) const = 0;
  /// Writes e·∇_k H_k into out.
  virtual void deriv_into(const Vec2& k, const Vec2& e, CMatrix& out) const = 0;

  /// False for local (non-lattice) models such as the bare Dirac cone.
  virtual bool periodic() const { return true; }

  CMatrix fiber(const Vec2& k) const;
  CMatrix deriv(const Vec2& k, const Vec2& e) const;

  const Lattice2D& lattice() const { return lattice_; }
  /// Orbital positions τ_a (Cartesian).
  const std::vector<Vec2>& orbitals() const { return orbitals_; }

 protected:
  BlochModel(Lattice2D lattice, std::vector<Vec2> orbitals)
      : lattice_(std::move(lattice)), orbitals_(std::move(orbitals)) {}

 private:
  Lattice2D lattice_;
  std::vector<Vec2> orbitals_;
};

using ModelPtr = std::shared_ptr<const BlochModel>;

/// On-site mass g and second-neighbour amplitude t2 of the honeycomb model.
struct HaldaneParams {
  double g = 0.0;
  double t2 = 0.0;
};

/// Nearest-neighbour vectors δ_1..δ_3 of the honeycomb lattice.
std::array<Vec2, 3> honeycomb_bonds();

/// H_k = [[m(k), conj f(k)], [f(k), −m(k)]] with f(k) = Σ_i e^{ik·δ_i} and
/// m(k) = g − 2 t2 (sin k·a1 + sin k·a2 + sin k·(a1 − a2)).
///
/// The sign of the t2 term is chosen so that (g, t2) = (1, −1) is the
/// Chern +1 insulator (σ⊥_12 = +1/2π in Cartesian orientation).
Eigen::Matrix2cd haldane_fiber(const Vec2& k, const HaldaneParams& p);
Eigen::Matrix2cd haldane_deriv(const Vec2& k, const Vec2& e, const HaldaneParams& p);

/// Massless Dirac cone H = vF k·σ = [[0, vF(k1 − i k2)], [vF(k1 + i k2), 0]].
Eigen::Matrix2cd dirac_fiber(const Vec2& k, double vF);
Eigen::Matrix2cd dirac_deriv(const Vec2& e, double vF);

class HaldaneModel final : public BlochModel {
 public:
  explicit HaldaneModel(const HaldaneParams& p);
  int dim() const override { return 2; }
  std::string name() const override;
  void fiber_into(const Vec2& k, CMatrix& out) const override;
  void deriv_into(const Vec2& k, const Vec2& e, CMatrix& out) const override;
  const HaldaneParams& params() const { return p_; }

 private:
  HaldaneParams p_;
};

/// The local Dirac model. Defined on all of R², not lattice-periodic.
class DiracModel final : public BlochModel {
 public:
  explicit DiracModel(double vF);
  int dim() const override { return 2; }
  std::string name() const override;
  void fiber_into(const Vec2& k, CMatrix& out) const override;
  void deriv_into(const Vec2& k, const Vec2& e, CMatrix& out) const override;
  bool periodic() const override { return false; }
  double fermi_velocity() const { return vF_; }

 private:
  double vF_;
};

/// One hopping term: H(k)_{from,to} += amplitude · e^{ik·(R + τ_to − τ_from)},
/// R = cell.x a1 + cell.y a2.
struct Hopping {
  int from = 0;
  int to = 0;
  Eigen::Vector2i cell = Eigen::Vector2i::Zero();
  cplx amplitude{0.0, 0.0};
};

/// Validated tight-binding hopping table. Construction rejects lists that are
/// not closed under (a, b, R, t) → (b, a, −R, conj t).
class HoppingList {
 public:
  HoppingList(Lattice2D lattice, std::vector<Vec2> orbitals, std::vector<Hopping> hoppings);

  const Lattice2D& lattice() const { return lattice_; }
  const std::vector<Vec2>& orbitals() const { return orbitals_; }
  const std::vector<Hopping>& hoppings() const { return hoppings_; }
  int num_orbitals() const { return static_cast<int>(orbitals_.size()); }

 private:
  Lattice2D lattice_;
  std::vector<Vec2> orbitals_;
  std::vector<Hopping> hoppings_;
};

/// Generic fiber H(k)_{ab} = Σ_R t_ab(R) e^{ik·(R + τ_b − τ_a)}.
CMatrix tb_fiber(const HoppingList& h, const Vec2& k);
CMatrix tb_deriv(const HoppingList& h, const Vec2& k, const Vec2& e);

/// Hopping table that reproduces haldane_fiber, with τ_0 = δ_1 and τ_1 = 0.
HoppingList haldane_hoppings(const HaldaneParams& p);

/// Parses the plain-text hopping format:
///
///     # comment
///     lattice a1x a1y a2x a2y
///     orbital x y
///     orbital x y
///     a b R1 R2 re im
///
/// Header lines (lattice, orbital) must precede the hopping records. A missing
/// lattice line selects the honeycomb lattice. Errors carry the line number.
HoppingList parse_hopping_list(std::istream& in);
HoppingList load_hopping_list(const std::string& path);
void write_hopping_list(std::ostream& out, const HoppingList& h);

class TightBindingModel final : public BlochModel {
 public:
  explicit TightBindingModel(HoppingList hoppings);
  int dim() const override { return hoppings_.num_orbitals(); }
  std::string name() const override { return "tight-binding"; }
  void fiber_into(const Vec2& k, CMatrix& out) const override;
  void deriv_into(const Vec2& k, const Vec2& e, CMatrix& out) const override;
  const HoppingList& hoppings() const { return hoppings_; }

 private:
  HoppingList hoppings_;
};

/// Diagonal unitary T_K with H_{k+K} = T_K H_k T_K†, normalised so that the
/// first entry is 1: (T_K)_{aa} = e^{−iK·(τ_a − τ_0)}.
/// Throws InvalidArgument if K ∉ R* or the model is not periodic.
CMatrix quasi_period_unitary(const BlochModel& model, const Vec2& K);

}  // namespace crystal
