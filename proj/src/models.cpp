#include "crystal/models.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "crystal/errors.hpp"

namespace crystal {

CMatrix BlochModel::fiber(const Vec2& k) const {
  CMatrix h(dim(), dim());
  fiber_into(k, h);
  return h;
}

CMatrix BlochModel::deriv(const Vec2& k, const Vec2& e) const {
  CMatrix d(dim(), dim());
  deriv_into(k, e, d);
  return d;
}

std::array<Vec2, 3> honeycomb_bonds() {
  const double s3 = std::sqrt(3.0);
  return {Vec2(1.0 / s3, 0.0), Vec2(-0.5 / s3, 0.5), Vec2(-0.5 / s3, -0.5)};
}

namespace {

struct HoneycombConstants {
  std::array<Vec2, 3> delta;
  std::array<Vec2, 3> nnn;  // a1, a2, a1 - a2
  HoneycombConstants() : delta(honeycomb_bonds()) {
    const Lattice2D lat = Lattice2D::honeycomb();
    nnn = {lat.a1(), lat.a2(), Vec2(lat.a1() - lat.a2())};
  }
};

const HoneycombConstants& honeycomb_constants() {
  static const HoneycombConstants c;
  return c;
}

}  // namespace

Eigen::Matrix2cd haldane_fiber(const Vec2& k, const HaldaneParams& p) {
  const auto& c = honeycomb_constants();
  cplx f(0.0, 0.0);
  for (const auto& d : c.delta) {
    const double ph = k.dot(d);
    f += cplx(std::cos(ph), std::sin(ph));
  }
  double s = 0.0;
  for (const auto& v : c.nnn) s += std::sin(k.dot(v));
  const double m = p.g - 2.0 * p.t2 * s;
  Eigen::Matrix2cd h;
  h << m, std::conj(f), f, -m;
  return h;
}

Eigen::Matrix2cd haldane_deriv(const Vec2& k, const Vec2& e, const HaldaneParams& p) {
  const auto& c = honeycomb_constants();
  cplx df(0.0, 0.0);
  for (const auto& d : c.delta) {
    const double ph = k.dot(d);
    df += cplx(0.0, e.dot(d)) * cplx(std::cos(ph), std::sin(ph));
  }
  double ds = 0.0;
  for (const auto& v : c.nnn) ds += std::cos(k.dot(v)) * e.dot(v);
  const double dm = -2.0 * p.t2 * ds;
  Eigen::Matrix2cd h;
  h << dm, std::conj(df), df, -dm;
  return h;
}

Eigen::Matrix2cd dirac_fiber(const Vec2& k, double vF) {
  Eigen::Matrix2cd h;
  h << 0.0, vF * cplx(k.x(), -k.y()), vF * cplx(k.x(), k.y()), 0.0;
  return h;
}

Eigen::Matrix2cd dirac_deriv(const Vec2& e, double vF) { return dirac_fiber(e, vF); }

HaldaneModel::HaldaneModel(const HaldaneParams& p)
    : BlochModel(Lattice2D::honeycomb(), {honeycomb_bonds()[0], Vec2::Zero()}), p_(p) {
  if (!std::isfinite(p.g) || !std::isfinite(p.t2)) throw InvalidArgument("haldane: non-finite parameter");
}

std::string HaldaneModel::name() const {
  std::ostringstream os;
  os.precision(17);
  os << "haldane(g=" << p_.g << ",t2=" << p_.t2 << ")";
  return os.str();
}

void HaldaneModel::fiber_into(const Vec2& k, CMatrix& out) const { out = haldane_fiber(k, p_); }

void HaldaneModel::deriv_into(const Vec2& k, const Vec2& e, CMatrix& out) const {
  out = haldane_deriv(k, e, p_);
}

DiracModel::DiracModel(double vF) : BlochModel(Lattice2D::square(), {Vec2::Zero(), Vec2::Zero()}), vF_(vF) {
  if (!(vF > 0.0) || !std::isfinite(vF)) throw InvalidArgument("dirac: vF must be positive");
}

std::string DiracModel::name() const {
  std::ostringstream os;
  os.precision(17);
  os << "dirac(vF=" << vF_ << ")";
  return os.str();
}

void DiracModel::fiber_into(const Vec2& k, CMatrix& out) const { out = dirac_fiber(k, vF_); }

void DiracModel::deriv_into(const Vec2&, const Vec2& e, CMatrix& out) const { out = dirac_deriv(e, vF_); }

HoppingList::HoppingList(Lattice2D lattice, std::vector<Vec2> orbitals, std::vector<Hopping> hoppings)
    : lattice_(std::move(lattice)), orbitals_(std::move(orbitals)), hoppings_(std::move(hoppings)) {
  if (orbitals_.empty()) throw InvalidArgument("hopping list: no orbitals");
  const int m = num_orbitals();
  using Key = std::tuple<int, int, int, int>;
  std::map<Key, cplx> table;
  double scale = 0.0;
  for (const auto& h : hoppings_) {
    if (h.from < 0 || h.from >= m || h.to < 0 || h.to >= m)
      throw InvalidArgument("hopping list: orbital index out of range");
    if (!std::isfinite(h.amplitude.real()) || !std::isfinite(h.amplitude.imag()))
      throw InvalidArgument("hopping list: non-finite amplitude");
    table[{h.from, h.to, h.cell.x(), h.cell.y()}] += h.amplitude;
    scale = std::max(scale, std::abs(h.amplitude));
  }
  const double tol = 1e-12 * std::max(1.0, scale);
  for (const auto& [key, t] : table) {
    const auto [a, b, r1, r2] = key;
    const auto it = table.find({b, a, -r1, -r2});
    const cplx partner = it == table.end() ? cplx(0.0) : it->second;
    if (std::abs(t - std::conj(partner)) > tol) {
      std::ostringstream os;
      os << "hopping list is not Hermitian: t(" << a << "," << b << ",[" << r1 << "," << r2
         << "]) has no conjugate partner";
      throw InvalidArgument(os.str());
    }
  }
}

namespace {

template <class Fn>
void accumulate_tb(const HoppingList& h, const Vec2& k, CMatrix& out, Fn weight) {
  const int m = h.num_orbitals();
  out.setZero(m, m);
  const auto& tau = h.orbitals();
  const Vec2& a1 = h.lattice().a1();
  const Vec2& a2 = h.lattice().a2();
  for (const auto& hop : h.hoppings()) {
    const Vec2 d = hop.cell.x() * a1 + hop.cell.y() * a2 + tau[hop.to] - tau[hop.from];
    const double ph = k.dot(d);
    out(hop.from, hop.to) += weight(d) * hop.amplitude * cplx(std::cos(ph), std::sin(ph));
  }
}

}  // namespace

CMatrix tb_fiber(const HoppingList& h, const Vec2& k) {
  CMatrix out;
  accumulate_tb(h, k, out, [](const Vec2&) { return cplx(1.0, 0.0); });
  return out;
}

CMatrix tb_deriv(const HoppingList& h, const Vec2& k, const Vec2& e) {
  CMatrix out;
  accumulate_tb(h, k, out, [&e](const Vec2& d) { return cplx(0.0, e.dot(d)); });
  return out;
}

HoppingList haldane_hoppings(const HaldaneParams& p) {
  const cplx one(1.0, 0.0);
  const cplx it2(0.0, p.t2);
  std::vector<Hopping> hops;
  auto add = [&hops](int a, int b, int r1, int r2, cplx t) {
    hops.push_back(Hopping{a, b, Eigen::Vector2i(r1, r2), t});
  };
  // nearest neighbours, orbital 0 sits at δ1
  for (const auto& r : {Eigen::Vector2i(0, 0), Eigen::Vector2i(0, 1), Eigen::Vector2i(1, 0)}) {
    add(0, 1, r.x(), r.y(), one);
    add(1, 0, -r.x(), -r.y(), one);
  }
  add(0, 0, 0, 0, cplx(p.g, 0.0));
  add(1, 1, 0, 0, cplx(-p.g, 0.0));
  for (const auto& v : {Eigen::Vector2i(1, 0), Eigen::Vector2i(0, 1), Eigen::Vector2i(1, -1)}) {
    add(0, 0, v.x(), v.y(), it2);
    add(0, 0, -v.x(), -v.y(), -it2);
    add(1, 1, v.x(), v.y(), -it2);
    add(1, 1, -v.x(), -v.y(), it2);
  }
  return HoppingList(Lattice2D::honeycomb(), {honeycomb_bonds()[0], Vec2::Zero()}, std::move(hops));
}

TightBindingModel::TightBindingModel(HoppingList hoppings)
    : BlochModel(hoppings.lattice(), hoppings.orbitals()), hoppings_(std::move(hoppings)) {}

void TightBindingModel::fiber_into(const Vec2& k, CMatrix& out) const { out = tb_fiber(hoppings_, k); }

void TightBindingModel::deriv_into(const Vec2& k, const Vec2& e, CMatrix& out) const {
  out = tb_deriv(hoppings_, k, e);
}

CMatrix quasi_period_unitary(const BlochModel& model, const Vec2& K) {
  if (!model.periodic()) throw InvalidArgument("quasi_period_unitary: model is not lattice-periodic");
  if (!model.lattice().is_reciprocal_vector(K))
    throw InvalidArgument("quasi_period_unitary: K is not a reciprocal lattice vector");
  const auto& tau = model.orbitals();
  CMatrix t = CMatrix::Zero(model.dim(), model.dim());
  for (int a = 0; a < model.dim(); ++a) {
    const double ph = -K.dot(tau[a] - tau[0]);
    t(a, a) = cplx(std::cos(ph), std::sin(ph));
  }
  return t;
}

}  // namespace crystal
