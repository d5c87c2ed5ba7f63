#include "crystal/semimetal.hpp"

#include <algorithm>
#include <cmath>

#include "crystal/errors.hpp"
#include "crystal/spectral.hpp"

namespace crystal {

namespace {

struct GapProbe {
  const BlochModel& model;
  int upper;  // index of the band above the touching

  double gap(const Vec2& k) const {
    const FiberSpectrum s = eigensystem(model.fiber(k), k);
    return s.lambdas[upper] - s.lambdas[upper - 1];
  }

  // ∇(gap²) by Hellmann–Feynman.
  Vec2 grad(const Vec2& k, double* gap_out = nullptr) const {
    const FiberSpectrum s = eigensystem(model.fiber(k), k);
    const double g = s.lambdas[upper] - s.lambdas[upper - 1];
    if (gap_out) *gap_out = g;
    const CVector up = s.vectors.col(upper), lo = s.vectors.col(upper - 1);
    Vec2 out;
    for (int c = 0; c < 2; ++c) {
      const CMatrix d = model.deriv(k, Vec2::Unit(c));
      out[c] = 2.0 * g * (up.dot(d * up).real() - lo.dot(d * lo).real());
    }
    return out;
  }
};

Vec2 polish(const GapProbe& probe, Vec2 k) {
  const double h = 1e-6;
  for (int it = 0; it < 60; ++it) {
    double g = 0.0;
    const Vec2 grad = probe.grad(k, &g);
    if (g < 1e-14) break;
    Eigen::Matrix2d hess;
    for (int c = 0; c < 2; ++c)
      hess.col(c) = (probe.grad(k + h * Vec2::Unit(c)) - probe.grad(k - h * Vec2::Unit(c))) / (2.0 * h);
    hess = 0.5 * (hess + hess.transpose()).eval();
    Vec2 step;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(hess);
    if (es.eigenvalues().minCoeff() > 0.0)
      step = -hess.ldlt().solve(grad);
    else
      step = -grad / std::max(1.0, grad.norm());
    // backtrack on gap
    double lam = 1.0;
    while (lam > 1e-6 && probe.gap(k + lam * step) > g) lam *= 0.5;
    k += lam * step;
    if ((lam * step).norm() < 1e-15) break;
  }
  return k;
}

}  // namespace

std::vector<DiracPoint> find_dirac_points(const BlochModel& model, double mu_F, int seed_n, double tol) {
  if (!model.periodic()) throw InvalidArgument("find_dirac_points: model is not lattice-periodic");
  const BZGrid grid(model.lattice(), seed_n, Vec2::Zero());
  const int n = seed_n;
  std::vector<int> occ(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) occ[i] = fiber_spectrum(model, grid.point(i), mu_F).n_occ;
  const int nocc = *std::min_element(occ.begin(), occ.end());
  if (nocc != *std::max_element(occ.begin(), occ.end()) || nocc == 0 || nocc == model.dim()) return {};
  const GapProbe probe{model, nocc};
  std::vector<double> gaps(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) gaps[i] = probe.gap(grid.point(i));

  std::vector<std::size_t> seeds;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double g = gaps[static_cast<std::size_t>(i) * n + j];
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int ii = (i + di + n) % n, jj = (j + dj + n) % n;
          const double o = gaps[static_cast<std::size_t>(ii) * n + jj];
          if (o < g || (o == g && ii * n + jj < i * n + j)) {
            is_min = false;
            break;
          }
        }
      if (is_min) seeds.push_back(static_cast<std::size_t>(i) * n + j);
    }
  }
  std::sort(seeds.begin(), seeds.end(), [&](auto a, auto b) { return gaps[a] < gaps[b]; });
  if (seeds.size() > 16) seeds.resize(16);

  const Lattice2D& lat = model.lattice();
  std::vector<DiracPoint> found;
  for (std::size_t seed : seeds) {
    const Vec2 k = polish(probe, grid.point(seed));
    const double g = probe.gap(k);
    if (g > tol) continue;
    Vec2 frac = lat.to_fractional(k);
    for (int c = 0; c < 2; ++c) frac[c] -= std::floor(frac[c]);
    bool dup = false;
    for (const auto& d : found) {
      Vec2 diff = frac - lat.to_fractional(d.k);
      for (int c = 0; c < 2; ++c) diff[c] -= std::round(diff[c]);
      if (diff.norm() < 1e-6) dup = true;
    }
    if (dup) continue;
    DiracPoint dp;
    dp.k = lat.from_fractional(frac);
    dp.gap = probe.gap(dp.k);
    const double r = 1e-4;
    double acc = 0.0;
    for (int a = 0; a < 8; ++a) {
      const double th = kTwoPi * a / 8.0;
      acc += probe.gap(dp.k + r * Vec2(std::cos(th), std::sin(th))) / (2.0 * r);
    }
    dp.vF = acc / 8.0;
    found.push_back(dp);
  }
  std::sort(found.begin(), found.end(), [&](const DiracPoint& a, const DiracPoint& b) {
    const Vec2 fa = lat.to_fractional(a.k), fb = lat.to_fractional(b.k);
    return fa.x() != fb.x() ? fa.x() < fb.x() : fa.y() < fb.y();
  });
  return found;
}

std::string to_string(Phase p) {
  switch (p) {
    case Phase::insulator:
      return "insulator";
    case Phase::metal:
      return "metal";
    case Phase::semimetal:
      return "semimetal";
  }
  return "unknown";
}

PhaseReport classify_phase(const BlochModel& model, double mu_F, const BZGrid& grid) {
  PhaseReport rep;
  rep.min_gap = std::numeric_limits<double>::infinity();
  rep.n_occ_min = model.dim();
  rep.n_occ_max = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const FiberSpectrum s = fiber_spectrum(model, grid.point(i), mu_F);
    rep.n_occ_min = std::min(rep.n_occ_min, s.n_occ);
    rep.n_occ_max = std::max(rep.n_occ_max, s.n_occ);
    rep.min_gap = std::min(rep.min_gap, s.gap);
  }
  if (rep.n_occ_min != rep.n_occ_max) {
    rep.phase = Phase::metal;
    return rep;
  }
  if (rep.n_occ_min == 0 || rep.n_occ_min == model.dim() || !model.periodic()) return rep;
  rep.dirac_points = find_dirac_points(model, mu_F, std::min(grid.n_per_dim(), 60), 1e-8);
  if (!rep.dirac_points.empty()) rep.phase = Phase::semimetal;
  return rep;
}

}  // namespace crystal
