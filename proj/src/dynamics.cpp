#include "crystal/dynamics.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "crystal/errors.hpp"
#include "crystal/spectral.hpp"

namespace crystal {

namespace {

// exp(−i dt H) for H = h0 + xσ1 + yσ2 + zσ3.
Eigen::Matrix2cd expm2(const cplx& h00, const cplx& h10, const cplx& h11, double dt) {
  const double h0 = 0.5 * (h00.real() + h11.real());
  const double x = h10.real(), y = h10.imag(), z = 0.5 * (h00.real() - h11.real());
  const double r = std::sqrt(x * x + y * y + z * z);
  const double c = std::cos(r * dt);
  const double s = r > 0.0 ? std::sin(r * dt) / r : dt;
  const cplx ph = h0 == 0.0 ? cplx(1.0, 0.0) : cplx(std::cos(h0 * dt), -std::sin(h0 * dt));
  Eigen::Matrix2cd u;
  u(0, 0) = ph * cplx(c, -s * z);
  u(1, 1) = ph * cplx(c, s * z);
  u(0, 1) = ph * cplx(0.0, -s) * cplx(x, -y);
  u(1, 0) = ph * cplx(0.0, -s) * cplx(x, y);
  return u;
}

void apply2(const Eigen::Matrix2cd& u, CMatrix& phi) {
  for (Eigen::Index c = 0; c < phi.cols(); ++c) {
    const cplx a = phi(0, c), b = phi(1, c);
    phi(0, c) = u(0, 0) * a + u(0, 1) * b;
    phi(1, c) = u(1, 0) * a + u(1, 1) * b;
  }
}

std::string where(const Vec2& k, double t) {
  std::ostringstream os;
  os.precision(17);
  os << "k=(" << k.x() << "," << k.y() << ") t=" << t;
  return os.str();
}

}  // namespace

double default_dt(const BlochModel& model, const Vec2& k) {
  const Eigen::VectorXd lam = eigensystem(model.fiber(k), k).lambdas;
  const double rho = lam.cwiseAbs().maxCoeff();
  return rho > 0.0 ? std::min(0.01, 0.1 / rho) : 0.01;
}

CMatrix expm_hermitian(const CMatrix& H, double dt) {
  if (H.rows() == 2) return expm2(H(0, 0), H(1, 0), H(1, 1), dt);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  const Eigen::VectorXd& lam = es.eigenvalues();
  CVector ph(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) ph[i] = cplx(std::cos(lam[i] * dt), -std::sin(lam[i] * dt));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

void step_exp_midpoint(const CMatrix& H_mid, double dt, CMatrix& phi) {
  if (H_mid.rows() == 2) {
    apply2(expm2(H_mid(0, 0), H_mid(1, 0), H_mid(1, 1), dt), phi);
    return;
  }
  phi = expm_hermitian(H_mid, dt) * phi;
}

double unitarity_defect(const CMatrix& phi) {
  const CMatrix g = phi.adjoint() * phi - CMatrix::Identity(phi.cols(), phi.cols());
  return g.size() == 0 ? 0.0 : g.cwiseAbs().maxCoeff();
}

FramePropagator::FramePropagator(const BlochModel& model, const Vec2& k, double eps, const Vec2& e_beta,
                                 CMatrix phi0, IntegratorOptions opts)
    : model_(model),
      haldane_(dynamic_cast<const HaldaneModel*>(&model)),
      k_(k),
      e_beta_(e_beta),
      eps_(eps),
      opts_(opts),
      phi_(std::move(phi0)) {
  if (phi_.rows() != model.dim()) throw InvalidArgument("FramePropagator: frame has wrong row count");
  if (opts_.dt < 0.0) throw InvalidArgument("FramePropagator: dt must be positive");
  dt_ = opts_.dt > 0.0 ? opts_.dt : default_dt(model, k);
}

void FramePropagator::step(double s) {
  if (opts_.scheme == Scheme::exp_midpoint) {
    const Vec2 km = k_ - eps_ * (t_ + 0.5 * s) * e_beta_;
    model_.fiber_into(km, h_);
    step_exp_midpoint(h_, s, phi_);
  } else {
    const cplx mi(0.0, -1.0);
    auto f = [&](double tt, const CMatrix& y) {
      model_.fiber_into(k_ - eps_ * tt * e_beta_, h_);
      return CMatrix(mi * (h_ * y));
    };
    const CMatrix k1 = f(t_, phi_);
    const CMatrix k2 = f(t_ + 0.5 * s, phi_ + 0.5 * s * k1);
    const CMatrix k3 = f(t_ + 0.5 * s, phi_ + 0.5 * s * k2);
    const CMatrix k4 = f(t_ + s, phi_ + s * k3);
    phi_ += (s / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
}

// Haldane fibers along the straight path k − εe_β t: the phases e^{ik·d} of
// the six bond vectors advance by a fixed factor per step, so the fiber is
// rebuilt from rotating phasors (re-seeded exactly every kResync steps).
void FramePropagator::advance_haldane(long nsteps, double s) {
  constexpr long kResync = 64;
  const auto bonds = honeycomb_bonds();
  const Lattice2D& lat = model_.lattice();
  const std::array<Vec2, 6> d = {bonds[0], bonds[1], bonds[2], lat.a1(), lat.a2(), Vec2(lat.a1() - lat.a2())};
  const HaldaneParams& p = haldane_->params();
  std::array<cplx, 6> ph, rot;
  for (int j = 0; j < 6; ++j) {
    const double a = -eps_ * s * e_beta_.dot(d[j]);
    rot[j] = cplx(std::cos(a), std::sin(a));
  }
  const double t0 = t_;
  for (long i = 0; i < nsteps; ++i) {
    if (i % kResync == 0) {
      const Vec2 km = k_ - eps_ * (t0 + (static_cast<double>(i) + 0.5) * s) * e_beta_;
      for (int j = 0; j < 6; ++j) {
        const double a = km.dot(d[j]);
        ph[j] = cplx(std::cos(a), std::sin(a));
      }
    }
    const cplx f = ph[0] + ph[1] + ph[2];
    const double m = p.g - 2.0 * p.t2 * (ph[3].imag() + ph[4].imag() + ph[5].imag());
    apply2(expm2(cplx(m, 0.0), f, cplx(-m, 0.0), s), phi_);
    for (int j = 0; j < 6; ++j) ph[j] *= rot[j];
  }
}

void FramePropagator::advance_to(double t) {
  if (t < t_) throw InvalidArgument("FramePropagator: times must be ascending");
  const double span = t - t_;
  if (span > 0.0) {
    const long nsteps = std::max(1L, static_cast<long>(std::ceil(span / dt_ - 1e-9)));
    const double s = span / static_cast<double>(nsteps);
    if (haldane_ && opts_.scheme == Scheme::exp_midpoint) {
      advance_haldane(nsteps, s);
    } else {
      const double t0 = t_;
      for (long i = 0; i < nsteps; ++i) {
        step(s);
        t_ = t0 + static_cast<double>(i + 1) * s;
      }
    }
    t_ = t;
  }
  const double defect = unitarity_defect(phi_);
  if (!(defect <= opts_.unitarity_tol))
    throw UnitarityBreachError("unitarity defect " + std::to_string(defect) + " at " + where(k_, t_));
}

namespace {

std::vector<PropagationFrame> run_frames(const BlochModel& model, const Vec2& k, double eps, const Vec2& e_beta,
                                         CMatrix phi0, const std::vector<double>& times,
                                         const IntegratorOptions& opts) {
  if (times.empty() || times.front() != 0.0) throw InvalidArgument("propagate_frame: times must start at 0");
  FramePropagator prop(model, k, eps, e_beta, std::move(phi0), opts);
  std::vector<PropagationFrame> out;
  out.reserve(times.size());
  for (double t : times) {
    prop.advance_to(t);
    out.push_back({k, t, prop.phi()});
  }
  return out;
}

}  // namespace

std::vector<PropagationFrame> propagate_frame(const BlochModel& model, const Vec2& k, double eps,
                                              const Vec2& e_beta, double mu_F, const std::vector<double>& times,
                                              IntegratorOptions opts) {
  const FiberSpectrum s = fiber_spectrum(model, k, mu_F);
  return run_frames(model, k, eps, e_beta, s.occupied(), times, opts);
}

std::vector<PropagationFrame> propagate_full_frame(const BlochModel& model, const Vec2& k, double eps,
                                                   const Vec2& e_beta, const std::vector<double>& times,
                                                   IntegratorOptions opts) {
  const FiberSpectrum s = eigensystem(model.fiber(k), k);
  return run_frames(model, k, eps, e_beta, s.vectors, times, opts);
}

}  // namespace crystal
