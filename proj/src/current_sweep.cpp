#include <cmath>

#include "crystal/bz_sum.hpp"
#include "crystal/errors.hpp"
#include "crystal/observables.hpp"

namespace crystal {

double current_integrand(const BlochModel& model, const Vec2& k, double t, double eps, const Vec2& e_alpha,
                         const Vec2& e_beta, const CMatrix& phi) {
  if (phi.cols() == 0) return 0.0;
  const CMatrix da = model.deriv(k - eps * t * e_beta, e_alpha);
  return -(phi.adjoint() * da * phi).trace().real();
}

namespace {

void check_times(const std::vector<double>& times) {
  if (times.empty() || times.front() != 0.0) throw InvalidArgument("current_trace: times must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw InvalidArgument("current_trace: times must be strictly ascending");
}

// Writes the integrand at every time into out[0..nt) and its modulus into out[nt..2nt).
void sweep_fiber(const BlochModel& model, const Vec2& k, double eps, const Vec2& e_alpha, const Vec2& e_beta,
                 double mu_F, const std::vector<double>& times, const IntegratorOptions& opts, std::span<double> out) {
  const std::size_t nt = times.size();
  const FiberSpectrum s = fiber_spectrum(model, k, mu_F);
  if (s.n_occ == 0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  FramePropagator prop(model, k, eps, e_beta, s.occupied(), opts);
  for (std::size_t i = 0; i < nt; ++i) {
    prop.advance_to(times[i]);
    const double v = current_integrand(model, k, times[i], eps, e_alpha, e_beta, prop.phi());
    out[i] = v;
    out[nt + i] = std::abs(v);
  }
}

CurrentTrace assemble(const BZGrid& grid, double eps, const Vec2& e_alpha, const Vec2& e_beta, double mu_F,
                      const std::vector<double>& times, const std::vector<double>& sums) {
  const std::size_t nt = times.size();
  const double scale = grid.weight() / (kTwoPi * kTwoPi);
  CurrentTrace tr;
  tr.times = times;
  tr.j_inst.resize(nt);
  tr.j_l1.resize(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    tr.j_inst[i] = scale * sums[i];
    tr.j_l1[i] = scale * sums[nt + i];
  }
  tr.j_runavg = running_average(tr.times, tr.j_inst);
  tr.eps = eps;
  tr.e_alpha = e_alpha;
  tr.e_beta = e_beta;
  tr.mu_F = mu_F;
  tr.grid_n = grid.n_per_dim();
  return tr;
}

}  // namespace

CurrentTrace current_trace(const BlochModel& model, const BZGrid& grid, double eps, const Vec2& e_alpha,
                           const Vec2& e_beta, double mu_F, const std::vector<double>& times,
                           const SweepOptions& opts) {
  check_times(times);
  const auto sums = bz_block_sum(
      grid.size(), 2 * times.size(),
      [&](std::size_t idx, std::span<double> out) {
        sweep_fiber(model, grid.point(idx), eps, e_alpha, e_beta, mu_F, times, opts.integrator, out);
      },
      opts.block_size);
  return assemble(grid, eps, e_alpha, e_beta, mu_F, times, sums);
}

CurrentTrace current_trace_reference(const BlochModel& model, const BZGrid& grid, double eps, const Vec2& e_alpha,
                                     const Vec2& e_beta, double mu_F, const std::vector<double>& times,
                                     const IntegratorOptions& opts) {
  check_times(times);
  const auto sums = bz_serial_sum(grid.size(), 2 * times.size(), [&](std::size_t idx, std::span<double> out) {
    sweep_fiber(model, grid.point(idx), eps, e_alpha, e_beta, mu_F, times, opts, out);
  });
  return assemble(grid, eps, e_alpha, e_beta, mu_F, times, sums);
}

std::vector<double> running_average(const std::vector<double>& times, const std::vector<double>& j) {
  if (times.size() != j.size()) throw InvalidArgument("running_average: size mismatch");
  std::vector<double> out(j.size());
  if (j.empty()) return out;
  out[0] = j[0];
  CompensatedSum integral;
  for (std::size_t i = 1; i < j.size(); ++i) {
    integral.add(0.5 * (times[i] - times[i - 1]) * (j[i] + j[i - 1]));
    const double span = times[i] - times[0];
    out[i] = span > 0.0 ? integral.value() / span : j[i];
  }
  return out;
}

CurrentTrace running_average(CurrentTrace trace) {
  trace.j_runavg = running_average(trace.times, trace.j_inst);
  return trace;
}

std::vector<double> sample_times(double t_max, double dt) {
  if (!(dt > 0.0) || t_max < 0.0) throw InvalidArgument("sample_times: need dt > 0 and t_max >= 0");
  const auto n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
  std::vector<double> t(n + 1);
  for (std::size_t i = 0; i <= n; ++i) t[i] = static_cast<double>(i) * dt;
  if (t_max - t.back() > 1e-9 * std::max(1.0, t_max)) t.push_back(t_max);
  return t;
}

}  // namespace crystal
