#include "crystal/runner.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include <omp.h>

#include "crystal/errors.hpp"
#include "crystal/observables.hpp"
#include "crystal/report.hpp"
#include "crystal/semimetal.hpp"
#include "crystal/spectral.hpp"

namespace crystal {

namespace {

std::string num(double v) { return format_number(v); }

Artifacts run_dynamics(const RunConfig& cfg, const BlochModel& model, const Echo& echo) {
  const BZGrid grid = build_grid(cfg, model.lattice());
  const Vec2 ea = to_cartesian(model.lattice(), cfg.e_alpha);
  const Vec2 eb = to_cartesian(model.lattice(), cfg.e_beta);
  SweepOptions opts;
  opts.integrator.dt = cfg.dt;
  const CurrentTrace tr = current_trace(model, grid, cfg.eps, ea, eb, cfg.mu_F, sample_times(cfg.t_max, cfg.dt_sample), opts);
  const double nan = std::nan("");
  std::vector<std::vector<double>> rows;
  std::vector<double> over(tr.times.size()), over_avg(tr.times.size());
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    over[i] = cfg.eps > 0 ? tr.j_inst[i] / cfg.eps : nan;
    over_avg[i] = cfg.eps > 0 ? tr.j_runavg[i] / cfg.eps : nan;
    rows.push_back({tr.times[i], tr.j_inst[i], tr.j_runavg[i], over[i], over_avg[i]});
  }
  std::ostringstream csv;
  write_csv(csv, echo, {"t", "j_inst", "j_runavg", "j_inst_over_eps", "j_runavg_over_eps"}, rows);
  Artifacts out{{cfg.output + ".csv", csv.str()}};
  if (cfg.plot) {
    std::ostringstream svg;
    if (cfg.eps > 0)
      write_svg(svg, "current / eps", "t", tr.times, {{"j/eps", over}, {"running average", over_avg}});
    else
      write_svg(svg, "current", "t", tr.times, {{"j", tr.j_inst}, {"running average", tr.j_runavg}});
    out.emplace_back(cfg.output + ".svg", svg.str());
  }
  return out;
}

Artifacts run_kubo(const RunConfig& cfg, const BlochModel& model, const Echo& echo) {
  const BZGrid grid = build_grid(cfg, model.lattice());
  const Vec2 ea = to_cartesian(model.lattice(), cfg.e_alpha);
  const Vec2 eb = to_cartesian(model.lattice(), cfg.e_beta);
  const CurrentTrace tr = kubo_trace(model, grid, cfg.mu_F, ea, eb, sample_times(cfg.t_max, cfg.dt_sample));
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < tr.times.size(); ++i) rows.push_back({tr.times[i], tr.j_inst[i], tr.j_runavg[i]});
  std::ostringstream csv;
  write_csv(csv, echo, {"t", "j_lr", "j_lr_runavg"}, rows);
  Artifacts out{{cfg.output + ".csv", csv.str()}};
  if (cfg.plot) {
    std::ostringstream svg;
    write_svg(svg, "linear response per unit field", "t", tr.times,
              {{"instantaneous", tr.j_inst}, {"running average", tr.j_runavg}});
    out.emplace_back(cfg.output + ".svg", svg.str());
  }
  return out;
}

Artifacts run_chern(const RunConfig& cfg, const BlochModel& model, const Echo& echo) {
  const BZGrid grid = build_grid(cfg, model.lattice());
  const Vec2 ea = to_cartesian(model.lattice(), cfg.e_alpha);
  const Vec2 eb = to_cartesian(model.lattice(), cfg.e_beta);
  const HallResult h = hall_sigma(model, cfg.mu_F, grid, ea, eb);
  std::ostringstream csv;
  write_key_values(csv, echo,
                   {{"chern", std::to_string(h.chern)},
                    {"sigma12", num(h.sigma(0, 1))},
                    {"sigma12_quadrature", num(h.sigma12_quadrature)},
                    {"sigma_contracted", num(h.contracted)}});
  return {{cfg.output + ".csv", csv.str()}};
}

Artifacts run_predictors(const RunConfig& cfg, const BlochModel& model, const Echo& echo) {
  const BZGrid grid = build_grid(cfg, model.lattice());
  const Vec2 ea = to_cartesian(model.lattice(), cfg.e_alpha);
  const Vec2 eb = to_cartesian(model.lattice(), cfg.e_beta);
  const PhaseReport ph = classify_phase(model, cfg.mu_F, grid);
  std::vector<std::pair<std::string, std::string>> rec{{"phase", to_string(ph.phase)}};
  Artifacts out;
  if (ph.phase == Phase::insulator) {
    const HallResult h = hall_sigma(model, cfg.mu_F, grid, ea, eb);
    rec.emplace_back("chern", std::to_string(h.chern));
    rec.emplace_back("hall_sigma", num(h.contracted));
  } else if (ph.phase == Phase::semimetal) {
    rec.emplace_back("dirac_points", std::to_string(ph.dirac_points.size()));
    for (std::size_t i = 0; i < ph.dirac_points.size(); ++i) {
      const auto& d = ph.dirac_points[i];
      rec.emplace_back("dirac_" + std::to_string(i) + "_k", num(d.k.x()) + " " + num(d.k.y()));
      rec.emplace_back("dirac_" + std::to_string(i) + "_vF", num(d.vF));
    }
    rec.emplace_back("semimetal_sigma", num(semimetal_sigma(static_cast<int>(ph.dirac_points.size()), ea, eb)));
  } else {
    const BallisticResult d = ballistic_D(model, cfg.mu_F, grid, ea, eb);
    rec.emplace_back("ballistic_D", num(d.D));
    rec.emplace_back("ballistic_D_slope", num(d.slope));
    rec.emplace_back("ballistic_D_error", num(d.error_estimate));
    if (cfg.eps > 0) {
      const auto times = sample_times(cfg.t_max, cfg.dt_sample);
      const auto p = bloch_predictor(model, cfg.mu_F, grid, cfg.eps, eb, ea, times);
      std::vector<std::vector<double>> rows;
      std::vector<double> over(times.size());
      for (std::size_t i = 0; i < times.size(); ++i) {
        over[i] = p[i] / cfg.eps;
        rows.push_back({times[i], p[i], over[i]});
      }
      std::ostringstream csv;
      write_csv(csv, echo, {"t", "j_bloch", "j_bloch_over_eps"}, rows);
      out.emplace_back(cfg.output + "-bloch.csv", csv.str());
      if (cfg.plot) {
        std::ostringstream svg;
        write_svg(svg, "Bloch predictor / eps", "t", times, {{"predictor", over}});
        out.emplace_back(cfg.output + "-bloch.svg", svg.str());
      }
    }
  }
  std::ostringstream csv;
  write_key_values(csv, echo, rec);
  out.insert(out.begin(), {cfg.output + ".csv", csv.str()});
  return out;
}

Artifacts run_dirac_check(const RunConfig& cfg, const Echo& echo) {
  const double vF = cfg.model == ModelKind::dirac ? cfg.vF : 1.0;
  const Eigen::Matrix2cd m = dirac_timeavg(cfg.delta, vF, cfg.t_max, cfg.n_radial, cfg.n_angular);
  const double target = kPi * kPi / 4.0;
  std::ostringstream csv;
  write_key_values(csv, echo,
                   {{"I11_im", num(m(0, 0).imag())},
                    {"I22_im", num(m(1, 1).imag())},
                    {"I12_im", num(m(0, 1).imag())},
                    {"I21_im", num(m(1, 0).imag())},
                    {"target_im", num(target)},
                    {"rel_err_11", num(std::abs(m(0, 0).imag() - target) / target)},
                    {"rel_err_22", num(std::abs(m(1, 1).imag() - target) / target)}});
  return {{cfg.output + ".csv", csv.str()}};
}

}  // namespace

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

Artifacts execute(const RunConfig& cfg) {
  validate(cfg);
  const Echo echo = config_echo(cfg);
  if (cfg.mode == Mode::dirac_check) return run_dirac_check(cfg, echo);
  const ModelPtr model = build_model(cfg);
  switch (cfg.mode) {
    case Mode::dynamics:
      return run_dynamics(cfg, *model, echo);
    case Mode::kubo:
      return run_kubo(cfg, *model, echo);
    case Mode::chern:
      return run_chern(cfg, *model, echo);
    case Mode::predictors:
      return run_predictors(cfg, *model, echo);
    case Mode::dirac_check:
      break;
  }
  return {};
}

int run(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  try {
    set_threads(cfg.threads);
    const Artifacts files = execute(cfg);
    for (const auto& [path, contents] : files) {
      write_file(path, contents);
      log << "wrote " << path << '\n';
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "error,config," << e.what();
    if (e.line() > 0) err << " (line " << e.line() << ")";
    if (!e.field().empty()) err << " [" << e.field() << "]";
    err << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error," << e.kind() << ',' << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error,internal," << e.what() << '\n';
    return 3;
  }
}

}  // namespace crystal
