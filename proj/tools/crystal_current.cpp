// crystal-current: command-line front end.
//
//   crystal-current run <config> [--threads N] [--plot] [--out PREFIX]
//   crystal-current chern|kubo|predict|dirac-check <config> [...]

#include <cstdlib>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "crystal/config.hpp"
#include "crystal/errors.hpp"
#include "crystal/runner.hpp"

namespace {

struct Common {
  std::string config;
  int threads = -1;
  bool plot = false;
  std::string out;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("config", c.config, "configuration file")->required();
  sub->add_option("--threads", c.threads, "worker threads (default: CRYSTAL_CURRENT_THREADS or config)");
  sub->add_flag("--plot", c.plot, "also write an SVG plot");
  sub->add_option("--out", c.out, "output path prefix");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Current of a periodic crystal after a field switch-on"};
  app.require_subcommand(1);

  Common common;
  std::optional<crystal::Mode> override_mode;
  struct Sub {
    const char* name;
    const char* help;
    std::optional<crystal::Mode> mode;
  };
  const Sub subs[] = {
      {"run", "run the mode given in the config", std::nullopt},
      {"chern", "Chern number and Hall conductivity", crystal::Mode::chern},
      {"kubo", "linear-response (Kubo) trace", crystal::Mode::kubo},
      {"predict", "closed-form predictors for the classified phase", crystal::Mode::predictors},
      {"dirac-check", "time-averaged Dirac-cone response", crystal::Mode::dirac_check},
  };
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, common);
    sub->callback([&override_mode, m = s.mode] { override_mode = m; });
  }
  CLI11_PARSE(app, argc, argv);

  crystal::RunConfig cfg;
  try {
    cfg = crystal::load_config(common.config);
  } catch (const crystal::ConfigError& e) {
    std::cerr << "error,config," << e.what();
    if (e.line() > 0) std::cerr << " (line " << e.line() << ")";
    if (!e.field().empty()) std::cerr << " [" << e.field() << "]";
    std::cerr << '\n';
    return 1;
  }
  if (override_mode) cfg.mode = *override_mode;
  if (common.threads >= 0) {
    cfg.threads = common.threads;
  } else if (const char* env = std::getenv("CRYSTAL_CURRENT_THREADS")) {
    cfg.threads = std::atoi(env);
  }
  if (common.plot) cfg.plot = true;
  if (!common.out.empty()) cfg.output = common.out;
  return crystal::run(cfg, std::cout, std::cerr);
}
