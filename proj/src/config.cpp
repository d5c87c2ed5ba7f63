#include "crystal/config.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "crystal/errors.hpp"

namespace crystal {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& v, int line, const std::string& key) {
  std::istringstream is(v);
  double x = 0.0;
  std::string rest;
  if (!(is >> x) || (is >> rest)) throw ConfigError("expected a number for '" + key + "'", line, key);
  return x;
}

int to_int(const std::string& v, int line, const std::string& key) {
  std::istringstream is(v);
  long x = 0;
  std::string rest;
  if (!(is >> x) || (is >> rest)) throw ConfigError("expected an integer for '" + key + "'", line, key);
  return static_cast<int>(x);
}

Vec2 to_vec(const std::string& v, int line, const std::string& key) {
  std::string s = v;
  for (char& c : s)
    if (c == ',') c = ' ';
  std::istringstream is(s);
  double a = 0.0, b = 0.0;
  std::string rest;
  if (!(is >> a >> b) || (is >> rest)) throw ConfigError("expected two numbers for '" + key + "'", line, key);
  return Vec2(a, b);
}

bool to_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError("expected a boolean for '" + key + "'", line, key);
}

}  // namespace

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::haldane:
      return "haldane";
    case ModelKind::dirac:
      return "dirac";
    case ModelKind::tight_binding:
      return "tb";
  }
  return "unknown";
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::dynamics:
      return "dynamics";
    case Mode::kubo:
      return "kubo";
    case Mode::chern:
      return "chern";
    case Mode::predictors:
      return "predictors";
    case Mode::dirac_check:
      return "dirac-check";
  }
  return "unknown";
}

Mode parse_mode(const std::string& s) {
  if (s == "dynamics") return Mode::dynamics;
  if (s == "kubo") return Mode::kubo;
  if (s == "chern") return Mode::chern;
  if (s == "predictors" || s == "predict") return Mode::predictors;
  if (s == "dirac-check") return Mode::dirac_check;
  throw ConfigError("unknown mode '" + s + "'", 0, "mode");
}

void apply_preset(RunConfig& cfg, const std::string& name) {
  struct Row {
    const char* name;
    double g, mu, t2;
  };
  static const Row rows[] = {
      {"phase-a", 1.0, 0.0, 0.0},
      {"phase-b", 1.0, 0.0, -1.0},
      {"phase-c", 1.0, -2.0, 0.0},
      {"phase-d", 0.0, 0.0, 0.0},
  };
  for (const auto& r : rows) {
    if (name == r.name) {
      cfg.model = ModelKind::haldane;
      cfg.preset = name;
      cfg.haldane = {r.g, r.t2};
      cfg.mu_F = r.mu;
      cfg.shift_auto = name == "phase-d";
      return;
    }
  }
  throw ConfigError("unknown preset '" + name + "'", 0, "preset");
}

RunConfig parse_config(std::istream& in, const std::string& base_dir) {
  RunConfig cfg;
  bool have_model = false;
  std::string section;
  std::string raw;
  int line_no = 0;
  struct Entry {
    std::string section, key, value;
    int line;
  };
  std::vector<Entry> entries;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto cpos = line.find_first_of("#;");
    if (cpos != std::string::npos) line = line.substr(0, cpos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"model", "field", "grid", "time", "run", "dirac"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known))
        throw ConfigError("unknown section [" + section + "]", line_no, section);
      if (section == "model") have_model = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
    if (section.empty()) throw ConfigError("key outside of any section", line_no);
    entries.push_back({section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no});
  }
  if (!have_model) throw ConfigError("missing [model] section", 0, "model");

  // presets first so explicit keys override them
  for (const auto& e : entries) {
    if (e.section == "model" && e.key == "preset") {
      try {
        apply_preset(cfg, e.value);
      } catch (const ConfigError& err) {
        throw ConfigError(err.what(), e.line, "preset");
      }
    }
  }
  for (const auto& e : entries) {
    const std::string& k = e.key;
    const std::string& v = e.value;
    const int ln = e.line;
    auto unknown = [&] { throw ConfigError("unknown key '" + k + "' in [" + e.section + "]", ln, k); };
    if (e.section == "model") {
      if (k == "preset") continue;
      if (k == "type") {
        if (v == "haldane")
          cfg.model = ModelKind::haldane;
        else if (v == "dirac")
          cfg.model = ModelKind::dirac;
        else if (v == "tb")
          cfg.model = ModelKind::tight_binding;
        else
          throw ConfigError("unknown model type '" + v + "'", ln, "type");
      } else if (k == "g") {
        cfg.haldane.g = to_double(v, ln, k);
      } else if (k == "t2") {
        cfg.haldane.t2 = to_double(v, ln, k);
      } else if (k == "vF") {
        cfg.vF = to_double(v, ln, k);
      } else if (k == "file") {
        std::filesystem::path p(v);
        if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
        cfg.tb_file = p.string();
      } else if (k == "mu_F") {
        cfg.mu_F = to_double(v, ln, k);
      } else {
        unknown();
      }
    } else if (e.section == "field") {
      if (k == "eps")
        cfg.eps = to_double(v, ln, k);
      else if (k == "e_alpha")
        cfg.e_alpha = to_vec(v, ln, k);
      else if (k == "e_beta")
        cfg.e_beta = to_vec(v, ln, k);
      else
        unknown();
    } else if (e.section == "grid") {
      if (k == "n") {
        cfg.grid_n = to_int(v, ln, k);
      } else if (k == "shift") {
        if (v == "auto") {
          cfg.shift_auto = true;
        } else {
          cfg.shift_auto = false;
          cfg.grid_shift = to_vec(v, ln, k);
        }
      } else {
        unknown();
      }
    } else if (e.section == "time") {
      if (k == "t_max")
        cfg.t_max = to_double(v, ln, k);
      else if (k == "dt_sample")
        cfg.dt_sample = to_double(v, ln, k);
      else if (k == "dt")
        cfg.dt = to_double(v, ln, k);
      else
        unknown();
    } else if (e.section == "run") {
      if (k == "mode") {
        try {
          cfg.mode = parse_mode(v);
        } catch (const ConfigError& err) {
          throw ConfigError(err.what(), ln, "mode");
        }
      } else if (k == "output") {
        cfg.output = v;
      } else if (k == "threads") {
        cfg.threads = v == "auto" ? 0 : to_int(v, ln, k);
      } else if (k == "plot") {
        cfg.plot = to_bool(v, ln, k);
      } else {
        unknown();
      }
    } else if (e.section == "dirac") {
      if (k == "delta")
        cfg.delta = to_double(v, ln, k);
      else if (k == "n_radial")
        cfg.n_radial = to_int(v, ln, k);
      else if (k == "n_angular")
        cfg.n_angular = to_int(v, ln, k);
      else
        unknown();
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, std::filesystem::path(path).parent_path().string());
}

void validate(const RunConfig& cfg) {
  if (!(cfg.eps >= 0.0)) throw ConfigError("eps must be >= 0", 0, "eps");
  if (cfg.grid_n < 1) throw ConfigError("grid n must be >= 1", 0, "n");
  if (!(cfg.t_max >= 0.0)) throw ConfigError("t_max must be >= 0", 0, "t_max");
  if (!(cfg.dt_sample > 0.0)) throw ConfigError("dt_sample must be > 0", 0, "dt_sample");
  if (!(cfg.dt >= 0.0)) throw ConfigError("dt must be >= 0", 0, "dt");
  if (cfg.threads < 0) throw ConfigError("threads must be >= 0", 0, "threads");
  if (cfg.e_alpha.norm() == 0.0) throw ConfigError("e_alpha must be nonzero", 0, "e_alpha");
  if (cfg.e_beta.norm() == 0.0) throw ConfigError("e_beta must be nonzero", 0, "e_beta");
  if (cfg.model == ModelKind::dirac && !(cfg.vF > 0.0)) throw ConfigError("vF must be > 0", 0, "vF");
  if (cfg.model == ModelKind::tight_binding && cfg.tb_file.empty())
    throw ConfigError("tb model needs a hopping file", 0, "file");
  if (cfg.mode == Mode::dirac_check) {
    if (!(cfg.delta > 0.0)) throw ConfigError("delta must be > 0", 0, "delta");
    if (!(cfg.t_max > 0.0)) throw ConfigError("dirac-check needs t_max > 0", 0, "t_max");
    if (cfg.n_radial < 1 || cfg.n_angular < 1) throw ConfigError("node counts must be >= 1", 0, "n_radial");
  }
}

ModelPtr build_model(const RunConfig& cfg) {
  switch (cfg.model) {
    case ModelKind::haldane:
      return std::make_shared<HaldaneModel>(cfg.haldane);
    case ModelKind::dirac:
      return std::make_shared<DiracModel>(cfg.vF);
    case ModelKind::tight_binding:
      return std::make_shared<TightBindingModel>(load_hopping_list(cfg.tb_file));
  }
  throw ConfigError("unknown model", 0, "model");
}

Vec2 to_cartesian(const Lattice2D& lattice, const Vec2& reduced) { return lattice.from_fractional(reduced); }

BZGrid build_grid(const RunConfig& cfg, const Lattice2D& lattice) {
  return BZGrid(lattice, cfg.grid_n, cfg.shift_auto ? half_cell_shift(cfg.grid_n) : cfg.grid_shift);
}

std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  auto vec = [](const Vec2& v) { return fmt(v.x()) + " " + fmt(v.y()); };
  out.emplace_back("mode", to_string(cfg.mode));
  out.emplace_back("model", to_string(cfg.model));
  if (!cfg.preset.empty()) out.emplace_back("preset", cfg.preset);
  if (cfg.model == ModelKind::haldane) {
    out.emplace_back("g", fmt(cfg.haldane.g));
    out.emplace_back("t2", fmt(cfg.haldane.t2));
  } else if (cfg.model == ModelKind::dirac) {
    out.emplace_back("vF", fmt(cfg.vF));
  } else {
    out.emplace_back("file", cfg.tb_file);
  }
  out.emplace_back("mu_F", fmt(cfg.mu_F));
  out.emplace_back("eps", fmt(cfg.eps));
  out.emplace_back("e_alpha", vec(cfg.e_alpha));
  out.emplace_back("e_beta", vec(cfg.e_beta));
  out.emplace_back("grid_n", std::to_string(cfg.grid_n));
  out.emplace_back("grid_shift", cfg.shift_auto ? std::string("auto") : vec(cfg.grid_shift));
  out.emplace_back("t_max", fmt(cfg.t_max));
  out.emplace_back("dt_sample", fmt(cfg.dt_sample));
  out.emplace_back("dt", fmt(cfg.dt));
  if (cfg.mode == Mode::dirac_check) {
    out.emplace_back("delta", fmt(cfg.delta));
    out.emplace_back("n_radial", std::to_string(cfg.n_radial));
    out.emplace_back("n_angular", std::to_string(cfg.n_angular));
  }
  return out;
}

}  // namespace crystal
