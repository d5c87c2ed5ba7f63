#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "crystal/lattice.hpp"
#include "crystal/models.hpp"

namespace crystal {

enum class ModelKind { haldane, dirac, tight_binding };
enum class Mode { dynamics, kubo, chern, predictors, dirac_check };

std::string to_string(ModelKind k);
std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

struct RunConfig {
  ModelKind model = ModelKind::haldane;
  std::string preset;
  HaldaneParams haldane;
  double vF = 1.0;
  std::string tb_file;
  double mu_F = 0.0;

  double eps = 0.0;
  /// Directions in reciprocal-basis coordinates (e = c1 b1 + c2 b2).
  Vec2 e_alpha{0.0, 1.0};
  Vec2 e_beta{1.0, 0.0};

  int grid_n = 60;
  /// Fractional shift; ignored when shift_auto is set.
  Vec2 grid_shift = Vec2::Zero();
  bool shift_auto = false;

  double t_max = 100.0;
  double dt_sample = 0.5;
  /// Integrator step, 0 = default.
  double dt = 0.0;

  Mode mode = Mode::dynamics;
  std::string output = "crystal-current";
  /// 0 = runtime default.
  int threads = 0;
  bool plot = false;

  double delta = 1.0;
  int n_radial = 200;
  int n_angular = 64;
};

/// Applies a phase preset (phase-a .. phase-d) to the model fields.
void apply_preset(RunConfig& cfg, const std::string& name);

/// INI-like parser. Sections [model] (required), [field], [grid], [time],
/// [run], [dirac]; `key = value`; `#` or `;` comments.
/// Throws ConfigError carrying a line number (syntax) or field name (semantics).
RunConfig parse_config(std::istream& in, const std::string& base_dir = {});
RunConfig load_config(const std::string& path);

/// Throws ConfigError naming the offending field.
void validate(const RunConfig& cfg);

ModelPtr build_model(const RunConfig& cfg);

/// Cartesian vector from reciprocal-basis coordinates.
Vec2 to_cartesian(const Lattice2D& lattice, const Vec2& reduced);

BZGrid build_grid(const RunConfig& cfg, const Lattice2D& lattice);

/// Ordered key/value echo of everything that affects results (thread count
/// and output prefix excluded).
std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& cfg);

}  // namespace crystal
