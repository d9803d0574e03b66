#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "nlch/kernel.hpp"
#include "nlch/model.hpp"
#include "nlch/potential.hpp"
#include "nlch/state.hpp"

namespace nlch {

// ---------------------------------------------------------------------------
// Flat TOML subset: [section] headers, key = value with numbers, booleans,
// basic strings and single-line arrays of those; '#' comments.

struct TomlValue {
  std::variant<double, bool, std::string, std::vector<TomlValue>> value;
  int line = 0;
};

/// Keys are stored as "section.key" (or "key" before the first header).
using TomlTable = std::map<std::string, TomlValue>;

/// Throws IoError carrying the offending line number on syntax errors and
/// duplicate keys.
TomlTable parse_toml(const std::string& text);

// ---------------------------------------------------------------------------

enum class InitialKind { constant, step, random, cosine, file };

InitialKind parse_initial_kind(const std::string& name);
std::string to_string(InitialKind k);

/// Built-in initial profiles (x is the first coordinate):
///  - constant: value
///  - step:     low + (high - low) (1 + tanh((x - x0) / width)) / 2
///  - random:   value + amplitude * U(-1, 1), seeded
///  - cosine:   value + amplitude * cos(mode pi x / L)
///  - file:     column named after the field in a CSV written by write_state_csv
struct InitialSpec {
  InitialKind kind = InitialKind::constant;
  double value = 0.5;
  double low = 0.1;
  double high = 0.9;
  double x0 = 0.5;
  double width = 0.05;
  double amplitude = 0.0;
  int mode = 1;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string path;
};

/// Throws ConfigError for random profiles without a seed and IoError when
/// the file cannot be read or has the wrong size.
Field make_initial(const InitialSpec& spec, const Grid& grid, const std::string& field_name);

struct GridSpec {
  int dim = 1;
  double length_x = 1.0;
  double length_y = 1.0;
  int cells_x = 256;
  int cells_y = 64;

  Grid build() const;
};

struct RunConfig {
  GridSpec grid;
  KernelSpec kernel;
  double interior_mass = 1.0;  // <= 0 keeps kernel.amplitude as given
  double phi_bar = 0.6;
  double lambda = 1e-3;
  double lambda_bar = 0.5;
  ModelParams model;
  SchemeConfig scheme;
  InitialSpec phi0;
  InitialSpec sigma0;
  double T = 1.0;
  int snapshot_every = 0;
  std::string out_dir = "out";
  std::vector<double> taus{0.1, 0.05, 0.025, 0.0};
  std::vector<double> lambdas{1e-2, 5e-3, 2.5e-3};
  double compare_amplitude = 1e-3;
  int compare_mode = 2;
  std::filesystem::path base_dir;  // relative file paths resolve against this

  PotentialParams potential() const { return PotentialParams::make(phi_bar, lambda, lambda_bar); }
  DiscreteKernel build_kernel(const Grid& g) const;
};

/// Defaults overlaid with the table. Unknown keys and ill-typed values throw
/// ConfigError naming the line.
RunConfig config_from_table(const TomlTable& table);
RunConfig load_config(const std::filesystem::path& path);
/// Round-trippable dump of every key.
std::string to_toml(const RunConfig& c);

}  // namespace nlch
