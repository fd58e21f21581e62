#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "liouville/assembly.hpp"

namespace liouville::cli {

struct Tolerances {
  double wronskian_drift = 1e-8;
  double residual = 1e-5;
  double newton = 1e-10;
};

/// Everything a run needs. Built from defaults, then an optional INI-style
/// config file, then command-line flags.
struct RunConfig {
  double mass = 1.0;
  std::string phi = "log(16/m^2)";
  std::string pi = "0";
  std::optional<std::filesystem::path> data_file;
  double x0 = 0.0;
  double h = 1e-3;
  /// Padding added around the chiral hull so finite-difference stencils and
  /// restriction slices stay inside the tables.
  double margin = 0.5;
  std::optional<Interval> chiral_range;
  SpacetimeGrid grid;
  Tolerances tolerances;
  std::uint64_t seed = 0;
  std::filesystem::path out = "liouville-out";
  Pairing pairing = Pairing::cross;

  /// Throws InvalidArgument on inconsistent values.
  void validate() const;

  /// Light-cone hull of the grid, checked against `chiral_range` when set.
  Interval required_chiral_range() const;

  CauchyData load_data() const;
  SolveOptions solve_options() const;
  nlohmann::ordered_json to_json() const;
};

/// Command-line values; unset fields leave the config untouched.
struct Overrides {
  std::optional<double> mass;
  std::optional<std::string> phi;
  std::optional<std::string> pi;
  std::optional<std::string> data_file;
  std::optional<double> x0;
  std::optional<double> h;
  std::optional<double> margin;
  std::optional<std::string> chiral_range;
  std::optional<std::string> grid;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> config;
  std::optional<std::string> pairing;
};

/// Reads `[data]`, `[solver]`, `[grid]`, `[tolerances]` and `[run]` sections.
void apply_config_file(const std::filesystem::path& path, RunConfig& config);

void apply_overrides(const Overrides& flags, RunConfig& config);

/// "tmin:tmax:nt,xmin:xmax:nx"
SpacetimeGrid parse_grid(const std::string& text);
/// "a:b"
Interval parse_interval(const std::string& text);
/// "a:b:n"
std::tuple<double, double, int> parse_range(const std::string& text);
/// Comma-separated reals.
std::vector<double> parse_list(const std::string& text);

}  // namespace liouville::cli
