#pragma once

#include "wqed/lattice.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wqed {

// A frequency or intensity grid: an explicit list, or an inclusive
// linspace / logspace (geometric, endpoints given as values) of `count` points.
struct Grid {
  enum class Kind { List, Linspace, Logspace };
  Kind kind = Kind::List;
  std::vector<double> values;  // List
  double start = 0.0;
  double stop = 0.0;
  int count = 0;

  static Grid list(std::vector<double> v);
  static Grid linspace(double start, double stop, int count);
  static Grid logspace(double start, double stop, int count);

  std::vector<double> expand() const;
  bool operator==(const Grid&) const = default;
};

// One sweep as written in a JSON config file. Model keys stay in their raw
// form so that a config survives a load/save cycle unchanged.
struct SweepConfig {
  std::string name;
  ModelConfig model;
  std::optional<int> m;
  Grid omega_p_grid;
  Grid i_in_grid;
  std::vector<std::string> methods;
  std::optional<std::string> placement;
  std::string qca_initial = "zero";  // "zero" or "continuation"
  std::optional<int> threads;

  bool operator==(const SweepConfig&) const = default;
};

SweepConfig parse_sweep_config(const std::string& json_text);
SweepConfig load_sweep_config(const std::string& path);
std::string dump_sweep_config(const SweepConfig& config);

// A figure preset: a set of named sweeps (spectra and intensity ramps).
struct Preset {
  std::string name;
  std::string description;
  std::vector<SweepConfig> panels;
};

Preset parse_preset(const std::string& json_text);
std::string dump_preset(const Preset& preset);

// Reads the whole file; throws ConfigError naming the path on failure.
std::string read_text_file(const std::string& path);

}  // namespace wqed
