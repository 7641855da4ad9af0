#pragma once

// Run configuration: flat `key = value` lines, values in JSON, `#` comments.
// Grid and index ranges have no defaults; only tolerances, seeds and output
// locations do.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bipdo/grid.hpp"
#include "bipdo/symbols.hpp"

namespace bipdo {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::uint64_t kDefaultSeed = 20240917ULL;

struct RunConfig {
  std::string experiment;
  std::string name;  // report file stem; the experiment id when unset
  std::string symbol;
  Params params;
  std::optional<int> n1, n2, N;
  std::optional<double> L;
  std::vector<int> N_list;
  std::optional<std::pair<int, int>> j_range;
  std::vector<int> j;  // one entry (annulus) or a pair
  std::optional<std::pair<int, int>> ell_range;
  std::optional<int> ell_max;
  std::optional<double> split_scale;
  std::vector<std::vector<double>> x_samples;
  std::vector<double> b_list;
  std::vector<double> m_grid;
  std::vector<double> p_list;
  std::optional<double> rho;
  std::optional<DyadicCube> cube;
  int points = 50;
  std::uint64_t seed = kDefaultSeed;
  double tol = 1e-10;
  int max_iter = 500;
  std::string output_dir = ".";
  bool expected_fail = false;

  /// Keys as given, in canonical JSON form.
  nlohmann::json given = nlohmann::json::object();

  std::string report_name() const { return name.empty() ? experiment : name; }
  Split split() const;
  GridSpec grid() const;
  /// Throws ConfigError naming the first key the experiment needs but lacks.
  void require_for_experiment() const;
};

const std::vector<std::string>& experiment_names();
const std::vector<std::string>& config_keys();

/// Throws ConfigError("line N: ...") on syntax, unknown keys, duplicates or
/// ill-typed values.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text form; parse_config(to_text(c)) reproduces c.
std::string to_text(const RunConfig& c);

}  // namespace bipdo
