#pragma once

#include "qprobe/direct.hpp"
#include "qprobe/phasespace.hpp"
#include "qprobe/states.hpp"
#include "qprobe/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qprobe {

/// Invalid or inconsistent run configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric divergence under --strict; maps to exit code 3.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PolarScan {
  int radius_count = 0;
  double radius_max = 0.0;
  int phase_count = 0;
};

/// Flat run configuration shared by all subcommands; parsed from a JSON
/// config file with individual CLI flags layered on top.
struct RunConfig {
  StateSpec state = StateSpec::vacuum();
  DetectorModel detector;
  double s = 0.0;
  std::optional<GridSpec> cartesian;
  std::optional<PolarScan> polar;
  std::int64_t runs = 1000;
  std::uint64_t seed = 1;
  std::string format = "csv";  // csv | json
  std::string out;
  bool strict = false;

  Complex beta{0.0, 0.0};  // counts subcommand probe point

  // stats subcommand
  std::string sweep = "thermal";  // thermal | coherent | reconstruction
  double sweep_from = 0.0;
  double sweep_to = 3.0;
  int sweep_steps = 31;
  double reconstruction_nbar = 2.0;
  int reconstruction_levels = 12;

  // homodyne subcommand
  std::string homodyne_mode = "reconstruct";  // marginals | reconstruct | randomphase
  int phases = 64;
  double x_min = -6.0;
  double x_max = 6.0;
  double x_step = 0.05;
  double filter_cutoff = 8.0;
  double grid_extent = 2.5;
  double grid_step = 0.05;

  /// Parse the JSON text of a config file. Unknown keys are rejected.
  static RunConfig from_json(const std::string& text);

  /// Canonical serialized form embedded in outputs.
  std::string resolved_json(const std::string& command) const;

  /// Operational scan points (beta) in output order.
  std::vector<Complex> scan_points() const;
};

// Subcommand entry points; each writes config.out (or stdout when empty)
// and returns the process exit code.
int cmd_quasi(const RunConfig& config);
int cmd_counts(const RunConfig& config);
int cmd_simulate(const RunConfig& config);
int cmd_stats(const RunConfig& config);
int cmd_homodyne(const RunConfig& config);

}  // namespace qprobe
