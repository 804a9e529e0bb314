#pragma once

#include "qprobe/direct.hpp"
#include "qprobe/homodyne.hpp"
#include "qprobe/phasespace.hpp"
#include "qprobe/stats.hpp"
#include "qprobe/types.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace qprobe::io {

/// Provenance block embedded in every output file: the fully resolved
/// run configuration (serialized JSON) plus the library version.
struct Meta {
  std::string config_json = "{}";
};

/// Fixed-format number used in all CSV output ('.' decimal separator,
/// locale independent).
std::string format_number(double value);

void write_quasi_grid_csv(std::ostream& os, const QuasiGrid& grid, const Meta& meta);
std::string quasi_grid_json(const QuasiGrid& grid, const Meta& meta);

/// One row of a phase-space scan.
struct ScanRow {
  Complex point;        // operational phase-space point
  double parity = 0.0;  // exact PCGF at s = 0 parameters of the run
  double quasi = 0.0;
  double ordering = 0.0;
  // Monte Carlo / error-band fields used by the simulate command.
  double pcgf_mean = 0.0;
  double pcgf_error = 0.0;
  double pcgf_sampled = 0.0;
  double quasi_sampled = 0.0;
  bool diverged = false;
};

/// Exact scan: columns re, im, parity, quasi_value, ordering.
void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows, const Meta& meta);
std::string scan_json(const std::vector<ScanRow>& rows, const Meta& meta);

/// Simulation scan with error bands and sampled estimates.
void write_simulation_csv(std::ostream& os, const std::vector<ScanRow>& rows, const Meta& meta);
std::string simulation_json(const std::vector<ScanRow>& rows, const Meta& meta);

void write_histogram_csv(std::ostream& os, const Histogram& histogram, std::uint64_t seed,
                         const Meta& meta);

/// Experiment designs round-trip through JSON.
std::string design_json(const ExperimentDesign& design);
ExperimentDesign design_from_json(const std::string& text);

void write_counts_csv(std::ostream& os, const CountDistribution& counts, const Meta& meta);
std::string counts_json(const CountDistribution& counts, const Meta& meta);

/// Marginal families: columns theta, x, density.
void write_marginals_csv(std::ostream& os, const RadonFamily& family, const Meta& meta);
std::string marginals_json(const RadonFamily& family, const Meta& meta);

}  // namespace qprobe::io
