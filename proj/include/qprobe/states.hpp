#pragma once

#include "qprobe/types.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace qprobe {

/// Truncated density matrix in the photon-number basis. Hermitian by
/// construction; `trunc_deficit` is how much trace the truncation lost
/// relative to the untruncated state.
struct FockDensityMatrix {
  MatrixXcd rho;
  double trunc_deficit = 0.0;

  int dim() const { return int(rho.rows()); }
  double trace() const { return rho.real().trace(); }
  VectorXd photon_distribution() const { return rho.diagonal().real(); }
};

/// Tagged description of a single-mode state. Construct through the
/// factory functions; parameters are validated there.
class StateSpec {
 public:
  enum class Family { Vacuum, Coherent, Fock, Thermal, SqueezedVacuum, Cat, Mixture, Explicit };

  static StateSpec vacuum();
  static StateSpec coherent(Complex amplitude);
  static StateSpec fock(int n);
  static StateSpec thermal(double mean_photons);
  static StateSpec squeezed_vacuum(double squeeze);
  static StateSpec cat(Complex amplitude);
  static StateSpec mixture(std::vector<std::pair<double, StateSpec>> parts);
  static StateSpec explicit_matrix(MatrixXcd rho);

  Family family() const { return family_; }
  Complex amplitude() const { return amplitude_; }
  int photon_number() const { return photon_number_; }
  double mean_thermal_photons() const { return mean_photons_; }
  double squeeze() const { return squeeze_; }
  const std::vector<std::pair<double, StateSpec>>& parts() const { return parts_; }
  const MatrixXcd& matrix() const { return *explicit_rho_; }

  /// Exact mean photon number of the untruncated state.
  double mean_photon_number() const;

  /// Short human-readable tag, e.g. "cat(0+3i)".
  std::string describe() const;

 private:
  explicit StateSpec(Family family) : family_(family) {}

  Family family_;
  Complex amplitude_{0.0, 0.0};
  int photon_number_ = 0;
  double mean_photons_ = 0.0;
  double squeeze_ = 0.0;
  std::vector<std::pair<double, StateSpec>> parts_;
  std::shared_ptr<const MatrixXcd> explicit_rho_;
};

/// Truncate the state to `dim` Fock levels. Rejects dim < 1 and
/// Fock(n) with n >= dim.
FockDensityMatrix to_density_matrix(const StateSpec& spec, int dim);

/// Exact photon-number probabilities p_0..p_max_n of the untruncated state.
VectorXd photon_number_distribution(const StateSpec& spec, int max_n);

/// Truncation size that keeps the state's own tail below ~1e-10.
int default_dim(const StateSpec& spec);

}  // namespace qprobe
