#pragma once

#include "qprobe/phasespace.hpp"
#include "qprobe/states.hpp"
#include "qprobe/types.hpp"

#include <vector>

namespace qprobe {

/// Quadrature statistics p_theta(x) on a uniform x grid.
struct QuadratureDistribution {
  double theta = 0.0;
  double x_min = 0.0;
  double x_step = 0.0;
  VectorXd density;

  double x(int i) const { return x_min + i * x_step; }
  /// Trapezoid integral of the density over the grid.
  double integral() const;
};

/// Marginals at phases uniform over [0, pi), sharing one x grid.
struct RadonFamily {
  std::vector<QuadratureDistribution> marginals;

  void validate() const;
};

/// p_theta(x) = sum_{m,n} rho_mn e^{i(n-m)theta} psi_m(x) psi_n(x).
QuadratureDistribution quadrature_distribution(const FockDensityMatrix& state, double theta,
                                               double x_min, double x_step, int count);

/// Line integrals of a Wigner grid (s = 0) along angle theta; agrees with
/// quadrature_distribution up to grid interpolation error.
QuadratureDistribution radon_project(const QuasiGrid& wigner, double theta, double x_min,
                                     double x_step, int count);

/// Filtered back-projection with a hard-frequency-cutoff ramp filter.
/// filter_cutoff = 0 gives the all-zero grid (empty frequency band).
QuasiGrid inverse_radon(const RadonFamily& family, double filter_cutoff, const GridSpec& grid);

/// Phase-averaged homodyne statistics of a state with the given photon
/// distribution: p_R(x) = sum_m p_m psi_m(x)^2.
VectorXd random_phase_distribution(const VectorXd& photon_dist, double x_min, double x_step,
                                   int count);

/// Joint double-homodyne statistics p(q1, p2) = Q(q1 + i p2), returned as
/// a grid at ordering s = -1 (re axis = q1, im axis = p2).
QuasiGrid double_homodyne_distribution(const FockDensityMatrix& state, const GridSpec& grid);

}  // namespace qprobe
