#pragma once

#include "qprobe/states.hpp"
#include "qprobe/types.hpp"

#include <vector>

namespace qprobe {

/// Rectangular phase-space grid: point (i, j) sits at
/// re_min + i*re_step + I*(im_min + j*im_step).
struct GridSpec {
  double re_min = 0.0;
  double re_step = 0.0;
  int re_count = 0;
  double im_min = 0.0;
  double im_step = 0.0;
  int im_count = 0;

  static GridSpec centered(double extent, double step);

  double re(int i) const { return re_min + i * re_step; }
  double im(int j) const { return im_min + j * im_step; }
  Complex point(int i, int j) const { return {re(i), im(j)}; }
  void validate() const;
};

/// Real-valued quasidistribution samples W(alpha; s) on a grid.
struct QuasiGrid {
  GridSpec grid;
  double s = 0.0;
  MatrixXd values;  // values(i, j) = W(grid.point(i, j); s)

  /// Trapezoid estimate of \int W d^2alpha over the grid.
  double integral() const;
};

struct QuasiOptions {
  /// Permit 0 < s < 1 evaluation (divergence detector stays active).
  bool allow_unbounded_ordering = false;
  /// quasi_value() throws TruncationError when the reported tail bound
  /// exceeds this.
  double truncation_tolerance = 1e-8;
  /// Lower bound on the Fock-space size used for the displaced state.
  int min_dim = 0;
};

struct QuasiEval {
  double value = 0.0;
  /// For s <= 0 a rigorous bound on the truncation error of `value`;
  /// for s > 0 only an extrapolated estimate.
  double tail_bound = 0.0;
  bool diverged = false;
};

/// W(alpha; s) through the spectral form: displaced photon-number
/// occupations weighted by ((s+1)/(s-1))^n.
QuasiEval quasi_eval(const FockDensityMatrix& state, PhasePoint alpha, double s,
                     const QuasiOptions& options = {});

/// Convenience wrapper around quasi_eval: throws std::domain_error for
/// s outside the guaranteed-convergent range and TruncationError when the
/// tail bound exceeds options.truncation_tolerance.
double quasi_value(const FockDensityMatrix& state, PhasePoint alpha, double s,
                   const QuasiOptions& options = {});

/// Evaluate W on every grid point; one eigendecomposition of the state is
/// shared across points, so grids are much cheaper than repeated
/// quasi_value calls.
QuasiGrid quasi_grid(const FockDensityMatrix& state, const GridSpec& grid, double s,
                     const QuasiOptions& options = {});

// Closed forms for the analytic families.
double coherent_quasi_closed_form(Complex alpha0, PhasePoint alpha, double s);
double cat_quasi_closed_form(Complex alpha0, PhasePoint alpha, double s);
double thermal_quasi_closed_form(double nbar, PhasePoint alpha, double s);
double fock_quasi_closed_form(int n, PhasePoint alpha, double s);

/// W(alpha; s) for a StateSpec, dispatching to a closed form where one
/// exists and to the spectral sum otherwise.
double quasi_of_spec(const StateSpec& spec, PhasePoint alpha, double s);

/// Gaussian smoothing from ordering s to s_target < s. s_target equal to
/// s returns the grid unchanged (delta-kernel limit); s_target > s is the
/// divergent deconvolution direction and is refused.
QuasiGrid ordering_transform(const QuasiGrid& input, double s_target);

/// |dW/ds + (1/2) d^2W/(dalpha dalpha*)| estimated by central finite
/// differences with step h; vanishes like O(h^2) plus truncation noise.
double diffusion_residual(const FockDensityMatrix& state, PhasePoint alpha, double s,
                          double h = 1e-3);

/// Product-state multimode quasidistribution at one joint phase-space
/// point: factorizes into single-mode values because the total photon
/// number exponent splits mode by mode.
QuasiEval multimode_quasi(const std::vector<FockDensityMatrix>& states,
                          const std::vector<PhasePoint>& alphas, double s,
                          const QuasiOptions& options = {});

/// Divergence heuristic for series with terms of magnitude `increments`:
/// true when the trailing `window` increments are positive and
/// non-decreasing.
bool diverging_tail(const std::vector<double>& increments, int window = 20);

/// Photon-number occupations of the state displaced by -alpha,
/// q_n = <n|D(-alpha) rho D(-alpha)^dag|n> for n < out_dim.
VectorXd displaced_occupations(const FockDensityMatrix& state, PhasePoint alpha, int out_dim);

}  // namespace qprobe
