#pragma once

#include "qprobe/phasespace.hpp"
#include "qprobe/states.hpp"
#include "qprobe/types.hpp"

#include <optional>
#include <vector>

namespace qprobe {

/// Detector and beam-splitter parameters of the counting setup.
struct DetectorModel {
  double efficiency = 1.0;     // eta in (0, 1]
  double transmission = 0.99;  // beam-splitter power transmission T in (0, 1)
  double overlap = 1.0;        // squared signal/probe mode overlap xi in [0, 1]
  std::optional<int> cutoff;   // count cut-off K; empty selects it from the tail mass

  static DetectorModel with_overlap(double eta, double transmission, double xi,
                                    std::optional<int> cutoff = {});
  static DetectorModel with_visibility(double eta, double transmission, double visibility,
                                       std::optional<int> cutoff = {});

  double effective_efficiency() const { return efficiency * transmission; }
  void validate() const;
};

/// Probabilities p_0..p_K of registering n photocounts plus the mass
/// beyond the cut-off.
struct CountDistribution {
  VectorXd p;
  double tail = 0.0;

  int cutoff() const { return int(p.size()) - 1; }
  void validate() const;
};

struct PcgfEval {
  double value = 0.0;
  bool diverged = false;
};

/// PCGF mapped onto a quasidistribution value of the signal mode.
struct PcgfResult {
  double pcgf = 0.0;
  Complex point{0.0, 0.0};  // sqrt((1-T)/T) * alpha
  double ordering = 0.0;    // -(1 - s - eta T)/(eta T)
  double quasi = 0.0;       // pcgf * 2 eta T / (pi (1 - s))
};

/// Count statistics parameterized directly by the operational phase-space
/// point beta = sqrt((1-T)/T) alpha and the effective efficiency eta*T.
/// Closed forms handle the coherent, thermal, single-photon and cat
/// signals; everything else goes through the generic displaced-matrix
/// path. eta_t = 1 is allowed here (the T -> 1 limit at fixed beta).
CountDistribution count_statistics_displaced(const StateSpec& signal, Complex beta, double eta_t,
                                             std::optional<int> cutoff = {});

/// Same, parameterized by the probe amplitude alpha and a DetectorModel
/// (requires xi = 1; mismatch is handled by mode_mismatch_pcgf).
CountDistribution count_statistics(const StateSpec& signal, Complex probe_alpha,
                                   const DetectorModel& det);

/// Generic path made public for cross-checks: displace the density matrix
/// by -beta, apply Bernoulli loss eta_t, read the diagonal.
CountDistribution generic_count_statistics(const FockDensityMatrix& state, Complex beta,
                                           double eta_t, std::optional<int> cutoff = {});

/// Photon count generating function Pi(s) = sum ((s+1)/(s-1))^n p_n.
PcgfEval pcgf_eval(const CountDistribution& counts, double s);
double pcgf(const CountDistribution& counts, double s);

PcgfResult pcgf_to_quasi(double pcgf_value, Complex probe_alpha, const DetectorModel& det, double s);
PcgfResult pcgf_to_quasi_displaced(double pcgf_value, Complex beta, double eta_t, double s);

/// PCGF under imperfect mode overlap: signal quasidistribution at the
/// xi-rescaled point times the Gaussian mismatch envelope.
double mode_mismatch_pcgf(const StateSpec& signal, Complex probe_alpha, const DetectorModel& det,
                          double s);

/// xi = v/(2 - v).
double visibility_to_overlap(double visibility);
/// v = 4 xi/(2 + 2 xi).
double overlap_to_visibility(double xi);

/// Systematic error bound from cutting the count statistics at K.
double cutoff_error_bound(const CountDistribution& counts, int k, double s);

/// Photocount parity of a coherent probe carrying a thermal-noise
/// fraction, Pi(beta) for the noise model of the vacuum-scan diagnostic.
double thermal_noise_parity(Complex beta, double thermal_fraction);

struct MultimodeParityResult {
  double parity = 0.0;
  double quasi = 0.0;     // (2 eta T / pi)^M * parity
  double ordering = 0.0;  // -(1 - eta T)/(eta T)
  double tail = 0.0;      // count mass lost to the per-mode cut-offs
};

/// Parity of the total photocount number over independently displaced
/// product modes; the count statistics of the modes are convolved and the
/// alternating sum taken over total counts.
MultimodeParityResult multimode_parity_scan(const std::vector<StateSpec>& states,
                                            const std::vector<Complex>& probe_alphas,
                                            const DetectorModel& det);

/// Same, parameterized by operational points and eta*T directly
/// (eta_t = 1 allowed).
MultimodeParityResult multimode_parity_displaced(const std::vector<StateSpec>& states,
                                                 const std::vector<Complex>& betas, double eta_t,
                                                 std::optional<int> cutoff = {});

}  // namespace qprobe
