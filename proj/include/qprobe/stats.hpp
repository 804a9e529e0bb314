#pragma once

#include "qprobe/types.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace qprobe {

/// Counting histogram from N experimental runs; sum(counts) <= runs,
/// the remainder fell beyond the recorded outcome range.
struct Histogram {
  std::vector<std::int64_t> counts;
  std::int64_t runs = 0;

  int max_outcome() const { return int(counts.size()) - 1; }
};

/// Per-setting outcome probabilities of an experiment: probabilities(i, n)
/// is p_n at setting theta_i; each row may sum to less than 1 (cut-off).
struct ExperimentDesign {
  MatrixXd probabilities;
  std::int64_t runs = 0;
  VectorXd settings;  // optional labels theta_i, informational only

  int setting_count() const { return int(probabilities.rows()); }
  int outcome_count() const { return int(probabilities.cols()); }
  void validate() const;
};

/// Estimator coefficients a_n(theta_i), same shape as the design rows.
struct EstimatorKernel {
  MatrixXd a;

  static EstimatorKernel single(const VectorXd& coefficients);
};

/// The PCGF coefficients ((s+1)/(s-1))^n for n = 0..k as a kernel row.
VectorXd pcgf_kernel(int k, double s);

/// Deterministic multinomial draw: N samples of the (sub-)probability
/// vector p; outcomes beyond p's range (mass 1 - sum p) are dropped. The
/// generator is std::mt19937_64, consumed through one 53-bit uniform per
/// event, so histograms are bit-reproducible across platforms.
Histogram sample_histogram(const VectorXd& p, std::int64_t runs, std::uint64_t seed);

/// Per-point stream seed used by scans: base XOR point index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// A = sum_i sum_n a_n(theta_i) k_n/N.
double estimate(const std::vector<Histogram>& histograms, const EstimatorKernel& kernel);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Exact mean and variance of the estimator over the multinomial
/// statistics of the histograms.
Moments exact_moments(const ExperimentDesign& design, const EstimatorKernel& kernel);

/// Moment generating function w~(lambda) of the estimator distribution.
Complex generating_function(const ExperimentDesign& design, const EstimatorKernel& kernel,
                            double lambda);

double covariance(const ExperimentDesign& design, const EstimatorKernel& kernel_a,
                  const EstimatorKernel& kernel_b);

/// Cov normalized to [-1, 1]; throws std::domain_error when either
/// variance vanishes.
double correlation(const ExperimentDesign& design, const EstimatorKernel& kernel_a,
                   const EstimatorKernel& kernel_b);

/// Inverse Bernoulli kernel r_{nu n}: 0 for n < nu, else
/// (1/eta^nu) C(n, nu) (1 - 1/eta)^(n-nu). Evaluated in log space with
/// sign tracking so large n does not overflow.
double inverse_bernoulli_kernel(int nu, int n, double eta);

/// Rows nu, columns n of r_{nu n} for nu, n <= k.
MatrixXd inverse_bernoulli_matrix(int k, double eta);

/// Loss matrix B(n, nu) = C(nu, n) eta^n (1-eta)^(nu-n) for nu >= n:
/// probability of n counts from nu photons. inverse_bernoulli_matrix is
/// its exact inverse on the truncated block.
MatrixXd bernoulli_matrix(int k, double eta);

/// Parity kernel (1 - 2/eta)^n applied to count probabilities.
double parity_kernel(int n, double eta);

/// Exact estimator variance of the parity of a coherent state counted
/// with efficiency eta and compensated back to eta = 1.
double parity_variance_coherent(Complex alpha, double eta, std::int64_t runs);

/// Parity statistics for a thermal state under loss compensation. The
/// mean exists only below nbar = 1/(2(1-eta)) and the variance only below
/// nbar = eta/(4(1-eta)); absence is ordinary data here, not an error.
struct ThermalParityStats {
  std::optional<double> mean;
  std::optional<double> variance;
  double mean_threshold = 0.0;
  double variance_threshold = 0.0;
};

ThermalParityStats parity_stats_thermal(double nbar, double eta, std::int64_t runs);

}  // namespace qprobe
