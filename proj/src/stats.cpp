#include "qprobe/stats.hpp"

#include "qprobe/special.hpp"

#include <cmath>
#include <limits>

namespace qprobe {

namespace {

double uniform53(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

// Vose alias table over p plus an implicit overflow bin for 1 - sum(p).
class AliasTable {
 public:
  explicit AliasTable(const VectorXd& p) {
    const int k = int(p.size());
    const double overflow = std::max(0.0, 1.0 - p.sum());
    n_ = k + 1;
    prob_.resize(std::size_t(n_));
    alias_.assign(std::size_t(n_), 0);
    std::vector<double> scaled(std::size_t(n_), 0.0);
    for (int i = 0; i < k; ++i) scaled[std::size_t(i)] = p(i) * n_;
    scaled[std::size_t(k)] = overflow * n_;
    std::vector<int> small, large;
    for (int i = 0; i < n_; ++i) (scaled[std::size_t(i)] < 1.0 ? small : large).push_back(i);
    while (!small.empty() && !large.empty()) {
      const int s = small.back();
      small.pop_back();
      const int l = large.back();
      prob_[std::size_t(s)] = scaled[std::size_t(s)];
      alias_[std::size_t(s)] = l;
      scaled[std::size_t(l)] -= 1.0 - scaled[std::size_t(s)];
      if (scaled[std::size_t(l)] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (int i : large) prob_[std::size_t(i)] = 1.0;
    for (int i : small) prob_[std::size_t(i)] = 1.0;
  }

  int sample(std::mt19937_64& rng) const {
    const double u = uniform53(rng) * n_;
    int slot = int(u);
    if (slot >= n_) slot = n_ - 1;
    const double frac = u - slot;
    return frac < prob_[std::size_t(slot)] ? slot : alias_[std::size_t(slot)];
  }

  int overflow_bin() const { return n_ - 1; }

 private:
  int n_ = 0;
  std::vector<double> prob_;
  std::vector<int> alias_;
};

void check_shapes(const ExperimentDesign& design, const EstimatorKernel& kernel) {
  design.validate();
  if (kernel.a.rows() != design.probabilities.rows() ||
      kernel.a.cols() != design.probabilities.cols())
    throw std::invalid_argument("estimator kernel shape does not match the design");
}

}  // namespace

void ExperimentDesign::validate() const {
  if (probabilities.rows() < 1 || probabilities.cols() < 1)
    throw std::invalid_argument("ExperimentDesign: empty probability table");
  if (runs < 1) throw std::invalid_argument("ExperimentDesign: runs must be >= 1");
  for (int i = 0; i < probabilities.rows(); ++i) {
    if (probabilities.row(i).minCoeff() < -1e-12)
      throw std::invalid_argument("ExperimentDesign: negative probability");
    if (probabilities.row(i).sum() > 1.0 + 1e-9)
      throw std::invalid_argument("ExperimentDesign: row mass exceeds 1");
  }
}

EstimatorKernel EstimatorKernel::single(const VectorXd& coefficients) {
  EstimatorKernel k;
  k.a = coefficients.transpose();
  return k;
}

VectorXd pcgf_kernel(int k, double s) {
  if (s >= 1.0) throw std::domain_error("pcgf_kernel: ordering parameter must satisfy s < 1");
  if (k < 0) throw std::invalid_argument("pcgf_kernel: cut-off must be >= 0");
  const double factor = (s + 1.0) / (s - 1.0);
  VectorXd a(k + 1);
  double power = 1.0;
  for (int n = 0; n <= k; ++n) {
    a(n) = power;
    power *= factor;
  }
  return a;
}

Histogram sample_histogram(const VectorXd& p, std::int64_t runs, std::uint64_t seed) {
  if (runs < 0) throw std::invalid_argument("sample_histogram: runs must be >= 0");
  if (p.size() < 1) throw std::invalid_argument("sample_histogram: empty probability vector");
  if (p.minCoeff() < -1e-12) throw std::invalid_argument("sample_histogram: negative probability");
  if (p.sum() > 1.0 + 1e-9) throw std::invalid_argument("sample_histogram: probability mass exceeds 1");
  const AliasTable table(p.cwiseMax(0.0));
  std::mt19937_64 rng(seed);
  Histogram h;
  h.counts.assign(std::size_t(p.size()), 0);
  h.runs = runs;
  for (std::int64_t i = 0; i < runs; ++i) {
    const int outcome = table.sample(rng);
    if (outcome != table.overflow_bin()) ++h.counts[std::size_t(outcome)];
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) { return base ^ index; }

double estimate(const std::vector<Histogram>& histograms, const EstimatorKernel& kernel) {
  if (int(histograms.size()) != kernel.a.rows())
    throw std::invalid_argument("estimate: one histogram per kernel row required");
  double total = 0.0;
  for (std::size_t i = 0; i < histograms.size(); ++i) {
    const Histogram& h = histograms[i];
    if (int(h.counts.size()) != kernel.a.cols())
      throw std::invalid_argument("estimate: histogram length does not match the kernel");
    if (h.runs < 1) throw std::invalid_argument("estimate: histogram without runs");
    for (int n = 0; n < kernel.a.cols(); ++n)
      total += kernel.a(Eigen::Index(i), n) * double(h.counts[std::size_t(n)]) / double(h.runs);
  }
  return total;
}

Moments exact_moments(const ExperimentDesign& design, const EstimatorKernel& kernel) {
  check_shapes(design, kernel);
  Moments m;
  double second = 0.0;
  double squares = 0.0;
  for (int i = 0; i < design.setting_count(); ++i) {
    const double row_mean = kernel.a.row(i).dot(design.probabilities.row(i));
    m.mean += row_mean;
    squares += row_mean * row_mean;
    second += kernel.a.row(i).cwiseAbs2().dot(design.probabilities.row(i));
  }
  m.variance = (second - squares) / double(design.runs);
  return m;
}

Complex generating_function(const ExperimentDesign& design, const EstimatorKernel& kernel,
                            double lambda) {
  check_shapes(design, kernel);
  Complex log_w(0.0, 0.0);
  const double n = double(design.runs);
  for (int i = 0; i < design.setting_count(); ++i) {
    Complex inner(1.0, 0.0);
    for (int j = 0; j < design.outcome_count(); ++j) {
      const double p = design.probabilities(i, j);
      if (p == 0.0) continue;
      inner += p * (std::exp(Complex(0.0, lambda * kernel.a(i, j) / n)) - 1.0);
    }
    log_w += n * std::log(inner);
  }
  return std::exp(log_w);
}

double covariance(const ExperimentDesign& design, const EstimatorKernel& kernel_a,
                  const EstimatorKernel& kernel_b) {
  check_shapes(design, kernel_a);
  check_shapes(design, kernel_b);
  double total = 0.0;
  for (int i = 0; i < design.setting_count(); ++i) {
    const double joint =
        (kernel_a.a.row(i).cwiseProduct(kernel_b.a.row(i))).dot(design.probabilities.row(i));
    const double mean_a = kernel_a.a.row(i).dot(design.probabilities.row(i));
    const double mean_b = kernel_b.a.row(i).dot(design.probabilities.row(i));
    total += joint - mean_a * mean_b;
  }
  return total / double(design.runs);
}

double correlation(const ExperimentDesign& design, const EstimatorKernel& kernel_a,
                   const EstimatorKernel& kernel_b) {
  const double var_a = exact_moments(design, kernel_a).variance;
  const double var_b = exact_moments(design, kernel_b).variance;
  if (!(var_a > 0.0) || !(var_b > 0.0))
    throw std::domain_error("correlation: zero-variance estimator");
  return covariance(design, kernel_a, kernel_b) / std::sqrt(var_a * var_b);
}

double inverse_bernoulli_kernel(int nu, int n, double eta) {
  if (nu < 0 || n < 0) throw std::invalid_argument("inverse_bernoulli_kernel: negative index");
  if (!(eta > 0.0) || eta > 1.0)
    throw std::invalid_argument("inverse_bernoulli_kernel: efficiency must lie in (0, 1]");
  if (n < nu) return 0.0;
  if (eta == 1.0) return n == nu ? 1.0 : 0.0;
  // (1 - 1/eta) < 0, so the sign alternates with n - nu.
  const double magnitude = std::exp(-nu * std::log(eta) + log_binomial(n, nu) +
                                    (n - nu) * std::log((1.0 - eta) / eta));
  return ((n - nu) % 2 == 0) ? magnitude : -magnitude;
}

MatrixXd inverse_bernoulli_matrix(int k, double eta) {
  MatrixXd r = MatrixXd::Zero(k + 1, k + 1);
  for (int nu = 0; nu <= k; ++nu)
    for (int n = nu; n <= k; ++n) r(nu, n) = inverse_bernoulli_kernel(nu, n, eta);
  return r;
}

MatrixXd bernoulli_matrix(int k, double eta) {
  if (!(eta > 0.0) || eta > 1.0)
    throw std::invalid_argument("bernoulli_matrix: efficiency must lie in (0, 1]");
  MatrixXd b = MatrixXd::Zero(k + 1, k + 1);
  for (int nu = 0; nu <= k; ++nu) {
    for (int n = 0; n <= nu; ++n) {
      if (eta == 1.0) {
        b(n, nu) = (n == nu) ? 1.0 : 0.0;
      } else {
        b(n, nu) = std::exp(log_binomial(nu, n) + n * std::log(eta) +
                            (nu - n) * std::log(1.0 - eta));
      }
    }
  }
  return b;
}

double parity_kernel(int n, double eta) {
  if (n < 0) throw std::invalid_argument("parity_kernel: negative index");
  if (!(eta > 0.0) || eta > 1.0)
    throw std::invalid_argument("parity_kernel: efficiency must lie in (0, 1]");
  const double magnitude = std::exp(n * std::log(2.0 / eta - 1.0));
  return (n % 2 == 0) ? magnitude : -magnitude;
}

double parity_variance_coherent(Complex alpha, double eta, std::int64_t runs) {
  if (!(eta > 0.0) || eta > 1.0)
    throw std::invalid_argument("parity_variance_coherent: efficiency must lie in (0, 1]");
  if (runs < 1) throw std::invalid_argument("parity_variance_coherent: runs must be >= 1");
  const double a2 = abs2(alpha);
  return (std::exp(4.0 * (1.0 - eta) * a2 / eta) - std::exp(-4.0 * a2)) / double(runs);
}

ThermalParityStats parity_stats_thermal(double nbar, double eta, std::int64_t runs) {
  if (!(eta > 0.0) || eta > 1.0)
    throw std::invalid_argument("parity_stats_thermal: efficiency must lie in (0, 1]");
  if (!(nbar >= 0.0)) throw std::invalid_argument("parity_stats_thermal: nbar must be >= 0");
  if (runs < 1) throw std::invalid_argument("parity_stats_thermal: runs must be >= 1");
  ThermalParityStats out;
  const double inf = std::numeric_limits<double>::infinity();
  out.mean_threshold = eta == 1.0 ? inf : 1.0 / (2.0 * (1.0 - eta));
  out.variance_threshold = eta == 1.0 ? inf : eta / (4.0 * (1.0 - eta));
  // At the threshold itself the series diverges; inputs within rounding
  // distance of it classify as non-existent rather than reporting a
  // roundoff-sized denominator as a finite moment.
  const double guard = 1.0 - 1e-12;
  if (nbar < out.mean_threshold * guard) out.mean = 1.0 / (1.0 + 2.0 * nbar);
  if (nbar < out.variance_threshold * guard) {
    out.variance = (eta / (eta - 4.0 * nbar * (1.0 - eta)) -
                    1.0 / ((1.0 + 2.0 * nbar) * (1.0 + 2.0 * nbar))) /
                   double(runs);
  }
  return out;
}

}  // namespace qprobe
