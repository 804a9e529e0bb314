#include "qprobe/direct.hpp"

#include "qprobe/special.hpp"

#include <cmath>

namespace qprobe {

namespace {

constexpr double kCutoffMass = 1e-10;  // auto cut-off keeps the tail below this
constexpr int kHardCap = 100000;

double ordering_factor(double s) {
  if (s >= 1.0) throw std::domain_error("pcgf: ordering parameter must satisfy s < 1");
  return (s + 1.0) / (s - 1.0);
}

void check_eta_t(double eta_t) {
  if (!(eta_t > 0.0) || eta_t > 1.0)
    throw std::invalid_argument("effective efficiency eta*T must lie in (0, 1]");
}

// Cut an exact probability sequence generator at the auto or caller cutoff.
// next(n) must return p_n for consecutive n starting at 0.
template <typename Next>
CountDistribution collect_counts(Next next, std::optional<int> cutoff) {
  std::vector<double> p;
  double cum = 0.0;
  if (cutoff) {
    if (*cutoff < 0) throw std::invalid_argument("count cut-off must be >= 0");
    p.reserve(std::size_t(*cutoff) + 1);
    for (int n = 0; n <= *cutoff; ++n) {
      p.push_back(std::max(0.0, next(n)));
      cum += p.back();
    }
  } else {
    for (int n = 0; n < kHardCap; ++n) {
      p.push_back(std::max(0.0, next(n)));
      cum += p.back();
      if (cum >= 1.0 - kCutoffMass) break;
    }
  }
  CountDistribution out;
  out.p = Eigen::Map<const VectorXd>(p.data(), Eigen::Index(p.size()));
  out.tail = std::max(0.0, 1.0 - cum);
  return out;
}

CountDistribution poisson_counts(double mean, std::optional<int> cutoff) {
  double value = std::exp(-mean);
  int last = -1;
  auto next = [&](int n) {
    if (n != last + 1) throw std::logic_error("poisson_counts: nonsequential access");
    last = n;
    if (n > 0) value *= mean / n;
    return value;
  };
  return collect_counts(next, cutoff);
}

CountDistribution thermal_counts(double nbar, Complex beta, double eta_t,
                                 std::optional<int> cutoff) {
  // p_n = X^n/(1+X)^{n+1} L_n(-y) e^{-z}, X = eta_t nbar,
  // y = |beta|^2/(nbar (1+X)), z = eta_t |beta|^2/(1+X); the recurrence runs
  // on t_n = L_n(-y) (X/(1+X))^n which stays bounded.
  const double x = eta_t * nbar;
  const double y = abs2(beta) / (nbar * (1.0 + x));
  const double z = eta_t * abs2(beta) / (1.0 + x);
  const double ratio = x / (1.0 + x);
  const double front = std::exp(-z) / (1.0 + x);
  double t_prev = 1.0;
  double t_cur = ratio * (1.0 + y);
  int last = -1;
  auto next = [&](int n) {
    if (n != last + 1) throw std::logic_error("thermal_counts: nonsequential access");
    last = n;
    if (n == 0) return front * t_prev;
    if (n > 1) {
      const double t_next =
          (ratio * (2.0 * (n - 1) + 1.0 + y) * t_cur - ratio * ratio * (n - 1) * t_prev) / double(n);
      t_prev = t_cur;
      t_cur = t_next;
    }
    return front * t_cur;
  };
  return collect_counts(next, cutoff);
}

CountDistribution fock1_counts(Complex beta, double eta_t, std::optional<int> cutoff) {
  const double j = eta_t * abs2(beta);
  const double expj = std::exp(-j);
  double pois_prev = expj;  // J^{n-1}/(n-1)! e^{-J} for n >= 1
  int last = -1;
  auto next = [&](int n) {
    if (n != last + 1) throw std::logic_error("fock1_counts: nonsequential access");
    last = n;
    if (n == 0) return expj * (eta_t * j + 1.0 - eta_t);
    if (n > 1) pois_prev *= j / (n - 1);
    // eta_t (n-J)^2 J^{n-1}/n! e^{-J} + (1-eta_t) J^n/n! e^{-J}
    const double base = pois_prev / n;  // J^{n-1}/n! e^{-J}
    return eta_t * (n - j) * (n - j) * base + (1.0 - eta_t) * base * j;
  };
  return collect_counts(next, cutoff);
}

CountDistribution cat_counts(Complex alpha0, Complex beta, double eta_t,
                             std::optional<int> cutoff) {
  const double norm2 = 1.0 / (2.0 * (1.0 + std::exp(-2.0 * abs2(alpha0))));
  const double j_plus = eta_t * abs2(beta - alpha0);
  const double j_minus = eta_t * abs2(beta + alpha0);
  const Complex z = eta_t * (std::conj(beta) - std::conj(alpha0)) * (beta + alpha0);
  const Complex phase = std::exp(eta_t * (std::conj(alpha0) * beta - alpha0 * std::conj(beta)));
  const double envelope = std::exp(-(2.0 - eta_t) * abs2(alpha0) - eta_t * abs2(beta));
  double pois_plus = std::exp(-j_plus);
  double pois_minus = std::exp(-j_minus);
  Complex cross = phase;
  int last = -1;
  auto next = [&](int n) {
    if (n != last + 1) throw std::logic_error("cat_counts: nonsequential access");
    last = n;
    if (n > 0) {
      pois_plus *= j_plus / n;
      pois_minus *= j_minus / n;
      cross *= z / double(n);
    }
    return norm2 * (pois_plus + pois_minus + 2.0 * std::real(cross) * envelope);
  };
  return collect_counts(next, cutoff);
}

CountDistribution apply_cutoff(const VectorXd& full, std::optional<int> cutoff) {
  int k;
  if (cutoff) {
    if (*cutoff < 0) throw std::invalid_argument("count cut-off must be >= 0");
    k = *cutoff;
  } else {
    double cum = 0.0;
    k = int(full.size()) - 1;
    for (int n = 0; n < full.size(); ++n) {
      cum += full(n);
      if (cum >= 1.0 - kCutoffMass) {
        k = n;
        break;
      }
    }
  }
  CountDistribution out;
  out.p = VectorXd::Zero(k + 1);
  const int copy = std::min<int>(k + 1, int(full.size()));
  out.p.head(copy) = full.head(copy);
  out.tail = std::max(0.0, 1.0 - out.p.sum());
  return out;
}

}  // namespace

DetectorModel DetectorModel::with_overlap(double eta, double transmission, double xi,
                                          std::optional<int> cutoff) {
  DetectorModel det;
  det.efficiency = eta;
  det.transmission = transmission;
  det.overlap = xi;
  det.cutoff = cutoff;
  det.validate();
  return det;
}

DetectorModel DetectorModel::with_visibility(double eta, double transmission, double visibility,
                                             std::optional<int> cutoff) {
  return with_overlap(eta, transmission, visibility_to_overlap(visibility), cutoff);
}

void DetectorModel::validate() const {
  if (!(efficiency > 0.0) || efficiency > 1.0)
    throw std::invalid_argument("DetectorModel: efficiency must lie in (0, 1]");
  if (!(transmission > 0.0) || !(transmission < 1.0))
    throw std::invalid_argument("DetectorModel: transmission must lie in (0, 1)");
  if (!(overlap >= 0.0) || overlap > 1.0)
    throw std::invalid_argument("DetectorModel: mode overlap must lie in [0, 1]");
  if (cutoff && *cutoff < 0) throw std::invalid_argument("DetectorModel: cut-off must be >= 0");
}

void CountDistribution::validate() const {
  if (p.size() < 1) throw std::invalid_argument("CountDistribution: empty");
  if (p.minCoeff() < -1e-12) throw std::invalid_argument("CountDistribution: negative probability");
  if (std::abs(p.sum() + tail - 1.0) > 1e-10)
    throw std::invalid_argument("CountDistribution: probabilities plus tail must sum to 1");
}

CountDistribution count_statistics_displaced(const StateSpec& signal, Complex beta, double eta_t,
                                             std::optional<int> cutoff) {
  check_eta_t(eta_t);
  switch (signal.family()) {
    case StateSpec::Family::Vacuum:
      return poisson_counts(eta_t * abs2(beta), cutoff);
    case StateSpec::Family::Coherent:
      return poisson_counts(eta_t * abs2(beta - signal.amplitude()), cutoff);
    case StateSpec::Family::Thermal:
      if (signal.mean_thermal_photons() < 1e-12) return poisson_counts(eta_t * abs2(beta), cutoff);
      return thermal_counts(signal.mean_thermal_photons(), beta, eta_t, cutoff);
    case StateSpec::Family::Fock:
      if (signal.photon_number() == 0) return poisson_counts(eta_t * abs2(beta), cutoff);
      if (signal.photon_number() == 1) return fock1_counts(beta, eta_t, cutoff);
      break;
    case StateSpec::Family::Cat:
      return cat_counts(signal.amplitude(), beta, eta_t, cutoff);
    case StateSpec::Family::Mixture: {
      // Count statistics are linear in the density matrix.
      std::vector<CountDistribution> parts;
      int len = 1;
      for (const auto& [w, part] : signal.parts()) {
        parts.push_back(count_statistics_displaced(part, beta, eta_t, cutoff));
        len = std::max<int>(len, int(parts.back().p.size()));
      }
      CountDistribution out;
      out.p = VectorXd::Zero(len);
      for (std::size_t i = 0; i < parts.size(); ++i) {
        const double w = signal.parts()[i].first;
        out.p.head(parts[i].p.size()) += w * parts[i].p;
        out.tail += w * parts[i].tail;
      }
      return out;
    }
    default:
      break;
  }
  return generic_count_statistics(to_density_matrix(signal, default_dim(signal)), beta, eta_t,
                                  cutoff);
}

CountDistribution count_statistics(const StateSpec& signal, Complex probe_alpha,
                                   const DetectorModel& det) {
  det.validate();
  if (std::abs(det.overlap - 1.0) > 1e-12)
    throw std::invalid_argument(
        "count_statistics: requires xi = 1; use mode_mismatch_pcgf for mismatched modes");
  const Complex beta =
      std::sqrt((1.0 - det.transmission) / det.transmission) * probe_alpha;
  return count_statistics_displaced(signal, beta, det.effective_efficiency(), det.cutoff);
}

CountDistribution generic_count_statistics(const FockDensityMatrix& state, Complex beta,
                                           double eta_t, std::optional<int> cutoff) {
  check_eta_t(eta_t);
  const int out_dim = displaced_dim(state.dim(), std::abs(beta));
  const VectorXd q = displaced_occupations(state, beta, out_dim);
  if (eta_t == 1.0) return apply_cutoff(q, cutoff);
  // Bernoulli loss: p_n = sum_{m>=n} C(m,n) (eta t)^n (1-eta t)^{m-n} q_m.
  const double log_keep = std::log(eta_t);
  const double log_lose = std::log(1.0 - eta_t);
  VectorXd p = VectorXd::Zero(out_dim);
  for (int m = 0; m < out_dim; ++m) {
    if (q(m) <= 0.0) continue;
    for (int n = 0; n <= m; ++n) {
      p(n) += q(m) * std::exp(log_binomial(m, n) + n * log_keep + (m - n) * log_lose);
    }
  }
  return apply_cutoff(p, cutoff);
}

PcgfEval pcgf_eval(const CountDistribution& counts, double s) {
  const double factor = ordering_factor(s);
  PcgfEval out;
  std::vector<double> increments(std::size_t(counts.p.size()));
  double power = 1.0;
  for (int n = 0; n < counts.p.size(); ++n) {
    const double term = power * counts.p(n);
    increments[std::size_t(n)] = std::abs(term);
    out.value += term;
    power *= factor;
  }
  out.diverged = s > 0.0 && diverging_tail(increments);
  return out;
}

double pcgf(const CountDistribution& counts, double s) { return pcgf_eval(counts, s).value; }

PcgfResult pcgf_to_quasi_displaced(double pcgf_value, Complex beta, double eta_t, double s) {
  check_eta_t(eta_t);
  if (s >= 1.0) throw std::domain_error("pcgf_to_quasi: ordering parameter must satisfy s < 1");
  PcgfResult out;
  out.pcgf = pcgf_value;
  out.point = beta;
  out.ordering = -(1.0 - s - eta_t) / eta_t;
  out.quasi = pcgf_value * 2.0 * eta_t / (kPi * (1.0 - s));
  return out;
}

PcgfResult pcgf_to_quasi(double pcgf_value, Complex probe_alpha, const DetectorModel& det,
                         double s) {
  det.validate();
  const Complex beta =
      std::sqrt((1.0 - det.transmission) / det.transmission) * probe_alpha;
  return pcgf_to_quasi_displaced(pcgf_value, beta, det.effective_efficiency(), s);
}

double mode_mismatch_pcgf(const StateSpec& signal, Complex probe_alpha, const DetectorModel& det,
                          double s) {
  det.validate();
  if (s >= 1.0) throw std::domain_error("mode_mismatch_pcgf: ordering parameter must satisfy s < 1");
  const double eta_t = det.effective_efficiency();
  const double mapped_ordering = -(1.0 - s - eta_t) / eta_t;
  const Complex point = std::sqrt(det.overlap * (1.0 - det.transmission) / det.transmission) *
                        probe_alpha;
  const double envelope =
      std::exp(-2.0 * det.efficiency * (1.0 - det.transmission) * (1.0 - det.overlap) *
               abs2(probe_alpha) / (1.0 - s));
  return kPi * (1.0 - s) / (2.0 * eta_t) * quasi_of_spec(signal, point, mapped_ordering) *
         envelope;
}

double visibility_to_overlap(double visibility) {
  if (!(visibility >= 0.0) || visibility > 1.0)
    throw std::invalid_argument("visibility must lie in [0, 1]");
  return visibility / (2.0 - visibility);
}

double overlap_to_visibility(double xi) {
  if (!(xi >= 0.0) || xi > 1.0) throw std::invalid_argument("mode overlap must lie in [0, 1]");
  return 4.0 * xi / (2.0 + 2.0 * xi);
}

double cutoff_error_bound(const CountDistribution& counts, int k, double s) {
  if (s > 0.0) throw std::domain_error("cutoff_error_bound: needs s <= 0");
  if (k < 0) throw std::invalid_argument("cutoff_error_bound: cut-off must be >= 0");
  const double magnitude = std::abs(ordering_factor(s));  // <= 1 for s <= 0
  double bound = 0.0;
  for (int n = k + 1; n < counts.p.size(); ++n) bound += std::pow(magnitude, n) * counts.p(n);
  const int beyond = std::max<int>(k + 1, int(counts.p.size()));
  bound += std::pow(magnitude, beyond) * counts.tail;
  return bound;
}

double thermal_noise_parity(Complex beta, double thermal_fraction) {
  if (!(thermal_fraction >= 0.0) || thermal_fraction >= 1.0)
    throw std::invalid_argument("thermal fraction must lie in [0, 1)");
  const double b2 = abs2(beta);
  const double denom = 2.0 * thermal_fraction * b2 + 1.0;
  return std::exp(-2.0 * (1.0 - thermal_fraction) * b2 / denom) / denom;
}

MultimodeParityResult multimode_parity_displaced(const std::vector<StateSpec>& states,
                                                 const std::vector<Complex>& betas, double eta_t,
                                                 std::optional<int> cutoff) {
  if (states.size() != betas.size() || states.empty())
    throw std::invalid_argument("multimode parity: need one probe point per mode");
  check_eta_t(eta_t);
  VectorXd total(1);
  total(0) = 1.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const CountDistribution counts = count_statistics_displaced(states[i], betas[i], eta_t, cutoff);
    VectorXd merged = VectorXd::Zero(total.size() + counts.p.size() - 1);
    for (int a = 0; a < total.size(); ++a) {
      if (total(a) == 0.0) continue;
      merged.segment(a, counts.p.size()) += total(a) * counts.p;
    }
    total = std::move(merged);
  }
  MultimodeParityResult out;
  for (int n = 0; n < total.size(); ++n) out.parity += (n % 2 == 0 ? 1.0 : -1.0) * total(n);
  out.ordering = -(1.0 - eta_t) / eta_t;
  out.quasi = std::pow(2.0 * eta_t / kPi, double(states.size())) * out.parity;
  out.tail = std::max(0.0, 1.0 - total.sum());
  return out;
}

MultimodeParityResult multimode_parity_scan(const std::vector<StateSpec>& states,
                                            const std::vector<Complex>& probe_alphas,
                                            const DetectorModel& det) {
  det.validate();
  if (std::abs(det.overlap - 1.0) > 1e-12)
    throw std::invalid_argument("multimode_parity_scan: requires matched modes (xi = 1)");
  const double rescale = std::sqrt((1.0 - det.transmission) / det.transmission);
  std::vector<Complex> betas;
  betas.reserve(probe_alphas.size());
  for (Complex alpha : probe_alphas) betas.push_back(rescale * alpha);
  return multimode_parity_displaced(states, betas, det.effective_efficiency(), det.cutoff);
}

}  // namespace qprobe
