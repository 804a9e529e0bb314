#include "qprobe/phasespace.hpp"

#include "qprobe/special.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace qprobe {

namespace {

double ordering_factor(double s) {
  if (s >= 1.0) throw std::domain_error("ordering parameter must satisfy s < 1");
  return (s + 1.0) / (s - 1.0);
}

void check_ordering(double s, const QuasiOptions& options) {
  if (s >= 1.0) throw std::domain_error("ordering parameter must satisfy s < 1");
  if (s > 0.0 && !options.allow_unbounded_ordering)
    throw std::domain_error(
        "0 < s < 1 has unbounded spectral weights; set allow_unbounded_ordering to proceed");
}

// Sum of the trailing `window` nonzero increments (exact zeros at the end
// only reflect the truncation boundary and carry no information).
double trailing_weight(const std::vector<double>& increments, int window) {
  std::size_t end = increments.size();
  while (end > 0 && increments[end - 1] == 0.0) --end;
  double sum = 0.0;
  for (std::size_t i = end - std::min<std::size_t>(end, std::size_t(window)); i < end; ++i)
    sum += increments[i];
  return sum;
}

QuasiEval weighted_parity_sum(const VectorXd& occupations, double s) {
  const double factor = ordering_factor(s);
  const double prefactor = 2.0 / (kPi * (1.0 - s));
  std::vector<double> increments(std::size_t(occupations.size()));
  double sum = 0.0;
  double power = 1.0;
  double mass = 0.0;
  for (int n = 0; n < occupations.size(); ++n) {
    const double term = power * occupations(n);
    increments[std::size_t(n)] = std::abs(term);
    sum += term;
    mass += occupations(n);
    power *= factor;
  }
  QuasiEval out;
  out.value = prefactor * sum;
  const double missing = std::max(0.0, 1.0 - mass);
  if (s <= 0.0) {
    // |factor| <= 1: every lost unit of mass moves the sum by at most 1.
    out.tail_bound = prefactor * missing;
  } else {
    // No rigorous bound exists for s > 0; report the weight still moving
    // through the trailing window as a convergence estimate.
    out.tail_bound = prefactor * trailing_weight(increments, 20);
  }
  out.diverged = s > 0.0 && diverging_tail(increments);
  return out;
}

}  // namespace

VectorXd displaced_occupations(const FockDensityMatrix& state, PhasePoint alpha, int out_dim) {
  const MatrixXcd b = displacement_matrix(-alpha, out_dim, state.dim());
  const MatrixXcd c = b * state.rho;
  return c.cwiseProduct(b.conjugate()).rowwise().sum().real().cwiseMax(0.0);
}

bool diverging_tail(const std::vector<double>& increments, int window) {
  std::size_t end = increments.size();
  while (end > 0 && increments[end - 1] == 0.0) --end;
  if (int(end) < window + 1) return false;
  for (std::size_t i = end - std::size_t(window); i < end; ++i) {
    if (!(increments[i] > 0.0) || increments[i] < increments[i - 1]) return false;
  }
  return true;
}

GridSpec GridSpec::centered(double extent, double step) {
  if (!(extent > 0.0) || !(step > 0.0)) throw std::invalid_argument("GridSpec: extent and step must be > 0");
  const int half = int(std::ceil(extent / step));
  GridSpec g;
  g.re_min = -half * step;
  g.im_min = -half * step;
  g.re_step = step;
  g.im_step = step;
  g.re_count = 2 * half + 1;
  g.im_count = 2 * half + 1;
  return g;
}

void GridSpec::validate() const {
  if (re_count < 1 || im_count < 1) throw std::invalid_argument("GridSpec: empty grid");
  if ((re_count > 1 && !(re_step > 0.0)) || (im_count > 1 && !(im_step > 0.0)))
    throw std::invalid_argument("GridSpec: step must be > 0");
}

double QuasiGrid::integral() const {
  double sum = 0.0;
  for (int i = 0; i < grid.re_count; ++i) {
    const double wi = (i == 0 || i == grid.re_count - 1) ? 0.5 : 1.0;
    for (int j = 0; j < grid.im_count; ++j) {
      const double wj = (j == 0 || j == grid.im_count - 1) ? 0.5 : 1.0;
      sum += wi * wj * values(i, j);
    }
  }
  return sum * grid.re_step * grid.im_step;
}

QuasiEval quasi_eval(const FockDensityMatrix& state, PhasePoint alpha, double s,
                     const QuasiOptions& options) {
  check_ordering(s, options);
  const int out_dim =
      std::max(options.min_dim, displaced_dim(state.dim(), std::abs(alpha)));
  return weighted_parity_sum(displaced_occupations(state, alpha, out_dim), s);
}

double quasi_value(const FockDensityMatrix& state, PhasePoint alpha, double s,
                   const QuasiOptions& options) {
  const QuasiEval eval = quasi_eval(state, alpha, s, options);
  if (eval.diverged) throw std::domain_error("quasi_value: spectral series diverges");
  if (!(eval.tail_bound <= options.truncation_tolerance))
    throw TruncationError("quasi_value: truncation tail bound exceeds tolerance", eval.tail_bound);
  return eval.value;
}

QuasiGrid quasi_grid(const FockDensityMatrix& state, const GridSpec& grid, double s,
                     const QuasiOptions& options) {
  grid.validate();
  check_ordering(s, options);
  const double factor = ordering_factor(s);
  const double prefactor = 2.0 / (kPi * (1.0 - s));

  Eigen::SelfAdjointEigenSolver<MatrixXcd> eigen(state.rho);
  if (eigen.info() != Eigen::Success) throw std::runtime_error("quasi_grid: eigendecomposition failed");
  std::vector<int> keep;
  const double cutoff = 1e-14 * std::max(1.0, eigen.eigenvalues().maxCoeff());
  for (int i = 0; i < eigen.eigenvalues().size(); ++i) {
    if (eigen.eigenvalues()(i) > cutoff) keep.push_back(i);
  }
  MatrixXcd modes(state.dim(), keep.size());
  VectorXd weights(keep.size());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    modes.col(Eigen::Index(r)) = eigen.eigenvectors().col(keep[r]);
    weights(Eigen::Index(r)) = eigen.eigenvalues()(keep[r]);
  }

  QuasiGrid out;
  out.grid = grid;
  out.s = s;
  out.values.resize(grid.re_count, grid.im_count);
  const double max_re = std::max(std::abs(grid.re(0)), std::abs(grid.re(grid.re_count - 1)));
  const double max_im = std::max(std::abs(grid.im(0)), std::abs(grid.im(grid.im_count - 1)));
  const int max_dim = std::max(options.min_dim,
                               displaced_dim(state.dim(), std::hypot(max_re, max_im)));
  VectorXd powers(max_dim);
  double power = 1.0;
  for (int n = 0; n < max_dim; ++n) {
    powers(n) = power;
    power *= factor;
  }
  for (int i = 0; i < grid.re_count; ++i) {
    for (int j = 0; j < grid.im_count; ++j) {
      const Complex alpha = grid.point(i, j);
      const int out_dim = std::min(
          max_dim, std::max(options.min_dim, displaced_dim(state.dim(), std::abs(alpha))));
      const MatrixXcd b = displacement_matrix(-alpha, out_dim, state.dim());
      const MatrixXcd w = b * modes;  // out_dim x modes
      const VectorXd occ = (w.cwiseAbs2() * weights).cwiseMax(0.0);
      out.values(i, j) = prefactor * powers.head(out_dim).dot(occ);
    }
  }
  return out;
}

double coherent_quasi_closed_form(Complex alpha0, PhasePoint alpha, double s) {
  if (s >= 1.0) throw std::domain_error("ordering parameter must satisfy s < 1");
  return 2.0 / (kPi * (1.0 - s)) * std::exp(-2.0 * abs2(alpha - alpha0) / (1.0 - s));
}

double cat_quasi_closed_form(Complex alpha0, PhasePoint alpha, double s) {
  if (s >= 1.0) throw std::domain_error("ordering parameter must satisfy s < 1");
  const double x = abs2(alpha0);
  const double front = 1.0 / (kPi * (1.0 - s) * (1.0 + std::exp(-2.0 * x)));
  const double direct = std::exp(-2.0 * abs2(alpha - alpha0) / (1.0 - s)) +
                        std::exp(-2.0 * abs2(alpha + alpha0) / (1.0 - s));
  const double envelope = std::exp(2.0 * s * x / (1.0 - s)) * std::exp(-2.0 * abs2(alpha) / (1.0 - s));
  const double fringe = std::cos(4.0 * std::imag(alpha0 * std::conj(alpha)) / (1.0 - s));
  return front * (direct + 2.0 * envelope * fringe);
}

double thermal_quasi_closed_form(double nbar, PhasePoint alpha, double s) {
  if (s >= 1.0) throw std::domain_error("ordering parameter must satisfy s < 1");
  if (!(nbar >= 0.0)) throw std::invalid_argument("thermal_quasi_closed_form: nbar must be >= 0");
  const double width = 1.0 + 2.0 * nbar - s;
  return 2.0 / (kPi * width) * std::exp(-2.0 * abs2(alpha) / width);
}

double fock_quasi_closed_form(int n, PhasePoint alpha, double s) {
  if (s >= 1.0) throw std::domain_error("ordering parameter must satisfy s < 1");
  if (n < 0) throw std::invalid_argument("fock_quasi_closed_form: n must be >= 0");
  // ((s+1)/(s-1))^n L_n(4|alpha|^2/(1-s^2)) via the scaled recurrence
  // t_k = c^k L_k(u), which stays finite down to s = -1 where c -> 0 and
  // u -> infinity with c*u finite.
  const double c = ordering_factor(s);
  const double r2 = abs2(alpha);
  const double cu = -4.0 * r2 / ((1.0 - s) * (1.0 - s));  // c * u
  double t_prev = 1.0;
  double t = c - cu;
  if (n == 0) t = t_prev;
  for (int k = 1; k < n; ++k) {
    const double t_next = ((c * (2.0 * k + 1.0) - cu) * t - c * c * k * t_prev) / (k + 1.0);
    t_prev = t;
    t = t_next;
  }
  return 2.0 / (kPi * (1.0 - s)) * std::exp(-2.0 * r2 / (1.0 - s)) * t;
}

double quasi_of_spec(const StateSpec& spec, PhasePoint alpha, double s) {
  switch (spec.family()) {
    case StateSpec::Family::Vacuum: return coherent_quasi_closed_form(0.0, alpha, s);
    case StateSpec::Family::Coherent: return coherent_quasi_closed_form(spec.amplitude(), alpha, s);
    case StateSpec::Family::Cat: return cat_quasi_closed_form(spec.amplitude(), alpha, s);
    case StateSpec::Family::Thermal: return thermal_quasi_closed_form(spec.mean_thermal_photons(), alpha, s);
    case StateSpec::Family::Fock: return fock_quasi_closed_form(spec.photon_number(), alpha, s);
    case StateSpec::Family::Mixture: {
      double sum = 0.0;
      for (const auto& [w, part] : spec.parts()) sum += w * quasi_of_spec(part, alpha, s);
      return sum;
    }
    case StateSpec::Family::SqueezedVacuum:
    case StateSpec::Family::Explicit: {
      QuasiOptions options;
      options.allow_unbounded_ordering = s > 0.0;
      return quasi_value(to_density_matrix(spec, default_dim(spec)), alpha, s, options);
    }
  }
  throw std::logic_error("quasi_of_spec: unreachable");
}

QuasiGrid ordering_transform(const QuasiGrid& input, double s_target) {
  input.grid.validate();
  if (s_target > input.s)
    throw std::domain_error("ordering_transform: raising the ordering is a divergent deconvolution");
  if (s_target == input.s) return input;

  const double delta = input.s - s_target;
  // Separable kernel: (2/(pi delta)) exp(-2|u|^2/delta) factorizes into
  // sqrt(2/(pi delta)) exp(-2u^2/delta) per axis.
  auto convolve_axis = [delta](const MatrixXd& in, double step, bool along_rows) {
    const double norm = std::sqrt(2.0 / (kPi * delta));
    const int radius = int(std::ceil(4.5 * std::sqrt(delta) / step));
    VectorXd kernel(2 * radius + 1);
    for (int t = -radius; t <= radius; ++t)
      kernel(t + radius) = norm * std::exp(-2.0 * (t * step) * (t * step) / delta) * step;
    MatrixXd out = MatrixXd::Zero(in.rows(), in.cols());
    const int n = int(along_rows ? in.rows() : in.cols());
    for (int t = -radius; t <= radius; ++t) {
      const double w = kernel(t + radius);
      const int lo = std::max(0, -t);
      const int hi = std::min(n, n - t);
      if (lo >= hi) continue;
      if (along_rows)
        out.middleRows(lo, hi - lo) += w * in.middleRows(lo + t, hi - lo);
      else
        out.middleCols(lo, hi - lo) += w * in.middleCols(lo + t, hi - lo);
    }
    return out;
  };

  QuasiGrid out;
  out.grid = input.grid;
  out.s = s_target;
  out.values = convolve_axis(convolve_axis(input.values, input.grid.re_step, true),
                             input.grid.im_step, false);
  return out;
}

double diffusion_residual(const FockDensityMatrix& state, PhasePoint alpha, double s, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("diffusion_residual: h must be > 0");
  if (s > -h) throw std::domain_error("diffusion_residual: needs s <= -h to stay below s = 0");
  auto w = [&](PhasePoint a, double ss) { return quasi_eval(state, a, ss).value; };
  const double ds = (w(alpha, s + h) - w(alpha, s - h)) / (2.0 * h);
  const double center = w(alpha, s);
  const double lap = (w(alpha + Complex(h, 0), s) + w(alpha - Complex(h, 0), s) +
                      w(alpha + Complex(0, h), s) + w(alpha - Complex(0, h), s) - 4.0 * center) /
                     (h * h);
  return std::abs(ds + lap / 8.0);
}

QuasiEval multimode_quasi(const std::vector<FockDensityMatrix>& states,
                          const std::vector<PhasePoint>& alphas, double s,
                          const QuasiOptions& options) {
  if (states.size() != alphas.size() || states.empty())
    throw std::invalid_argument("multimode_quasi: need one phase point per mode");
  QuasiEval out;
  out.value = 1.0;
  std::vector<QuasiEval> evals;
  evals.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    evals.push_back(quasi_eval(states[i], alphas[i], s, options));
    out.value *= evals.back().value;
    out.diverged = out.diverged || evals.back().diverged;
  }
  for (std::size_t i = 0; i < evals.size(); ++i) {
    double cross = evals[i].tail_bound;
    for (std::size_t j = 0; j < evals.size(); ++j) {
      if (j != i) cross *= std::abs(evals[j].value) + evals[j].tail_bound;
    }
    out.tail_bound += cross;
  }
  return out;
}

}  // namespace qprobe
