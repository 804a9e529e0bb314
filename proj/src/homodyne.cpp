#include "qprobe/homodyne.hpp"

#include "qprobe/special.hpp"

#include <cmath>

namespace qprobe {

namespace {

// Catmull-Rom interpolation of a grid value, zero outside the grid.
class BicubicGrid {
 public:
  explicit BicubicGrid(const QuasiGrid& g) : grid_(g) {}

  double operator()(double re, double im) const {
    const GridSpec& g = grid_.grid;
    const double u = (re - g.re_min) / g.re_step;
    const double v = (im - g.im_min) / g.im_step;
    if (u < 0.0 || v < 0.0 || u > g.re_count - 1 || v > g.im_count - 1) return 0.0;
    const int i0 = std::min(int(u), g.re_count - 2);
    const int j0 = std::min(int(v), g.im_count - 2);
    const double tu = u - i0;
    const double tv = v - j0;
    double wu[4], wv[4];
    weights(tu, wu);
    weights(tv, wv);
    double value = 0.0;
    for (int a = -1; a <= 2; ++a) {
      const int i = std::clamp(i0 + a, 0, g.re_count - 1);
      double row = 0.0;
      for (int b = -1; b <= 2; ++b) {
        const int j = std::clamp(j0 + b, 0, g.im_count - 1);
        row += wv[b + 1] * grid_.values(i, j);
      }
      value += wu[a + 1] * row;
    }
    return value;
  }

 private:
  static void weights(double t, double* w) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
    w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
    w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
    w[3] = 0.5 * (t3 - t2);
  }

  const QuasiGrid& grid_;
};

// Spatial kernel of the |lambda| ramp filter truncated at cutoff L:
// h(u) = (1/pi) [L u sin(Lu) + cos(Lu) - 1] / u^2.
double ramp_kernel(double u, double cutoff) {
  const double lu = cutoff * u;
  if (std::abs(lu) < 1e-4) return cutoff * cutoff / (2.0 * kPi) * (1.0 - lu * lu / 4.0);
  return (lu * std::sin(lu) + std::cos(lu) - 1.0) / (kPi * u * u);
}

}  // namespace

double QuadratureDistribution::integral() const {
  if (density.size() < 2) return 0.0;
  return (density.sum() - 0.5 * (density(0) + density(density.size() - 1))) * x_step;
}

void RadonFamily::validate() const {
  if (marginals.size() < 2) throw std::invalid_argument("RadonFamily: need at least 2 phases");
  const double step = kPi / double(marginals.size());
  for (std::size_t j = 0; j < marginals.size(); ++j) {
    const QuadratureDistribution& m = marginals[j];
    if (m.density.size() != marginals[0].density.size() ||
        std::abs(m.x_min - marginals[0].x_min) > 1e-9 ||
        std::abs(m.x_step - marginals[0].x_step) > 1e-9)
      throw std::invalid_argument("RadonFamily: marginals must share one x grid");
    if (std::abs(m.theta - double(j) * step) > 1e-6)
      throw std::invalid_argument("RadonFamily: phases must be uniform over [0, pi)");
  }
}

QuadratureDistribution quadrature_distribution(const FockDensityMatrix& state, double theta,
                                               double x_min, double x_step, int count) {
  if (count < 1 || !(x_step > 0.0))
    throw std::invalid_argument("quadrature_distribution: invalid x grid");
  if (state.trunc_deficit > 1e-6)
    throw TruncationError("quadrature_distribution: state truncation too coarse",
                          state.trunc_deficit);
  const int d = state.dim();
  // rho_mn e^{i(n-m)theta} is Hermitian, so only its real part survives the
  // quadratic form with the real oscillator functions.
  MatrixXd m(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      m(a, b) = std::real(state.rho(a, b) * std::polar(1.0, (b - a) * theta));
  QuadratureDistribution out;
  out.theta = theta;
  out.x_min = x_min;
  out.x_step = x_step;
  out.density.resize(count);
  for (int i = 0; i < count; ++i) {
    const VectorXd psi = hermite_psi(x_min + i * x_step, d - 1);
    out.density(i) = std::max(0.0, psi.dot(m * psi));
  }
  return out;
}

QuadratureDistribution radon_project(const QuasiGrid& wigner, double theta, double x_min,
                                     double x_step, int count) {
  if (std::abs(wigner.s) > 1e-12)
    throw std::invalid_argument("radon_project: grid must hold the s = 0 quasidistribution");
  if (count < 1 || !(x_step > 0.0)) throw std::invalid_argument("radon_project: invalid x grid");
  wigner.grid.validate();
  const BicubicGrid interp(wigner);
  const GridSpec& g = wigner.grid;
  const double reach = std::hypot(std::max(std::abs(g.re(0)), std::abs(g.re(g.re_count - 1))),
                                  std::max(std::abs(g.im(0)), std::abs(g.im(g.im_count - 1))));
  const double y_max = std::sqrt(2.0) * reach;
  const double dy = std::min(g.re_step, g.im_step);
  const int half = int(std::ceil(y_max / dy));
  const double x_extreme =
      std::max(std::abs(x_min), std::abs(x_min + (count - 1) * x_step));
  if (x_extreme * x_extreme > 2.0 * reach * reach + 1.0)
    throw std::invalid_argument("radon_project: x grid extends past the Wigner grid support");
  const Complex rotation = std::polar(1.0, theta);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  QuadratureDistribution out;
  out.theta = theta;
  out.x_min = x_min;
  out.x_step = x_step;
  out.density.resize(count);
  for (int i = 0; i < count; ++i) {
    const double x = x_min + i * x_step;
    double sum = 0.0;
    for (int k = -half; k <= half; ++k) {
      const double y = k * dy;
      const Complex alpha = Complex(x, y) * rotation * inv_sqrt2;
      const double w = (k == -half || k == half) ? 0.5 : 1.0;
      sum += w * interp(alpha.real(), alpha.imag());
    }
    out.density(i) = 0.5 * sum * dy;
  }
  return out;
}

QuasiGrid inverse_radon(const RadonFamily& family, double filter_cutoff, const GridSpec& grid) {
  family.validate();
  grid.validate();
  if (!(filter_cutoff >= 0.0)) throw std::invalid_argument("inverse_radon: negative filter cutoff");

  QuasiGrid out;
  out.grid = grid;
  out.s = 0.0;
  out.values = MatrixXd::Zero(grid.re_count, grid.im_count);
  if (filter_cutoff == 0.0) return out;

  const int phases = int(family.marginals.size());
  const int nx = int(family.marginals[0].density.size());
  const double x_min = family.marginals[0].x_min;
  const double dx = family.marginals[0].x_step;

  // Filtered marginals on a fine t grid, then back-project with linear
  // interpolation. t = q cos(theta) + p sin(theta) with (q, p) = sqrt(2) alpha.
  const double reach =
      std::hypot(std::max(std::abs(grid.re(0)), std::abs(grid.re(grid.re_count - 1))),
                 std::max(std::abs(grid.im(0)), std::abs(grid.im(grid.im_count - 1))));
  const double t_max = std::sqrt(2.0) * reach + 1.0;
  const double dt = std::min(dx, 0.25 / filter_cutoff);
  const int nt = 2 * int(std::ceil(t_max / dt)) + 1;
  const double t_min = -dt * ((nt - 1) / 2);

  MatrixXd filtered(phases, nt);
  for (int j = 0; j < phases; ++j) {
    const VectorXd& p = family.marginals[std::size_t(j)].density;
    for (int k = 0; k < nt; ++k) {
      const double t = t_min + k * dt;
      double sum = 0.0;
      for (int i = 0; i < nx; ++i) {
        const double w = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
        sum += w * p(i) * ramp_kernel(t - (x_min + i * dx), filter_cutoff);
      }
      filtered(j, k) = sum * dx;
    }
  }

  for (int j = 0; j < phases; ++j) {
    const double theta = family.marginals[std::size_t(j)].theta;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (int a = 0; a < grid.re_count; ++a) {
      for (int b = 0; b < grid.im_count; ++b) {
        const double t = std::sqrt(2.0) * (grid.re(a) * c + grid.im(b) * s);
        const double u = (t - t_min) / dt;
        if (u < 0.0 || u > nt - 1) continue;
        const int k = std::min(int(u), nt - 2);
        const double frac = u - k;
        out.values(a, b) += (1.0 - frac) * filtered(j, k) + frac * filtered(j, k + 1);
      }
    }
  }
  // 1/(2 pi) d theta integral, and a factor 2 mapping the (q, p) density
  // to the alpha parameterization.
  out.values *= 2.0 / (2.0 * double(phases));
  return out;
}

VectorXd random_phase_distribution(const VectorXd& photon_dist, double x_min, double x_step,
                                   int count) {
  if (count < 1 || !(x_step > 0.0))
    throw std::invalid_argument("random_phase_distribution: invalid x grid");
  if (photon_dist.size() < 1 || photon_dist.minCoeff() < -1e-12 ||
      photon_dist.sum() > 1.0 + 1e-9)
    throw std::invalid_argument("random_phase_distribution: invalid photon distribution");
  const int d = int(photon_dist.size());
  VectorXd density(count);
  for (int i = 0; i < count; ++i) {
    const VectorXd psi = hermite_psi(x_min + i * x_step, d - 1);
    density(i) = psi.cwiseAbs2().dot(photon_dist);
  }
  return density;
}

QuasiGrid double_homodyne_distribution(const FockDensityMatrix& state, const GridSpec& grid) {
  grid.validate();
  if (state.trunc_deficit > 1e-6)
    throw TruncationError("double_homodyne_distribution: state truncation too coarse",
                          state.trunc_deficit);
  const int d = state.dim();
  QuasiGrid out;
  out.grid = grid;
  out.s = -1.0;
  out.values.resize(grid.re_count, grid.im_count);
  VectorXcd coherent(d);
  for (int a = 0; a < grid.re_count; ++a) {
    for (int b = 0; b < grid.im_count; ++b) {
      const Complex alpha = grid.point(a, b);
      coherent(0) = std::exp(-0.5 * abs2(alpha));
      for (int n = 1; n < d; ++n) coherent(n) = coherent(n - 1) * alpha / std::sqrt(double(n));
      // Q(alpha) = <alpha|rho|alpha>/pi
      out.values(a, b) = std::max(0.0, std::real(coherent.dot(state.rho * coherent)) / kPi);
    }
  }
  return out;
}

}  // namespace qprobe
