#include "qprobe/special.hpp"

#include <vector>

namespace qprobe {

double log_factorial(int n) {
  static const std::vector<double> table = [] {
    std::vector<double> t(4096);
    t[0] = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] + std::log(double(i));
    return t;
  }();
  if (n < 0) throw std::invalid_argument("log_factorial: negative argument");
  if (n < int(table.size())) return table[std::size_t(n)];
  return std::lgamma(double(n) + 1.0);
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) throw std::invalid_argument("log_binomial: need 0 <= k <= n");
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

Complex displaced_fock_overlap(int m, int n, Complex gamma) {
  if (m < 0 || n < 0) throw std::invalid_argument("displaced_fock_overlap: negative index");
  const double x = abs2(gamma);
  const int a = std::abs(m - n);
  const int k = std::min(m, n);
  if (x == 0.0) return (m == n) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);

  // Prefactor gamma^a e^{-x/2} / sqrt(a!) for m >= n, with gamma -> -conj(gamma)
  // for m < n; assembled in log space so neither power overflows.
  const double log_mag = a * 0.5 * std::log(x) - 0.5 * x - 0.5 * log_factorial(a);
  const double phase = (m >= n) ? std::arg(gamma) : std::arg(-std::conj(gamma));
  Complex g_prev = std::polar(std::exp(log_mag), phase * a);
  if (k == 0) return g_prev;

  // g_j = prefactor * sqrt(j!/(j+a)!) L_j^{(a)}(x), recurrence
  // sqrt((j+1)(j+1+a)) g_{j+1} = (2j+a+1-x) g_j - sqrt(j(j+a)) g_{j-1}.
  Complex g = g_prev * ((1.0 + a - x) / std::sqrt(1.0 + a));
  for (int j = 1; j < k; ++j) {
    Complex g_next = ((2.0 * j + a + 1.0 - x) * g -
                      std::sqrt(double(j) * (j + a)) * g_prev) /
                     std::sqrt(double(j + 1) * (j + 1 + a));
    g_prev = g;
    g = g_next;
  }
  return g;
}

MatrixXcd displacement_matrix(Complex gamma, int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("displacement_matrix: empty block");
  MatrixXcd d(rows, cols);
  const double x = abs2(gamma);
  if (x == 0.0) {
    d.setZero();
    d.diagonal().setOnes();
    return d;
  }
  // The two-term raising/lowering recurrences lose accuracy deep into the
  // block, so each diagonal m - n = const runs the same scaled Laguerre
  // recurrence as displaced_fock_overlap instead.
  for (int offset = -(cols - 1); offset < rows; ++offset) {
    const int a = std::abs(offset);
    const int m0 = offset >= 0 ? offset : 0;
    const int n0 = offset >= 0 ? 0 : -offset;
    const double log_mag = a * 0.5 * std::log(x) - 0.5 * x - 0.5 * log_factorial(a);
    const double phase = (offset >= 0) ? std::arg(gamma) : std::arg(-std::conj(gamma));
    Complex g_prev = std::polar(std::exp(log_mag), phase * a);
    d(m0, n0) = g_prev;
    if (m0 + 1 >= rows || n0 + 1 >= cols) continue;
    Complex g_cur = g_prev * ((1.0 + a - x) / std::sqrt(1.0 + a));
    d(m0 + 1, n0 + 1) = g_cur;
    for (int j = 1; m0 + j + 1 < rows && n0 + j + 1 < cols; ++j) {
      const Complex g_next = ((2.0 * j + a + 1.0 - x) * g_cur -
                              std::sqrt(double(j) * (j + a)) * g_prev) /
                             std::sqrt(double(j + 1) * (j + 1 + a));
      g_prev = g_cur;
      g_cur = g_next;
      d(m0 + j + 1, n0 + j + 1) = g_cur;
    }
  }
  return d;
}

int fock_cap(double mean_n) {
  if (mean_n < 0) mean_n = 0;
  return int(std::ceil(mean_n + 8.0 * std::sqrt(mean_n + 1.0) + 16.0));
}

int displaced_dim(int dim, double gamma_abs) {
  const double top = std::sqrt(double(std::max(dim - 1, 0))) + std::abs(gamma_abs);
  return std::max(dim, fock_cap(top * top));
}

}  // namespace qprobe
