#pragma once

#include "qprobe/types.hpp"

#include <cmath>

namespace qprobe {

// log(n!) with a precomputed table for small n.
double log_factorial(int n);

// log of the binomial coefficient C(n, k); requires 0 <= k <= n.
double log_binomial(int n, int k);

// Harmonic-oscillator position eigenfunctions psi_0(x)..psi_nmax(x),
// normalized so that \int psi_n^2 dx = 1. The recurrence runs on the
// weighted functions themselves, which stays bounded for n in the
// hundreds where the bare Hermite polynomials would overflow.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> hermite_psi(Scalar x, int nmax) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> psi(nmax + 1);
  const Scalar inv_pi_quarter = Scalar(0.75112554446494248285870553477l);  // pi^(-1/4)
  psi(0) = inv_pi_quarter * std::exp(-x * x / Scalar(2));
  if (nmax == 0) return psi;
  psi(1) = std::sqrt(Scalar(2)) * x * psi(0);
  for (int n = 1; n < nmax; ++n) {
    psi(n + 1) = x * std::sqrt(Scalar(2) / Scalar(n + 1)) * psi(n) -
                 std::sqrt(Scalar(n) / Scalar(n + 1)) * psi(n - 1);
  }
  return psi;
}

// Matrix element <m|D(gamma)|n> of the displacement operator
// D(gamma) = exp(gamma a^dag - conj(gamma) a), via the associated-Laguerre
// closed form evaluated with a scaled three-term recurrence (no bare
// factorials, usable for m, n well beyond 100).
Complex displaced_fock_overlap(int m, int n, Complex gamma);

// Dense block D(m, n) = <m|D(gamma)|n> for m < rows, n < cols, built
// row by row from the raising/lowering recurrences in O(rows*cols).
MatrixXcd displacement_matrix(Complex gamma, int rows, int cols);

// Fock-space size that keeps the tail of a photon distribution with mean
// occupation `mean_n` below ~1e-10.
int fock_cap(double mean_n);

// Fock-space size covering a state supported on dim levels after a
// displacement of magnitude |gamma|.
int displaced_dim(int dim, double gamma_abs);

}  // namespace qprobe
