#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace qprobe {

using Complex = std::complex<double>;
using Eigen::ArrayXd;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Phase-space coordinate alpha, dimensionless field amplitude.
using PhasePoint = Complex;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline double abs2(Complex z) { return std::norm(z); }

// Thrown when a requested tolerance cannot be met with the truncated
// Hilbert space actually used for the computation.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, double tail_bound)
      : std::runtime_error(what), tail_bound_(tail_bound) {}
  double tail_bound() const { return tail_bound_; }

 private:
  double tail_bound_;
};

}  // namespace qprobe
