#include "qprobe/states.hpp"

#include "qprobe/special.hpp"

#include <cmath>
#include <sstream>

namespace qprobe {

namespace {

std::string format_complex(Complex z) {
  std::ostringstream os;
  os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return os.str();
}

// Fock amplitudes of a coherent state |alpha>.
VectorXcd coherent_amplitudes(Complex alpha, int dim) {
  VectorXcd c(dim);
  c(0) = std::exp(-0.5 * abs2(alpha));
  for (int n = 1; n < dim; ++n) c(n) = c(n - 1) * alpha / std::sqrt(double(n));
  return c;
}

double cat_norm(Complex alpha) { return 1.0 / std::sqrt(2.0 * (1.0 + std::exp(-2.0 * abs2(alpha)))); }

VectorXcd cat_amplitudes(Complex alpha, int dim) {
  // N (|alpha> + |-alpha>): odd components cancel, even ones double.
  VectorXcd c = coherent_amplitudes(alpha, dim);
  const double norm = cat_norm(alpha);
  for (int n = 0; n < dim; ++n) c(n) = (n % 2 == 0) ? 2.0 * norm * c(n) : Complex(0.0);
  return c;
}

// Squeezed vacuum at squeezing phase 0: only even levels populated.
VectorXcd squeezed_amplitudes(double r, int dim) {
  VectorXcd c = VectorXcd::Zero(dim);
  const double t = std::tanh(r);
  c(0) = 1.0 / std::sqrt(std::cosh(r));
  for (int k = 0; 2 * (k + 1) < dim; ++k) {
    c(2 * k + 2) = c(2 * k) * (-t) * std::sqrt(double(2 * k + 1) * (2 * k + 2)) / (2.0 * (k + 1));
  }
  return c;
}

FockDensityMatrix from_pure(const VectorXcd& amplitudes) {
  FockDensityMatrix out;
  out.rho = amplitudes * amplitudes.adjoint();
  out.trunc_deficit = std::max(0.0, 1.0 - amplitudes.squaredNorm());
  return out;
}

}  // namespace

StateSpec StateSpec::vacuum() { return StateSpec(Family::Vacuum); }

StateSpec StateSpec::coherent(Complex amplitude) {
  if (!std::isfinite(amplitude.real()) || !std::isfinite(amplitude.imag()))
    throw std::invalid_argument("coherent: amplitude must be finite");
  StateSpec s(Family::Coherent);
  s.amplitude_ = amplitude;
  return s;
}

StateSpec StateSpec::fock(int n) {
  if (n < 0) throw std::invalid_argument("fock: photon number must be >= 0");
  StateSpec s(Family::Fock);
  s.photon_number_ = n;
  return s;
}

StateSpec StateSpec::thermal(double mean_photons) {
  if (!(mean_photons >= 0.0)) throw std::invalid_argument("thermal: mean photon number must be >= 0");
  StateSpec s(Family::Thermal);
  s.mean_photons_ = mean_photons;
  return s;
}

StateSpec StateSpec::squeezed_vacuum(double squeeze) {
  if (!(squeeze >= 0.0)) throw std::invalid_argument("squeezed_vacuum: squeeze parameter must be >= 0");
  StateSpec s(Family::SqueezedVacuum);
  s.squeeze_ = squeeze;
  return s;
}

StateSpec StateSpec::cat(Complex amplitude) {
  if (!std::isfinite(amplitude.real()) || !std::isfinite(amplitude.imag()))
    throw std::invalid_argument("cat: amplitude must be finite");
  StateSpec s(Family::Cat);
  s.amplitude_ = amplitude;
  return s;
}

StateSpec StateSpec::mixture(std::vector<std::pair<double, StateSpec>> parts) {
  if (parts.empty()) throw std::invalid_argument("mixture: needs at least one component");
  double total = 0.0;
  for (const auto& [w, _] : parts) {
    if (!(w >= 0.0)) throw std::invalid_argument("mixture: weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("mixture: weights must sum to 1");
  StateSpec s(Family::Mixture);
  s.parts_ = std::move(parts);
  return s;
}

StateSpec StateSpec::explicit_matrix(MatrixXcd rho) {
  if (rho.rows() != rho.cols() || rho.rows() < 1)
    throw std::invalid_argument("explicit_matrix: need a square nonempty matrix");
  MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  const double trace = herm.real().trace();
  if (trace > 1.0 + 1e-9) throw std::invalid_argument("explicit_matrix: trace exceeds 1");
  for (int i = 0; i < herm.rows(); ++i) {
    if (herm(i, i).real() < -1e-12)
      throw std::invalid_argument("explicit_matrix: negative diagonal entry");
  }
  StateSpec s(Family::Explicit);
  s.explicit_rho_ = std::make_shared<const MatrixXcd>(std::move(herm));
  return s;
}

double StateSpec::mean_photon_number() const {
  switch (family_) {
    case Family::Vacuum: return 0.0;
    case Family::Coherent: return abs2(amplitude_);
    case Family::Fock: return double(photon_number_);
    case Family::Thermal: return mean_photons_;
    case Family::SqueezedVacuum: return std::sinh(squeeze_) * std::sinh(squeeze_);
    case Family::Cat: {
      const double x = abs2(amplitude_);
      return x * std::tanh(x);
    }
    case Family::Mixture: {
      double sum = 0.0;
      for (const auto& [w, part] : parts_) sum += w * part.mean_photon_number();
      return sum;
    }
    case Family::Explicit: {
      double sum = 0.0;
      for (int n = 0; n < explicit_rho_->rows(); ++n) sum += n * (*explicit_rho_)(n, n).real();
      return sum;
    }
  }
  return 0.0;
}

std::string StateSpec::describe() const {
  std::ostringstream os;
  switch (family_) {
    case Family::Vacuum: return "vacuum";
    case Family::Coherent: return "coherent(" + format_complex(amplitude_) + ")";
    case Family::Fock: return "fock(" + std::to_string(photon_number_) + ")";
    case Family::Thermal: os << "thermal(" << mean_photons_ << ")"; return os.str();
    case Family::SqueezedVacuum: os << "squeezed(" << squeeze_ << ")"; return os.str();
    case Family::Cat: return "cat(" + format_complex(amplitude_) + ")";
    case Family::Mixture: {
      os << "mixture[";
      for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (i) os << "+";
        os << parts_[i].first << "*" << parts_[i].second.describe();
      }
      os << "]";
      return os.str();
    }
    case Family::Explicit: return "explicit(dim=" + std::to_string(explicit_rho_->rows()) + ")";
  }
  return "?";
}

FockDensityMatrix to_density_matrix(const StateSpec& spec, int dim) {
  if (dim < 1) throw std::invalid_argument("to_density_matrix: dim must be >= 1");
  switch (spec.family()) {
    case StateSpec::Family::Vacuum: {
      FockDensityMatrix out;
      out.rho = MatrixXcd::Zero(dim, dim);
      out.rho(0, 0) = 1.0;
      return out;
    }
    case StateSpec::Family::Coherent:
      return from_pure(coherent_amplitudes(spec.amplitude(), dim));
    case StateSpec::Family::Fock: {
      if (spec.photon_number() >= dim)
        throw std::invalid_argument("to_density_matrix: Fock level does not fit in dim");
      FockDensityMatrix out;
      out.rho = MatrixXcd::Zero(dim, dim);
      out.rho(spec.photon_number(), spec.photon_number()) = 1.0;
      return out;
    }
    case StateSpec::Family::Thermal: {
      FockDensityMatrix out;
      out.rho = MatrixXcd::Zero(dim, dim);
      const double nbar = spec.mean_thermal_photons();
      double p = 1.0 / (1.0 + nbar);
      const double ratio = nbar / (1.0 + nbar);
      double cum = 0.0;
      for (int m = 0; m < dim; ++m) {
        out.rho(m, m) = p;
        cum += p;
        p *= ratio;
      }
      out.trunc_deficit = std::max(0.0, 1.0 - cum);
      return out;
    }
    case StateSpec::Family::SqueezedVacuum:
      return from_pure(squeezed_amplitudes(spec.squeeze(), dim));
    case StateSpec::Family::Cat:
      return from_pure(cat_amplitudes(spec.amplitude(), dim));
    case StateSpec::Family::Mixture: {
      FockDensityMatrix out;
      out.rho = MatrixXcd::Zero(dim, dim);
      for (const auto& [w, part] : spec.parts()) {
        FockDensityMatrix component = to_density_matrix(part, dim);
        out.rho += w * component.rho;
        out.trunc_deficit += w * component.trunc_deficit;
      }
      return out;
    }
    case StateSpec::Family::Explicit: {
      const MatrixXcd& src = spec.matrix();
      FockDensityMatrix out;
      out.rho = MatrixXcd::Zero(dim, dim);
      const int copy = std::min<int>(dim, int(src.rows()));
      out.rho.topLeftCorner(copy, copy) = src.topLeftCorner(copy, copy);
      out.trunc_deficit = std::max(0.0, 1.0 - out.trace());
      return out;
    }
  }
  throw std::logic_error("to_density_matrix: unreachable");
}

VectorXd photon_number_distribution(const StateSpec& spec, int max_n) {
  if (max_n < 0) throw std::invalid_argument("photon_number_distribution: max_n must be >= 0");
  const int len = max_n + 1;
  VectorXd p = VectorXd::Zero(len);
  switch (spec.family()) {
    case StateSpec::Family::Vacuum:
      p(0) = 1.0;
      return p;
    case StateSpec::Family::Coherent: {
      const double lambda = abs2(spec.amplitude());
      double term = std::exp(-lambda);
      for (int n = 0; n < len; ++n) {
        p(n) = term;
        term *= lambda / (n + 1);
      }
      return p;
    }
    case StateSpec::Family::Fock:
      if (spec.photon_number() <= max_n) p(spec.photon_number()) = 1.0;
      return p;
    case StateSpec::Family::Thermal: {
      const double nbar = spec.mean_thermal_photons();
      double term = 1.0 / (1.0 + nbar);
      for (int n = 0; n < len; ++n) {
        p(n) = term;
        term *= nbar / (1.0 + nbar);
      }
      return p;
    }
    case StateSpec::Family::SqueezedVacuum: {
      // p_{2k} = (2k)!/(2^k k!)^2 tanh^{2k}(r)/cosh(r), odd levels empty.
      const double t2 = std::tanh(spec.squeeze()) * std::tanh(spec.squeeze());
      double term = 1.0 / std::cosh(spec.squeeze());
      for (int k = 0; 2 * k < len; ++k) {
        p(2 * k) = term;
        term *= t2 * double(2 * k + 1) / double(2 * k + 2);
      }
      return p;
    }
    case StateSpec::Family::Cat: {
      const double x = abs2(spec.amplitude());
      const double norm = cat_norm(spec.amplitude());
      double term = 4.0 * norm * norm * std::exp(-x);
      for (int n = 0; n < len; ++n) {
        if (n % 2 == 0) p(n) = term;
        term *= x / (n + 1);
      }
      return p;
    }
    case StateSpec::Family::Mixture: {
      for (const auto& [w, part] : spec.parts()) p += w * photon_number_distribution(part, max_n);
      return p;
    }
    case StateSpec::Family::Explicit: {
      const MatrixXcd& src = spec.matrix();
      for (int n = 0; n < len && n < src.rows(); ++n) p(n) = src(n, n).real();
      return p;
    }
  }
  throw std::logic_error("photon_number_distribution: unreachable");
}

int default_dim(const StateSpec& spec) {
  switch (spec.family()) {
    case StateSpec::Family::Vacuum: return 4;
    case StateSpec::Family::Fock: return spec.photon_number() + 8;
    case StateSpec::Family::Coherent:
    case StateSpec::Family::Cat:
      return fock_cap(abs2(spec.amplitude()));
    case StateSpec::Family::Thermal: {
      const double nbar = spec.mean_thermal_photons();
      if (nbar < 1e-12) return 4;
      const double ratio = nbar / (1.0 + nbar);
      return int(std::ceil(25.5 / -std::log(ratio))) + 4;
    }
    case StateSpec::Family::SqueezedVacuum: {
      const double t = std::tanh(spec.squeeze());
      if (t < 1e-8) return 4;
      return 2 * int(std::ceil(14.0 / -std::log(t))) + 6;
    }
    case StateSpec::Family::Mixture: {
      int dim = 1;
      for (const auto& [w, part] : spec.parts()) dim = std::max(dim, default_dim(part));
      return dim;
    }
    case StateSpec::Family::Explicit: return int(spec.matrix().rows());
  }
  return 4;
}

}  // namespace qprobe
