#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qprobe/phasespace.hpp"
#include "qprobe/special.hpp"

#include <cmath>

using namespace qprobe;

namespace {

// Direct (non-interference) part of the cat closed form at alpha = 0.
double cat_direct_part_at_origin(double alpha0_abs2, double s) {
  return 2.0 * std::exp(-2.0 * alpha0_abs2 / (1.0 - s)) /
         (kPi * (1.0 - s) * (1.0 + std::exp(-2.0 * alpha0_abs2)));
}

}  // namespace

TEST_CASE("spectral quasi values at reference points") {
  const FockDensityMatrix vacuum = to_density_matrix(StateSpec::vacuum(), 8);
  CHECK(quasi_value(vacuum, 0.0, 0.0) == doctest::Approx(2.0 / kPi).epsilon(1e-12));
  CHECK(quasi_value(vacuum, 1.0, -1.0) ==
        doctest::Approx(std::exp(-1.0) / kPi).epsilon(1e-10));
  CHECK(quasi_value(vacuum, 1.0, -1.0) == doctest::Approx(0.117099663049).epsilon(1e-8));
}

TEST_CASE("coherent states evaluate to shifted Gaussians at any ordering") {
  const Complex alpha0(0.8, -0.5);
  const FockDensityMatrix rho = to_density_matrix(StateSpec::coherent(alpha0), 40);
  for (double s : {0.0, -0.4, -1.0, -2.0}) {
    for (Complex alpha : {Complex(0.0, 0.0), Complex(1.1, 0.3), alpha0}) {
      CHECK(quasi_value(rho, alpha, s) ==
            doctest::Approx(coherent_quasi_closed_form(alpha0, alpha, s)).epsilon(1e-9));
    }
  }
  SUBCASE("0 < s < 1 needs the explicit opt-in and still converges here") {
    CHECK_THROWS_AS(quasi_value(rho, 0.2, 0.4), std::domain_error);
    QuasiOptions options;
    options.allow_unbounded_ordering = true;
    options.truncation_tolerance = 1e-6;
    const FockDensityMatrix wide = to_density_matrix(StateSpec::coherent(alpha0), 80);
    CHECK(quasi_value(wide, 0.2, 0.4, options) ==
          doctest::Approx(coherent_quasi_closed_form(alpha0, 0.2, 0.4)).epsilon(1e-6));
  }
}

TEST_CASE("cat closed form") {
  const Complex alpha0(0.0, 3.0);
  SUBCASE("even parity symmetry in alpha") {
    for (double s : {0.0, -0.3, -1.0}) {
      for (Complex alpha :
           {Complex(0.31, 0.7), Complex(-1.2, 0.05), Complex(0.0, 2.9), Complex(2.0, -2.0)}) {
        CHECK(cat_quasi_closed_form(alpha0, alpha, s) ==
              doctest::Approx(cat_quasi_closed_form(alpha0, -alpha, s)).epsilon(1e-13));
      }
    }
  }
  SUBCASE("agrees with the spectral sum on the density matrix") {
    const FockDensityMatrix rho = to_density_matrix(StateSpec::cat(alpha0), 45);
    CHECK(quasi_value(rho, 0.0, 0.0) ==
          doctest::Approx(cat_quasi_closed_form(alpha0, 0.0, 0.0)).epsilon(1e-8));
    for (Complex alpha : {Complex(0.13, 0.0), Complex(0.4, 1.0)}) {
      CHECK(quasi_value(rho, alpha, 0.0) ==
            doctest::Approx(cat_quasi_closed_form(alpha0, alpha, 0.0)).epsilon(1e-8));
    }
  }
  SUBCASE("interference fringes vanish every pi/12 along the real axis") {
    // cos(4 Im(alpha0 conj(alpha))) = cos(12 Re alpha) for alpha0 = 3i: the
    // fringe term is zero at Re alpha = pi/24 + k pi/12.
    for (int k = 0; k < 4; ++k) {
      const double x = kPi / 24.0 + k * kPi / 12.0;
      const double full = cat_quasi_closed_form(alpha0, x, 0.0);
      const double direct = (coherent_quasi_closed_form(alpha0, x, 0.0) +
                             coherent_quasi_closed_form(-alpha0, x, 0.0)) /
                            (2.0 * (1.0 + std::exp(-18.0)));
      CHECK(full == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("fock closed form matches the spectral sum down to s = -1") {
  for (int n : {0, 1, 2, 3}) {
    const FockDensityMatrix rho = to_density_matrix(StateSpec::fock(n), n + 2);
    for (double s : {0.0, -0.5, -1.0}) {
      for (Complex alpha : {Complex(0.0, 0.0), Complex(0.7, -0.2), Complex(1.5, 1.0)}) {
        CHECK(fock_quasi_closed_form(n, alpha, s) ==
              doctest::Approx(quasi_value(rho, alpha, s)).epsilon(1e-9));
      }
    }
  }
  CHECK(fock_quasi_closed_form(1, 0.0, 0.0) == doctest::Approx(-2.0 / kPi).epsilon(1e-13));
}

TEST_CASE("thermal closed form matches the spectral sum") {
  const FockDensityMatrix rho = to_density_matrix(StateSpec::thermal(2.0), 80);
  for (double s : {0.0, -0.7, -1.0}) {
    for (Complex alpha : {Complex(0.0, 0.0), Complex(1.0, 0.4)}) {
      CHECK(thermal_quasi_closed_form(2.0, alpha, s) ==
            doctest::Approx(quasi_value(rho, alpha, s)).epsilon(1e-8));
    }
  }
}

TEST_CASE("quasi values agree with the characteristic-function Fourier oracle") {
  struct Case {
    StateSpec spec;
    int dim;
  };
  const Case cases[] = {
      {StateSpec::fock(2), 12},
      {StateSpec::coherent(0.6), 12},
      {StateSpec::mixture({{0.5, StateSpec::vacuum()}, {0.5, StateSpec::fock(1)}}), 8}};
  for (const Case& c : cases) {
    const FockDensityMatrix rho = to_density_matrix(c.spec, c.dim);
    const oracle::CharFunctionQuasi fourier(rho, 8.0, 0.05);
    for (double s : {0.0, -0.5, -1.0}) {
      for (Complex alpha : {Complex(0.0, 0.0), Complex(0.4, 0.3), Complex(-1.1, 0.0)}) {
        CHECK(quasi_value(rho, alpha, s) ==
              doctest::Approx(fourier.value(alpha, s)).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("grid evaluation matches pointwise evaluation") {
  const FockDensityMatrix rho = to_density_matrix(
      StateSpec::mixture({{0.6, StateSpec::thermal(0.8)}, {0.4, StateSpec::fock(2)}}), 40);
  GridSpec grid;
  grid.re_min = -1.0;
  grid.re_step = 0.5;
  grid.re_count = 5;
  grid.im_min = -0.75;
  grid.im_step = 0.75;
  grid.im_count = 3;
  const QuasiGrid values = quasi_grid(rho, grid, -0.3);
  for (int i = 0; i < grid.re_count; ++i)
    for (int j = 0; j < grid.im_count; ++j)
      CHECK(values.values(i, j) ==
            doctest::Approx(quasi_value(rho, grid.point(i, j), -0.3)).epsilon(1e-11));
}

TEST_CASE("normalization of quasidistributions by grid quadrature") {
  const double step = 0.05;
  SUBCASE("closed-form families") {
    struct Case {
      StateSpec spec;
      double extent;
    };
    const Case cases[] = {{StateSpec::vacuum(), 5.0},
                          {StateSpec::coherent(1.0), 6.0},
                          {StateSpec::cat(Complex(0.0, 3.0)), 8.0},
                          {StateSpec::thermal(2.0), 6.5}};
    for (const Case& c : cases) {
      for (double s : {0.0, -0.5, -1.0}) {
        QuasiGrid grid;
        grid.grid = GridSpec::centered(c.extent, step);
        grid.s = s;
        grid.values.resize(grid.grid.re_count, grid.grid.im_count);
        for (int i = 0; i < grid.grid.re_count; ++i)
          for (int j = 0; j < grid.grid.im_count; ++j)
            grid.values(i, j) = quasi_of_spec(c.spec, grid.grid.point(i, j), s);
        CHECK(grid.integral() == doctest::Approx(1.0).epsilon(1e-4));
      }
    }
  }
  SUBCASE("spectral families") {
    struct Case {
      StateSpec spec;
      double extent;
    };
    const Case cases[] = {
        {StateSpec::fock(1), 6.0},
        {StateSpec::squeezed_vacuum(0.6), 5.7},
        {StateSpec::mixture({{0.5, StateSpec::vacuum()}, {0.5, StateSpec::fock(1)}}), 6.0}};
    for (const Case& c : cases) {
      const FockDensityMatrix rho = to_density_matrix(c.spec, default_dim(c.spec));
      for (double s : {0.0, -1.0}) {
        const QuasiGrid grid = quasi_grid(rho, GridSpec::centered(c.extent, step), s);
        CHECK(grid.integral() == doctest::Approx(1.0).epsilon(1e-4));
      }
    }
  }
}

TEST_CASE("Q function is nonnegative and the Wigner function bounded") {
  const StateSpec specs[] = {StateSpec::vacuum(),
                             StateSpec::coherent(Complex(0.9, 0.4)),
                             StateSpec::fock(3),
                             StateSpec::thermal(1.5),
                             StateSpec::squeezed_vacuum(0.7),
                             StateSpec::cat(Complex(0.0, 2.0))};
  for (const StateSpec& spec : specs) {
    const FockDensityMatrix rho = to_density_matrix(spec, default_dim(spec));
    for (Complex alpha : {Complex(0.0, 0.0), Complex(0.31, -0.44), Complex(1.7, 0.9),
                          Complex(-2.5, 0.0), Complex(0.0, 3.1)}) {
      CHECK(quasi_value(rho, alpha, -1.0) >= -1e-12);
      CHECK(std::abs(quasi_value(rho, alpha, 0.0)) <= 2.0 / kPi + 1e-12);
    }
  }
}

TEST_CASE("ordering transform") {
  SUBCASE("equal target ordering returns the grid unchanged") {
    QuasiGrid grid;
    grid.grid = GridSpec::centered(2.0, 0.1);
    grid.s = -0.2;
    grid.values = MatrixXd::Random(grid.grid.re_count, grid.grid.im_count);
    const QuasiGrid same = ordering_transform(grid, -0.2);
    CHECK((same.values - grid.values).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("deconvolution direction is refused") {
    QuasiGrid grid;
    grid.grid = GridSpec::centered(2.0, 0.1);
    grid.s = -0.5;
    grid.values = MatrixXd::Zero(grid.grid.re_count, grid.grid.im_count);
    CHECK_THROWS_AS(ordering_transform(grid, 0.0), std::domain_error);
  }
  SUBCASE("vacuum Wigner smooths to the vacuum Q function") {
    QuasiGrid wigner;
    wigner.grid = GridSpec::centered(5.0, 0.05);
    wigner.s = 0.0;
    wigner.values.resize(wigner.grid.re_count, wigner.grid.im_count);
    for (int i = 0; i < wigner.grid.re_count; ++i)
      for (int j = 0; j < wigner.grid.im_count; ++j)
        wigner.values(i, j) = coherent_quasi_closed_form(0.0, wigner.grid.point(i, j), 0.0);
    const QuasiGrid husimi = ordering_transform(wigner, -1.0);
    double worst = 0.0;
    for (int i = 0; i < husimi.grid.re_count; ++i) {
      for (int j = 0; j < husimi.grid.im_count; ++j) {
        const Complex alpha = husimi.grid.point(i, j);
        if (std::abs(alpha) > 3.5) continue;  // convolution window leaves the grid
        worst = std::max(worst,
                         std::abs(husimi.values(i, j) - std::exp(-abs2(alpha)) / kPi));
      }
    }
    CHECK(worst < 1e-4);
  }
  SUBCASE("cat interference term shrinks by the ordering envelope") {
    const Complex alpha0(0.0, 3.0);
    const double x = abs2(alpha0);
    const double s_target = -0.1;
    // closed-form identity: the (1-s)-normalized fringe amplitude at the
    // origin carries exactly the envelope factor exp(2 s |alpha0|^2/(1-s)).
    const double fringe_0 =
        cat_quasi_closed_form(alpha0, 0.0, 0.0) - cat_direct_part_at_origin(x, 0.0);
    const double fringe_t =
        cat_quasi_closed_form(alpha0, 0.0, s_target) - cat_direct_part_at_origin(x, s_target);
    CHECK(fringe_t * (1.0 - s_target) / fringe_0 ==
          doctest::Approx(std::exp(2.0 * s_target * x / (1.0 - s_target))).epsilon(1e-12));

    // and the numerical convolution reproduces the damped fringe
    QuasiGrid wigner;
    wigner.grid = GridSpec::centered(5.6, 0.02);
    wigner.s = 0.0;
    wigner.values.resize(wigner.grid.re_count, wigner.grid.im_count);
    for (int i = 0; i < wigner.grid.re_count; ++i)
      for (int j = 0; j < wigner.grid.im_count; ++j)
        wigner.values(i, j) = cat_quasi_closed_form(alpha0, wigner.grid.point(i, j), 0.0);
    const QuasiGrid smoothed = ordering_transform(wigner, s_target);
    const int center_re = (wigner.grid.re_count - 1) / 2;
    const int center_im = (wigner.grid.im_count - 1) / 2;
    CHECK(smoothed.values(center_re, center_im) ==
          doctest::Approx(cat_quasi_closed_form(alpha0, 0.0, s_target)).epsilon(2e-4));
  }
}

TEST_CASE("quasidistributions obey the ordering diffusion equation") {
  SUBCASE("vacuum") {
    const FockDensityMatrix rho = to_density_matrix(StateSpec::vacuum(), 30);
    CHECK(diffusion_residual(rho, Complex(0.5, 0.0), -0.5, 1e-3) < 1e-4);
  }
  SUBCASE("single photon") {
    const FockDensityMatrix rho = to_density_matrix(StateSpec::fock(1), 30);
    CHECK(diffusion_residual(rho, 0.0, -0.5, 1e-3) < 1e-4);
    CHECK(diffusion_residual(rho, Complex(0.4, -0.6), -0.5, 1e-3) < 1e-4);
  }
  SUBCASE("central difference order h^2") {
    const FockDensityMatrix rho = to_density_matrix(StateSpec::coherent(Complex(0.8, 0.0)), 50);
    const double coarse = diffusion_residual(rho, Complex(0.3, 0.2), -0.4, 0.02);
    const double fine = diffusion_residual(rho, Complex(0.3, 0.2), -0.4, 0.01);
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.25));
  }
}

TEST_CASE("multimode product quasidistributions") {
  const FockDensityMatrix vacuum = to_density_matrix(StateSpec::vacuum(), 6);
  SUBCASE("two vacua at the origin") {
    const QuasiEval eval = multimode_quasi({vacuum, vacuum}, {0.0, 0.0}, 0.0);
    CHECK(eval.value == doctest::Approx(4.0 / (kPi * kPi)).epsilon(1e-12));
  }
  SUBCASE("matched coherent times single photon") {
    const FockDensityMatrix coherent = to_density_matrix(StateSpec::coherent(1.0), 35);
    const FockDensityMatrix fock = to_density_matrix(StateSpec::fock(1), 6);
    const QuasiEval eval = multimode_quasi({coherent, fock}, {1.0, 0.0}, 0.0);
    CHECK(eval.value == doctest::Approx(-4.0 / (kPi * kPi)).epsilon(1e-9));
  }
  SUBCASE("factorizes into single-mode values") {
    const FockDensityMatrix thermal = to_density_matrix(StateSpec::thermal(0.7), 40);
    const FockDensityMatrix fock = to_density_matrix(StateSpec::fock(2), 8);
    const std::vector<PhasePoint> points{Complex(0.3, 0.1), Complex(-0.7, 0.4),
                                         Complex(0.0, 1.1)};
    const QuasiEval joint = multimode_quasi({vacuum, thermal, fock}, points, -0.25);
    const double product = quasi_eval(vacuum, points[0], -0.25).value *
                           quasi_eval(thermal, points[1], -0.25).value *
                           quasi_eval(fock, points[2], -0.25).value;
    CHECK(joint.value == doctest::Approx(product).epsilon(1e-12));
  }
}

TEST_CASE("divergence detection for unbounded orderings") {
  QuasiOptions options;
  options.allow_unbounded_ordering = true;
  SUBCASE("thermal state diverges for s > 0") {
    const FockDensityMatrix rho = to_density_matrix(StateSpec::thermal(2.0), 150);
    const QuasiEval eval = quasi_eval(rho, 0.0, 0.5, options);
    CHECK(eval.diverged);
    CHECK_THROWS_AS(quasi_value(rho, 0.0, 0.5, options), std::domain_error);
  }
  SUBCASE("coherent state converges for s > 0") {
    const FockDensityMatrix rho = to_density_matrix(StateSpec::coherent(0.5), 80);
    const QuasiEval eval = quasi_eval(rho, 0.1, 0.5, options);
    CHECK_FALSE(eval.diverged);
    CHECK(eval.value ==
          doctest::Approx(coherent_quasi_closed_form(0.5, 0.1, 0.5)).epsilon(1e-6));
  }
}

TEST_CASE("grid bookkeeping") {
  const GridSpec grid = GridSpec::centered(2.0, 0.5);
  CHECK(grid.re_count == 9);
  CHECK(grid.re(0) == doctest::Approx(-2.0));
  CHECK(grid.re(8) == doctest::Approx(2.0));
  CHECK_THROWS_AS(GridSpec::centered(-1.0, 0.5), std::invalid_argument);
  GridSpec bad;
  bad.re_count = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
