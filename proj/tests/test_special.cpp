#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rmtlab/quadrature.hpp"
#include "rmtlab/special.hpp"

using namespace rmtlab;

// Reference values frozen from an independent implementation (SciPy 1.11,
// scipy.special.j1 / closed forms), 17 significant digits.
TEST_CASE("bessel_j1 against frozen references") {
  CHECK(bessel_j1(0.0) == 0.0);
  CHECK(bessel_j1(0.5) == doctest::Approx(0.24226845767487387).epsilon(1e-13));
  CHECK(bessel_j1(1.0) == doctest::Approx(0.44005058574493355).epsilon(1e-13));
  CHECK(bessel_j1(2.0) == doctest::Approx(0.5767248077568734).epsilon(1e-13));
  CHECK(bessel_j1(4.0) == doctest::Approx(-0.066043328023549119).epsilon(1e-12));
  CHECK(bessel_j1(15.0) == doctest::Approx(0.20510403861352278).epsilon(1e-12));
  CHECK(bessel_j1(24.0) == doctest::Approx(-0.1540380651831213).epsilon(1e-12));
  CHECK(bessel_j1(30.0) == doctest::Approx(-0.11875106261662305).epsilon(1e-12));
  CHECK(bessel_j1(40.0) == doctest::Approx(0.126038318037585).epsilon(1e-12));
}

TEST_CASE("bessel_j1 is odd and ~x/2 at the origin") {
  CHECK(bessel_j1(-1.7) == doctest::Approx(-bessel_j1(1.7)).epsilon(1e-14));
  CHECK(bessel_j1(1e-8) == doctest::Approx(0.5e-8).epsilon(1e-10));
}

TEST_CASE("semicircle density normalizes and matches frozen values") {
  CHECK(semicircle_density(0.0) == doctest::Approx(0.31830988618379069).epsilon(1e-14));
  CHECK(semicircle_density(1.0) == doctest::Approx(0.27566444771089604).epsilon(1e-14));
  CHECK(semicircle_density(1.9) == doctest::Approx(0.099392230104409757).epsilon(1e-13));
  CHECK(semicircle_density(2.1) == 0.0);
  CHECK(semicircle_density(-2.1) == 0.0);
  const double mass =
      adaptive_simpson([](double x) { return semicircle_density(x); }, -2.0, 2.0, 1e-11);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("semicircle charfn equals J1(2t)/t and its quadrature oracle") {
  CHECK(semicircle_charfn(0.0) == 1.0);
  CHECK(semicircle_charfn(0.25) == doctest::Approx(0.96907383069949549).epsilon(1e-13));
  CHECK(semicircle_charfn(0.5) == doctest::Approx(0.88010117148986711).epsilon(1e-13));
  CHECK(semicircle_charfn(8.0) == doctest::Approx(0.011299646957663004).epsilon(1e-11));
  CHECK(semicircle_charfn(20.0) == doctest::Approx(0.00630191590187925).epsilon(1e-10));

  // Independent oracle: the characteristic function is the cosine transform
  // of the density.
  for (double t : {0.7, 3.3}) {
    const double direct = adaptive_simpson(
        [t](double x) { return semicircle_density(x) * std::cos(t * x); }, -2.0, 2.0,
        1e-11);
    CHECK(semicircle_charfn(t) == doctest::Approx(direct).epsilon(1e-8));
  }
}

TEST_CASE("Gaussian spectral model closed forms") {
  CHECK(gaussian_charfn(0.0) == 1.0);
  CHECK(gaussian_charfn(0.5) == doctest::Approx(0.88249690258459534).epsilon(1e-14));
  CHECK(gaussian_trace_variance(1, 0.5) ==
        doctest::Approx(0.22119921692859512).epsilon(1e-14));
  CHECK(gaussian_trace_variance(1, 1.0) ==
        doctest::Approx(0.63212055882855767).epsilon(1e-14));
  CHECK(gaussian_trace_variance(1, 2.0) ==
        doctest::Approx(0.98168436111126578).epsilon(1e-14));
  // Linear in d.
  CHECK(gaussian_trace_variance(64, 1.0) ==
        doctest::Approx(64.0 * 0.63212055882855767).epsilon(1e-13));
}

TEST_CASE("adaptive_simpson on known integrals") {
  CHECK(adaptive_simpson([](double x) { return x * x; }, 0.0, 1.0, 1e-12) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, 3.141592653589793,
                         1e-12) == doctest::Approx(2.0).epsilon(1e-11));
  // Oscillatory integrand.
  CHECK(adaptive_simpson([](double x) { return std::cos(10.0 * x); }, 0.0, 1.0, 1e-12) ==
        doctest::Approx(std::sin(10.0) / 10.0).epsilon(1e-10));
}
