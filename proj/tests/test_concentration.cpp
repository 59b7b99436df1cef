#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "rmtlab/concentration.hpp"

using namespace rmtlab;

namespace {

constexpr double kPi = std::numbers::pi;

UnitaryMatrix single_flip(Index d) {
  RealVector phases = RealVector::Zero(d);
  phases(0) = kPi;
  return UnitaryMatrix::from_phases(phases);
}

UnitaryMatrix alternating(Index d) {
  RealVector phases = RealVector::Zero(d);
  for (Index i = 0; i < d; i += 2) phases(i) = kPi;
  return UnitaryMatrix::from_phases(phases);
}

}  // namespace

TEST_CASE("opnorm_minus_identity on diagonal targets") {
  CHECK(opnorm_minus_identity(single_flip(4)) == doctest::Approx(2.0).epsilon(1e-12));
  RealVector third(2);
  third << 0.0, kPi / 3.0;
  CHECK(opnorm_minus_identity(UnitaryMatrix::from_phases(third)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(opnorm_minus_identity(UnitaryMatrix::identity(3)) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

// Reference values frozen from an independent implementation (SciPy dblquad
// on the angular form of E|Z||alpha Z + beta W|), 15 significant digits.
TEST_CASE("gaussian_pair_average frozen values and endpoints") {
  CHECK(gaussian_pair_average(0.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(gaussian_pair_average(1.0) == doctest::Approx(kPi / 4.0).epsilon(1e-9));
  CHECK(gaussian_pair_average(0.25) == doctest::Approx(0.984765031748808).epsilon(1e-7));
  CHECK(gaussian_pair_average(0.5) == doctest::Approx(0.941491571631004).epsilon(1e-7));
  CHECK(gaussian_pair_average(0.75) == doctest::Approx(0.873963428982291).epsilon(1e-7));
  // Even in beta.
  CHECK(gaussian_pair_average(-0.5) == doctest::Approx(gaussian_pair_average(0.5)).epsilon(1e-10));
  CHECK_THROWS(gaussian_pair_average(1.5));
}

TEST_CASE("gaussian_pair_average Monte Carlo agrees with quadrature") {
  const double beta = 0.6;
  const auto mc = gaussian_pair_average_mc(beta, 400000, {97, 0});
  const double quad = gaussian_pair_average(beta);
  CHECK(std::abs(mc.mean - quad) < 4.0 * mc.std_error + 1e-3);
  CHECK(mc.n == 400000);
  CHECK(mc.std_error > 0.0);
}

TEST_CASE("lemma fit produces a certified positive constant") {
  const std::vector<double> betas = {0.1, 0.25, 0.5, 0.75, 0.9, 1.0};
  const std::vector<double> beta0s = {0.3, 0.5, 0.7};
  const LemmaFit fit = gaussian_average_lemma_fit(betas, beta0s, 1e-9);
  CHECK(fit.c > 0.0);
  REQUIRE(fit.a_values.size() == betas.size());
  // The fitted c actually satisfies 1 - A(beta)^2 >= c min(beta^2, beta0^2)
  // on the whole grid.
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const double a = gaussian_pair_average(betas[i]);
    const double floor_sq = std::min(betas[i] * betas[i], fit.beta0 * fit.beta0);
    CHECK(1.0 - a * a >= fit.c * floor_sq - 1e-9);
  }
}

TEST_CASE("Haar second moment: exact identity at G = I") {
  // <i| V I V^dag |i> = 1 for every V, and the closed form collapses to 1.
  const auto rep = haar_second_moment_check(UnitaryMatrix::identity(8), 50, {101, 0});
  CHECK(rep.closed_form == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.mc == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.rel_error < 1e-9);
}

TEST_CASE("Haar second moment: traceless target matches (d+1)^{-1}") {
  const Index d = 16;
  const auto rep = haar_second_moment_check(alternating(d), 4000, {103, 0});
  CHECK(rep.closed_form == doctest::Approx(1.0 / static_cast<double>(d + 1)).epsilon(1e-12));
  CHECK(rep.rel_error < 0.15);
}

TEST_CASE("expected torus distance sandwich on a small flip target") {
  const auto rep = expected_torus_distance(single_flip(8), 150, {107, 0});
  CHECK(rep.dhs_identity == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rep.lower_ok);
  CHECK(rep.upper_ok);
  CHECK(rep.mc_mean > 0.0);
  CHECK(rep.max_sample <= rep.dhs_identity + 1e-9);
  CHECK(rep.n_samples == 150);
}

TEST_CASE("Lipschitz probe sees no violations") {
  const auto rep = lipschitz_probe(alternating(8), 200, {109, 0});
  CHECK(rep.constant == doctest::Approx(4.0).epsilon(1e-12));  // 2 ||G - I|| = 4
  CHECK(rep.violations == 0);
  CHECK(rep.max_ratio <= 1.0 + 1e-9);
  CHECK(rep.n_pairs == 200);
}

TEST_CASE("concentration tail probe stays under the exponential bound") {
  const std::vector<double> a_grid = {0.25, 0.5, 1.0};
  const auto rep = concentration_tail_probe(alternating(32), a_grid, 500, {113, 0});
  REQUIRE(rep.rows.size() == 3);
  const double l = rep.lipschitz;
  CHECK(l == doctest::Approx(4.0).epsilon(1e-12));
  for (const auto& row : rep.rows) {
    const double expected_bound =
        std::min(1.0, std::exp(-(32.0 - 2.0) * row.a * row.a / (12.0 * l * l)));
    CHECK(row.bound == doctest::Approx(expected_bound).epsilon(1e-12));
    CHECK(row.ok);
  }
  CHECK_THROWS(concentration_tail_probe(alternating(2), a_grid, 10, {113, 1}));
}

TEST_CASE("ball avoidance enforces its admissibility precondition") {
  // dhs(G, I) = 2 at d = 32 is far below 6 eps sqrt(d) ~ 10.2: rejected.
  CHECK_THROWS_AS(ball_avoidance_estimate(single_flip(32), 0.3, 10, {127, 0}),
                  std::invalid_argument);
  // Alternating target at d = 2: dhs = 2 > 6 * 0.2 * sqrt(2) ~ 1.70: admissible.
  const auto rep = ball_avoidance_estimate(alternating(2), 0.2, 200, {127, 1});
  CHECK(rep.threshold == doctest::Approx(0.2 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(rep.bound == doctest::Approx(std::exp(-0.04 * 4.0 / 384.0)).epsilon(1e-12));
  CHECK(rep.frequency >= 0.0);
  CHECK(rep.frequency <= 1.0);
  CHECK(rep.ok);
}

TEST_CASE("gaussian approximation check at moderate d") {
  const auto rep = gaussian_approximation_check(0.5, 0, 64, 2000, {131, 0});
  CHECK(rep.quadrature == doctest::Approx(gaussian_pair_average(0.5)).epsilon(1e-10));
  CHECK(rep.bias_allowance == doctest::Approx(5.0 / 8.0).epsilon(1e-12));
  CHECK(rep.ok);
}

TEST_CASE("state torus distance: exact degenerate case and generic tails") {
  // phi on its own torus: Z = sum_k |V_k0|^2 = 1 for every V.
  const auto exact =
      state_torus_expected_distance(PureState::basis_state(16, 0), 50, 20, {}, {137, 0});
  CHECK(exact.mc_mean == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(exact.mc_std < 1e-10);

  ComplexVector amp = ComplexVector::Zero(64);
  amp(0) = std::sqrt(0.8);
  amp(1) = std::sqrt(0.2);
  const std::vector<double> eps_grid = {0.3, 0.5};
  const auto rep = state_torus_expected_distance(PureState(amp), 400, 100, eps_grid, {139, 0});
  CHECK(rep.beta == doctest::Approx(std::sqrt(0.2)).epsilon(1e-12));
  CHECK(rep.lipschitz_violations == 0);
  CHECK(rep.mc_mean > 0.0);
  CHECK(rep.mc_mean < 1.0);
  REQUIRE(rep.tails.size() == 2);
  for (const auto& row : rep.tails) {
    CHECK(row.bound == doctest::Approx(std::exp(-row.a * row.a * 64.0 / 6.0)).epsilon(1e-12));
    CHECK(row.ok);
  }
}
