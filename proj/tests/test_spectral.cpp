#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "rmtlab/special.hpp"
#include "rmtlab/spectral.hpp"

using namespace rmtlab;

namespace {

EnsembleSpec gue(Index d) {
  EnsembleSpec s;
  s.kind = EnsembleKind::Gue;
  s.dim = d;
  return s;
}

EnsembleSpec diag_gaussian(Index d) {
  EnsembleSpec s;
  s.kind = EnsembleKind::DiagGaussian;
  s.dim = d;
  return s;
}

}  // namespace

TEST_CASE("form factor at t = 0 is exactly 1 with zero variance") {
  const std::vector<double> grid = {0.0};
  const auto est = estimate_form_factor(gue(16), grid, 50, {71, 0});
  REQUIRE(est.size() == 1);
  CHECK(est[0].mean.real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(est[0].mean.imag()) < 1e-12);
  CHECK(est[0].variance == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(est[0].n_samples == 50);
}

TEST_CASE("form factor estimates are deterministic and jobs-independent") {
  const std::vector<double> grid = {0.5, 1.0, 2.0};
  const auto a = estimate_form_factor(gue(12), grid, 40, {73, 0}, 1);
  const auto b = estimate_form_factor(gue(12), grid, 40, {73, 0}, 3);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].mean.real() == b[i].mean.real());
    CHECK(a[i].mean.imag() == b[i].mean.imag());
    CHECK(a[i].variance == b[i].variance);
  }
}

TEST_CASE("theory mean dispatches on the ensemble") {
  CHECK(form_factor_theory_mean(gue(32), 1.3) == semicircle_charfn(1.3));
  CHECK(form_factor_theory_mean(diag_gaussian(32), 1.3) == gaussian_charfn(1.3));
  EnsembleSpec rb;
  rb.kind = EnsembleKind::RandomBasisGaussian;
  rb.dim = 32;
  CHECK(form_factor_theory_mean(rb, 0.7) == gaussian_charfn(0.7));
}

TEST_CASE("GUE form factor tracks the semicircle characteristic function") {
  const std::vector<double> grid = {0.5, 1.0, 2.0};
  const auto est = estimate_form_factor(gue(32), grid, 60, {79, 0});
  for (const auto& e : est) {
    const double theory = semicircle_charfn(e.t);
    CHECK(std::abs(e.mean.real() - theory) < 3.0 * e.std_error + 0.05);
    CHECK(std::abs(e.mean.imag()) < 3.0 * e.std_error + 0.05);
  }
}

TEST_CASE("diagonal Gaussian variance matches the closed form") {
  const Index d = 64;
  const std::vector<double> grid = {1.0};
  const auto est = estimate_form_factor(diag_gaussian(d), grid, 2000, {83, 0});
  const double theory = gaussian_trace_variance(d, 1.0);
  CHECK(std::abs(est[0].variance - theory) / theory < 0.10);
}

TEST_CASE("variance bound checker labels and flags") {
  // Synthetic rows exercise the checker without Monte Carlo noise.
  std::vector<FormFactorEstimate> est(2);
  est[0].t = 5.0;
  est[0].variance = 10.0;  // far below d = 64: fine
  est[0].n_samples = 1000;
  est[1].t = 6.0;
  est[1].variance = 500.0;  // way above d = 64: flagged
  est[1].n_samples = 1000;
  const auto report = check_variance_bounds(est, gue(64), 0.3);
  REQUIRE(!report.rows.empty());
  bool found_flag = false;
  for (const auto& row : report.rows) {
    CHECK(!row.label.empty());
    if (row.flagged) found_flag = true;
  }
  CHECK(found_flag);
  CHECK(report.n_flagged >= 1);

  // Gaussian model: variance equal to the closed form passes.
  std::vector<FormFactorEstimate> good(1);
  good[0].t = 1.0;
  good[0].variance = gaussian_trace_variance(64, 1.0);
  good[0].n_samples = 1000;
  const auto ok = check_variance_bounds(good, diag_gaussian(64), 0.3);
  CHECK(ok.n_flagged == 0);
}

TEST_CASE("trace concentration tail rows stay below their bounds") {
  const std::vector<double> deltas = {0.3, 0.5};
  const auto rows = trace_concentration_tail(gue(32), 1.0, deltas, 400, {89, 0});
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.frequency >= 0.0);
    CHECK(row.frequency <= 1.0);
    CHECK(row.bound == doctest::Approx(2.0 * std::exp(-32.0 * 32.0 * row.delta * row.delta /
                                                      4.0)).epsilon(1e-12));
    CHECK(!row.flagged);
  }
}
