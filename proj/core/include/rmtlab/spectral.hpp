// Monte Carlo spectral form factor estimates and the variance/concentration
// checks that go with them.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "rmtlab/ensembles.hpp"

namespace rmtlab {

struct FormFactorEstimate {
  double t = 0.0;
  Complex mean;            // estimate of (1/d) E tr U_t
  double variance = 0.0;   // unbiased estimate of Var tr U_t
  double std_error = 0.0;  // standard error of the normalized mean
  int n_samples = 0;
};

// One spectrum draw per (seed, stream + trial); every t reuses the draw, so
// the estimates are correlated across t but cheap and unbiased pointwise.
std::vector<FormFactorEstimate> estimate_form_factor(const EnsembleSpec& spec,
                                                     std::span<const double> t_grid,
                                                     int n_samples, SeedStream s,
                                                     int jobs = 0);

// Closed-form reference mean for the ensemble: semicircle characteristic
// function for the GUE, exp(-t^2/2) for the Gaussian diagonal models.
double form_factor_theory_mean(const EnsembleSpec& spec, double t);

struct VarianceCheckRow {
  double t = 0.0;
  double variance = 0.0;  // empirical Var tr U_t
  double bound = 0.0;     // the bound or closed form being checked
  double slack = 0.0;     // multiplicative slack applied to the bound
  bool flagged = false;
  std::string label;      // names the bound for reports
};

struct VarianceCheckReport {
  std::vector<VarianceCheckRow> rows;
  int n_flagged = 0;
};

// GUE: flags t where Var tr U_t exceeds d (and the small-t refinement 4t^2/d)
// within Monte Carlo slack. Gaussian diagonal models: flags t where the
// empirical variance leaves the closed form d(1 - e^{-t^2}) by more than the
// slack. The small-t refinement is checked for t <= small_t_max.
VarianceCheckReport check_variance_bounds(const std::vector<FormFactorEstimate>& est,
                                          const EnsembleSpec& spec,
                                          double small_t_max = 0.3);

struct TraceTailRow {
  double delta = 0.0;
  double frequency = 0.0;  // empirical P(|tr cos(Ht) - mean| >= delta d)
  double bound = 0.0;      // 2 exp(-d^2 delta^2 / (4 t^2))
  double slack = 0.0;      // 3 binomial standard errors at the bound
  bool flagged = false;
};

// Concentration of tr cos(Ht) for the GUE at Lipschitz constant t.
std::vector<TraceTailRow> trace_concentration_tail(const EnsembleSpec& spec, double t,
                                                   std::span<const double> deltas,
                                                   int n_samples, SeedStream s,
                                                   int jobs = 0);

}  // namespace rmtlab
