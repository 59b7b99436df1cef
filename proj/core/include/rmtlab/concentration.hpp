// Haar-measure probes: expected distance from a conjugated unitary to the
// diagonal torus, second-moment identities, Lipschitz and concentration
// checks, ball-avoidance frequencies, and the Gaussian pair average that
// controls the state-side limit.
#pragma once

#include <span>
#include <vector>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/metrics.hpp"

namespace rmtlab {

// Operator norm of G - I for unitary G (largest |e^{i theta_j} - 1|).
double opnorm_minus_identity(const UnitaryMatrix& g);

struct TorusDistanceReport {
  double dhs_identity = 0.0;  // hs_proj_distance(G, I)
  double mc_mean = 0.0;
  double mc_std = 0.0;
  double std_error = 0.0;
  double max_sample = 0.0;
  int n_samples = 0;
  bool lower_ok = false;  // mc_mean + 3 std_error >= dhs/3
  bool upper_ok = false;  // every sample <= dhs + 1e-9
};

// Monte Carlo E_V dist(V G V^dag, torus) against the sandwich
// dhs(G, I)/3 <= E <= dhs(G, I).
TorusDistanceReport expected_torus_distance(const UnitaryMatrix& g, int n_samples,
                                            SeedStream s, int jobs = 0);

struct SecondMomentReport {
  double mc = 0.0;
  double closed_form = 0.0;  // (1 + |tr G|^2/d) / (d + 1)
  double std_error = 0.0;
  double rel_error = 0.0;
  int n_samples = 0;
};

// E_V |<i| V G V^dag |i>|^2. The projected row V^dag|i> is a Haar state, so
// the sample reduces to |<psi|G|psi>|^2 over Haar psi.
SecondMomentReport haar_second_moment_check(const UnitaryMatrix& g, int n_samples,
                                            SeedStream s, int jobs = 0);

struct LipschitzReport {
  double constant = 0.0;   // 2 ||G - I||_inf
  double max_ratio = 0.0;  // max |f(U)-f(V)| / (L ||U-V||_HS)
  int violations = 0;
  int n_pairs = 0;
};

// f(V) = dist(V G V^dag, torus) against |f(U)-f(V)| <= 2||G-I||_inf ||U-V||_HS.
LipschitzReport lipschitz_probe(const UnitaryMatrix& g, int n_pairs, SeedStream s,
                                int jobs = 0);

struct TailRow {
  double a = 0.0;
  double upper_freq = 0.0;  // P(f >= mean + a)
  double lower_freq = 0.0;  // P(f <= mean - a)
  double bound = 0.0;
  double slack = 0.0;  // 3 binomial standard errors at the bound
  bool ok = false;
};

struct ConcentrationTailReport {
  double mc_mean = 0.0;
  double lipschitz = 0.0;
  std::vector<TailRow> rows;
  int n_samples = 0;
};

// Tails of f(V) = dist(V G V^dag, torus) against exp(-(d-2) a^2 / (12 L^2)).
ConcentrationTailReport concentration_tail_probe(const UnitaryMatrix& g,
                                                 std::span<const double> a_grid,
                                                 int n_samples, SeedStream s, int jobs = 0);

struct BallAvoidanceReport {
  double eps = 0.0;
  double threshold = 0.0;  // eps sqrt(d)
  double frequency = 0.0;  // P(dist <= eps sqrt(d))
  double bound = 0.0;      // exp(-eps^2 d^2 / 384)
  double slack = 0.0;
  int hits = 0;
  int n_samples = 0;
  bool ok = false;
};

// Requires dhs(G, I) > 6 eps sqrt(d); throws otherwise.
BallAvoidanceReport ball_avoidance_estimate(const UnitaryMatrix& g, double eps,
                                            int n_samples, SeedStream s, int jobs = 0);

// A(beta) = E |Z| |alpha Z + beta W| for independent standard complex
// Gaussians with E|Z|^2 = 1 and alpha = sqrt(1 - beta^2). Evaluated by nested
// adaptive Simpson on the angular integral; tol is the absolute target.
double gaussian_pair_average(double beta, double tol = 1e-9);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long n = 0;
};
McEstimate gaussian_pair_average_mc(double beta, long n, SeedStream s, int jobs = 0);

struct LemmaFit {
  double c = 0.0;
  double beta0 = 0.0;
  std::vector<double> beta_grid;
  std::vector<double> a_values;
};

// Fit of 1 - A(beta)^2 >= c min(beta^2, beta0^2): for each candidate beta0
// take the worst grid ratio, then keep the candidate with the largest c.
LemmaFit gaussian_average_lemma_fit(std::span<const double> beta_grid,
                                    std::span<const double> beta0_candidates,
                                    double tol = 1e-9);

struct GaussApproxReport {
  double beta = 0.0;
  Index d = 0;
  Index k = 0;
  double mc = 0.0;         // d E |<k|V|0>||<k|V|phi>| over Haar frames
  double std_error = 0.0;
  double quadrature = 0.0;  // A(beta)
  double bias_allowance = 0.0;  // 5 / sqrt(d)
  int n_samples = 0;
  bool ok = false;
};

// Finite-d check of the Gaussian limit of d E |<k|V|0>||<k|V|phi>| with
// |<0|phi>| = sqrt(1 - beta^2).
GaussApproxReport gaussian_approximation_check(double beta, Index k, Index d,
                                               int n_samples, SeedStream s, int jobs = 0);

struct StateTorusReport {
  double beta = 0.0;        // |component of phi orthogonal to |0>|
  double mc_mean = 0.0;     // E sum_k |<k|V|0>||<k|V|phi>|
  double mc_std = 0.0;
  double std_error = 0.0;
  int n_samples = 0;
  int lipschitz_violations = 0;  // |f(U)-f(V)| <= ||U-V||_HS probe
  double lipschitz_max_ratio = 0.0;
  int n_pairs = 0;
  std::vector<TailRow> tails;  // P(Z >= sqrt(1-eps^2)) vs exp(-eps^2 d / 6)
};

StateTorusReport state_torus_expected_distance(const PureState& phi, int n_samples,
                                               int n_pairs, std::span<const double> eps_grid,
                                               SeedStream s, int jobs = 0);

}  // namespace rmtlab
