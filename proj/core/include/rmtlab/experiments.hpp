// Orchestrated experiments: escape-time curves and scalings, state escape,
// torus equidistribution probes, and the three-panel jump-figure bundle.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "rmtlab/complexity.hpp"
#include "rmtlab/ensembles.hpp"
#include "rmtlab/metrics.hpp"

namespace rmtlab {

struct EscapeCurve {
  EnsembleSpec spec;
  double eps = 0.0;
  ChannelMetric metric = ChannelMetric::Diamond;
  std::vector<double> t_grid;
  std::vector<double> stay_prob;  // P(distance from identity < eps)
  std::vector<double> std_error;  // binomial
  int n_samples = 0;
  double t_escape = 0.0;  // first 0.5 crossing, linearly interpolated; NaN if none
};

// Distances from the identity depend only on the eigenphase multiset, so each
// trial samples a spectrum, never a full unitary.
EscapeCurve escape_curve(const EnsembleSpec& spec, double eps, ChannelMetric metric,
                         std::span<const double> t_grid, int n_samples, SeedStream s,
                         int jobs = 0);

struct EscapeScalingReport {
  std::vector<double> eps_grid;
  std::vector<double> t_escape;  // per eps; NaN when the curve never crossed
  double slope = 0.0;            // log t_escape vs log eps
  double intercept = 0.0;
  double slope_stderr = 0.0;
  int n_used = 0;
};

EscapeScalingReport escape_scaling_fit(const EnsembleSpec& spec, std::span<const double> eps_grid,
                                       ChannelMetric metric, std::span<const double> t_grid,
                                       int n_samples, SeedStream s, int jobs = 0);

struct CollapseRow {
  Index d = 0;
  double t_escape = 0.0;
  double collapsed = 0.0;  // t_escape * sqrt(log d)
};

struct CollapseReport {
  std::vector<CollapseRow> rows;
  double spread = 0.0;  // (max - min) / mean of the collapsed values
};

// t_escape sqrt(log d) across dimensions for the Gaussian-spectrum models.
CollapseReport gaussian_collapse(EnsembleKind kind, std::span<const Index> d_grid, double eps,
                                 ChannelMetric metric, std::span<const double> t_grid,
                                 int n_samples, SeedStream s, int jobs = 0);

struct StateEscapeCurve {
  EnsembleSpec spec;
  double eps = 0.0;
  std::vector<double> t_grid;
  std::vector<double> stay_prob;  // P(trace distance from the initial state < eps)
  std::vector<double> std_error;
  int n_samples = 0;
  double t_escape = 0.0;
};

// Trace distance of U_t |0> from |0> needs only the spectrum and the initial
// state's weights in the eigenbasis: |<0|U_t|0>|^2 = |sum_k w_k e^{-i l_k t}|^2.
StateEscapeCurve state_escape_curve(const EnsembleSpec& spec, double eps,
                                    std::span<const double> t_grid, int n_samples,
                                    SeedStream s, int jobs = 0);

struct BallMeasureEstimate {
  Index d = 0;
  double t = 0.0;
  std::vector<double> center;
  std::vector<double> eps_grid;
  std::vector<double> estimate;   // per eps, in [0, 1]
  std::vector<double> std_error;  // binomial
  long n_samples = 0;
};

// Fraction of i.i.d. N(0,1)-phase draws (lambda_i t mod 2pi) landing in the
// torus ball max_i |e^{i phi_i} - e^{i c_i}| < eps.
BallMeasureEstimate torus_ball_measure(Index d, double t, std::span<const double> center,
                                       std::span<const double> eps_grid, long n_samples,
                                       SeedStream s, int jobs = 0);

// Same sampling, but the hit test is the diamond distance between the drawn
// diagonal channel and the diagonal channel with the center phases.
BallMeasureEstimate diagonal_ball_diamond_probe(Index d, double t,
                                                std::span<const double> center,
                                                std::span<const double> eps_grid,
                                                long n_samples, SeedStream s, int jobs = 0);

// Exact d = 1 ball measure: P(|e^{i lambda t} - e^{i c}| < eps) for
// lambda ~ N(0,1), via the wrapped-Gaussian interval sum.
double wrapped_gaussian_ball_measure(double center, double eps, double t);

// Slope of log(estimate) vs log(eps) with the standard OLS error.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  int n_used = 0;
};
SlopeFit loglog_slope(std::span<const double> x, std::span<const double> y);

struct JumpFigureParams {
  EnsembleSpec spec;                 // shared by the escape and complexity panels
  GateSet gs;                        // dim must match spec (d <= 4)
  double eps = 0.2;
  std::vector<double> t_grid;
  int n_samples = 100;
  int max_len = 10;
  ChannelMetric metric = ChannelMetric::Diamond;
  std::vector<double> avoid_eps;     // ball-avoidance panel; inadmissible entries skipped
  int n_avoid = 200;
  std::uint64_t seed = 0;
  int jobs = 0;
};

// Writes escape.csv, complexity_jump.csv, ball_avoidance.csv, and
// manifest.txt into dir; returns the file paths. Same seed => same bytes.
std::vector<std::string> write_jump_figure_bundle(const std::string& dir,
                                                  const JumpFigureParams& params,
                                                  const std::string& tool_line);

// CSV emitters shared by the bundle and the CLI.
void write_escape_csv(const std::string& path, const EscapeCurve& curve,
                      const std::string& tool_line, std::uint64_t seed,
                      std::uint64_t stream_base);
void write_state_escape_csv(const std::string& path, const StateEscapeCurve& curve,
                            const std::string& tool_line, std::uint64_t seed,
                            std::uint64_t stream_base);
void write_ball_measure_csv(const std::string& path, const BallMeasureEstimate& est,
                            const std::string& tool_line, std::uint64_t seed,
                            std::uint64_t stream_base);

}  // namespace rmtlab
