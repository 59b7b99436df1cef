// Brute-force epsilon-complexity over small discrete gate sets: breadth-first
// word enumeration with epsilon-net dedup, exact complexity queries for
// unitaries and states, the complexity-jump curve, and the union-bound
// diagnostic.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/metrics.hpp"

namespace rmtlab {

struct GateSet {
  Index dim = 0;
  std::vector<std::string> labels;
  std::vector<UnitaryMatrix> gates;

  std::size_t size() const { return gates.size(); }
  void validate() const;  // unitary gates, unique nonempty labels, equal dims
};

// Demo pair: an order-16 phase rotation diag(1, e^{i pi/8}) and the balanced
// involution (1/sqrt2) [[1,1],[1,-1]]. Universal for d = 2.
GateSet default_two_gate_set();

// File format: per gate one text label line, then one CMPX block.
GateSet read_gate_set_file(const std::string& path);
void write_gate_set_file(const std::string& path, const GateSet& gs);

struct Word {
  std::vector<int> letters;  // gate indices; realized = product in list order
  ComplexMatrix u;

  int length() const { return static_cast<int>(letters.size()); }
};

// Breadth-first closure: a candidate extension is kept only if its projective
// operator-norm distance to every kept word exceeds dedup_tol; pruned words
// are not extended. Words come back sorted by length (generation order).
// Throws if sum_{l <= max_len} |G|^l exceeds the budget.
std::vector<Word> enumerate_words(const GateSet& gs, int max_len, double dedup_tol,
                                  long budget = 1'000'000);

struct ComplexityAnswer {
  int value = 0;      // minimal kept-word length within eps; max_len + 1 if exceeds
  bool exceeds = false;
  double eps = 0.0;
  double dedup_tol = 0.0;  // bracket: C_{eps+tol} <= value <= C_{eps-tol}
};

// Minimal kept-word length within distance eps of u (distance <= eps).
// dedup_tol < 0 selects the default eps/4; values above eps/4 are rejected so
// the epsilon-net guard band stays within the bracket above.
ComplexityAnswer exact_unitary_complexity(const UnitaryMatrix& u, const GateSet& gs,
                                          double eps, int max_len, ChannelMetric metric,
                                          double dedup_tol = -1.0, long budget = 1'000'000);

ComplexityAnswer exact_state_complexity(const PureState& psi, const GateSet& gs,
                                        const PureState& psi0, double eps, int max_len,
                                        double dedup_tol = -1.0, long budget = 1'000'000);

// Reference implementations without any dedup or pruning; every product of
// length <= max_len is visited. Exponential; small instances only.
ComplexityAnswer exhaustive_unitary_complexity(const UnitaryMatrix& u, const GateSet& gs,
                                               double eps, int max_len, ChannelMetric metric,
                                               long budget = 1'000'000);
ComplexityAnswer exhaustive_state_complexity(const PureState& psi, const GateSet& gs,
                                             const PureState& psi0, double eps, int max_len,
                                             long budget = 1'000'000);

// Complexity of each kept word against a fixed word list (shared enumeration).
ComplexityAnswer complexity_against_words(const std::vector<Word>& words,
                                          const ComplexMatrix& u, double eps, int max_len,
                                          ChannelMetric metric, double dedup_tol);

struct ComplexityCurve {
  std::vector<double> t_grid;
  std::vector<int> values;  // value > max_len means "exceeds max_len"
  ChannelMetric metric = ChannelMetric::Diamond;
  double eps = 0.0;
  int max_len = 0;
};

struct JumpCurveReport {
  std::vector<double> t_grid;
  std::vector<ComplexityCurve> curves;   // one per sampled Hamiltonian
  std::vector<int> median;               // lower median across samples per t
  std::vector<double> frac_positive;     // fraction with complexity >= 1 per t
  double threshold_t = 0.0;              // first grid t with frac_positive >= 0.5; NaN if none
  std::size_t n_words = 0;
  ChannelMetric metric = ChannelMetric::Diamond;
  double eps = 0.0;
  int max_len = 0;
};

JumpCurveReport complexity_jump_curve(const EnsembleSpec& spec, const GateSet& gs, double eps,
                                      std::span<const double> t_grid, int n_samples,
                                      int max_len, ChannelMetric metric, SeedStream s,
                                      double dedup_tol = -1.0, long budget = 1'000'000,
                                      int jobs = 0);

struct UnionBoundRow {
  int word_index = 0;
  int length = 0;
  double frequency = 0.0;  // empirical P(U_t in B(word, eps)), open ball
};

struct UnionBoundReport {
  std::vector<UnionBoundRow> rows;
  double sum_frequencies = 0.0;
  double freq_low_complexity = 0.0;  // empirical P(some word of length < k within eps)
  int n_samples = 0;
  double t = 0.0;
  double eps = 0.0;
  int k = 0;
};

// Per-word hit frequencies over words of length < k. Dedup keeps only exact
// projective duplicates out (tol = 0), so the ball list matches G^{<k}.
UnionBoundReport union_bound_diagnostic(const EnsembleSpec& spec, const GateSet& gs,
                                        double eps, double t, int k, int n_samples,
                                        ChannelMetric metric, SeedStream s,
                                        long budget = 1'000'000, int jobs = 0);

}  // namespace rmtlab
