#include "rmtlab/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "rmtlab/parallel.hpp"

namespace rmtlab {
namespace {

// Distance between unitary products without re-validating unitarity; the
// enumeration multiplies gates that are already certified, and the metric
// only needs the eigenphases of v^dag u (or |tr| for Hilbert-Schmidt).
double raw_metric_distance(ChannelMetric m, const ComplexMatrix& u, const ComplexMatrix& v) {
  const Index d = u.rows();
  if (m == ChannelMetric::HsProj) {
    const double tr = std::abs((v.adjoint() * u).trace());
    return std::sqrt(std::max(0.0, 2.0 * static_cast<double>(d) - 2.0 * tr));
  }
  Eigen::ComplexEigenSolver<ComplexMatrix> es(v.adjoint() * u, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("complexity metric: eigensolver failed");
  std::vector<double> phases(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) phases[static_cast<std::size_t>(i)] = std::arg(es.eigenvalues()(i));
  return channel_distance_from_phases(m, phases);
}

double state_distance_to_word(const PureState& psi, const ComplexMatrix& w,
                              const PureState& psi0) {
  const Complex ov = psi.amplitudes().dot(w * psi0.amplitudes());
  return std::sqrt(std::max(0.0, 1.0 - std::norm(ov)));
}

void check_budget(std::size_t n_gates, int max_len, long budget) {
  // Candidate count at the deepest level; the kept set is at most the sum
  // over levels but the contract caps the per-level blowup.
  const double candidates = std::pow(static_cast<double>(n_gates), max_len);
  if (candidates > static_cast<double>(budget))
    throw std::invalid_argument("enumerate_words: |G|^max_len = " +
                                std::to_string(candidates) + " exceeds budget " +
                                std::to_string(budget));
}

double resolve_dedup_tol(double dedup_tol, double eps) {
  const double tol = dedup_tol < 0.0 ? eps / 4.0 : dedup_tol;
  if (tol > eps / 4.0 + 1e-15)
    throw std::invalid_argument("dedup_tol must be <= eps/4 to keep the guard band");
  return tol;
}

}  // namespace

void GateSet::validate() const {
  if (dim < 1) throw std::invalid_argument("gate set: dim must be >= 1");
  if (labels.size() != gates.size())
    throw std::invalid_argument("gate set: label/gate count mismatch");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    if (gates[i].dim() != dim) throw std::invalid_argument("gate set: dimension mismatch");
    if (labels[i].empty()) throw std::invalid_argument("gate set: empty label");
    if (!seen.insert(labels[i]).second)
      throw std::invalid_argument("gate set: duplicate label " + labels[i]);
  }
}

GateSet default_two_gate_set() {
  GateSet gs;
  gs.dim = 2;
  ComplexMatrix r(2, 2);
  r << Complex(1.0, 0.0), Complex(0.0, 0.0),
       Complex(0.0, 0.0), std::polar(1.0, std::numbers::pi / 8.0);
  ComplexMatrix h(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  h << Complex(s, 0.0), Complex(s, 0.0),
       Complex(s, 0.0), Complex(-s, 0.0);
  gs.labels = {"r16", "had"};
  gs.gates.emplace_back(r);
  gs.gates.emplace_back(h);
  return gs;
}

GateSet read_gate_set_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open gate set file: " + path);
  GateSet gs;
  std::string label;
  while (std::getline(in, label)) {
    if (label.empty() && in.peek() == std::ifstream::traits_type::eof()) break;
    if (label.empty()) throw std::runtime_error("gate set file: empty label line");
    const ComplexMatrix m = read_cmpx(in);
    if (gs.gates.empty()) gs.dim = m.rows();
    gs.labels.push_back(label);
    gs.gates.emplace_back(m);
  }
  if (gs.gates.empty()) throw std::runtime_error("gate set file has no gates: " + path);
  gs.validate();
  return gs;
}

void write_gate_set_file(const std::string& path, const GateSet& gs) {
  gs.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (std::size_t i = 0; i < gs.gates.size(); ++i) {
    out << gs.labels[i] << "\n";
    write_cmpx(out, gs.gates[i].matrix());
  }
}

std::vector<Word> enumerate_words(const GateSet& gs, int max_len, double dedup_tol,
                                  long budget) {
  gs.validate();
  if (max_len < 0) throw std::invalid_argument("enumerate_words: max_len must be >= 0");
  if (dedup_tol < 0.0) throw std::invalid_argument("enumerate_words: dedup_tol must be >= 0");
  check_budget(gs.size(), max_len, budget);

  std::vector<Word> kept;
  kept.push_back(Word{{}, ComplexMatrix::Identity(gs.dim, gs.dim)});
  std::vector<std::size_t> frontier{0};

  for (int len = 1; len <= max_len && !frontier.empty(); ++len) {
    std::vector<std::size_t> next;
    for (std::size_t idx : frontier) {
      for (std::size_t g = 0; g < gs.size(); ++g) {
        ComplexMatrix cand = kept[idx].u * gs.gates[g].matrix();
        bool fresh = true;
        for (const Word& w : kept) {
          if (raw_metric_distance(ChannelMetric::OpNormProj, cand, w.u) <= dedup_tol) {
            fresh = false;
            break;
          }
        }
        if (!fresh) continue;
        Word w;
        w.letters = kept[idx].letters;
        w.letters.push_back(static_cast<int>(g));
        w.u = std::move(cand);
        kept.push_back(std::move(w));
        next.push_back(kept.size() - 1);
      }
    }
    frontier = std::move(next);
  }
  return kept;
}

ComplexityAnswer complexity_against_words(const std::vector<Word>& words,
                                          const ComplexMatrix& u, double eps, int max_len,
                                          ChannelMetric metric, double dedup_tol) {
  ComplexityAnswer ans;
  ans.eps = eps;
  ans.dedup_tol = dedup_tol;
  for (const Word& w : words) {
    if (w.length() > max_len) break;  // generation order is by length
    if (raw_metric_distance(metric, u, w.u) <= eps) {
      ans.value = w.length();
      return ans;
    }
  }
  ans.value = max_len + 1;
  ans.exceeds = true;
  return ans;
}

ComplexityAnswer exact_unitary_complexity(const UnitaryMatrix& u, const GateSet& gs,
                                          double eps, int max_len, ChannelMetric metric,
                                          double dedup_tol, long budget) {
  if (eps <= 0.0) throw std::invalid_argument("complexity: eps must be positive");
  if (u.dim() != gs.dim) throw std::invalid_argument("complexity: dimension mismatch");
  const double tol = resolve_dedup_tol(dedup_tol, eps);
  const auto words = enumerate_words(gs, max_len, tol, budget);
  return complexity_against_words(words, u.matrix(), eps, max_len, metric, tol);
}

ComplexityAnswer exact_state_complexity(const PureState& psi, const GateSet& gs,
                                        const PureState& psi0, double eps, int max_len,
                                        double dedup_tol, long budget) {
  if (eps <= 0.0) throw std::invalid_argument("complexity: eps must be positive");
  if (psi.dim() != gs.dim || psi0.dim() != gs.dim)
    throw std::invalid_argument("complexity: dimension mismatch");
  const double tol = resolve_dedup_tol(dedup_tol, eps);
  const auto words = enumerate_words(gs, max_len, tol, budget);

  ComplexityAnswer ans;
  ans.eps = eps;
  ans.dedup_tol = tol;
  for (const Word& w : words) {
    if (w.length() > max_len) break;
    if (state_distance_to_word(psi, w.u, psi0) <= eps) {
      ans.value = w.length();
      return ans;
    }
  }
  ans.value = max_len + 1;
  ans.exceeds = true;
  return ans;
}

namespace {

// Shared breadth-first scan over all |G|^l products, no dedup: the reference
// answer for soundness checks. Visits levels in order and stops at the first
// level containing a hit.
template <typename HitFn>
ComplexityAnswer exhaustive_scan(const GateSet& gs, double eps, int max_len, long budget,
                                 HitFn&& hit) {
  gs.validate();
  if (eps <= 0.0) throw std::invalid_argument("complexity: eps must be positive");
  check_budget(gs.size(), max_len, budget);

  ComplexityAnswer ans;
  ans.eps = eps;
  ans.dedup_tol = 0.0;

  std::vector<ComplexMatrix> level{ComplexMatrix::Identity(gs.dim, gs.dim)};
  for (int len = 0; len <= max_len; ++len) {
    for (const ComplexMatrix& m : level) {
      if (hit(m)) {
        ans.value = len;
        return ans;
      }
    }
    if (len == max_len) break;
    std::vector<ComplexMatrix> next;
    next.reserve(level.size() * gs.size());
    for (const ComplexMatrix& m : level)
      for (std::size_t g = 0; g < gs.size(); ++g) next.push_back(m * gs.gates[g].matrix());
    level = std::move(next);
  }
  ans.value = max_len + 1;
  ans.exceeds = true;
  return ans;
}

}  // namespace

ComplexityAnswer exhaustive_unitary_complexity(const UnitaryMatrix& u, const GateSet& gs,
                                               double eps, int max_len, ChannelMetric metric,
                                               long budget) {
  if (u.dim() != gs.dim) throw std::invalid_argument("complexity: dimension mismatch");
  return exhaustive_scan(gs, eps, max_len, budget, [&](const ComplexMatrix& m) {
    return raw_metric_distance(metric, u.matrix(), m) <= eps;
  });
}

ComplexityAnswer exhaustive_state_complexity(const PureState& psi, const GateSet& gs,
                                             const PureState& psi0, double eps, int max_len,
                                             long budget) {
  if (psi.dim() != gs.dim || psi0.dim() != gs.dim)
    throw std::invalid_argument("complexity: dimension mismatch");
  return exhaustive_scan(gs, eps, max_len, budget, [&](const ComplexMatrix& m) {
    return state_distance_to_word(psi, m, psi0) <= eps;
  });
}

JumpCurveReport complexity_jump_curve(const EnsembleSpec& spec, const GateSet& gs, double eps,
                                      std::span<const double> t_grid, int n_samples,
                                      int max_len, ChannelMetric metric, SeedStream s,
                                      double dedup_tol, long budget, int jobs) {
  if (spec.dim != gs.dim) throw std::invalid_argument("jump curve: dimension mismatch");
  if (t_grid.empty()) throw std::invalid_argument("jump curve: empty t grid");
  if (n_samples < 1) throw std::invalid_argument("jump curve: need n >= 1");
  if (eps <= 0.0) throw std::invalid_argument("jump curve: eps must be positive");
  const double tol = resolve_dedup_tol(dedup_tol, eps);
  const auto words = enumerate_words(gs, max_len, tol, budget);

  const auto per_sample = parallel_map<std::vector<int>>(
      n_samples,
      [&](std::int64_t i) {
        const Spectrum sp = eig_hermitian(sample_hamiltonian(spec, s.at(i)));
        std::vector<int> values;
        values.reserve(t_grid.size());
        for (double t : t_grid) {
          const UnitaryMatrix u = evolve(sp, t);
          values.push_back(
              complexity_against_words(words, u.matrix(), eps, max_len, metric, tol).value);
        }
        return values;
      },
      jobs);

  JumpCurveReport rep;
  rep.t_grid.assign(t_grid.begin(), t_grid.end());
  rep.metric = metric;
  rep.eps = eps;
  rep.max_len = max_len;
  rep.n_words = words.size();
  rep.curves.reserve(static_cast<std::size_t>(n_samples));
  for (const auto& values : per_sample) {
    ComplexityCurve c;
    c.t_grid = rep.t_grid;
    c.values = values;
    c.metric = metric;
    c.eps = eps;
    c.max_len = max_len;
    rep.curves.push_back(std::move(c));
  }

  rep.threshold_t = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t ti = 0; ti < rep.t_grid.size(); ++ti) {
    std::vector<int> column;
    column.reserve(per_sample.size());
    int positive = 0;
    for (const auto& values : per_sample) {
      column.push_back(values[ti]);
      if (values[ti] >= 1) ++positive;
    }
    std::nth_element(column.begin(), column.begin() + (column.size() - 1) / 2, column.end());
    rep.median.push_back(column[(column.size() - 1) / 2]);
    const double frac = static_cast<double>(positive) / static_cast<double>(n_samples);
    rep.frac_positive.push_back(frac);
    if (std::isnan(rep.threshold_t) && frac >= 0.5) rep.threshold_t = rep.t_grid[ti];
  }
  return rep;
}

UnionBoundReport union_bound_diagnostic(const EnsembleSpec& spec, const GateSet& gs,
                                        double eps, double t, int k, int n_samples,
                                        ChannelMetric metric, SeedStream s,
                                        long budget, int jobs) {
  if (spec.dim != gs.dim) throw std::invalid_argument("union bound: dimension mismatch");
  if (k < 1) throw std::invalid_argument("union bound: need k >= 1");
  if (n_samples < 1) throw std::invalid_argument("union bound: need n >= 1");
  // tol = 0 prunes only exact projective duplicates, so the kept set is
  // exactly the distinct elements of G^{<k}; closed balls keep the union
  // bound sum >= P(complexity < k) true by construction.
  const auto words = enumerate_words(gs, k - 1, 0.0, budget);

  const auto per_sample = parallel_map<std::vector<std::uint8_t>>(
      n_samples,
      [&](std::int64_t i) {
        const Spectrum sp = eig_hermitian(sample_hamiltonian(spec, s.at(i)));
        const UnitaryMatrix u = evolve(sp, t);
        std::vector<std::uint8_t> hits(words.size(), 0);
        for (std::size_t w = 0; w < words.size(); ++w)
          hits[w] = raw_metric_distance(metric, u.matrix(), words[w].u) <= eps ? 1 : 0;
        return hits;
      },
      jobs);

  UnionBoundReport rep;
  rep.n_samples = n_samples;
  rep.t = t;
  rep.eps = eps;
  rep.k = k;
  const double nf = static_cast<double>(n_samples);
  long any = 0;
  for (const auto& hits : per_sample) {
    bool sample_any = false;
    for (auto h : hits) sample_any = sample_any || h != 0;
    if (sample_any) ++any;
  }
  rep.freq_low_complexity = static_cast<double>(any) / nf;
  for (std::size_t w = 0; w < words.size(); ++w) {
    long count = 0;
    for (const auto& hits : per_sample) count += hits[w];
    UnionBoundRow row;
    row.word_index = static_cast<int>(w);
    row.length = words[w].length();
    row.frequency = static_cast<double>(count) / nf;
    rep.rows.push_back(row);
    rep.sum_frequencies += row.frequency;
  }
  return rep;
}

}  // namespace rmtlab
