#include "rmtlab/circuit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rmtlab/metrics.hpp"

namespace rmtlab {
namespace {

int qubit_count_of(std::size_t size) {
  if (size == 0 || (size & (size - 1)) != 0)
    throw std::invalid_argument("diagonal length must be a power of two");
  const int n = std::bit_width(size) - 1;
  if (n > kMaxQubits) throw std::invalid_argument("too many qubits (budget is 20)");
  return n;
}

void check_qubit(int q, int n, const char* what) {
  if (q < 0 || q >= n) throw std::invalid_argument(std::string(what) + ": qubit out of range");
}

std::string format_angle(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

WalshCoefficients walsh_decompose(std::span<const double> diag) {
  WalshCoefficients wc;
  wc.n = qubit_count_of(diag.size());
  wc.lambda.assign(diag.begin(), diag.end());
  const std::size_t size = wc.lambda.size();
  for (std::size_t len = 1; len < size; len <<= 1) {
    for (std::size_t i = 0; i < size; i += len << 1) {
      for (std::size_t j = i; j < i + len; ++j) {
        const double x = wc.lambda[j];
        const double y = wc.lambda[j + len];
        wc.lambda[j] = x + y;
        wc.lambda[j + len] = x - y;
      }
    }
  }
  const double scale = 1.0 / static_cast<double>(size);
  for (double& v : wc.lambda) v *= scale;
  return wc;
}

std::vector<double> walsh_reconstruct(const WalshCoefficients& wc) {
  std::vector<double> diag = wc.lambda;
  const std::size_t size = diag.size();
  if (size != (std::size_t{1} << wc.n))
    throw std::invalid_argument("walsh_reconstruct: coefficient count != 2^n");
  for (std::size_t len = 1; len < size; len <<= 1) {
    for (std::size_t i = 0; i < size; i += len << 1) {
      for (std::size_t j = i; j < i + len; ++j) {
        const double x = diag[j];
        const double y = diag[j + len];
        diag[j] = x + y;
        diag[j + len] = x - y;
      }
    }
  }
  return diag;
}

Gate Gate::cnot(int control, int target) {
  if (control == target) throw std::invalid_argument("CNOT: control equals target");
  Gate g;
  g.kind = GateKind::Cnot;
  g.a = control;
  g.b = target;
  return g;
}

Gate Gate::rz(int qubit, double angle) {
  Gate g;
  g.kind = GateKind::Rz;
  g.a = qubit;
  g.angle = angle;
  return g;
}

Gate rz_quantized(int qubit, double angle, double delta) {
  if (delta <= 0.0) throw std::invalid_argument("rz_quantized: delta must be positive");
  // A grid of spacing 2 asin(delta/2) keeps the rotation error
  // 2|sin(eta/4)| <= delta for any rounding |eta| <= spacing/2; delta >= 2
  // collapses the grid to multiples of pi (any angle is then acceptable).
  const double spacing = 2.0 * std::asin(std::min(delta, 2.0) / 2.0);
  Gate g;
  g.kind = GateKind::Rzq;
  g.a = qubit;
  g.angle = std::round(angle / spacing) * spacing;
  g.delta = delta;
  return g;
}

Conjugator build_conjugator(unsigned mask, int n) {
  if (mask == 0) throw std::invalid_argument("build_conjugator: mask must be nonzero");
  if (n < 1 || n > kMaxQubits || mask >= (1u << n))
    throw std::invalid_argument("build_conjugator: mask out of range");
  Conjugator c;
  c.pivot = std::countr_zero(mask);
  for (int j = c.pivot + 1; j < n; ++j)
    if ((mask >> j) & 1u) c.cnots.push_back(Gate::cnot(j, c.pivot));
  return c;
}

Circuit compile_diagonal(std::span<const double> diag, double t, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("compile_diagonal: eps must be positive");
  const WalshCoefficients wc = walsh_decompose(diag);

  std::vector<unsigned> masks;
  for (std::size_t a = 1; a < wc.lambda.size(); ++a)
    if (wc.lambda[a] != 0.0) masks.push_back(static_cast<unsigned>(a));

  Circuit c;
  c.n = wc.n;
  if (masks.empty()) return c;
  const double delta = eps / static_cast<double>(masks.size());

  for (unsigned mask : masks) {  // ascending mask order for determinism
    const Conjugator conj = build_conjugator(mask, wc.n);
    // e^{-i t lambda Z^mask} conjugates to RZ(2 t lambda) on the pivot.
    const Gate rot = rz_quantized(conj.pivot, 2.0 * t * wc.lambda[mask], delta);
    if (rot.angle == 0.0) continue;  // quantizing to zero elides the whole term
    c.gates.insert(c.gates.end(), conj.cnots.begin(), conj.cnots.end());
    c.gates.push_back(rot);
    c.gates.insert(c.gates.end(), conj.cnots.rbegin(), conj.cnots.rend());
  }
  return c;
}

GateCounts gate_counts(const Circuit& c) {
  GateCounts gc;
  for (const Gate& g : c.gates) {
    if (g.kind == GateKind::Cnot)
      ++gc.cnot;
    else
      ++gc.rotation;
  }
  gc.total = gc.cnot + gc.rotation;
  return gc;
}

MonomialUnitary simulate_monomial(const Circuit& c) {
  if (c.n < 0 || c.n > kMaxQubits) throw std::invalid_argument("simulate: bad qubit count");
  const std::size_t size = std::size_t{1} << c.n;
  MonomialUnitary m;
  m.perm.resize(size);
  m.phase.assign(size, std::complex<double>(1.0, 0.0));
  for (std::size_t x = 0; x < size; ++x) m.perm[x] = static_cast<std::uint32_t>(x);

  for (const Gate& g : c.gates) {
    if (g.kind == GateKind::Cnot) {
      check_qubit(g.a, c.n, "CNOT control");
      check_qubit(g.b, c.n, "CNOT target");
      if (g.a == g.b) throw std::invalid_argument("CNOT: control equals target");
      for (std::size_t x = 0; x < size; ++x) {
        const std::uint32_t y = m.perm[x];
        m.perm[x] = y ^ (((y >> g.a) & 1u) << g.b);
      }
    } else {
      check_qubit(g.a, c.n, "RZ qubit");
      const std::complex<double> up = std::polar(1.0, -g.angle / 2.0);
      const std::complex<double> down = std::polar(1.0, g.angle / 2.0);
      for (std::size_t x = 0; x < size; ++x)
        m.phase[x] *= ((m.perm[x] >> g.a) & 1u) ? down : up;
    }
  }
  return m;
}

double verify_circuit(const Circuit& c, std::span<const double> diag, double t) {
  if (diag.size() != (std::size_t{1} << c.n))
    throw std::invalid_argument("verify_circuit: diagonal length != 2^n");
  const MonomialUnitary m = simulate_monomial(c);
  for (std::size_t x = 0; x < m.perm.size(); ++x)
    if (m.perm[x] != x)
      throw std::runtime_error(
          "verify_circuit: compiled permutation is not the identity (unbalanced conjugators)");

  // Both unitaries are diagonal; the projective operator-norm distance is
  // 2 sin(arc/4) for the smallest arc covering the relative phases.
  std::vector<double> rel(m.perm.size());
  for (std::size_t x = 0; x < rel.size(); ++x)
    rel[x] = std::arg(m.phase[x] * std::polar(1.0, diag[x] * t));
  const CoveringArc arc = smallest_covering_arc(std::move(rel));
  return 2.0 * std::sin(arc.length / 4.0);
}

void write_circuit(std::ostream& out, const Circuit& c) {
  out << "QUBITS " << c.n << "\n";
  for (const Gate& g : c.gates) {
    switch (g.kind) {
      case GateKind::Cnot:
        out << "CNOT " << g.a << " " << g.b << "\n";
        break;
      case GateKind::Rz:
        out << "RZ " << g.a << " " << format_angle(g.angle) << "\n";
        break;
      case GateKind::Rzq:
        out << "RZQ " << g.a << " " << format_angle(g.angle) << " " << format_angle(g.delta)
            << "\n";
        break;
    }
  }
}

void write_circuit_file(const std::string& path, const Circuit& c,
                        const std::string& header_comment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  write_circuit(out, c);
}

Circuit read_circuit(std::istream& in) {
  Circuit c;
  c.n = -1;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (c.n < 0) {
      if (kw != "QUBITS") throw std::runtime_error("circuit file: expected QUBITS header");
      if (!(ls >> c.n) || c.n < 0 || c.n > kMaxQubits)
        throw std::runtime_error("circuit file: bad qubit count");
      continue;
    }
    Gate g;
    if (kw == "CNOT") {
      int a = 0;
      int b = 0;
      if (!(ls >> a >> b)) throw std::runtime_error("circuit file: bad CNOT line");
      g = Gate::cnot(a, b);
    } else if (kw == "RZ") {
      int q = 0;
      double angle = 0.0;
      if (!(ls >> q >> angle)) throw std::runtime_error("circuit file: bad RZ line");
      g = Gate::rz(q, angle);
    } else if (kw == "RZQ") {
      int q = 0;
      double angle = 0.0;
      double delta = 0.0;
      if (!(ls >> q >> angle >> delta)) throw std::runtime_error("circuit file: bad RZQ line");
      g.kind = GateKind::Rzq;
      g.a = q;
      g.angle = angle;
      g.delta = delta;
    } else {
      throw std::runtime_error("circuit file: unknown gate " + kw);
    }
    check_qubit(g.a, c.n, "circuit file gate");
    if (g.kind == GateKind::Cnot) check_qubit(g.b, c.n, "circuit file gate");
    c.gates.push_back(g);
  }
  if (c.n < 0) throw std::runtime_error("circuit file: missing QUBITS header");
  return c;
}

Circuit read_circuit_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open circuit file: " + path);
  return read_circuit(in);
}

GateCountReport gate_count_report(std::span<const int> n_list,
                                  std::span<const double> eps_list, double t, SeedStream s) {
  if (n_list.empty() || eps_list.empty())
    throw std::invalid_argument("gate_count_report: empty grid");
  GateCountReport rep;
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const int n = n_list[ni];
    if (n < 1 || n > kMaxQubits) throw std::invalid_argument("gate_count_report: bad n");
    GaussianStream gs(s.at(ni));
    std::vector<double> diag(std::size_t{1} << n);
    for (double& v : diag) v = gs.real();
    for (double eps : eps_list) {
      const Circuit c = compile_diagonal(diag, t, eps);
      GateCountRow row;
      row.n = n;
      row.eps = eps;
      row.counts = gate_counts(c);
      row.bound = 4.0 * n * std::pow(2.0, n) * (n + std::log2(1.0 / eps));
      row.error = verify_circuit(c, diag, t);
      rep.rows.push_back(row);
    }
  }

  // Fit total ~ a * n 2^n * (b + ln(1/eps)) by minimizing the worst relative
  // residual; coarse grid plus shrinking refinement around the best cell.
  auto max_residual = [&](double a, double b) {
    double worst = 0.0;
    for (const auto& row : rep.rows) {
      const double x = static_cast<double>(row.n) * std::pow(2.0, row.n);
      const double model = a * x * (b + std::log(1.0 / row.eps));
      const double denom = static_cast<double>(row.counts.total);
      worst = std::max(worst, std::abs(model - denom) / denom);
    }
    return worst;
  };

  double lo_a = 0.005;
  double hi_a = 5.0;
  double lo_b = 0.0;
  double hi_b = 12.0;
  double best_a = lo_a;
  double best_b = lo_b;
  double best_r = max_residual(best_a, best_b);
  for (int round = 0; round < 4; ++round) {
    constexpr int kSteps = 160;
    for (int ia = 0; ia <= kSteps; ++ia) {
      const double a = lo_a + (hi_a - lo_a) * ia / kSteps;
      for (int ib = 0; ib <= kSteps; ++ib) {
        const double b = lo_b + (hi_b - lo_b) * ib / kSteps;
        const double r = max_residual(a, b);
        if (r < best_r) {
          best_r = r;
          best_a = a;
          best_b = b;
        }
      }
    }
    const double span_a = (hi_a - lo_a) / 8.0;
    const double span_b = (hi_b - lo_b) / 8.0;
    lo_a = std::max(1e-6, best_a - span_a);
    hi_a = best_a + span_a;
    lo_b = std::max(0.0, best_b - span_b);
    hi_b = best_b + span_b;
  }
  rep.fit.a = best_a;
  rep.fit.b = best_b;
  rep.fit.max_rel_residual = best_r;
  return rep;
}

}  // namespace rmtlab
