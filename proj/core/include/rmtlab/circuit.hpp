// Compilation of e^{-iHt} for diagonal n-qubit Hamiltonians into CNOT +
// Z-rotation circuits via the Walsh expansion H = sum_a lambda_a Z^a, with
// exact error certification through monomial-matrix simulation.
#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rmtlab/rng.hpp"

namespace rmtlab {

inline constexpr int kMaxQubits = 20;

struct WalshCoefficients {
  int n = 0;
  std::vector<double> lambda;  // index = Z-mask; lambda[0] is the global phase term
};

// lambda_a = 2^{-n} sum_x (-1)^{a.x} diag_x (fast transform, O(n 2^n)).
WalshCoefficients walsh_decompose(std::span<const double> diag);
// diag_x = sum_a lambda_a (-1)^{a.x}.
std::vector<double> walsh_reconstruct(const WalshCoefficients& wc);

enum class GateKind { Cnot, Rz, Rzq };

struct Gate {
  GateKind kind = GateKind::Cnot;
  int a = 0;           // CNOT control, or rotation qubit
  int b = 0;           // CNOT target
  double angle = 0.0;  // RZ(theta) = diag(e^{-i theta/2}, e^{+i theta/2}) on the qubit
  double delta = 0.0;  // RZQ quantization budget

  static Gate cnot(int control, int target);
  static Gate rz(int qubit, double angle);
};

// Angle rounded to the grid with spacing 2 asin(min(delta,2)/2), so the
// operator-norm rotation error stays <= delta.
Gate rz_quantized(int qubit, double angle, double delta);

struct Circuit {
  int n = 0;
  std::vector<Gate> gates;  // applied first-to-last (left multiplication)
};

struct Conjugator {
  std::vector<Gate> cnots;  // CNOT(j -> pivot) for the non-pivot support bits
  int pivot = 0;            // lowest set bit of the mask
};

// V with V Z_pivot V^dag = Z^mask, using |support| - 1 CNOTs.
Conjugator build_conjugator(unsigned mask, int n);

// For each mask a != 0 with lambda_a != 0 (ascending a): conjugator, quantized
// rotation by 2 t lambda_a on the pivot, conjugator reversed. Per-term budget
// delta = eps / #terms; rotations that quantize to zero are elided together
// with their conjugators. The a = 0 term is a global phase and is dropped.
Circuit compile_diagonal(std::span<const double> diag, double t, double eps);

struct GateCounts {
  long cnot = 0;
  long rotation = 0;
  long total = 0;
};
GateCounts gate_counts(const Circuit& c);

// Realized unitary of a CNOT/RZ circuit in monomial form:
// M |x> = phase[x] |perm[x]>.
struct MonomialUnitary {
  std::vector<std::uint32_t> perm;
  std::vector<std::complex<double>> phase;
};
MonomialUnitary simulate_monomial(const Circuit& c);

// Projective operator-norm error of the circuit against e^{-i diag t}; the
// compiled permutation part must be the identity (structural error if not).
double verify_circuit(const Circuit& c, std::span<const double> diag, double t);

// Text format: "QUBITS n" header, then one gate per line ("CNOT c t",
// "RZ q theta", "RZQ q theta delta"); '#' lines are comments. Angles carry 17
// significant digits so the round-trip is exact.
void write_circuit(std::ostream& out, const Circuit& c);
void write_circuit_file(const std::string& path, const Circuit& c,
                        const std::string& header_comment = "");
Circuit read_circuit(std::istream& in);
Circuit read_circuit_file(const std::string& path);

struct GateCountRow {
  int n = 0;
  double eps = 0.0;
  GateCounts counts;
  double bound = 0.0;  // 4 n 2^n (n + log2(1/eps))
  double error = 0.0;  // certified projective error from verify_circuit
};

struct GateCountFit {
  double a = 0.0;  // total ~ a * n 2^n * (b + ln(1/eps)); proxy constants for
  double b = 0.0;  // the quantized-rotation compiler, not literature values
  double max_rel_residual = 0.0;
};

struct GateCountReport {
  std::vector<GateCountRow> rows;
  GateCountFit fit;
};

// Compiles a fresh N(0,1) diagonal per n and tabulates counts over the eps
// grid; the fit minimizes the worst relative residual by grid refinement.
GateCountReport gate_count_report(std::span<const int> n_list,
                                  std::span<const double> eps_list, double t, SeedStream s);

}  // namespace rmtlab
