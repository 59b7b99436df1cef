// Dense complex linear algebra layer: validated matrix/state types, Hermitian
// eigendecomposition, time evolution exp(-iHt), and the CMPX binary matrix
// format shared by the tools.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <string>

namespace rmtlab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Hermitian by construction: the input is symmetrized as (M + M^dag)/2 so the
// stored matrix equals its own conjugate transpose exactly.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const ComplexMatrix& raw);
  static HermitianMatrix from_diagonal(const RealVector& diag);

  Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  ComplexMatrix m_;
};

// Unitarity is validated at construction: max entry of U U^dag - I must stay
// below an absolute tolerance scaled with dimension.
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(ComplexMatrix m);
  static UnitaryMatrix identity(Index d);
  static UnitaryMatrix from_phases(const RealVector& phases);  // diag(e^{i phi_k})

  Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  struct Unchecked {};
  UnitaryMatrix(ComplexMatrix m, Unchecked) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

class PureState {
 public:
  explicit PureState(ComplexVector amplitudes);
  static PureState basis_state(Index d, Index k);

  Index dim() const { return a_.size(); }
  const ComplexVector& amplitudes() const { return a_; }

 private:
  ComplexVector a_;
};

struct Spectrum {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // columns, phase-fixed (first sizable component real positive)
};

Spectrum eig_hermitian(const HermitianMatrix& h);

// U_t = exp(-i H t), built from the spectral decomposition.
UnitaryMatrix evolve(const Spectrum& s, double t);
UnitaryMatrix evolve(const HermitianMatrix& h, double t);

PureState apply_state(const UnitaryMatrix& u, const PureState& psi);

// CMPX binary format: magic "CMPX", one version byte (1), uint32 little-endian
// dimension, then 2*d^2 little-endian float64 values, row major, each entry as
// (real, imag). Round-trips are bit exact.
void write_cmpx(std::ostream& out, const ComplexMatrix& m);
ComplexMatrix read_cmpx(std::istream& in);
void write_cmpx_file(const std::string& path, const ComplexMatrix& m);
ComplexMatrix read_cmpx_file(const std::string& path);

}  // namespace rmtlab
