#include "rmtlab/linalg.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace rmtlab {

namespace {

void require_square_finite(const ComplexMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw std::invalid_argument(std::string(what) + ": matrix must be square and nonempty");
  if (!m.allFinite())
    throw std::invalid_argument(std::string(what) + ": matrix has non-finite entries");
}

}  // namespace

HermitianMatrix::HermitianMatrix(const ComplexMatrix& raw) {
  require_square_finite(raw, "HermitianMatrix");
  m_ = 0.5 * (raw + raw.adjoint().eval());
  // Symmetrization can leave tiny imaginary dust on the diagonal.
  for (Index i = 0; i < m_.rows(); ++i) m_(i, i) = Complex(m_(i, i).real(), 0.0);
}

HermitianMatrix HermitianMatrix::from_diagonal(const RealVector& diag) {
  if (diag.size() == 0) throw std::invalid_argument("HermitianMatrix: empty diagonal");
  ComplexMatrix m = ComplexMatrix::Zero(diag.size(), diag.size());
  for (Index i = 0; i < diag.size(); ++i) m(i, i) = Complex(diag[i], 0.0);
  return HermitianMatrix(m);
}

UnitaryMatrix::UnitaryMatrix(ComplexMatrix m) : m_(std::move(m)) {
  require_square_finite(m_, "UnitaryMatrix");
  const Index d = m_.rows();
  const double defect =
      (m_ * m_.adjoint() - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  const double tol = 1e-10 * static_cast<double>(d);
  if (defect > tol)
    throw std::invalid_argument("UnitaryMatrix: U U^dag deviates from identity by " +
                                std::to_string(defect));
}

UnitaryMatrix UnitaryMatrix::identity(Index d) {
  if (d <= 0) throw std::invalid_argument("UnitaryMatrix::identity: d must be positive");
  return UnitaryMatrix(ComplexMatrix::Identity(d, d), Unchecked{});
}

UnitaryMatrix UnitaryMatrix::from_phases(const RealVector& phases) {
  if (phases.size() == 0) throw std::invalid_argument("UnitaryMatrix::from_phases: empty");
  ComplexMatrix m = ComplexMatrix::Zero(phases.size(), phases.size());
  for (Index i = 0; i < phases.size(); ++i)
    m(i, i) = std::polar(1.0, phases[i]);
  return UnitaryMatrix(std::move(m), Unchecked{});
}

PureState::PureState(ComplexVector amplitudes) : a_(std::move(amplitudes)) {
  if (a_.size() == 0) throw std::invalid_argument("PureState: empty amplitude vector");
  if (!a_.allFinite()) throw std::invalid_argument("PureState: non-finite amplitudes");
  const double norm = a_.norm();
  if (std::abs(norm - 1.0) > 1e-12)
    throw std::invalid_argument("PureState: norm deviates from 1 by " +
                                std::to_string(std::abs(norm - 1.0)));
}

PureState PureState::basis_state(Index d, Index k) {
  if (d <= 0 || k < 0 || k >= d)
    throw std::invalid_argument("PureState::basis_state: index out of range");
  ComplexVector a = ComplexVector::Zero(d);
  a[k] = Complex(1.0, 0.0);
  return PureState(std::move(a));
}

Spectrum eig_hermitian(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eig_hermitian: eigensolver failed to converge");
  Spectrum s;
  s.eigenvalues = solver.eigenvalues();
  s.eigenvectors = solver.eigenvectors();
  // Fix each eigenvector's free phase: first component above threshold is made
  // real positive, so repeated runs return identical matrices.
  for (Index j = 0; j < s.eigenvectors.cols(); ++j) {
    Index lead = 0;
    for (Index i = 0; i < s.eigenvectors.rows(); ++i) {
      if (std::abs(s.eigenvectors(i, j)) > 1e-12) {
        lead = i;
        break;
      }
    }
    const Complex v = s.eigenvectors(lead, j);
    const double mag = std::abs(v);
    if (mag > 0.0) s.eigenvectors.col(j) *= std::conj(v) / mag;
  }
  return s;
}

UnitaryMatrix evolve(const Spectrum& s, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("evolve: t must be finite");
  const Index d = s.eigenvalues.size();
  if (d == 0 || s.eigenvectors.rows() != d || s.eigenvectors.cols() != d)
    throw std::invalid_argument("evolve: inconsistent spectrum");
  ComplexVector phases(d);
  for (Index k = 0; k < d; ++k) phases[k] = std::polar(1.0, -s.eigenvalues[k] * t);
  ComplexMatrix u = s.eigenvectors * phases.asDiagonal() * s.eigenvectors.adjoint();
  return UnitaryMatrix(std::move(u));
}

UnitaryMatrix evolve(const HermitianMatrix& h, double t) {
  return evolve(eig_hermitian(h), t);
}

PureState apply_state(const UnitaryMatrix& u, const PureState& psi) {
  if (u.dim() != psi.dim())
    throw std::invalid_argument("apply_state: dimension mismatch");
  ComplexVector out = u.matrix() * psi.amplitudes();
  // Renormalize away the last-bit drift so the result stays a valid state.
  out /= out.norm();
  return PureState(std::move(out));
}

namespace {

constexpr char kMagic[4] = {'C', 'M', 'P', 'X'};
constexpr std::uint8_t kVersionByte = 1;

void put_u32_le(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32_le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error("CMPX: truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64_le(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64_le(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("CMPX: truncated payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_cmpx(std::ostream& out, const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument("write_cmpx: matrix must be square and nonempty");
  out.write(kMagic, 4);
  out.put(static_cast<char>(kVersionByte));
  put_u32_le(out, static_cast<std::uint32_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      put_f64_le(out, m(i, j).real());
      put_f64_le(out, m(i, j).imag());
    }
  }
  if (!out) throw std::runtime_error("write_cmpx: stream write failed");
}

ComplexMatrix read_cmpx(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("CMPX: bad magic");
  const int version = in.get();
  if (version != kVersionByte)
    throw std::runtime_error("CMPX: unsupported version " + std::to_string(version));
  const std::uint32_t d = get_u32_le(in);
  if (d == 0 || d > (1u << 16))
    throw std::runtime_error("CMPX: implausible dimension " + std::to_string(d));
  ComplexMatrix m(d, d);
  for (std::uint32_t i = 0; i < d; ++i) {
    for (std::uint32_t j = 0; j < d; ++j) {
      const double re = get_f64_le(in);
      const double im = get_f64_le(in);
      m(static_cast<Index>(i), static_cast<Index>(j)) = Complex(re, im);
    }
  }
  return m;
}

void write_cmpx_file(const std::string& path, const ComplexMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_cmpx_file: cannot open " + path);
  write_cmpx(out, m);
}

ComplexMatrix read_cmpx_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_cmpx_file: cannot open " + path);
  ComplexMatrix m = read_cmpx(in);
  // A single-matrix file must end right after the payload.
  in.peek();
  if (!in.eof()) throw std::runtime_error("read_cmpx_file: trailing bytes in " + path);
  return m;
}

}  // namespace rmtlab
