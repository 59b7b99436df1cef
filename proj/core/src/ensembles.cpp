#include "rmtlab/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rmtlab {

std::string ensemble_kind_name(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::Gue: return "gue";
    case EnsembleKind::DiagGaussian: return "diag-gaussian";
    case EnsembleKind::RandomBasisGaussian: return "random-basis-gaussian";
  }
  throw std::logic_error("ensemble_kind_name: bad kind");
}

EnsembleKind parse_ensemble_kind(const std::string& name) {
  if (name == "gue") return EnsembleKind::Gue;
  if (name == "diag-gaussian") return EnsembleKind::DiagGaussian;
  if (name == "random-basis-gaussian") return EnsembleKind::RandomBasisGaussian;
  throw std::invalid_argument("unknown ensemble kind: " + name);
}

std::string format_ensemble_spec(const EnsembleSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  out << "kind = " << ensemble_kind_name(spec.kind) << "\n";
  out << "dim = " << spec.dim << "\n";
  out << "sigma2 = " << spec.sigma2 << "\n";
  return out.str();
}

EnsembleSpec parse_ensemble_spec(const std::string& text) {
  EnsembleSpec spec;
  bool saw_kind = false, saw_dim = false;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw std::invalid_argument("ensemble spec: bad line '" + line + "'");
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "kind") {
      spec.kind = parse_ensemble_kind(val);
      saw_kind = true;
    } else if (key == "dim") {
      spec.dim = std::stoll(val);
      saw_dim = true;
    } else if (key == "sigma2") {
      spec.sigma2 = std::stod(val);
    } else {
      throw std::invalid_argument("ensemble spec: unknown key '" + key + "'");
    }
  }
  if (!saw_kind || !saw_dim)
    throw std::invalid_argument("ensemble spec: 'kind' and 'dim' are required");
  if (spec.dim <= 0) throw std::invalid_argument("ensemble spec: dim must be positive");
  return spec;
}

namespace {

ComplexMatrix gue_matrix_impl(Index d, double sigma2, GaussianStream& g) {
  const double sd = std::sqrt(sigma2);
  ComplexMatrix h(d, d);
  for (Index i = 0; i < d; ++i) {
    h(i, i) = Complex(sd * g.real(), 0.0);
    for (Index j = i + 1; j < d; ++j) {
      const Complex z = sd * g.complex_unit();
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  }
  return h;
}

RealVector iid_normal_impl(Index d, GaussianStream& g) {
  RealVector v(d);
  for (Index i = 0; i < d; ++i) v[i] = g.real();
  return v;
}

}  // namespace

HermitianMatrix sample_gue(Index d, double sigma2, SeedStream s) {
  if (d <= 0) throw std::invalid_argument("sample_gue: d must be positive");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sample_gue: sigma2 must be positive");
  GaussianStream g(s);
  return HermitianMatrix(gue_matrix_impl(d, sigma2, g));
}

HermitianMatrix sample_diag_gaussian(Index d, SeedStream s) {
  if (d <= 0) throw std::invalid_argument("sample_diag_gaussian: d must be positive");
  GaussianStream g(s);
  return HermitianMatrix::from_diagonal(iid_normal_impl(d, g));
}

namespace {

// Shared Ginibre + QR core. Phase-fixing the R diagonal removes the sign/phase
// ambiguity of the factorization and yields the Haar measure.
ComplexMatrix haar_columns_impl(Index d, Index ncols, GaussianStream& g) {
  ComplexMatrix z(d, ncols);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < ncols; ++j) z(i, j) = g.complex_unit();
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, ncols);
  const ComplexMatrix r = qr.matrixQR().topRows(ncols).triangularView<Eigen::Upper>();
  for (Index j = 0; j < ncols; ++j) {
    const Complex rjj = r(j, j);
    const double mag = std::abs(rjj);
    if (mag > 0.0) q.col(j) *= std::conj(rjj) / mag;
  }
  return q;
}

}  // namespace

UnitaryMatrix sample_haar_unitary(Index d, SeedStream s) {
  if (d <= 0) throw std::invalid_argument("sample_haar_unitary: d must be positive");
  GaussianStream g(s);
  return UnitaryMatrix(haar_columns_impl(d, d, g));
}

ComplexMatrix sample_haar_columns(Index d, Index ncols, SeedStream s) {
  if (d <= 0 || ncols <= 0 || ncols > d)
    throw std::invalid_argument("sample_haar_columns: need 0 < ncols <= d");
  GaussianStream g(s);
  return haar_columns_impl(d, ncols, g);
}

HermitianMatrix sample_random_basis_gaussian(Index d, SeedStream s) {
  if (d <= 0) throw std::invalid_argument("sample_random_basis_gaussian: d must be positive");
  // One stream feeds both draws; order (eigenvalues, then basis) is fixed.
  GaussianStream g(s);
  const RealVector diag = iid_normal_impl(d, g);
  const ComplexMatrix v = haar_columns_impl(d, d, g);
  ComplexMatrix h = v * diag.asDiagonal() * v.adjoint();
  return HermitianMatrix(h);
}

HermitianMatrix sample_hamiltonian(const EnsembleSpec& spec, SeedStream s) {
  switch (spec.kind) {
    case EnsembleKind::Gue: return sample_gue(spec.dim, spec.gue_sigma2(), s);
    case EnsembleKind::DiagGaussian: return sample_diag_gaussian(spec.dim, s);
    case EnsembleKind::RandomBasisGaussian: return sample_random_basis_gaussian(spec.dim, s);
  }
  throw std::logic_error("sample_hamiltonian: bad kind");
}

PureState sample_haar_state(Index d, SeedStream s) {
  if (d <= 0) throw std::invalid_argument("sample_haar_state: d must be positive");
  GaussianStream g(s);
  ComplexVector a(d);
  for (Index i = 0; i < d; ++i) a[i] = g.complex_unit();
  a /= a.norm();
  return PureState(std::move(a));
}

RealVector sample_eigenvalues(const EnsembleSpec& spec, SeedStream s) {
  if (spec.dim <= 0) throw std::invalid_argument("sample_eigenvalues: dim must be positive");
  GaussianStream g(s);
  if (spec.kind == EnsembleKind::Gue) {
    const HermitianMatrix h(gue_matrix_impl(spec.dim, spec.gue_sigma2(), g));
    return eig_hermitian(h).eigenvalues;
  }
  RealVector lam = iid_normal_impl(spec.dim, g);
  std::sort(lam.begin(), lam.end());
  return lam;
}

SpectralSample sample_spectrum_with_weights(const EnsembleSpec& spec, SeedStream s) {
  if (spec.dim <= 0)
    throw std::invalid_argument("sample_spectrum_with_weights: dim must be positive");
  const Index d = spec.dim;
  GaussianStream g(s);
  SpectralSample out;
  if (spec.kind == EnsembleKind::Gue) {
    const HermitianMatrix h(gue_matrix_impl(d, spec.gue_sigma2(), g));
    out.eigenvalues = eig_hermitian(h).eigenvalues;
  } else {
    out.eigenvalues = iid_normal_impl(d, g);
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  }
  out.weights = RealVector::Zero(d);
  if (spec.kind == EnsembleKind::DiagGaussian) {
    // Eigenbasis is the computational basis; |0> is an eigenvector. The sort
    // permutes labels, which leaves the overlap profile a basis vector.
    out.weights[0] = 1.0;
    return out;
  }
  // Unitarily invariant ensembles: eigenbasis Haar and independent of the
  // spectrum, so the overlaps are those of a Haar state.
  ComplexVector z(d);
  for (Index i = 0; i < d; ++i) z[i] = g.complex_unit();
  const double nsq = z.squaredNorm();
  for (Index i = 0; i < d; ++i) out.weights[i] = std::norm(z[i]) / nsq;
  return out;
}

}  // namespace rmtlab
