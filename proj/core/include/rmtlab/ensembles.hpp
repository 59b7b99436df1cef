// Random-matrix ensembles: GUE, diagonal Gaussian, Gaussian in a Haar-random
// basis, Haar unitaries and states. Every sampler is a pure function of
// (parameters, seed, stream).
#pragma once

#include <string>

#include "rmtlab/linalg.hpp"
#include "rmtlab/rng.hpp"

namespace rmtlab {

enum class EnsembleKind { Gue, DiagGaussian, RandomBasisGaussian };

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::Gue;
  Index dim = 2;
  // Entry variance for the GUE; <= 0 means the standard choice 1/dim. The two
  // Gaussian diagonal models always use unit-variance eigenvalues.
  double sigma2 = 0.0;

  double gue_sigma2() const { return sigma2 > 0.0 ? sigma2 : 1.0 / static_cast<double>(dim); }
};

std::string ensemble_kind_name(EnsembleKind kind);
EnsembleKind parse_ensemble_kind(const std::string& name);

// Plain-text key-value block: "kind = gue", "dim = 64", "sigma2 = 0.015625",
// one pair per line, '#' starts a comment.
std::string format_ensemble_spec(const EnsembleSpec& spec);
EnsembleSpec parse_ensemble_spec(const std::string& text);

// H_ii ~ N(0, sigma2) real, H_ij = (X + iY)/sqrt(2) for i > j with
// X, Y ~ N(0, sigma2), so E|H_ij|^2 = sigma2.
HermitianMatrix sample_gue(Index d, double sigma2, SeedStream s);

HermitianMatrix sample_diag_gaussian(Index d, SeedStream s);          // diag, iid N(0,1)
HermitianMatrix sample_random_basis_gaussian(Index d, SeedStream s);  // V diag(N(0,1)) V^dag

HermitianMatrix sample_hamiltonian(const EnsembleSpec& spec, SeedStream s);

// QR of a complex Ginibre matrix with the R-diagonal phase correction, which
// makes the distribution exactly Haar.
UnitaryMatrix sample_haar_unitary(Index d, SeedStream s);

// First ncols columns of a Haar unitary (a uniform isometry), sampled directly
// from a d x ncols Ginibre block.
ComplexMatrix sample_haar_columns(Index d, Index ncols, SeedStream s);

PureState sample_haar_state(Index d, SeedStream s);

// Spectrum-only sampling for observables that depend on eigenvalues alone.
// GUE diagonalizes a full sample; both Gaussian diagonal models draw d iid
// N(0,1) values directly. Returned ascending.
RealVector sample_eigenvalues(const EnsembleSpec& spec, SeedStream s);

// Eigenvalues plus the squared overlaps w_k = |<eigenvector_k|0>|^2 of one
// sample, drawn from a single stream. For the unitarily invariant ensembles
// the eigenbasis is Haar and independent of the spectrum, so the weights are
// those of a Haar state; for the diagonal model |0> is an eigenvector.
struct SpectralSample {
  RealVector eigenvalues;  // ascending
  RealVector weights;      // nonnegative, sums to 1
};
SpectralSample sample_spectrum_with_weights(const EnsembleSpec& spec, SeedStream s);

}  // namespace rmtlab
