// Distances between unitaries modulo global phase, the diamond distance for
// unitary channels, state distances, and distances to the diagonal torus.
#pragma once

#include <string>
#include <vector>

#include "rmtlab/linalg.hpp"

namespace rmtlab {

// Eigenphases of V^dag U, each in (-pi, pi].
std::vector<double> relative_eigenphases(const UnitaryMatrix& u, const UnitaryMatrix& v);

// Smallest arc of the unit circle containing all phases: length in [0, 2pi)
// and the arc midpoint (the minimax global phase).
struct CoveringArc {
  double length = 0.0;
  double midpoint = 0.0;
};
CoveringArc smallest_covering_arc(std::vector<double> phases);

// Phase-free Hilbert-Schmidt distance sqrt(2d - 2|tr(V^dag U)|).
double hs_proj_distance(const UnitaryMatrix& u, const UnitaryMatrix& v);

// Phase-free operator-norm distance min_phi ||U - e^{i phi} V||_inf. The
// minimum sits at the midpoint of the smallest covering arc of the relative
// eigenphases, giving 2 sin(arc/4).
double opnorm_proj_distance(const UnitaryMatrix& u, const UnitaryMatrix& v);

// Diamond distance between the unitary channels of U and V:
// 2 sqrt(1 - nu^2) with nu the distance from the origin to the convex hull of
// the eigenvalues of V^dag U.
double diamond_distance_unitary(const UnitaryMatrix& u, const UnitaryMatrix& v);

// Trace distance between pure states, sqrt(1 - |<psi|phi>|^2).
double trace_distance_states(const PureState& psi, const PureState& phi);

// Frobenius distance from X to the diagonal unitaries (the torus):
// sqrt(2d - 2 sum_i |X_ii|), attained by D_ii = X_ii/|X_ii| (1 where X_ii = 0).
struct TorusProjection {
  double distance = 0.0;
  RealVector phases;  // phases of the minimizing diagonal unitary
};
TorusProjection dist_to_diagonal_torus(const ComplexMatrix& x);

// Distance from a state to the phase torus of another:
// sqrt(1 - (sum_k |psi_k||phi_k|)^2).
double dist_to_state_torus(const PureState& psi, const PureState& phi);

// Same metrics evaluated directly on eigenphase arrays (spectrum-only fast
// path used by the escape experiments; for distances from the identity the
// basis cancels).
double hs_proj_from_phases(const std::vector<double>& phases);
double opnorm_proj_from_phases(std::vector<double> phases);
double diamond_from_phases(const std::vector<double>& phases);

enum class ChannelMetric { Diamond, OpNormProj, HsProj };
std::string channel_metric_name(ChannelMetric m);
ChannelMetric parse_channel_metric(const std::string& name);
double channel_distance(ChannelMetric m, const UnitaryMatrix& u, const UnitaryMatrix& v);
double channel_distance_from_phases(ChannelMetric m, const std::vector<double>& phases);

}  // namespace rmtlab
