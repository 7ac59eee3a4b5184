#pragma once

#include "wassmob/kantorovich.hpp"
#include "wassmob/mobility.hpp"

namespace wassmob {

// Displacement interpolation at time s in [0,tau]: each coupling atom moves
// along the straight segment b(X(s)) = b(x) + (s/tau)(b(y)-b(x)) in embedded
// coordinates, is pulled back through b^{-1}, and deposited on the grid by
// linear mass splitting between the bracketing nodes (exact conservation).
Density geodesic_interpolate(const Coupling& coupling, const EmbeddingMap& b, double s,
                             double tau);

// Weighted kinetic action tau * int_0^tau int rho v.Bv dx ds on a discrete
// path. `path` holds K+1 density slices; `velocities` are staggered in time,
// one entry per slab (K entries of size-1 face values, d=1 only). The
// discrete continuity equation (rho_{k+1}-rho_k)/ds + div(rho_face v) = 0,
// with rho_face the space-time average over the slab face, must hold to
// `continuity_tol` in the max norm. The action integrates the same slab-face
// densities (midpoint rule in time, face quadrature in space).
double dynamic_action(const std::vector<Density>& path,
                      const std::vector<std::vector<double>>& velocities,
                      const MobilityField& B, double tau, double continuity_tol = 1e-2);

}  // namespace wassmob
