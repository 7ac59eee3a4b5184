#pragma once

#include <vector>

#include "wassmob/density.hpp"
#include "wassmob/mobility.hpp"

namespace wassmob {

// Solves the zero-flux elliptic problem -d/dx(rho A dp/dx) = s on the 1d grid
// (finite-volume form, face weights by arithmetic mean) and normalizes p to
// zero mean. s must have zero mean; rho is floored at `floor` inside the
// weights only.
std::vector<double> solve_elliptic_1d(const Density& rho, const MobilityField& A,
                                      const std::vector<double>& s, double floor = 1e-12);

// Metric tensor g_rho(s1, s2) = int s1 p2 dx with p2 the elliptic solution
// driven by s2 (equals int rho grad p1 . A grad p2 by summation by parts).
double tangent_pairing(const Density& rho, const std::vector<double>& s1,
                       const std::vector<double>& s2, const MobilityField& A);

struct MinimalityTrial {
    double constraint_residual = 0.0;  // max-norm continuity defect
    double action = 0.0;               // int rho v . B v
    double gap = 0.0;                  // action - g_rho(s,s)
};

struct MinimalityReport {
    double g_value = 0.0;
    std::vector<MinimalityTrial> trials;
    bool all_pass = true;
};

// Checks that every admissible face-velocity field v (s + div(rho v) = 0
// discretely, zero boundary flux) has action >= g_rho(s,s) - 1e-9, with
// equality for v = A grad p. Velocities live on the n-1 faces.
MinimalityReport minimality_check_2_8(const Density& rho, const std::vector<double>& s,
                                      const MobilityField& A,
                                      const std::vector<std::vector<double>>& trial_velocities,
                                      double constraint_tol = 1e-8);

}  // namespace wassmob
