#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "wassmob/energy.hpp"
#include "wassmob/mobility.hpp"

namespace wassmob {

// Finite-volume operator L for d rho/dt = div(A (grad rho + rho grad Psi))
// with zero-flux boundary. Exponential-fitting (Scharfetter-Gummel) face
// fluxes make e^{-Psi}/Z an exact discrete steady state; the assembled matrix
// is an M-matrix (nonnegative off-diagonals here since we store L, not -L),
// and its column sums vanish (mass conservation).
class FVOperator {
public:
    FVOperator(const MobilityField& A, const EnergySpec& Psi);

    const Grid& grid() const { return grid_; }
    const Eigen::SparseMatrix<double>& matrix() const { return L_; }

    std::vector<double> apply(const std::vector<double>& rho) const;
    double max_column_sum() const;

private:
    Grid grid_;
    Eigen::SparseMatrix<double> L_;
};

// (I - dt L) rho^+ = rho, solved by sparse LU; positivity and exact mass
// conservation follow from the M-matrix structure.
Density implicit_euler_step(const FVOperator& op, const Density& rho, double dt);

struct FVTrajectory {
    std::vector<Density> densities;
    std::vector<double> free_energies;
    std::vector<double> times;
};

FVTrajectory run_reference(const MobilityField& A, const EnergySpec& Psi, const Density& rho0,
                           double dt, double T);

// Space-time test function for the weak form: psi(x, t) and its partial
// derivatives, d=1 (x is the raw coordinate).
struct WeakTestFunction {
    std::function<double(double, double)> psi;    // (x, t)
    std::function<double(double, double)> psi_t;  // time partial
    std::function<double(double, double)> psi_x;  // space partial
};

// | -int int rho psi_t + int int grad U_z . A rho grad psi - int rho0 psi(.,0) |
// on the discrete trajectory; O(dt + h^2) for smooth solutions.
double weak_form_residual(const FVTrajectory& traj, const MobilityField& A,
                          const EnergySpec& Psi, const WeakTestFunction& test, double dt);

}  // namespace wassmob
