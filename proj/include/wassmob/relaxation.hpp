#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace wassmob {

// Finite-dimensional quadratic energy E(y) = (1/2) y^T K y - f^T y evolving in
// a frictional environment B under the damped dynamics eps y'' = -dE - B y'.
struct QuadraticSystem {
    Eigen::MatrixXd K;      // SPD stiffness
    Eigen::VectorXd f;      // forcing
    Eigen::MatrixXd Bfric;  // SPD friction
    double epsilon = 0.0;   // mass parameter
    double tau = 1e-2;      // time step

    QuadraticSystem(Eigen::MatrixXd K_, Eigen::VectorXd f_, Eigen::MatrixXd B_, double eps,
                    double tau_);

    Eigen::VectorXd grad_e(const Eigen::VectorXd& y) const { return K * y - f; }
    double energy(const Eigen::VectorXd& y) const {
        return 0.5 * y.dot(K * y) - f.dot(y);
    }
    Eigen::VectorXd equilibrium() const { return K.ldlt().solve(f); }
};

struct DampedState {
    Eigen::VectorXd y, v;
    double t = 0.0;
    double total_energy = 0.0;  // (eps/2)|v|^2 + E(y)
};

DampedState make_state(const QuadraticSystem& sys, Eigen::VectorXd y, Eigen::VectorXd v,
                       double t = 0.0);

// Implicit step of the damped dynamics: one SPD solve of
// (eps/tau^2 + B/tau + K) y = f + (eps/tau^2) y_prev + (eps/tau) v_prev + B y_prev / tau,
// then v = (y - y_prev)/tau; equals the constrained variational minimizer.
DampedState damped_step(const QuadraticSystem& sys, const DampedState& state);

// Minimizing movement: argmin E(y) + (1/2tau)(y-y_prev)^T B (y-y_prev),
// i.e. (B/tau + K) y = B y_prev / tau + f.
Eigen::VectorXd minimizing_movement_step(const QuadraticSystem& sys,
                                         const Eigen::VectorXd& y_prev);

struct RelaxationGap {
    double epsilon = 0.0;
    double gap = 0.0;           // sup_t |y_eps(t) - y_mm(t)|_inf
    double windowed_gap = 0.0;  // same, restricted to t > 10 eps
};

struct ComparisonReport {
    std::vector<RelaxationGap> gaps;  // one per requested epsilon, in order
    bool windowed_monotone = true;    // nonincreasing along decreasing epsilon
};

// Integrates the damped dynamics for each epsilon and measures the gap to the
// minimizing-movement trajectory outside the initial layer [0, 10 eps].
ComparisonReport run_comparison(const QuadraticSystem& sys, const Eigen::VectorXd& y0,
                                const Eigen::VectorXd& v0, double T,
                                const std::vector<double>& epsilons);

struct DissipationStep {
    double balance_residual = 0.0;  // |Delta E_total + tau v^T B v|
    double dissipation = 0.0;       // tau v^T B v
    bool decreasing = true;         // Delta E_total <= 1e-12
};

struct DissipationReport {
    std::vector<DissipationStep> steps;
    double max_balance_residual = 0.0;
    bool energy_monotone = true;
    // margins of G.u + (1/2)|G|_A^2 + (1/2) u^T B u >= 0 over sampled u,
    // G = eps dv/dt + grad E (equality at u = -A G, the relaxed velocity)
    double min_margin = 0.0;
};

DissipationReport dissipation_audit(const QuadraticSystem& sys,
                                    const std::vector<DampedState>& trajectory,
                                    int n_random_velocities = 0,
                                    std::uint64_t seed = 20240901);

}  // namespace wassmob
