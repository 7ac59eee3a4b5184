#pragma once

#include <string>
#include <vector>

#include "wassmob/energy.hpp"
#include "wassmob/kantorovich.hpp"
#include "wassmob/maps.hpp"

namespace wassmob {

enum class InnerSolver { entropic, exact_small };

struct JKOConfig {
    double tau = 1e-2;
    int n_steps = 1;
    InnerSolver inner = InnerSolver::entropic;
    // entropic regularization floor; <= 0 selects the default coupling
    // epsilon = min(0.1 * tau * median neighbor cost, 1e-2)
    double epsilon_floor = 1e-4;
    double epsilon_start = 0.0;  // 0 => 16x floor; geometric decay factor 0.5
    int max_iter = 20000;
    double marginal_tol = 1e-9;  // L1 stopping on the column-marginal change
    double stall_tol = 1e-11;    // objective stall over 10 iterations
    double kkt_tol = 1e-8;       // exact_small stopping
};

struct JKOStepReport {
    double wa_squared = 0.0;  // <c, pi> of the proximal coupling
    double objective = 0.0;   // G = (1/2tau)<c,pi> + F(rho^{n+1})
    double objective_decrease = 0.0;
    double marginal_defect = 0.0;
    double kkt_residual = -1.0;  // exact_small only
    int iterations = 0;
    bool converged = true;
    double epsilon_used = 0.0;
};

// warm-started dual potentials carried across steps (entropic solver)
struct JKOWorkspace {
    std::vector<double> f, g;
};

double default_jko_epsilon(const CostMatrix& c, double tau);

// One proximal step rho -> argmin (1/2tau) W_A(rho_n, .)^2 + F(.), entropic
// realization: scaling iterations on pi = exp((f+g-c/2tau)/eps) where the
// column update is the KL-prox of F. For U = z log z the prox is the closed
// multiplicative form p_j = m_j^{eps/(1+eps)} (omega e^{-1-Psi_j})^{1/(1+eps)}
// (m_j the bare column sum, omega the cell volume), derived from
//   log(p/omega) + 1 + Psi + eps log(p/m) = 0.
std::pair<Density, JKOStepReport> jko_step_entropic(const Density& rho_n, const EnergySpec& E,
                                                    const CostMatrix& c, const JKOConfig& cfg,
                                                    JKOWorkspace* ws = nullptr);
std::pair<Density, JKOStepReport> jko_step_entropic(const Density& rho_n, const EnergySpec& E,
                                                    const EmbeddingMap& b,
                                                    const JKOConfig& cfg);

// Exact small-instance step (<= 64 nodes): block-coordinate descent over the
// rows of pi with per-row bisection on the KKT multiplier; stops at KKT
// residual <= cfg.kkt_tol.
std::pair<Density, JKOStepReport> jko_step_exact_small(const Density& rho_n, const EnergySpec& E,
                                                       const CostMatrix& c,
                                                       const JKOConfig& cfg);
std::pair<Density, JKOStepReport> jko_step_exact_small(const Density& rho_n, const EnergySpec& E,
                                                       const EmbeddingMap& b,
                                                       const JKOConfig& cfg);

struct JKOTrajectory {
    std::vector<Density> densities;
    std::vector<double> wa_squared;    // per step, size n_steps
    std::vector<double> free_energies; // per state, size n_steps+1
    std::vector<double> entropies;
    std::vector<double> second_moments;  // M_b per state
    std::vector<JKOStepReport> reports;
    double tau = 0.0;
    double inf_f = 0.0;  // F at the Gibbs density (certified lower bound)
    double log_zb = 0.0; // log sum e^{-2|b|} omega, for the entropy bound
    std::string aborted_with;  // nonempty if a step failed; partial trajectory
};

JKOTrajectory run_jko(const Density& rho0, const EnergySpec& E, const EmbeddingMap& b,
                      const JKOConfig& cfg);

// Test function psi of the embedded coordinate (d=1) for the truncation bound.
struct ELTestFunction {
    std::function<double(double)> psi, dpsi;
    double sup_d2 = 0.0;
    std::string name;
};

struct ELResidualEntry {
    std::string name;
    double lhs = 0.0;        // (1/tau) int (rho^{n+1}-rho^n) psi(b)
    double transport = 0.0;  // (1/tau) int dpsi(b(r x)) . (b(r x)-b(x)) rho^n
    double residual = 0.0;   // |lhs - transport|
    double bound = 0.0;      // (1/2tau) sup|D^2 psi| W^2
    bool pass = true;
};

// Second-order truncation audit of the Euler-Lagrange identity against an
// optimal 1d map.
std::vector<ELResidualEntry> el_residual(const Density& rho_n, const Density& rho_np1,
                                         const TransportMap& map, const EnergySpec& E,
                                         const EmbeddingMap& b, double tau,
                                         const std::vector<ELTestFunction>& tests,
                                         double wa_squared, double slack = 1e-8);

struct AprioriEntry {
    std::string name;
    double lhs = 0.0, rhs = 0.0, slack = 0.0;
    bool pass = true;
};

struct AprioriReport {
    std::vector<AprioriEntry> entries;
    bool all_pass = true;
};

// Audits the recorded trajectory against the a priori estimates: energy
// monotonicity, total-square bound, Holder chain bound, entropy lower bound
// with eps = 1/(8 tau), moment doubling, and the sqrt(6) interpolant bound.
AprioriReport apriori_report(const JKOTrajectory& traj, double tol = 1e-9);

}  // namespace wassmob
