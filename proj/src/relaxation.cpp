#include "wassmob/relaxation.hpp"

#include <cmath>
#include <random>

#include "wassmob/errors.hpp"

namespace wassmob {

namespace {
void check_spd_dense(const Eigen::MatrixXd& m, const char* name) {
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw NotSPD(std::string(name) + " is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.eigenvalues().minCoeff() <= 1e-10)
        throw NotSPD(std::string(name) + " is not positive definite");
}
}  // namespace

QuadraticSystem::QuadraticSystem(Eigen::MatrixXd K_, Eigen::VectorXd f_, Eigen::MatrixXd B_,
                                 double eps, double tau_)
    : K(std::move(K_)), f(std::move(f_)), Bfric(std::move(B_)), epsilon(eps), tau(tau_) {
    check_spd_dense(K, "stiffness K");
    check_spd_dense(Bfric, "friction B");
    if (epsilon < 0.0) throw ValidationError("QuadraticSystem: epsilon must be >= 0");
    if (!(tau > 0.0)) throw ValidationError("QuadraticSystem: tau must be positive");
}

DampedState make_state(const QuadraticSystem& sys, Eigen::VectorXd y, Eigen::VectorXd v,
                       double t) {
    DampedState s;
    s.total_energy = 0.5 * sys.epsilon * v.squaredNorm() + sys.energy(y);
    s.y = std::move(y);
    s.v = std::move(v);
    s.t = t;
    return s;
}

DampedState damped_step(const QuadraticSystem& sys, const DampedState& state) {
    const double tau = sys.tau, eps = sys.epsilon;
    const std::size_t n = state.y.size();
    Eigen::MatrixXd M = (eps / (tau * tau)) * Eigen::MatrixXd::Identity(n, n) +
                        sys.Bfric / tau + sys.K;
    Eigen::VectorXd rhs = sys.f + (eps / (tau * tau)) * state.y + (eps / tau) * state.v +
                          sys.Bfric * state.y / tau;
    Eigen::VectorXd y = M.ldlt().solve(rhs);
    Eigen::VectorXd v = (y - state.y) / tau;
    return make_state(sys, std::move(y), std::move(v), state.t + tau);
}

Eigen::VectorXd minimizing_movement_step(const QuadraticSystem& sys,
                                         const Eigen::VectorXd& y_prev) {
    Eigen::MatrixXd M = sys.Bfric / sys.tau + sys.K;
    Eigen::VectorXd rhs = sys.Bfric * y_prev / sys.tau + sys.f;
    return M.ldlt().solve(rhs);
}

ComparisonReport run_comparison(const QuadraticSystem& sys, const Eigen::VectorXd& y0,
                                const Eigen::VectorXd& v0, double T,
                                const std::vector<double>& epsilons) {
    const int N = int(std::llround(T / sys.tau));
    std::vector<Eigen::VectorXd> mm;
    mm.reserve(N + 1);
    mm.push_back(y0);
    for (int j = 0; j < N; ++j) mm.push_back(minimizing_movement_step(sys, mm.back()));

    ComparisonReport rep;
    for (double eps : epsilons) {
        QuadraticSystem s = sys;
        s.epsilon = eps;
        DampedState st = make_state(s, y0, v0);
        RelaxationGap gp;
        gp.epsilon = eps;
        for (int j = 1; j <= N; ++j) {
            st = damped_step(s, st);
            double d = (st.y - mm[j]).cwiseAbs().maxCoeff();
            gp.gap = std::max(gp.gap, d);
            if (st.t > 10.0 * eps) gp.windowed_gap = std::max(gp.windowed_gap, d);
        }
        rep.gaps.push_back(gp);
    }
    for (std::size_t k = 1; k < rep.gaps.size(); ++k)
        if (rep.gaps[k].windowed_gap > rep.gaps[k - 1].windowed_gap + 1e-9)
            rep.windowed_monotone = false;
    return rep;
}

DissipationReport dissipation_audit(const QuadraticSystem& sys,
                                    const std::vector<DampedState>& trajectory,
                                    int n_random_velocities, std::uint64_t seed) {
    DissipationReport rep;
    Eigen::MatrixXd A = sys.Bfric.inverse();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    rep.min_margin = std::numeric_limits<double>::infinity();

    for (std::size_t j = 1; j < trajectory.size(); ++j) {
        const DampedState &prev = trajectory[j - 1], &cur = trajectory[j];
        DissipationStep st;
        st.dissipation = sys.tau * cur.v.dot(sys.Bfric * cur.v);
        double de = cur.total_energy - prev.total_energy;
        st.balance_residual = std::abs(de + st.dissipation);
        st.decreasing = de <= 1e-12;
        if (!st.decreasing) rep.energy_monotone = false;
        rep.max_balance_residual = std::max(rep.max_balance_residual, st.balance_residual);
        rep.steps.push_back(st);

        if (n_random_velocities > 0) {
            // G = eps dv/dt + grad E; the Young-inequality margin
            // G.u + (1/2) G^T A G + (1/2) u^T B u = (1/2)|G + Bu|_A^2 >= 0
            Eigen::VectorXd G =
                sys.epsilon * (cur.v - prev.v) / sys.tau + sys.grad_e(cur.y);
            for (int r = 0; r < n_random_velocities; ++r) {
                Eigen::VectorXd u(cur.v.size());
                for (int i = 0; i < u.size(); ++i) u[i] = gauss(rng);
                double margin = G.dot(u) + 0.5 * G.dot(A * G) + 0.5 * u.dot(sys.Bfric * u);
                rep.min_margin = std::min(rep.min_margin, margin);
            }
            // the relaxed velocity attains the bound
            Eigen::VectorXd ustar = -A * G;
            double margin =
                G.dot(ustar) + 0.5 * G.dot(A * G) + 0.5 * ustar.dot(sys.Bfric * ustar);
            rep.min_margin = std::min(rep.min_margin, margin);
        }
    }
    if (!std::isfinite(rep.min_margin)) rep.min_margin = 0.0;
    return rep;
}

}  // namespace wassmob
