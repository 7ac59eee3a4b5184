#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "wassmob/errors.hpp"
#include "wassmob/relaxation.hpp"

using namespace wassmob;

namespace {
Eigen::MatrixXd random_spd(int n, std::mt19937_64& rng, double shift = 0.5) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd r(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) = gauss(rng);
    return r * r.transpose() + shift * Eigen::MatrixXd::Identity(n, n);
}

Eigen::VectorXd random_vec(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    return v;
}

// objective of the constrained variational problem whose Euler-Lagrange
// equation is the damped implicit step
double vp_objective(const QuadraticSystem& sys, const DampedState& prev,
                    const Eigen::VectorXd& y) {
    Eigen::VectorXd dy = y - prev.y;
    Eigen::VectorXd inertial = dy - sys.tau * prev.v;
    return sys.energy(y) + 0.5 * sys.epsilon / (sys.tau * sys.tau) * inertial.squaredNorm() +
           0.5 / sys.tau * dy.dot(sys.Bfric * dy);
}

std::vector<DampedState> integrate(const QuadraticSystem& sys, DampedState st, int n_steps) {
    std::vector<DampedState> traj{st};
    for (int k = 0; k < n_steps; ++k) traj.push_back(damped_step(sys, traj.back()));
    return traj;
}
}  // namespace

TEST_CASE("system construction validates SPD inputs and parameters") {
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(3);

    Eigen::MatrixXd skew = id;
    skew(0, 1) = 0.3;  // asymmetric
    CHECK_THROWS_AS(QuadraticSystem(skew, f, id, 1.0, 0.1), NotSPD);

    Eigen::MatrixXd indef = id;
    indef(2, 2) = -1.0;
    CHECK_THROWS_AS(QuadraticSystem(id, f, indef, 1.0, 0.1), NotSPD);
    CHECK_THROWS_AS(QuadraticSystem(id, f, Eigen::MatrixXd::Zero(3, 3), 1.0, 0.1), NotSPD);

    CHECK_THROWS_AS(QuadraticSystem(id, f, id, -1.0, 0.1), ValidationError);
    CHECK_THROWS_AS(QuadraticSystem(id, f, id, 1.0, 0.0), ValidationError);
}

TEST_CASE("damped step: rest at the unforced origin and the scalar hand oracle") {
    Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
    QuadraticSystem sys(one, Eigen::VectorXd::Zero(1), one, 1.0, 0.1);

    DampedState rest = make_state(sys, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1));
    DampedState out = damped_step(sys, rest);
    CHECK(std::abs(out.y[0]) <= 1e-15);
    CHECK(std::abs(out.v[0]) <= 1e-15);

    // K=B=eps=1, tau=0.1, y0=1, v0=0: (eps/tau^2 + B/tau + K) y1 = y0 (eps/tau^2 + B/tau)
    DampedState s0 = make_state(sys, Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(1));
    DampedState s1 = damped_step(sys, s0);
    double y1 = (100.0 + 10.0) / (100.0 + 10.0 + 1.0);
    CHECK(s1.y[0] == doctest::Approx(y1).epsilon(1e-14));
    CHECK(s1.v[0] == doctest::Approx((y1 - 1.0) / 0.1).epsilon(1e-13));
    CHECK(s1.t == doctest::Approx(0.1));

    // the step satisfies the discrete Euler-Lagrange equation
    double el = 1.0 * (s1.v[0] - s0.v[0]) / 0.1 + s1.y[0] + s1.v[0];
    CHECK(std::abs(el) <= 1e-12);
}

TEST_CASE("damped step minimizes the variational objective") {
    std::mt19937_64 rng(7);
    const int n = 5;
    QuadraticSystem sys(random_spd(n, rng), random_vec(n, rng), random_spd(n, rng), 0.3, 0.05);
    DampedState s0 = make_state(sys, random_vec(n, rng), random_vec(n, rng));
    DampedState s1 = damped_step(sys, s0);

    double base = vp_objective(sys, s0, s1.y);
    for (int r = 0; r < 200; ++r) {
        double scale = (r % 2 == 0) ? 1e-3 : 0.3;
        Eigen::VectorXd pert = s1.y + scale * random_vec(n, rng);
        CHECK(vp_objective(sys, s0, pert) >= base - 1e-12);
    }
}

TEST_CASE("minimizing movement: fixed point, scalar closed form, descent") {
    Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
    QuadraticSystem scalar(one, Eigen::VectorXd::Zero(1), one, 0.0, 0.1);
    Eigen::VectorXd y = minimizing_movement_step(scalar, Eigen::VectorXd::Ones(1));
    CHECK(y[0] == doctest::Approx(1.0 / 1.1).epsilon(1e-14));

    std::mt19937_64 rng(11);
    const int n = 6;
    QuadraticSystem sys(random_spd(n, rng), random_vec(n, rng), random_spd(n, rng), 0.0, 0.02);
    Eigen::VectorXd eq = sys.equilibrium();
    CHECK((minimizing_movement_step(sys, eq) - eq).cwiseAbs().maxCoeff() <= 1e-10);

    Eigen::VectorXd y0 = random_vec(n, rng);
    Eigen::VectorXd y1 = minimizing_movement_step(sys, y0);
    Eigen::VectorXd dy = y1 - y0;
    CHECK(sys.energy(y1) + 0.5 / sys.tau * dy.dot(sys.Bfric * dy) <= sys.energy(y0) + 1e-12);
}

TEST_CASE("zero mass reproduces the minimizing movement exactly") {
    std::mt19937_64 rng(13);
    const int n = 4;
    QuadraticSystem sys(random_spd(n, rng), random_vec(n, rng), random_spd(n, rng), 0.0, 0.05);
    Eigen::VectorXd y0 = random_vec(n, rng);
    auto rep = run_comparison(sys, y0, random_vec(n, rng), 1.0, {0.0});
    REQUIRE(rep.gaps.size() == 1);
    CHECK(rep.gaps[0].gap <= 1e-12);
    CHECK(rep.windowed_monotone);
}

TEST_CASE("epsilon sweep: windowed gap shrinks monotonically toward the limit") {
    std::mt19937_64 rng(17);
    const int n = 4;
    // friction with unit-scale smallest eigenvalue: the velocity layer decays
    // like e^{-lambda_min(B) t / eps}, so it has died out by the window start
    // 10 eps and the tail gap reflects the outer O(eps) error alone
    QuadraticSystem sys(random_spd(n, rng), random_vec(n, rng), random_spd(n, rng, 2.0), 0.0,
                        1e-3);
    Eigen::VectorXd y0 = random_vec(n, rng);
    // ill-prepared initial velocity to excite the initial layer
    Eigen::VectorXd v0 = 2.0 * random_vec(n, rng);

    // keep 10*eps well inside the system's own relaxation time, otherwise the
    // shrinking window start trades off against the O(eps) gap amplitude
    std::vector<double> eps{4e-2, 2e-2, 1e-2, 5e-3, 2.5e-3};
    auto rep = run_comparison(sys, y0, v0, 2.0, eps);
    REQUIRE(rep.gaps.size() == eps.size());
    CHECK(rep.windowed_monotone);
    for (std::size_t k = 1; k < rep.gaps.size(); ++k)
        CHECK(rep.gaps[k].windowed_gap <= rep.gaps[k - 1].windowed_gap + 1e-9);
    // the initial layer carries the ill-prepared velocity: the full-horizon
    // gap strictly dominates the windowed one at the largest mass
    CHECK(rep.gaps[0].gap > rep.gaps[0].windowed_gap);
    // and the limit is actually approached
    CHECK(rep.gaps.back().windowed_gap < 0.5 * rep.gaps.front().windowed_gap);
}

TEST_CASE("dissipation audit: balance residual, monotonicity, and step scaling") {
    std::mt19937_64 rng(19);
    const int n = 5;
    Eigen::MatrixXd K = random_spd(n, rng), B = random_spd(n, rng);
    Eigen::VectorXd f = random_vec(n, rng), y0 = random_vec(n, rng), v0 = random_vec(n, rng);

    auto audit_at = [&](double tau, double T) {
        QuadraticSystem sys(K, f, B, 0.2, tau);
        auto traj = integrate(sys, make_state(sys, y0, v0), int(std::lround(T / tau)));
        return dissipation_audit(sys, traj);
    };
    auto coarse = audit_at(0.02, 1.0), fine = audit_at(0.01, 1.0);
    CHECK(coarse.energy_monotone);
    CHECK(fine.energy_monotone);
    CHECK(coarse.max_balance_residual > 0.0);
    // per-step balance defect is second order in the step
    CHECK(fine.max_balance_residual <= 0.4 * coarse.max_balance_residual);

    // resting at equilibrium: no motion, no dissipation, exact balance
    QuadraticSystem sys(K, f, B, 0.2, 0.02);
    auto rest = integrate(sys, make_state(sys, sys.equilibrium(), Eigen::VectorXd::Zero(n)), 10);
    auto rrep = dissipation_audit(sys, rest);
    CHECK(rrep.max_balance_residual <= 1e-10);
    for (const auto& st : rrep.steps) CHECK(st.dissipation <= 1e-10);
}

TEST_CASE("maximal dissipation: the Young margin is nonnegative and tight") {
    std::mt19937_64 rng(23);
    const int n = 5;
    QuadraticSystem sys(random_spd(n, rng), random_vec(n, rng), random_spd(n, rng), 0.4, 0.02);
    auto traj = integrate(sys, make_state(sys, random_vec(n, rng), random_vec(n, rng)), 25);

    auto rep = dissipation_audit(sys, traj, /*n_random_velocities=*/40);
    // G.u + (1/2)|G|_A^2 + (1/2)|u|_B^2 = (1/2)|G + Bu|_A^2 >= 0 for every u,
    // with equality at the relaxed velocity u = -A G, which the audit samples
    CHECK(rep.min_margin >= -1e-12);
    CHECK(rep.min_margin <= 1e-10);
}

TEST_CASE("total energy decays for random systems across mass parameters") {
    std::mt19937_64 rng(29);
    for (double eps : {0.0, 0.1, 1.0}) {
        const int n = 4;
        QuadraticSystem sys(random_spd(n, rng), random_vec(n, rng), random_spd(n, rng), eps,
                            0.05);
        auto traj = integrate(sys, make_state(sys, random_vec(n, rng), random_vec(n, rng)), 60);
        for (std::size_t k = 1; k < traj.size(); ++k)
            CHECK(traj[k].total_energy <= traj[k - 1].total_energy + 1e-12);
    }
}
