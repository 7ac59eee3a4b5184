#include "wassmob/fv.hpp"

#include <Eigen/SparseLU>
#include <cmath>

#include "wassmob/errors.hpp"

namespace wassmob {

namespace {
// Bernoulli function z/(e^z - 1), the exponential-fitting weight
double bern(double z) {
    if (std::abs(z) < 1e-10) return 1.0 - 0.5 * z;
    return z / std::expm1(z);
}
}  // namespace

FVOperator::FVOperator(const MobilityField& A, const EnergySpec& Psi) : grid_(A.grid()) {
    if (!Psi.grid().same_as(grid_)) throw GridMismatch("FVOperator: Psi grid mismatch");
    const int d = grid_.dim();
    if (d == 2 && !A.is_diagonal())
        throw UnsupportedAnisotropy("FVOperator: full-tensor 2d mobility has no two-point flux");

    const std::size_t n = grid_.size();
    std::vector<Eigen::Triplet<double>> trip;
    auto add_face = [&](std::size_t i, std::size_t j, double a_face, double h) {
        // face between nodes i and j (j downwind along the axis)
        double dpsi = Psi.psi(j) - Psi.psi(i);
        double w = a_face / (h * h);
        double bij = w * bern(dpsi);    // coefficient of rho_i leaving i
        double bji = w * bern(-dpsi);   // coefficient of rho_j entering i
        trip.emplace_back(i, i, -bij);
        trip.emplace_back(i, j, bji);
        trip.emplace_back(j, j, -bji);
        trip.emplace_back(j, i, bij);
    };

    if (d == 1) {
        for (std::size_t i = 0; i + 1 < n; ++i)
            add_face(i, i + 1, 0.5 * (A.A(i)[0] + A.A(i + 1)[0]), grid_.h(0));
    } else {
        const std::size_t n0 = grid_.n(0), n1 = grid_.n(1);
        for (std::size_t i0 = 0; i0 < n0; ++i0)
            for (std::size_t i1 = 0; i1 < n1; ++i1) {
                std::size_t idx = i0 * n1 + i1;
                if (i0 + 1 < n0)
                    add_face(idx, idx + n1, 0.5 * (A.A(idx)[0] + A.A(idx + n1)[0]), grid_.h(0));
                if (i1 + 1 < n1)
                    add_face(idx, idx + 1, 0.5 * (A.A(idx)[3] + A.A(idx + 1)[3]), grid_.h(1));
            }
    }
    L_.resize(n, n);
    L_.setFromTriplets(trip.begin(), trip.end());
}

std::vector<double> FVOperator::apply(const std::vector<double>& rho) const {
    Eigen::Map<const Eigen::VectorXd> x(rho.data(), rho.size());
    Eigen::VectorXd y = L_ * x;
    return std::vector<double>(y.data(), y.data() + y.size());
}

double FVOperator::max_column_sum() const {
    Eigen::RowVectorXd ones = Eigen::RowVectorXd::Ones(L_.rows());
    Eigen::RowVectorXd cs = ones * L_;
    return cs.cwiseAbs().maxCoeff();
}

Density implicit_euler_step(const FVOperator& op, const Density& rho, double dt) {
    if (!(dt > 0.0)) throw ValidationError("implicit_euler_step: dt must be positive");
    const std::size_t n = rho.size();
    Eigen::SparseMatrix<double> M(n, n);
    M.setIdentity();
    M -= dt * op.matrix();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(M);
    if (lu.info() != Eigen::Success) throw SolverFailure("implicit_euler_step: factorization failed");
    Eigen::Map<const Eigen::VectorXd> b(rho.values().data(), n);
    Eigen::VectorXd x = lu.solve(b);
    if ((M * x - b).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + b.cwiseAbs().maxCoeff()))
        throw SolverFailure("implicit_euler_step: solve residual too large");
    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i) vals[i] = std::max(0.0, x[i]);
    return Density(rho.grid(), std::move(vals), /*normalize=*/true);
}

FVTrajectory run_reference(const MobilityField& A, const EnergySpec& Psi, const Density& rho0,
                           double dt, double T) {
    FVOperator op(A, Psi);
    FVTrajectory traj;
    traj.densities.push_back(rho0);
    traj.free_energies.push_back(free_energy(rho0, Psi));
    traj.times.push_back(0.0);
    int n_steps = int(std::llround(T / dt));
    for (int k = 0; k < n_steps; ++k) {
        traj.densities.push_back(implicit_euler_step(op, traj.densities.back(), dt));
        traj.free_energies.push_back(free_energy(traj.densities.back(), Psi));
        traj.times.push_back(double(k + 1) * dt);
    }
    return traj;
}

double weak_form_residual(const FVTrajectory& traj, const MobilityField& A,
                          const EnergySpec& Psi, const WeakTestFunction& test, double dt) {
    const Grid& g = traj.densities.front().grid();
    if (g.dim() != 1) throw DimensionMismatch("weak_form_residual implemented for d=1");
    const std::size_t n = g.size(), K = traj.densities.size() - 1;
    const double h = g.h(0), omega = g.cell_volume();
    const double T = double(K) * dt;

    double res = 0.0;
    // boundary-in-time terms: int rho(T) psi(.,T) - int rho0 psi(.,0)
    for (std::size_t i = 0; i < n; ++i) {
        double x = g.node1d(i);
        res += traj.densities[K][i] * test.psi(x, T) * omega;
        res -= traj.densities[0][i] * test.psi(x, 0.0) * omega;
    }
    for (std::size_t k = 0; k < K; ++k) {
        double t0 = double(k) * dt, t1 = double(k + 1) * dt;
        const Density& rho = traj.densities[k + 1];  // implicit-in-time weight
        // -int int rho psi_t, exact psi differences in time
        for (std::size_t i = 0; i < n; ++i) {
            double x = g.node1d(i);
            res -= rho[i] * (test.psi(x, t1) - test.psi(x, t0)) * omega;
        }
        // + int int (grad rho + rho grad Psi) . A grad psi
        for (std::size_t f = 0; f + 1 < n; ++f) {
            double xm = 0.5 * (g.node1d(f) + g.node1d(f + 1));
            double a_face = 0.5 * (A.A(f)[0] + A.A(f + 1)[0]);
            double drho = (rho[f + 1] - rho[f]) / h;
            double rho_face = 0.5 * (rho[f] + rho[f + 1]);
            double dpsi_conf = (Psi.psi(f + 1) - Psi.psi(f)) / h;
            double dtest = test.psi_x(xm, t1);
            res += dt * h * a_face * (drho + rho_face * dpsi_conf) * dtest;
        }
    }
    return std::abs(res);
}

}  // namespace wassmob
