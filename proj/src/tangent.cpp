#include "wassmob/tangent.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "wassmob/errors.hpp"

namespace wassmob {

namespace {
std::vector<double> face_weights(const Density& rho, const MobilityField& A, double floor) {
    const std::size_t n = rho.size();
    std::vector<double> w(n - 1);
    for (std::size_t f = 0; f + 1 < n; ++f) {
        double l = std::max(rho[f], floor) * A.A(f)[0];
        double r = std::max(rho[f + 1], floor) * A.A(f + 1)[0];
        w[f] = 0.5 * (l + r);
    }
    return w;
}

void require_zero_mean(const std::vector<double>& s, double vol, const char* who) {
    double m = 0.0;
    for (double v : s) m += v;
    if (std::abs(m * vol) > 1e-12)
        throw ValidationError(std::string(who) + ": source must have zero mean");
}
}  // namespace

std::vector<double> solve_elliptic_1d(const Density& rho, const MobilityField& A,
                                      const std::vector<double>& s, double floor) {
    const Grid& g = rho.grid();
    if (g.dim() != 1) throw DimensionMismatch("solve_elliptic_1d requires d=1");
    if (!A.grid().same_as(g) || s.size() != g.size())
        throw GridMismatch("solve_elliptic_1d: grid mismatch");
    require_zero_mean(s, g.cell_volume(), "solve_elliptic_1d");

    const std::size_t n = g.size();
    const double h = g.h(0);
    auto w = face_weights(rho, A, floor);

    // bordered symmetric system: L p + lambda 1 = s, sum p = 0
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + 1, n + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        double diag = 0.0;
        if (i + 1 < n) {
            M(i, i + 1) = -w[i] / (h * h);
            diag += w[i] / (h * h);
        }
        if (i > 0) {
            M(i, i - 1) = -w[i - 1] / (h * h);
            diag += w[i - 1] / (h * h);
        }
        M(i, i) = diag;
        M(i, n) = 1.0;
        M(n, i) = 1.0;
        rhs(i) = s[i];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible())
        throw SingularOperator("solve_elliptic_1d: operator rank-deficient beyond constants");
    Eigen::VectorXd p = lu.solve(rhs);
    if ((M * p - rhs).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + rhs.cwiseAbs().maxCoeff()))
        throw SingularOperator("solve_elliptic_1d: solve residual too large");
    return std::vector<double>(p.data(), p.data() + n);
}

double tangent_pairing(const Density& rho, const std::vector<double>& s1,
                       const std::vector<double>& s2, const MobilityField& A) {
    const Grid& g = rho.grid();
    require_zero_mean(s1, g.cell_volume(), "tangent_pairing");
    auto p2 = solve_elliptic_1d(rho, A, s2);
    double acc = 0.0;
    for (std::size_t i = 0; i < s1.size(); ++i) acc += s1[i] * p2[i];
    return acc * g.cell_volume();
}

MinimalityReport minimality_check_2_8(const Density& rho, const std::vector<double>& s,
                                      const MobilityField& A,
                                      const std::vector<std::vector<double>>& trial_velocities,
                                      double constraint_tol) {
    const Grid& g = rho.grid();
    if (g.dim() != 1) throw DimensionMismatch("minimality_check_2_8 requires d=1");
    const std::size_t n = g.size();
    const double h = g.h(0);

    MinimalityReport rep;
    rep.g_value = tangent_pairing(rho, s, s, A);

    for (const auto& v : trial_velocities) {
        if (v.size() != n - 1) throw GridMismatch("minimality_check_2_8: face velocity size");
        MinimalityTrial tr;
        // continuity: s_i + (F_{i+1/2} - F_{i-1/2})/h = 0, zero boundary flux
        for (std::size_t i = 0; i < n; ++i) {
            double fr = (i + 1 < n) ? 0.5 * (rho[i] + rho[i + 1]) * v[i] : 0.0;
            double fl = (i > 0) ? 0.5 * (rho[i - 1] + rho[i]) * v[i - 1] : 0.0;
            tr.constraint_residual =
                std::max(tr.constraint_residual, std::abs(s[i] + (fr - fl) / h));
        }
        if (tr.constraint_residual > constraint_tol) {
            rep.trials.push_back(tr);
            throw ConstraintViolated("minimality_check_2_8: trial velocity violates continuity, residual " +
                                     std::to_string(tr.constraint_residual));
        }
        // action with face friction reciprocal to the face mobility used in
        // the constraint, so the elliptic minimizer attains equality exactly
        double action = 0.0;
        for (std::size_t f = 0; f + 1 < n; ++f) {
            double rho_face = 0.5 * (rho[f] + rho[f + 1]);
            double w_face = 0.5 * (rho[f] * A.A(f)[0] + rho[f + 1] * A.A(f + 1)[0]);
            if (w_face <= 0.0) continue;
            double mom = rho_face * v[f];
            action += h * mom * mom / w_face;
        }
        tr.action = action;
        tr.gap = action - rep.g_value;
        if (tr.gap < -1e-9) rep.all_pass = false;
        rep.trials.push_back(tr);
    }
    return rep;
}

}  // namespace wassmob
