#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wassmob/density.hpp"
#include "wassmob/embedding.hpp"

namespace wassmob {

// Dense cost c[i][j] = |b(x_i) - b(x_j)|^2 in embedded coordinates.
class CostMatrix {
public:
    explicit CostMatrix(const EmbeddingMap& b);

    std::size_t n() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return c_[i * n_ + j]; }
    const std::vector<double>& data() const { return c_; }
    const Grid& grid() const { return grid_; }

private:
    std::size_t n_;
    std::vector<double> c_;
    Grid grid_;
};

// Coupling over node pairs; entries are masses. Marginals and the realized
// transport cost are recorded together with optional dual potentials.
struct Coupling {
    std::size_t n = 0;
    std::vector<double> pi;  // row-major n x n, masses
    std::vector<double> row_marginal, col_marginal;  // masses
    double transport_cost = 0.0;
    double marginal_defect = 0.0;  // max |achieved - requested| over both marginals
    std::optional<std::vector<double>> dual_phi, dual_psi;

    double value(std::size_t i, std::size_t j) const { return pi[i * n + j]; }
};

struct DistanceReport {
    double wa_squared = 0.0;
    std::string method;  // exact_lp | entropic | closed_form_1d
    std::optional<double> dual_value;
    std::optional<double> gap;  // primal - dual
    double marginal_defect = 0.0;
    int iterations = 0;
    bool converged = true;
};

// Exact Kantorovich LP by successive-shortest-path min-cost flow; populates
// dual potentials with phi_i + psi_j <= c_ij and equality on the support.
std::pair<Coupling, DistanceReport> solve_kantorovich_exact(const Density& rho0,
                                                            const Density& rho1,
                                                            const CostMatrix& c);

struct EntropicOptions {
    double epsilon = 1e-3;       // final (floor) regularization
    double epsilon_start = 0.0;  // 0 => 16x the floor, geometric decay factor 0.5
    int max_iter = 200000;
    double tol = 1e-9;  // marginal defect stopping threshold (mass units)
    // optional warm-start duals (embedded-scale potentials), resized on use
    std::vector<double> warm_f, warm_g;
};

std::pair<Coupling, DistanceReport> solve_kantorovich_entropic(const Density& rho0,
                                                               const Density& rho1,
                                                               const CostMatrix& c,
                                                               const EntropicOptions& opt);

// 1d closed form: quantile coupling of the pushforwards b#rho0, b#rho1.
DistanceReport wa_distance_1d(const Density& rho0, const Density& rho1, const EmbeddingMap& b);

// Quantile coupling itself (monotone rearrangement on the embedded line).
Coupling quantile_coupling_1d(const Density& rho0, const Density& rho1, const EmbeddingMap& b);

}  // namespace wassmob
