#pragma once

#include <cstdint>
#include <vector>

#include "wassmob/kantorovich.hpp"

namespace wassmob {

// Transport map sampled at grid nodes. Embedded images live in the range of
// b; raw images are filled only when the embedding family is invertible.
struct TransportMap {
    Grid grid = Grid::line(0, 1, 2);
    std::vector<Vec2> image;           // r*(x_i), valid where defined[i]
    std::vector<Vec2> embedded_image;  // b(r*(x_i))
    std::vector<char> defined;         // zero-mass source rows are marked undefined
    bool has_raw_image = false;

    // Sum_i rho0_i c(x_i, r(x_i)) in embedded coordinates.
    double transport_cost(const Density& rho0, const EmbeddingMap& b) const;
};

// Barycentric extraction in embedded coordinates:
// b(r*(x_i)) = sum_j pi_ij b(x_j) / sum_j pi_ij. Zero-mass rows are marked
// undefined rather than rejected.
TransportMap map_from_coupling(const Coupling& coupling, const EmbeddingMap& b);

// 1d monotone rearrangement r*(x) = b^{-1}(Q1(Q0(b(x)))) with Q0 the CDF of
// b#rho0 and Q1 the quantile of b#rho1; ties broken by lowest node index.
TransportMap map_1d_monotone(const Density& rho0, const Density& rho1, const EmbeddingMap& b);

// Max interior-node norm of (grad b)^T (b(r*(x)) - b(x)) + (1/2) grad phi,
// the first-order optimality condition of the exact dual pair.
double optimality_residual(const TransportMap& map, const std::vector<double>& dual_phi,
                           const EmbeddingMap& b, const MobilityField& B);

struct CycleReport {
    int cycles_tested = 0;
    int violations = 0;
    double worst = 0.0;  // most negative cycle sum observed
    bool pass = true;
};

// Samples k-cycles from the coupling support (mass > 1e-12) and checks
// sum_i <xi_i, eta_i - eta_{i+1}> >= -1e-9 in embedded coordinates.
CycleReport cyclical_monotonicity_check(const Coupling& coupling, const EmbeddingMap& b, int k,
                                        int n_cycles = 200, std::uint64_t seed = 1234);

}  // namespace wassmob
