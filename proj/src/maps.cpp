#include "wassmob/maps.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "wassmob/errors.hpp"

namespace wassmob {

double TransportMap::transport_cost(const Density& rho0, const EmbeddingMap& b) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < embedded_image.size(); ++i) {
        if (!defined[i]) continue;
        double d0 = embedded_image[i][0] - b.value(i)[0];
        double d1 = embedded_image[i][1] - b.value(i)[1];
        acc += rho0.mass(i) * (d0 * d0 + d1 * d1);
    }
    return acc;
}

TransportMap map_from_coupling(const Coupling& coupling, const EmbeddingMap& b) {
    const std::size_t n = coupling.n;
    if (n != b.size()) throw GridMismatch("map_from_coupling: coupling/embedding size mismatch");
    TransportMap m;
    m.grid = b.grid();
    m.image.assign(n, Vec2{0, 0});
    m.embedded_image.assign(n, Vec2{0, 0});
    m.defined.assign(n, 0);
    m.has_raw_image = b.has_inverse();
    for (std::size_t i = 0; i < n; ++i) {
        double row = coupling.row_marginal[i];
        if (row <= 0.0) continue;  // EmptyRow: marked undefined
        Vec2 bary{0, 0};
        for (std::size_t j = 0; j < n; ++j) {
            double w = coupling.pi[i * n + j];
            if (w <= 0.0) continue;
            bary[0] += w * b.value(j)[0];
            bary[1] += w * b.value(j)[1];
        }
        bary[0] /= row;
        bary[1] /= row;
        m.embedded_image[i] = bary;
        m.defined[i] = 1;
        if (m.has_raw_image)
            m.image[i] = b.grid().dim() == 1 ? Vec2{b.invert_1d(bary[0]), 0.0} : b.invert(bary);
    }
    return m;
}

TransportMap map_1d_monotone(const Density& rho0, const Density& rho1, const EmbeddingMap& b) {
    const Grid& g = b.grid();
    if (g.dim() != 1) throw DimensionMismatch("map_1d_monotone requires d=1");
    if (!rho0.grid().same_as(g) || !rho1.grid().same_as(g))
        throw GridMismatch("map_1d_monotone: grids differ");
    const std::size_t n = g.size();

    // barycentric image of the quantile coupling on positive-mass rows;
    // zero-mass rows take the quantile of rho1 at their cumulative level
    Coupling q = quantile_coupling_1d(rho0, rho1, b);
    TransportMap m = map_from_coupling(q, b);
    std::vector<double> cum1(n);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        acc += rho1.mass(j);
        cum1[j] = acc;
    }
    double c0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        c0 += rho0.mass(i);
        if (m.defined[i]) continue;
        std::size_t j =
            std::lower_bound(cum1.begin(), cum1.end(), c0 - 1e-15) - cum1.begin();
        j = std::min(j, n - 1);
        m.embedded_image[i] = b.value(j);
        m.image[i] = g.node(j);
        m.defined[i] = 1;
    }
    return m;
}

double optimality_residual(const TransportMap& map, const std::vector<double>& dual_phi,
                           const EmbeddingMap& b, const MobilityField& B) {
    const Grid& g = b.grid();
    if (dual_phi.empty()) throw MissingDuals("optimality_residual: no dual potentials");
    if (dual_phi.size() != g.size() || map.embedded_image.size() != g.size())
        throw GridMismatch("optimality_residual: size mismatch");
    (void)B;

    double worst = 0.0;
    auto axis_n = [&](int a) { return g.n(a); };
    const int d = g.dim();
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        if (!map.defined[idx]) continue;
        // skip boundary nodes (central differences only)
        std::array<std::size_t, 2> mi{idx, 0};
        if (d == 2) mi = {idx / g.n(1), idx % g.n(1)};
        bool interior = true;
        for (int a = 0; a < d; ++a)
            if (mi[a] == 0 || mi[a] + 1 >= axis_n(a)) interior = false;
        if (!interior) continue;

        // central-difference Jacobian of b (q x d) and gradient of phi
        double res2 = 0.0;
        Vec2 diff{map.embedded_image[idx][0] - b.value(idx)[0],
                  map.embedded_image[idx][1] - b.value(idx)[1]};
        for (int a = 0; a < d; ++a) {
            std::size_t stride = (d == 1 || a == 1) ? 1 : g.n(1);
            double h = g.h(a);
            double dphi = (dual_phi[idx + stride] - dual_phi[idx - stride]) / (2 * h);
            double comp = 0.5 * dphi;
            for (int c = 0; c < 2; ++c) {
                double db = (b.value(idx + stride)[c] - b.value(idx - stride)[c]) / (2 * h);
                comp += db * diff[c];
            }
            res2 += comp * comp;
        }
        worst = std::max(worst, std::sqrt(res2));
    }
    return worst;
}

CycleReport cyclical_monotonicity_check(const Coupling& coupling, const EmbeddingMap& b, int k,
                                        int n_cycles, std::uint64_t seed) {
    const std::size_t n = coupling.n;
    std::vector<std::pair<std::size_t, std::size_t>> support;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (coupling.pi[i * n + j] > 1e-12) support.emplace_back(i, j);

    CycleReport rep;
    if (support.size() < std::size_t(k) || k < 2) return rep;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, support.size() - 1);
    for (int c = 0; c < n_cycles; ++c) {
        std::vector<std::pair<std::size_t, std::size_t>> cyc(k);
        for (auto& p : cyc) p = support[pick(rng)];
        double s = 0.0;
        for (int i = 0; i < k; ++i) {
            const Vec2& xi = b.value(cyc[i].first);
            const Vec2& eta = b.value(cyc[i].second);
            const Vec2& eta_next = b.value(cyc[(i + 1) % k].second);
            s += xi[0] * (eta[0] - eta_next[0]) + xi[1] * (eta[1] - eta_next[1]);
        }
        ++rep.cycles_tested;
        rep.worst = std::min(rep.worst, s);
        if (s < -1e-9) ++rep.violations;
    }
    rep.pass = rep.violations == 0;
    return rep;
}

}  // namespace wassmob
