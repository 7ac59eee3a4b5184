#include "wassmob/geodesic.hpp"

#include <algorithm>
#include <cmath>

#include "wassmob/errors.hpp"

namespace wassmob {

namespace {
// linear split of `mass` between the two nodes bracketing x on one axis
void deposit_1d(std::vector<double>& acc, const Grid& g, double x, double mass) {
    double t = (x - g.lo(0)) / g.h(0);
    t = std::clamp(t, 0.0, double(g.n(0) - 1));
    std::size_t i = std::min(std::size_t(t), g.n(0) - 2);
    double w = t - double(i);
    acc[i] += mass * (1.0 - w);
    acc[i + 1] += mass * w;
}

void deposit_2d(std::vector<double>& acc, const Grid& g, const Vec2& x, double mass) {
    double t0 = std::clamp((x[0] - g.lo(0)) / g.h(0), 0.0, double(g.n(0) - 1));
    double t1 = std::clamp((x[1] - g.lo(1)) / g.h(1), 0.0, double(g.n(1) - 1));
    std::size_t i0 = std::min(std::size_t(t0), g.n(0) - 2);
    std::size_t i1 = std::min(std::size_t(t1), g.n(1) - 2);
    double w0 = t0 - double(i0), w1 = t1 - double(i1);
    auto at = [&](std::size_t a, std::size_t b) -> double& { return acc[a * g.n(1) + b]; };
    at(i0, i1) += mass * (1 - w0) * (1 - w1);
    at(i0, i1 + 1) += mass * (1 - w0) * w1;
    at(i0 + 1, i1) += mass * w0 * (1 - w1);
    at(i0 + 1, i1 + 1) += mass * w0 * w1;
}
}  // namespace

Density geodesic_interpolate(const Coupling& coupling, const EmbeddingMap& b, double s,
                             double tau) {
    if (!(tau > 0.0)) throw ValidationError("geodesic_interpolate: tau must be positive");
    if (!b.has_inverse())
        throw NotInvertible("geodesic_interpolate: embedding family has no inverse");
    const Grid& g = b.grid();
    const std::size_t n = coupling.n;
    if (n != g.size()) throw GridMismatch("geodesic_interpolate: coupling/grid size mismatch");
    const double theta = std::clamp(s / tau, 0.0, 1.0);

    std::vector<double> acc(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& bi = b.value(i);
        for (std::size_t j = 0; j < n; ++j) {
            double m = coupling.pi[i * n + j];
            if (m <= 0.0) continue;
            const Vec2& bj = b.value(j);
            Vec2 xi{bi[0] + theta * (bj[0] - bi[0]), bi[1] + theta * (bj[1] - bi[1])};
            if (g.dim() == 1)
                deposit_1d(acc, g, b.invert_1d(xi[0]), m);
            else
                deposit_2d(acc, g, b.invert(xi), m);
        }
    }
    for (double& v : acc) v /= g.cell_volume();  // masses back to densities
    return Density(g, std::move(acc), /*normalize=*/true);
}

double dynamic_action(const std::vector<Density>& path,
                      const std::vector<std::vector<double>>& velocities,
                      const MobilityField& B, double tau, double continuity_tol) {
    if (path.size() < 2 || velocities.size() + 1 != path.size())
        throw ValidationError("dynamic_action: need K+1 slices and K staggered velocity slabs");
    const Grid& g = path.front().grid();
    if (g.dim() != 1) throw DimensionMismatch("dynamic_action implemented for d=1");
    const std::size_t n = g.size(), K = path.size() - 1;
    const double h = g.h(0), ds = tau / double(K);
    for (const auto& v : velocities)
        if (v.size() != n - 1) throw GridMismatch("dynamic_action: velocities live on faces");

    // slab-face density: space-time average over the four surrounding values
    auto rho_face = [&](std::size_t k, std::size_t f) {
        return 0.25 * (path[k][f] + path[k][f + 1] + path[k + 1][f] + path[k + 1][f + 1]);
    };
    auto flux = [&](std::size_t k, std::size_t f) { return rho_face(k, f) * velocities[k][f]; };
    double worst = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            double fr = (i + 1 < n) ? flux(k, i) : 0.0;
            double fl = (i > 0) ? flux(k, i - 1) : 0.0;
            double r = (path[k + 1][i] - path[k][i]) / ds + (fr - fl) / h;
            worst = std::max(worst, std::abs(r));
        }
    }
    if (worst > continuity_tol)
        throw ContinuityViolated("dynamic_action: continuity residual " + std::to_string(worst));

    double action = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        double slab = 0.0;
        for (std::size_t f = 0; f + 1 < n; ++f) {
            double B_face = 0.5 * (B.B(f)[0] + B.B(f + 1)[0]);
            double v = velocities[k][f];
            slab += h * rho_face(k, f) * v * B_face * v;
        }
        action += ds * slab;
    }
    return tau * action;
}

}  // namespace wassmob
