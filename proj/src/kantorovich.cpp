#include "wassmob/kantorovich.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wassmob/errors.hpp"

namespace wassmob {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

CostMatrix::CostMatrix(const EmbeddingMap& b) : n_(b.size()), grid_(b.grid()) {
    if (n_ > 20000) throw SizeExceeded("CostMatrix: more than 20000 nodes for dense cost");
    c_.resize(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i) {
        c_[i * n_ + i] = 0.0;
        for (std::size_t j = i + 1; j < n_; ++j) {
            double d0 = b.value(i)[0] - b.value(j)[0];
            double d1 = b.value(i)[1] - b.value(j)[1];
            double v = d0 * d0 + d1 * d1;
            c_[i * n_ + j] = v;
            c_[j * n_ + i] = v;
        }
    }
}

// ---------------------------------------------------------------------------
// Exact solver: successive shortest paths on the dense bipartite network.
// Node layout: sources 0..n-1, sinks n..2n-1. Potentials keep reduced costs
// nonnegative on all residual arcs, so Dijkstra applies throughout.
// ---------------------------------------------------------------------------

std::pair<Coupling, DistanceReport> solve_kantorovich_exact(const Density& rho0,
                                                            const Density& rho1,
                                                            const CostMatrix& c) {
    const std::size_t n = c.n();
    if (rho0.size() != n || rho1.size() != n)
        throw GridMismatch("solve_kantorovich_exact: marginal/cost size mismatch");
    if (n > 512) throw SizeExceeded("solve_kantorovich_exact: more than 512 nodes");
    if (std::abs(rho0.total_mass() - rho1.total_mass()) > 1e-10)
        throw InfeasibleMarginals("solve_kantorovich_exact: marginal masses differ");

    std::vector<double> supply(n), demand(n);
    for (std::size_t i = 0; i < n; ++i) {
        supply[i] = rho0.mass(i);
        demand[i] = rho1.mass(i);
    }
    const double total = std::accumulate(supply.begin(), supply.end(), 0.0);
    const double push_floor = 1e-16 * std::max(1.0, total);

    std::vector<double> flow(n * n, 0.0);
    std::vector<double> pot(2 * n, 0.0);  // node potentials
    std::vector<double> dist(2 * n);
    std::vector<int> parent(2 * n);  // predecessor node in shortest-path tree
    std::vector<char> done(2 * n);

    int iters = 0;
    const int max_phases = int(200 * n + 1000);
    while (true) {
        // flooring truncates tiny residues, so recompute the remaining mass
        // from the live supplies/demands instead of decrementing a running
        // total; both sides must still carry mass worth routing
        double rem_s = std::accumulate(supply.begin(), supply.end(), 0.0);
        double rem_d = std::accumulate(demand.begin(), demand.end(), 0.0);
        if (std::min(rem_s, rem_d) <= push_floor * double(n)) break;
        if (++iters > max_phases)
            throw SolverFailure("solve_kantorovich_exact: phase limit exceeded");
        // multi-source Dijkstra over the residual graph with reduced costs
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(parent.begin(), parent.end(), -1);
        std::fill(done.begin(), done.end(), 0);
        for (std::size_t i = 0; i < n; ++i)
            if (supply[i] > push_floor) dist[i] = 0.0;
        for (std::size_t it = 0; it < 2 * n; ++it) {
            int u = -1;
            double best = kInf;
            for (std::size_t v = 0; v < 2 * n; ++v)
                if (!done[v] && dist[v] < best) {
                    best = dist[v];
                    u = int(v);
                }
            if (u < 0) break;
            done[u] = 1;
            // reduced costs are nonnegative in exact arithmetic; clamp the
            // rounding residue and never relax settled nodes so the parent
            // pointers always form a tree
            if (std::size_t(u) < n) {
                const std::size_t i = std::size_t(u);
                for (std::size_t j = 0; j < n; ++j) {
                    if (done[n + j]) continue;
                    double rc = std::max(0.0, c(i, j) + pot[i] - pot[n + j]);
                    if (dist[i] + rc < dist[n + j]) {
                        dist[n + j] = dist[i] + rc;
                        parent[n + j] = u;
                    }
                }
            } else {
                const std::size_t j = std::size_t(u) - n;
                for (std::size_t i = 0; i < n; ++i) {
                    if (done[i]) continue;
                    if (flow[i * n + j] <= 0.0) continue;  // reverse arc j->i
                    double rc = std::max(0.0, -c(i, j) + pot[n + j] - pot[i]);
                    if (dist[n + j] + rc < dist[i]) {
                        dist[i] = dist[n + j] + rc;
                        parent[i] = u;
                    }
                }
            }
        }
        // cheapest sink with remaining demand
        int t = -1;
        double dt = kInf;
        for (std::size_t j = 0; j < n; ++j)
            if (demand[j] > push_floor && dist[n + j] < dt) {
                dt = dist[n + j];
                t = int(n + j);
            }
        if (t < 0) throw SolverFailure("solve_kantorovich_exact: no augmenting path");
        for (std::size_t v = 0; v < 2 * n; ++v) pot[v] += std::min(dist[v], dt);
        // walk back to the source, collect bottleneck
        double bottleneck = demand[std::size_t(t) - n];
        int v = t;
        while (parent[v] >= 0) {
            int u = parent[v];
            if (std::size_t(v) >= n)  // forward arc u -> v carries no cap
                ;
            else  // reverse arc: limited by existing flow v->u? (u is sink, v source)
                bottleneck = std::min(bottleneck, flow[std::size_t(v) * n + (std::size_t(u) - n)]);
            v = u;
        }
        bottleneck = std::min(bottleneck, supply[std::size_t(v)]);
        // apply
        int w = t;
        while (parent[w] >= 0) {
            int u = parent[w];
            if (std::size_t(w) >= n)
                flow[std::size_t(u) * n + (std::size_t(w) - n)] += bottleneck;
            else
                flow[std::size_t(w) * n + (std::size_t(u) - n)] -= bottleneck;
            w = u;
        }
        supply[std::size_t(v)] -= bottleneck;
        demand[std::size_t(t) - n] -= bottleneck;
        if (supply[std::size_t(v)] < push_floor) supply[std::size_t(v)] = 0.0;
        if (demand[std::size_t(t) - n] < push_floor) demand[std::size_t(t) - n] = 0.0;
    }

    Coupling cp;
    cp.n = n;
    cp.pi = std::move(flow);
    cp.row_marginal.assign(n, 0.0);
    cp.col_marginal.assign(n, 0.0);
    double cost = 0.0, defect = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double m = cp.pi[i * n + j];
            cp.row_marginal[i] += m;
            cp.col_marginal[j] += m;
            cost += m * c(i, j);
        }
    for (std::size_t i = 0; i < n; ++i) {
        defect = std::max(defect, std::abs(cp.row_marginal[i] - rho0.mass(i)));
        defect = std::max(defect, std::abs(cp.col_marginal[i] - rho1.mass(i)));
    }
    cp.transport_cost = cost;
    cp.marginal_defect = defect;
    std::vector<double> phi(n), psi(n);
    for (std::size_t i = 0; i < n; ++i) phi[i] = -pot[i];
    for (std::size_t j = 0; j < n; ++j) psi[j] = pot[n + j];
    cp.dual_phi = phi;
    cp.dual_psi = psi;

    DistanceReport rep;
    rep.wa_squared = cost;
    rep.method = "exact_lp";
    double dual = 0.0;
    for (std::size_t i = 0; i < n; ++i) dual += phi[i] * rho0.mass(i) + psi[i] * rho1.mass(i);
    rep.dual_value = dual;
    rep.gap = cost - dual;
    rep.marginal_defect = defect;
    rep.iterations = iters;
    return {std::move(cp), rep};
}

// ---------------------------------------------------------------------------
// Entropic solver: log-domain Sinkhorn with geometric epsilon decay.
// ---------------------------------------------------------------------------

namespace {
// one half-iteration: f_i = eps*log a_i - eps*logsumexp_j((g_j - c_ij)/eps)
void update_f(std::vector<double>& f, const std::vector<double>& g,
              const std::vector<double>& log_a, const double* c, std::size_t n, double eps,
              bool transpose) {
    for (std::size_t i = 0; i < n; ++i) {
        double m = -kInf;
        for (std::size_t j = 0; j < n; ++j) {
            double cij = transpose ? c[j * n + i] : c[i * n + j];
            m = std::max(m, (g[j] - cij));
        }
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double cij = transpose ? c[j * n + i] : c[i * n + j];
            s += std::exp(((g[j] - cij) - m) / eps);
        }
        f[i] = eps * log_a[i] - m - eps * std::log(s);
    }
}
}  // namespace

std::pair<Coupling, DistanceReport> solve_kantorovich_entropic(const Density& rho0,
                                                               const Density& rho1,
                                                               const CostMatrix& c,
                                                               const EntropicOptions& opt) {
    const std::size_t n = c.n();
    if (rho0.size() != n || rho1.size() != n)
        throw GridMismatch("solve_kantorovich_entropic: marginal/cost size mismatch");
    if (!(opt.epsilon > 0.0)) throw ValidationError("entropic: epsilon must be positive");

    // mass flooring only inside logarithms
    std::vector<double> log_a(n), log_b(n), a(n), bm(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = rho0.mass(i);
        bm[i] = rho1.mass(i);
        log_a[i] = std::log(std::max(a[i], 1e-300));
        log_b[i] = std::log(std::max(bm[i], 1e-300));
    }

    std::vector<double> f = opt.warm_f, g = opt.warm_g;
    f.resize(n, 0.0);
    g.resize(n, 0.0);

    double eps = opt.epsilon_start > 0.0 ? opt.epsilon_start : 16.0 * opt.epsilon;
    eps = std::max(eps, opt.epsilon);
    int iters = 0;
    bool converged = false;
    double defect = kInf;
    auto col_defect = [&]() {
        // column marginal error of pi with exact rows (f freshly updated)
        double worst = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double m = -kInf;
            for (std::size_t i = 0; i < n; ++i)
                m = std::max(m, f[i] + g[j] - c(i, j));
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += std::exp((f[i] + g[j] - c(i, j) - m) / eps);
            double col = std::exp(m / eps) * s;
            worst = std::max(worst, std::abs(col - bm[j]));
        }
        return worst;
    };
    while (iters < opt.max_iter) {
        bool last_stage = eps <= opt.epsilon * (1.0 + 1e-12);
        int stage_iters = last_stage ? opt.max_iter - iters : 50;
        for (int k = 0; k < stage_iters; ++k) {
            update_f(g, f, log_b, c.data().data(), n, eps, true);
            update_f(f, g, log_a, c.data().data(), n, eps, false);
            ++iters;
            if ((k + 1) % 10 == 0 || k + 1 == stage_iters) {
                defect = col_defect();
                if (defect <= opt.tol) break;
            }
        }
        if (last_stage) {
            converged = defect <= opt.tol;
            break;
        }
        eps = std::max(opt.epsilon, eps * 0.5);
    }

    // assemble coupling with exact row marginals (f updated last)
    Coupling cp;
    cp.n = n;
    cp.pi.assign(n * n, 0.0);
    cp.row_marginal.assign(n, 0.0);
    cp.col_marginal.assign(n, 0.0);
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double rsum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double v = std::exp((f[i] + g[j] - c(i, j)) / eps);
            cp.pi[i * n + j] = v;
            rsum += v;
        }
        // rescale the row to the requested mass exactly
        double scale = rsum > 0.0 ? a[i] / rsum : 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            cp.pi[i * n + j] *= scale;
            cp.col_marginal[j] += cp.pi[i * n + j];
            cost += cp.pi[i * n + j] * c(i, j);
        }
        cp.row_marginal[i] = a[i];
    }
    double md = 0.0;
    for (std::size_t j = 0; j < n; ++j) md = std::max(md, std::abs(cp.col_marginal[j] - bm[j]));
    cp.transport_cost = cost;
    cp.marginal_defect = md;
    cp.dual_phi = f;
    cp.dual_psi = g;

    DistanceReport rep;
    rep.wa_squared = cost;
    rep.method = "entropic";
    rep.marginal_defect = md;
    rep.iterations = iters;
    rep.converged = converged;
    return {std::move(cp), rep};
}

// ---------------------------------------------------------------------------
// 1d closed form via quantile coupling on the embedded line.
// ---------------------------------------------------------------------------

namespace {
struct QuantileVisit {
    std::size_t i, j;
    double mass;
};

template <typename F>
void quantile_sweep(const Density& rho0, const Density& rho1, F&& visit) {
    const std::size_t n = rho0.size();
    std::size_t i = 0, j = 0;
    double ri = rho0.mass(0), rj = rho1.mass(0);
    const double eps = 1e-18;
    while (i < n && j < n) {
        double m = std::min(ri, rj);
        if (m > 0.0) visit(i, j, m);
        ri -= m;
        rj -= m;
        if (ri <= eps) {
            ++i;
            if (i < n) ri = rho0.mass(i);
        }
        if (rj <= eps) {
            ++j;
            if (j < n) rj = rho1.mass(j);
        }
    }
}
}  // namespace

DistanceReport wa_distance_1d(const Density& rho0, const Density& rho1, const EmbeddingMap& b) {
    if (b.grid().dim() != 1) throw DimensionMismatch("wa_distance_1d requires d=1");
    if (!rho0.grid().same_as(b.grid()) || !rho1.grid().same_as(b.grid()))
        throw GridMismatch("wa_distance_1d: grids differ");
    double cost = 0.0;
    quantile_sweep(rho0, rho1, [&](std::size_t i, std::size_t j, double m) {
        double d = b.value(i)[0] - b.value(j)[0];
        cost += m * d * d;
    });
    DistanceReport rep;
    rep.wa_squared = cost;
    rep.method = "closed_form_1d";
    return rep;
}

Coupling quantile_coupling_1d(const Density& rho0, const Density& rho1, const EmbeddingMap& b) {
    if (b.grid().dim() != 1) throw DimensionMismatch("quantile_coupling_1d requires d=1");
    const std::size_t n = rho0.size();
    if (n > 4096) throw SizeExceeded("quantile_coupling_1d: dense coupling limited to 4096 nodes");
    Coupling cp;
    cp.n = n;
    cp.pi.assign(n * n, 0.0);
    cp.row_marginal.assign(n, 0.0);
    cp.col_marginal.assign(n, 0.0);
    double cost = 0.0;
    quantile_sweep(rho0, rho1, [&](std::size_t i, std::size_t j, double m) {
        cp.pi[i * n + j] += m;
        cp.row_marginal[i] += m;
        cp.col_marginal[j] += m;
        double d = b.value(i)[0] - b.value(j)[0];
        cost += m * d * d;
    });
    cp.transport_cost = cost;
    double defect = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        defect = std::max(defect, std::abs(cp.row_marginal[i] - rho0.mass(i)));
        defect = std::max(defect, std::abs(cp.col_marginal[i] - rho1.mass(i)));
    }
    cp.marginal_defect = defect;
    return cp;
}

}  // namespace wassmob
