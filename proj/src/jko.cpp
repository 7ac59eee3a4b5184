#include "wassmob/jko.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wassmob/errors.hpp"

namespace wassmob {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double lse(const std::vector<double>& terms) {
    double m = -kInf;
    for (double t : terms) m = std::max(m, t);
    if (m == -kInf) return -kInf;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - m);
    return m + std::log(s);
}
}  // namespace

double default_jko_epsilon(const CostMatrix& c, double tau) {
    const Grid& g = c.grid();
    std::vector<double> neigh;
    if (g.dim() == 1) {
        for (std::size_t i = 0; i + 1 < g.size(); ++i) neigh.push_back(c(i, i + 1));
    } else {
        for (std::size_t i0 = 0; i0 < g.n(0); ++i0)
            for (std::size_t i1 = 0; i1 < g.n(1); ++i1) {
                std::size_t idx = i0 * g.n(1) + i1;
                if (i1 + 1 < g.n(1)) neigh.push_back(c(idx, idx + 1));
                if (i0 + 1 < g.n(0)) neigh.push_back(c(idx, idx + g.n(1)));
            }
    }
    std::nth_element(neigh.begin(), neigh.begin() + neigh.size() / 2, neigh.end());
    double med = neigh[neigh.size() / 2];
    return std::min(0.1 * tau * med, 1e-2);
}

std::pair<Density, JKOStepReport> jko_step_entropic(const Density& rho_n, const EnergySpec& E,
                                                    const CostMatrix& c, const JKOConfig& cfg,
                                                    JKOWorkspace* ws) {
    const Grid& g = rho_n.grid();
    const std::size_t n = g.size();
    if (c.n() != n) throw GridMismatch("jko_step_entropic: cost/grid size mismatch");
    if (!(cfg.tau > 0.0)) throw ValidationError("jko_step_entropic: tau must be positive");

    const double omega = g.cell_volume();
    const double inv2tau = 1.0 / (2.0 * cfg.tau);
    // config epsilons regularize the scaled cost c/(2 tau)
    const double eps_floor = cfg.epsilon_floor > 0.0
                                 ? cfg.epsilon_floor
                                 : default_jko_epsilon(c, cfg.tau) * inv2tau;
    std::vector<double> log_a(n), a(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = rho_n.mass(i);
        log_a[i] = std::log(std::max(a[i], 1e-300));
        w[i] = std::log(omega) - 1.0 - E.psi(i);  // KL-prox weight of U=z log z
    }

    std::vector<double> f(n, 0.0), gg(n, 0.0);
    if (ws && ws->f.size() == n && ws->g.size() == n) {
        f = ws->f;
        gg = ws->g;
    }
    std::vector<double> log_p(n, -kInf), prev_p(n, 0.0), terms(n);

    auto ct = [&](std::size_t i, std::size_t j) { return c(i, j) * inv2tau; };

    double eps = cfg.epsilon_start > 0.0 ? cfg.epsilon_start : 16.0 * eps_floor;
    eps = std::max(eps, eps_floor);
    int iters = 0;
    bool converged = false;
    double marginal_defect = kInf, prev_obj = kInf;

    auto objective = [&](double e) {
        // rows rescaled to a exactly, then <c,pi>/(2tau) + F(col/omega)
        double cost = 0.0;
        std::vector<double> col(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double rsum = 0.0;
            for (std::size_t j = 0; j < n; ++j) terms[j] = std::exp((f[i] + gg[j] - ct(i, j)) / e);
            for (std::size_t j = 0; j < n; ++j) rsum += terms[j];
            double scale = rsum > 0.0 ? a[i] / rsum : 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                double m = terms[j] * scale;
                col[j] += m;
                cost += m * ct(i, j);
            }
        }
        double fe = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double z = col[j] / omega;
            if (z > 0.0) fe += (z * std::log(z) + z * E.psi(j)) * omega;
        }
        return cost + fe;
    };

    while (iters < cfg.max_iter) {
        bool last_stage = eps <= eps_floor * (1.0 + 1e-12);
        int stage_iters = last_stage ? cfg.max_iter - iters : 30;
        for (int k = 0; k < stage_iters; ++k) {
            // column update: KL-prox of F (closed multiplicative form)
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t i = 0; i < n; ++i) terms[i] = (f[i] - ct(i, j)) / eps;
                double log_m = lse(terms);
                log_p[j] = (eps * log_m + w[j]) / (1.0 + eps);
                gg[j] = eps * (log_p[j] - log_m);
            }
            // row update: exact row marginals a
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) terms[j] = (gg[j] - ct(i, j)) / eps;
                f[i] = eps * log_a[i] - eps * lse(terms);
            }
            ++iters;
            if ((k + 1) % 10 == 0 || k + 1 == stage_iters) {
                double dp = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    double pj = std::exp(log_p[j]);
                    dp += std::abs(pj - prev_p[j]);
                    prev_p[j] = pj;
                }
                marginal_defect = dp;
                if (last_stage && dp <= cfg.marginal_tol) {
                    double obj = objective(eps);
                    if (std::abs(prev_obj - obj) < cfg.stall_tol) {
                        converged = true;
                        prev_obj = obj;
                        break;
                    }
                    prev_obj = obj;
                }
            }
        }
        if (last_stage) break;
        eps = std::max(eps_floor, eps * 0.5);
    }

    // final coupling: rows rescaled exactly to a (mass conservation exact)
    std::vector<double> col(n, 0.0);
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double rsum = 0.0;
        for (std::size_t j = 0; j < n; ++j) terms[j] = std::exp((f[i] + gg[j] - ct(i, j)) / eps);
        for (std::size_t j = 0; j < n; ++j) rsum += terms[j];
        double scale = rsum > 0.0 ? a[i] / rsum : 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double m = terms[j] * scale;
            col[j] += m;
            cost += m * c(i, j);
        }
    }
    for (std::size_t j = 0; j < n; ++j) col[j] /= omega;
    Density out(g, std::move(col), /*normalize=*/true);

    if (ws) {
        ws->f = f;
        ws->g = gg;
    }
    JKOStepReport rep;
    rep.wa_squared = cost;
    rep.objective = cost * inv2tau + free_energy(out, E);
    rep.objective_decrease = free_energy(rho_n, E) - rep.objective;
    rep.marginal_defect = marginal_defect;
    rep.iterations = iters;
    rep.converged = converged;
    rep.epsilon_used = eps;
    return {std::move(out), rep};
}

std::pair<Density, JKOStepReport> jko_step_entropic(const Density& rho_n, const EnergySpec& E,
                                                    const EmbeddingMap& b,
                                                    const JKOConfig& cfg) {
    CostMatrix c(b);
    return jko_step_entropic(rho_n, E, c, cfg, nullptr);
}

std::pair<Density, JKOStepReport> jko_step_exact_small(const Density& rho_n, const EnergySpec& E,
                                                       const CostMatrix& c,
                                                       const JKOConfig& cfg) {
    const Grid& g = rho_n.grid();
    const std::size_t n = g.size();
    if (n > 64) throw SizeExceeded("jko_step_exact_small: more than 64 nodes");
    if (c.n() != n) throw GridMismatch("jko_step_exact_small: cost/grid size mismatch");

    const double omega = g.cell_volume();
    const double inv2tau = 1.0 / (2.0 * cfg.tau);
    auto ct = [&](std::size_t i, std::size_t j) { return c(i, j) * inv2tau; };

    std::vector<double> a(n), p(n, 0.0);
    std::vector<double> pi(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = rho_n.mass(i);
        pi[i * n + i] = a[i];
        p[i] = a[i];
    }

    // exponent d_j of the per-row candidate p_cand = exp(mu - d_j); the row
    // solve is a waterfilling in mu with pi_ij = max(0, p_cand - q_j)
    auto solve_row = [&](std::size_t i) {
        std::vector<double> d(n), q(n);
        for (std::size_t j = 0; j < n; ++j) {
            q[j] = p[j] - pi[i * n + j];
            d[j] = 1.0 + E.psi(j) + ct(i, j) - std::log(omega);
        }
        if (a[i] <= 0.0) {
            for (std::size_t j = 0; j < n; ++j) {
                pi[i * n + j] = 0.0;
                p[j] = q[j];
            }
            return;
        }
        auto total = [&](double mu) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                s += std::max(0.0, std::exp(mu - d[j]) - q[j]);
            return s;
        };
        double lo = -745.0 + *std::min_element(d.begin(), d.end());
        double hi = std::log(a[i] + std::accumulate(q.begin(), q.end(), 0.0)) +
                    *std::max_element(d.begin(), d.end()) + 1.0;
        while (total(hi) < a[i]) hi += 1.0;
        for (int k = 0; k < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++k) {
            double mid = 0.5 * (lo + hi);
            (total(mid) < a[i] ? lo : hi) = mid;
        }
        double mu = 0.5 * (lo + hi);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            pi[i * n + j] = std::max(0.0, std::exp(mu - d[j]) - q[j]);
            s += pi[i * n + j];
        }
        // exact row feasibility
        double corr = s > 0.0 ? a[i] / s : 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            pi[i * n + j] *= corr;
            p[j] = q[j] + pi[i * n + j];
        }
    };

    auto kkt_residual = [&]() {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (a[i] <= 0.0) continue;
            double mu = kInf;
            for (std::size_t j = 0; j < n; ++j) {
                double df = std::log(std::max(p[j], 1e-300) / omega) + 1.0 + E.psi(j);
                mu = std::min(mu, ct(i, j) + df);
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (pi[i * n + j] <= 1e-15 * a[i]) continue;
                double df = std::log(std::max(p[j], 1e-300) / omega) + 1.0 + E.psi(j);
                worst = std::max(worst, ct(i, j) + df - mu);
            }
        }
        return worst;
    };

    int sweeps = 0;
    double res = kInf;
    const int max_sweeps = 20000;
    while (sweeps < max_sweeps) {
        for (std::size_t i = 0; i < n; ++i) solve_row(i);
        ++sweeps;
        if (sweeps % 5 == 0 || sweeps < 10) {
            res = kkt_residual();
            if (res <= cfg.kkt_tol) break;
        }
    }

    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) cost += pi[i * n + j] * c(i, j);
    std::vector<double> vals(n);
    for (std::size_t j = 0; j < n; ++j) vals[j] = p[j] / omega;
    Density out(g, std::move(vals), /*normalize=*/true);

    JKOStepReport rep;
    rep.wa_squared = cost;
    rep.objective = cost * inv2tau + free_energy(out, E);
    rep.objective_decrease = free_energy(rho_n, E) - rep.objective;
    rep.kkt_residual = res;
    rep.iterations = sweeps;
    rep.converged = res <= cfg.kkt_tol;
    rep.marginal_defect = 0.0;  // rows are feasible by construction
    if (!rep.converged)
        throw NoConvergence("jko_step_exact_small: KKT residual " + std::to_string(res));
    return {std::move(out), rep};
}

std::pair<Density, JKOStepReport> jko_step_exact_small(const Density& rho_n, const EnergySpec& E,
                                                       const EmbeddingMap& b,
                                                       const JKOConfig& cfg) {
    CostMatrix c(b);
    return jko_step_exact_small(rho_n, E, c, cfg);
}

JKOTrajectory run_jko(const Density& rho0, const EnergySpec& E, const EmbeddingMap& b,
                      const JKOConfig& cfg) {
    JKOTrajectory traj;
    traj.tau = cfg.tau;
    CostMatrix c(b);
    Density gibbs = E.gibbs();
    traj.inf_f = free_energy(gibbs, E);
    {
        double z = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            const Vec2& v = b.value(i);
            z += std::exp(-2.0 * std::sqrt(v[0] * v[0] + v[1] * v[1]));
        }
        traj.log_zb = std::log(z * b.grid().cell_volume());
    }

    auto record_state = [&](const Density& rho) {
        traj.free_energies.push_back(free_energy(rho, E));
        traj.entropies.push_back(entropy(rho));
        traj.second_moments.push_back(embedded_second_moment(rho, b));
    };
    traj.densities.push_back(rho0);
    record_state(rho0);

    JKOWorkspace ws;
    for (int s = 0; s < cfg.n_steps; ++s) {
        try {
            std::pair<Density, JKOStepReport> step =
                cfg.inner == InnerSolver::entropic
                    ? jko_step_entropic(traj.densities.back(), E, c, cfg, &ws)
                    : jko_step_exact_small(traj.densities.back(), E, c, cfg);
            traj.wa_squared.push_back(step.second.wa_squared);
            traj.reports.push_back(step.second);
            traj.densities.push_back(std::move(step.first));
            record_state(traj.densities.back());
        } catch (const Error& e) {
            traj.aborted_with = e.what();
            break;
        }
    }
    return traj;
}

std::vector<ELResidualEntry> el_residual(const Density& rho_n, const Density& rho_np1,
                                         const TransportMap& map, const EnergySpec& E,
                                         const EmbeddingMap& b, double tau,
                                         const std::vector<ELTestFunction>& tests,
                                         double wa_squared, double slack) {
    (void)E;
    const Grid& g = b.grid();
    if (g.dim() != 1) throw DimensionMismatch("el_residual requires d=1");
    if (map.embedded_image.size() != g.size())
        throw MissingMap("el_residual: transport map missing or sized wrong");
    const std::size_t n = g.size();
    const double omega = g.cell_volume();

    std::vector<ELResidualEntry> out;
    for (const auto& t : tests) {
        ELResidualEntry e;
        e.name = t.name;
        for (std::size_t i = 0; i < n; ++i) {
            double bi = b.value(i)[0];
            e.lhs += (rho_np1[i] - rho_n[i]) * t.psi(bi) * omega / tau;
            if (map.defined[i]) {
                double bri = map.embedded_image[i][0];
                e.transport += rho_n[i] * omega * t.dpsi(bri) * (bri - bi) / tau;
            }
        }
        e.residual = std::abs(e.lhs - e.transport);
        e.bound = 0.5 / tau * t.sup_d2 * wa_squared + slack;
        e.pass = e.residual <= e.bound;
        out.push_back(std::move(e));
    }
    return out;
}

AprioriReport apriori_report(const JKOTrajectory& traj, double tol) {
    AprioriReport rep;
    const std::size_t N = traj.wa_squared.size();
    const double tau = traj.tau;
    const double f0 = traj.free_energies.empty() ? 0.0 : traj.free_energies.front();
    const double gap = std::max(0.0, f0 - traj.inf_f);

    auto add = [&](const std::string& name, double lhs, double rhs) {
        AprioriEntry e;
        e.name = name;
        e.lhs = lhs;
        e.rhs = rhs;
        e.slack = rhs - lhs;
        e.pass = lhs <= rhs + tol;
        if (!e.pass) rep.all_pass = false;
        rep.entries.push_back(e);
    };

    // (en) energy monotone from the start
    double worst_f = -kInf;
    for (double f : traj.free_energies) worst_f = std::max(worst_f, f);
    add("energy_sup", worst_f, f0);

    // (sq) total square estimate
    double sum_w2 = 0.0;
    for (double w : traj.wa_squared) sum_w2 += w;
    add("total_square", sum_w2, 2.0 * tau * gap);

    // (mn) Holder chain bound, worst pair
    {
        double worst_excess = -kInf, lhs_at = 0.0, rhs_at = 0.0;
        for (std::size_t m = 0; m < N; ++m) {
            double chain = 0.0;
            for (std::size_t k = m; k < N; ++k) {
                chain += std::sqrt(std::max(0.0, traj.wa_squared[k]));
                double bound = std::sqrt(2.0 * tau * double(k + 1 - m) * gap);
                if (chain - bound > worst_excess) {
                    worst_excess = chain - bound;
                    lhs_at = chain;
                    rhs_at = bound;
                }
            }
        }
        if (N > 0) add("holder_chain", lhs_at, rhs_at);
    }

    // (sm) entropy lower bound with eps = 1/(8 tau), C_eps = 1/eps + log Z_b
    {
        double eps = 1.0 / (8.0 * tau);
        double c_eps = 1.0 / eps + traj.log_zb;
        double worst = -kInf, lhs_at = 0.0, rhs_at = 0.0;
        for (std::size_t k = 0; k < traj.entropies.size(); ++k) {
            double lhs = -c_eps - eps * traj.second_moments[k];  // must stay below S
            double excess = lhs - traj.entropies[k];
            if (excess > worst) {
                worst = excess;
                lhs_at = lhs;
                rhs_at = traj.entropies[k];
            }
        }
        add("entropy_lower", lhs_at, rhs_at);
    }

    // (mw) moment doubling per step
    {
        double worst = -kInf, lhs_at = 0.0, rhs_at = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            double lhs = traj.second_moments[k + 1];
            double rhs = 2.0 * traj.wa_squared[k] + 2.0 * traj.second_moments[k];
            if (lhs - rhs > worst) {
                worst = lhs - rhs;
                lhs_at = lhs;
                rhs_at = rhs;
            }
        }
        if (N > 0) add("moment_doubling", lhs_at, rhs_at);
    }

    // (12) interpolant bound with the sqrt(6) constant
    {
        double worst = -kInf, lhs_at = 0.0, rhs_at = 0.0;
        for (std::size_t m = 0; m < N; ++m) {
            double chain = 0.0;
            for (std::size_t k = m; k < N; ++k) {
                chain += std::sqrt(std::max(0.0, traj.wa_squared[k]));
                double bound = std::sqrt(6.0 * gap * tau * double(k + 2 - m));
                if (chain - bound > worst) {
                    worst = chain - bound;
                    lhs_at = chain;
                    rhs_at = bound;
                }
            }
        }
        if (N > 0) add("interpolant_holder", lhs_at, rhs_at);
    }
    return rep;
}

}  // namespace wassmob
