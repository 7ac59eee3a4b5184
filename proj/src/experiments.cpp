#include "wassmob/experiments.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "wassmob/errors.hpp"
#include "wassmob/fv.hpp"
#include "wassmob/geodesic.hpp"
#include "wassmob/io.hpp"
#include "wassmob/jko.hpp"
#include "wassmob/kantorovich.hpp"
#include "wassmob/relaxation.hpp"

namespace wassmob {

namespace fs = std::filesystem;
using nlohmann::json;

Grid grid_from_config(const ExperimentConfig& cfg) {
    int dim = cfg.get_int("grid.dim", 1);
    if (dim == 1)
        return Grid::line(cfg.get_double("grid.min", -1.0), cfg.get_double("grid.max", 1.0),
                          std::size_t(cfg.get_int("grid.n", 64)));
    return Grid::box2d(cfg.get_double("grid.min0", -1.0), cfg.get_double("grid.max0", 1.0),
                       std::size_t(cfg.get_int("grid.n0", 16)),
                       cfg.get_double("grid.min1", -1.0), cfg.get_double("grid.max1", 1.0),
                       std::size_t(cfg.get_int("grid.n1", 16)));
}

namespace {
// named analytic mobility profiles a(x) (A = mobility, B = 1/a friction)
std::function<double(double)> mobility_form(const std::string& name, double param) {
    if (name == "const") return [param](double) { return param; };
    if (name == "exp2x") return [](double x) { return std::exp(-2.0 * x); };  // B = e^{2x}
    if (name == "one_plus_x2") return [](double x) { return 1.0 / (1.0 + x * x); };
    throw ValidationError("unknown mobility form: " + name);
}
}  // namespace

MobilityField mobility_from_config(const ExperimentConfig& cfg, const Grid& g,
                                   const fs::path& base_dir) {
    std::string family = cfg.get("mobility.family", "constant");
    if (family == "constant") {
        if (g.dim() == 1 || !cfg.has("mobility.a01"))
            return MobilityField::constant_scalar(g, cfg.get_double("mobility.a", 1.0));
        Mat2 A{cfg.get_double("mobility.a00", 1.0), cfg.get_double("mobility.a01", 0.0),
               cfg.get_double("mobility.a01", 0.0), cfg.get_double("mobility.a11", 1.0)};
        return MobilityField::constant(g, A);
    }
    if (family == "scalar_1d") {
        if (cfg.has("mobility.csv")) {
            auto vals = read_scalar_column_csv(base_dir / cfg.get("mobility.csv"), g.size());
            return MobilityField::scalar_1d(g, std::move(vals));
        }
        return MobilityField::scalar_1d(
            g, mobility_form(cfg.get("mobility.form", "const"),
                             cfg.get_double("mobility.a", 1.0)));
    }
    if (family == "separable_diagonal")
        return MobilityField::separable_diagonal(
            g,
            mobility_form(cfg.get("mobility.form0", "const"), cfg.get_double("mobility.a0", 1.0)),
            mobility_form(cfg.get("mobility.form1", "const"),
                          cfg.get_double("mobility.a1", 1.0)));
    throw ValidationError("unknown mobility family: " + family);
}

EnergySpec psi_from_config(const ExperimentConfig& cfg, const Grid& g,
                           const fs::path& base_dir) {
    std::string form = cfg.get("psi.form", "zero");
    if (form == "csv")
        return EnergySpec(g, read_scalar_column_csv(base_dir / cfg.get("psi.csv"), g.size()));
    double s = cfg.get_double("psi.strength", 1.0);
    double c0 = cfg.get_double("psi.center", 0.0), c1 = cfg.get_double("psi.center1", 0.0);
    if (form == "zero") return EnergySpec(g, [](double, double) { return 0.0; });
    if (form == "quadratic_well")
        return EnergySpec(g, [=](double x, double y) {
            return s * ((x - c0) * (x - c0) + (y - c1) * (y - c1));
        });
    if (form == "double_well") {
        double w = cfg.get_double("psi.width", 0.5);
        return EnergySpec(g, [=](double x, double) {
            double u = x * x - w * w;
            return s * u * u;
        });
    }
    throw ValidationError("unknown psi form: " + form);
}

Density density_from_config(const ExperimentConfig& cfg, const Grid& g,
                            const std::string& section, const fs::path& base_dir) {
    std::string form = cfg.get(section + ".form", "uniform");
    if (form == "uniform") return Density::uniform(g);
    if (form == "csv") return read_density_csv(base_dir / cfg.get(section + ".csv"), g);
    if (form == "gaussian") {
        double c0 = cfg.get_double(section + ".center", 0.0);
        double c1 = cfg.get_double(section + ".center1", 0.0);
        double w = cfg.get_double(section + ".width", 0.25);
        std::vector<double> v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            auto x = g.node(i);
            double r2 = (x[0] - c0) * (x[0] - c0) + (x[1] - c1) * (x[1] - c1);
            v[i] = std::exp(-r2 / (2.0 * w * w));
        }
        return Density(g, std::move(v), /*normalize=*/true);
    }
    if (form == "gibbs") return psi_from_config(cfg, g, base_dir).gibbs();
    throw ValidationError("unknown density form: " + form);
}

namespace {
struct Emitter {
    fs::path outdir;
    ExperimentResult* result;
    json ledger = json::object();

    fs::path sub(const std::string& d, const std::string& name) {
        fs::create_directories(outdir / d);
        fs::path p = outdir / d / name;
        result->files.push_back(p);
        return p;
    }
    void check(const std::string& name, bool pass, const std::string& detail = "") {
        result->checks.push_back({name, pass, detail});
    }
    void finish() {
        std::ofstream out(sub("ledgers", "summary.json"));
        out << ledger.dump(2) << '\n';
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

Density random_density(const Grid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> v(g.size());
    for (auto& x : v) x = u(rng);
    return Density(g, std::move(v), /*normalize=*/true);
}

void run_distance(const ExperimentConfig& cfg, const fs::path& base_dir, Emitter& em) {
    Grid g = grid_from_config(cfg);
    auto A = mobility_from_config(cfg, g, base_dir);
    auto b = build_embedding(A);
    Density r0 = density_from_config(cfg, g, "initial", base_dir);
    Density r1 = density_from_config(cfg, g, "initial2", base_dir);
    write_density_csv(em.sub("densities", "rho0.csv"), r0);
    write_density_csv(em.sub("densities", "rho1.csv"), r1);
    write_embedding_csv(em.sub("densities", "embedding.csv"), b);

    CostMatrix c(b);
    std::string method = cfg.get("solver.method", g.size() <= 512 ? "exact" : "entropic");
    Coupling cp;
    DistanceReport rep;
    if (method == "exact") {
        std::tie(cp, rep) = solve_kantorovich_exact(r0, r1, c);
    } else {
        EntropicOptions opt;
        opt.epsilon = cfg.get_double("solver.epsilon_floor", 1e-4);
        std::tie(cp, rep) = solve_kantorovich_entropic(r0, r1, c, opt);
    }
    write_distance_report_json(em.sub("ledgers", "distance.json"), rep);
    write_coupling_coo(em.sub("ledgers", "coupling.csv"), cp);
    em.ledger["wa_squared"] = rep.wa_squared;
    em.check("nonnegative", rep.wa_squared >= -1e-12, fmt(rep.wa_squared));
    if (rep.gap) em.check("duality_gap", *rep.gap <= 1e-9 * (1.0 + rep.wa_squared), fmt(*rep.gap));
    if (g.dim() == 1) {
        auto r1d = wa_distance_1d(r0, r1, b);
        em.ledger["wa_squared_closed_form"] = r1d.wa_squared;
        em.check("closed_form_agreement",
                 std::abs(r1d.wa_squared - rep.wa_squared) <=
                     1e-6 + 0.05 * std::abs(rep.wa_squared),
                 fmt(r1d.wa_squared));
        std::vector<PlotRow> rows;
        for (std::size_t i = 0; i < g.size(); ++i) {
            rows.push_back({"rho0", g.node1d(i), r0[i]});
            rows.push_back({"rho1", g.node1d(i), r1[i]});
        }
        write_plot_csv(em.sub("plots", "densities.csv"), rows);
    }
}

void run_geodesic(const ExperimentConfig& cfg, const fs::path& base_dir, Emitter& em) {
    Grid g = grid_from_config(cfg);
    auto A = mobility_from_config(cfg, g, base_dir);
    auto b = build_embedding(A);
    Density r0 = density_from_config(cfg, g, "initial", base_dir);
    Density r1 = density_from_config(cfg, g, "initial2", base_dir);
    auto [cp, rep] = solve_kantorovich_exact(r0, r1, CostMatrix(b));
    int slices = cfg.get_int("solver.n_slices", 9);
    std::vector<PlotRow> rows;
    double end_gap = 0.0;
    for (int k = 0; k <= slices; ++k) {
        double s = double(k) / double(slices);
        Density rs = geodesic_interpolate(cp, b, s, 1.0);
        write_density_csv(em.sub("densities", "slice_" + std::to_string(k) + ".csv"), rs);
        if (g.dim() == 1)
            for (std::size_t i = 0; i < g.size(); ++i)
                rows.push_back({"s" + std::to_string(k), g.node1d(i), rs[i]});
        if (k == 0) end_gap = std::max(end_gap, rs.l1_distance(r0));
        if (k == slices) end_gap = std::max(end_gap, rs.l1_distance(r1));
    }
    write_plot_csv(em.sub("plots", "geodesic.csv"), rows);
    em.ledger["wa_squared"] = rep.wa_squared;
    em.ledger["endpoint_l1_gap"] = end_gap;
    em.check("endpoints", end_gap <= 1e-9, fmt(end_gap));
}

void run_jko_experiment(const ExperimentConfig& cfg, const fs::path& base_dir, Emitter& em) {
    Grid g = grid_from_config(cfg);
    auto A = mobility_from_config(cfg, g, base_dir);
    auto b = build_embedding(A);
    auto E = psi_from_config(cfg, g, base_dir);
    Density r0 = density_from_config(cfg, g, "initial", base_dir);

    JKOConfig jc;
    jc.tau = cfg.get_double("solver.tau", 1e-2);
    jc.n_steps = cfg.get_int("solver.n_steps", 50);
    jc.inner = cfg.get("solver.inner", "entropic") == "exact_small" ? InnerSolver::exact_small
                                                                    : InnerSolver::entropic;
    jc.epsilon_floor = cfg.get_double("solver.epsilon_floor", 1e-4);
    jc.epsilon_start = cfg.get_double("solver.epsilon_start", 0.0);
    jc.max_iter = cfg.get_int("solver.max_iter", 20000);

    JKOTrajectory traj = run_jko(r0, E, b, jc);
    json steps = json::array();
    std::vector<PlotRow> rows;
    for (std::size_t k = 0; k < traj.densities.size(); ++k) {
        json s;
        s["step"] = k;
        s["F"] = traj.free_energies[k];
        s["S"] = traj.entropies[k];
        s["M_b"] = traj.second_moments[k];
        if (k > 0) {
            s["wa_squared"] = traj.wa_squared[k - 1];
            s["solver_iters"] = traj.reports[k - 1].iterations;
            s["marginal_defect"] = traj.reports[k - 1].marginal_defect;
        }
        steps.push_back(s);
        rows.push_back({"free_energy", double(k) * jc.tau, traj.free_energies[k]});
        if (k + 1 == traj.densities.size() || k % 10 == 0)
            write_density_csv(em.sub("densities", "step_" + std::to_string(k) + ".csv"),
                              traj.densities[k]);
    }
    em.ledger["steps"] = steps;
    em.ledger["aborted_with"] = traj.aborted_with;
    write_plot_csv(em.sub("plots", "energy.csv"), rows);

    auto rep = apriori_report(traj, cfg.get_double("solver.apriori_tol", 1e-6));
    json bounds = json::array();
    for (const auto& e : rep.entries) {
        json j{{"name", e.name}, {"lhs", e.lhs}, {"rhs", e.rhs}, {"slack", e.slack},
               {"pass", e.pass}};
        bounds.push_back(j);
        em.check("apriori_" + e.name, e.pass, fmt(e.slack));
    }
    em.ledger["apriori"] = bounds;
    em.check("completed", traj.aborted_with.empty(), traj.aborted_with);
}

void run_fv_reference(const ExperimentConfig& cfg, const fs::path& base_dir, Emitter& em) {
    Grid g = grid_from_config(cfg);
    auto A = mobility_from_config(cfg, g, base_dir);
    auto E = psi_from_config(cfg, g, base_dir);
    Density r0 = density_from_config(cfg, g, "initial", base_dir);
    double dt = cfg.get_double("solver.dt", 1e-3), T = cfg.get_double("solver.T", 0.1);

    FVOperator op(A, E);
    // relative to the operator magnitude (entries scale like a/h^2)
    double op_scale = 0.0;
    for (int k = 0; k < op.matrix().outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(op.matrix(), k); it; ++it)
            op_scale = std::max(op_scale, std::abs(it.value()));
    em.check("column_sums", op.max_column_sum() <= 1e-13 * std::max(1.0, op_scale),
             fmt(op.max_column_sum()));
    auto gibbs = E.gibbs();
    auto resid = op.apply(gibbs.values());
    double worst = 0.0;
    for (double r : resid) worst = std::max(worst, std::abs(r));
    em.check("gibbs_steady_state", worst <= 1e-11, fmt(worst));

    auto traj = run_reference(A, E, r0, dt, T);
    bool monotone = true;
    std::vector<PlotRow> rows;
    for (std::size_t k = 0; k < traj.free_energies.size(); ++k) {
        if (k > 0 && traj.free_energies[k] > traj.free_energies[k - 1] + 1e-12) monotone = false;
        rows.push_back({"free_energy", traj.times[k], traj.free_energies[k]});
    }
    em.check("energy_monotone", monotone);
    write_plot_csv(em.sub("plots", "energy.csv"), rows);
    write_density_csv(em.sub("densities", "final.csv"), traj.densities.back());
    em.ledger["final_free_energy"] = traj.free_energies.back();
    em.ledger["gibbs_free_energy"] = free_energy(gibbs, E);
}

void run_jko_vs_fv(const ExperimentConfig& cfg, const fs::path& base_dir, Emitter& em) {
    Grid g = grid_from_config(cfg);
    auto A = mobility_from_config(cfg, g, base_dir);
    auto b = build_embedding(A);
    auto E = psi_from_config(cfg, g, base_dir);
    Density r0 = density_from_config(cfg, g, "initial", base_dir);
    double T = cfg.get_double("solver.T", 0.1);
    auto taus = cfg.get_list("solver.taus");
    if (taus.empty()) taus = {4e-3, 2e-3, 1e-3};
    // Matched schedule: the entropic regularization (in scaled-cost units) is
    // proportional to tau, so the absolute blur 2*tau*eps shrinks like tau^2
    // while staying wide enough (>= 2h^2 at the smallest tau) to wash out the
    // grid quantization of the transport cost. The remaining JKO-FV gap is
    // then dominated by terms linear in tau.
    double eps_per_tau = cfg.get_double("solver.epsilon_per_tau", 100.0);

    std::vector<PlotRow> rows;
    std::vector<double> gaps;
    for (double tau : taus) {
        int n = int(std::llround(T / tau));
        JKOConfig jc;
        jc.tau = tau;
        jc.n_steps = n;
        jc.epsilon_floor = cfg.get_double("solver.epsilon_floor", eps_per_tau * tau);
        jc.max_iter = cfg.get_int("solver.max_iter", 20000);
        auto jko = run_jko(r0, E, b, jc);
        auto fv = run_reference(A, E, r0, tau, T);
        double gap = jko.densities.back().l1_distance(fv.densities.back());
        gaps.push_back(gap);
        rows.push_back({"l1_gap", tau, gap});
    }
    double order = 0.0;
    for (std::size_t k = 1; k < taus.size(); ++k)
        order += std::log(gaps[k - 1] / gaps[k]) / std::log(taus[k - 1] / taus[k]);
    order /= double(taus.size() - 1);
    write_plot_csv(em.sub("plots", "gap_vs_tau.csv"), rows);
    em.ledger["taus"] = taus;
    em.ledger["l1_gaps"] = gaps;
    em.ledger["tau_order"] = order;
    em.check("tau_order", order >= 0.8, fmt(order));
}

void run_relaxation(const ExperimentConfig& cfg, std::uint64_t seed, Emitter& em) {
    int n = cfg.get_int("relaxation.dimension", 10);
    double tau = cfg.get_double("solver.tau", 1e-3);
    double T = cfg.get_double("solver.T", 2.0);
    auto eps = cfg.get_list("relaxation.epsilons");
    if (eps.empty()) eps = {1e-1, 1e-2, 1e-3, 1e-4};

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd R(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) R(i, j) = gauss(rng);
    Eigen::MatrixXd K = R * R.transpose() + Eigen::MatrixXd::Identity(n, n);
    // keep the relaxation rate of B^{-1}K below ~0.5 so the windowed gap is
    // still dominated by its O(epsilon) prefactor at the window start 10*eps
    K *= 0.5 / K.operatorNorm();
    Eigen::MatrixXd Q(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Q(i, j) = gauss(rng);
    Eigen::MatrixXd B = Q * Q.transpose() + Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd f(n), y0(n), v0(n);
    for (int i = 0; i < n; ++i) {
        f[i] = gauss(rng);
        y0[i] = gauss(rng);
        v0[i] = gauss(rng);
    }
    QuadraticSystem sys(K, f, B, eps.front(), tau);

    auto rep = run_comparison(sys, y0, v0, T, eps);
    std::vector<PlotRow> rows;
    json gaps = json::array();
    for (const auto& gp : rep.gaps) {
        rows.push_back({"windowed_gap", gp.epsilon, gp.windowed_gap});
        gaps.push_back({{"epsilon", gp.epsilon}, {"gap", gp.gap},
                        {"windowed_gap", gp.windowed_gap}});
    }
    write_plot_csv(em.sub("plots", "gap_vs_epsilon.csv"), rows);
    em.ledger["gaps"] = gaps;
    em.check("windowed_monotone", rep.windowed_monotone);

    // dissipation audit on the smallest-epsilon trajectory
    QuadraticSystem s2 = sys;
    s2.epsilon = eps.back();
    std::vector<DampedState> traj{make_state(s2, y0, v0)};
    int steps = int(std::llround(T / tau));
    for (int k = 0; k < steps; ++k) traj.push_back(damped_step(s2, traj.back()));
    auto audit = dissipation_audit(s2, traj, cfg.get_int("relaxation.n_velocities", 10), seed);
    em.ledger["max_balance_residual"] = audit.max_balance_residual;
    em.ledger["min_margin"] = audit.min_margin;
    em.check("energy_monotone", audit.energy_monotone);
    em.check("dissipation_margin", audit.min_margin >= -1e-9, fmt(audit.min_margin));
}

void run_metric_axioms(const ExperimentConfig& cfg, const fs::path& base_dir,
                       std::uint64_t seed, Emitter& em) {
    Grid g = grid_from_config(cfg);
    auto A = mobility_from_config(cfg, g, base_dir);
    auto b = build_embedding(A);
    CostMatrix c(b);
    int n_triples = cfg.get_int("solver.n_triples", 200);
    std::mt19937_64 rng(seed);

    int tri_pass = 0, sym_pass = 0, id_pass = 0;
    double worst_tri = 0.0;
    for (int k = 0; k < n_triples; ++k) {
        Density r1 = random_density(g, rng), r2 = random_density(g, rng),
                r3 = random_density(g, rng);
        double w12 = solve_kantorovich_exact(r1, r2, c).second.wa_squared;
        double w23 = solve_kantorovich_exact(r2, r3, c).second.wa_squared;
        double w13 = solve_kantorovich_exact(r1, r3, c).second.wa_squared;
        double slack = std::sqrt(std::max(0.0, w12)) + std::sqrt(std::max(0.0, w23)) -
                       std::sqrt(std::max(0.0, w13));
        worst_tri = std::min(worst_tri, slack);
        if (slack >= -1e-7) ++tri_pass;
        double w21 = solve_kantorovich_exact(r2, r1, c).second.wa_squared;
        if (std::abs(w12 - w21) <= 1e-9) ++sym_pass;
        if (solve_kantorovich_exact(r1, r1, c).second.wa_squared <= 1e-9) ++id_pass;
    }
    em.ledger["triples"] = n_triples;
    em.ledger["triangle_pass"] = tri_pass;
    em.ledger["symmetry_pass"] = sym_pass;
    em.ledger["identity_pass"] = id_pass;
    em.ledger["worst_triangle_slack"] = worst_tri;
    em.check("triangle", tri_pass == n_triples, fmt(worst_tri));
    em.check("symmetry", sym_pass == n_triples);
    em.check("identity", id_pass == n_triples);
}
}  // namespace

void emit_manifest(const fs::path& outdir, const ExperimentResult& result) {
    json m;
    m["files"] = json::object();
    for (const auto& f : result.files)
        m["files"][fs::relative(f, outdir).generic_string()] = fnv1a_file_hash(f);
    m["checks"] = json::array();
    for (const auto& c : result.checks)
        m["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    m["all_pass"] = result.all_pass();
    std::ofstream out(outdir / "MANIFEST.json");
    if (!out) throw IOError("cannot write MANIFEST.json under " + outdir.string());
    out << m.dump(2) << '\n';
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const fs::path& outdir,
                                const fs::path& base_dir) {
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw IOError("cannot create output directory " + outdir.string());
    {
        std::ofstream echo(outdir / "config.echo");
        if (!echo) throw IOError("output directory not writable: " + outdir.string());
        echo << cfg.emit();
    }

    ExperimentResult result;
    Emitter em{outdir, &result};
    result.files.push_back(outdir / "config.echo");

    if (cfg.kind == "distance")
        run_distance(cfg, base_dir, em);
    else if (cfg.kind == "geodesic")
        run_geodesic(cfg, base_dir, em);
    else if (cfg.kind == "jko")
        run_jko_experiment(cfg, base_dir, em);
    else if (cfg.kind == "fv_reference")
        run_fv_reference(cfg, base_dir, em);
    else if (cfg.kind == "jko_vs_fv")
        run_jko_vs_fv(cfg, base_dir, em);
    else if (cfg.kind == "relaxation")
        run_relaxation(cfg, cfg.seed, em);
    else if (cfg.kind == "metric_axioms")
        run_metric_axioms(cfg, base_dir, cfg.seed, em);
    else
        throw ValidationError("unknown experiment kind: " + cfg.kind);

    em.finish();
    emit_manifest(outdir, result);
    return result;
}

}  // namespace wassmob
