// Python bindings for the core library: grids, densities, mobility fields,
// the isometric embedding, distances, maps, JKO runs, the FV reference
// solver, and the config-driven experiment runner.
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "wassmob/config.hpp"
#include "wassmob/embedding.hpp"
#include "wassmob/experiments.hpp"
#include "wassmob/fv.hpp"
#include "wassmob/jko.hpp"
#include "wassmob/kantorovich.hpp"
#include "wassmob/maps.hpp"

namespace py = pybind11;
using namespace wassmob;

namespace {

std::vector<double> to_vector(const py::array_t<double>& a) {
    auto buf = a.request();
    const double* p = static_cast<const double*>(buf.ptr);
    return std::vector<double>(p, p + buf.size);
}

py::array_t<double> density_values(const Density& rho) {
    py::array_t<double> out({py::ssize_t(rho.size())}, {py::ssize_t(sizeof(double))});
    double* p = out.mutable_data();
    for (std::size_t i = 0; i < rho.size(); ++i) p[i] = rho[i];
    return out;
}

py::array_t<double> coupling_matrix(const Coupling& cp) {
    py::array_t<double> out({cp.n, cp.n});
    std::copy(cp.pi.begin(), cp.pi.end(), out.mutable_data());
    return out;
}

py::dict report_dict(const DistanceReport& rep) {
    py::dict d;
    d["wa_squared"] = rep.wa_squared;
    d["method"] = rep.method;
    d["marginal_defect"] = rep.marginal_defect;
    d["iterations"] = rep.iterations;
    d["converged"] = rep.converged;
    if (rep.dual_value) d["dual_value"] = *rep.dual_value;
    if (rep.gap) d["gap"] = *rep.gap;
    return d;
}

}  // namespace

PYBIND11_MODULE(pywassmob, m) {
    m.doc() = "Weighted Wasserstein metrics for variable-mobility Fokker-Planck equations";

    py::class_<Grid>(m, "Grid")
        .def_static("line", &Grid::line, py::arg("lo"), py::arg("hi"), py::arg("n"))
        .def_static("box2d", &Grid::box2d, py::arg("lo0"), py::arg("hi0"), py::arg("n0"),
                    py::arg("lo1"), py::arg("hi1"), py::arg("n1"))
        .def_property_readonly("dim", &Grid::dim)
        .def_property_readonly("size", &Grid::size)
        .def("h", &Grid::h, py::arg("axis") = 0)
        .def("cell_volume", &Grid::cell_volume)
        .def("nodes", [](const Grid& g) {
            py::array_t<double> out({g.size(), std::size_t(g.dim())});
            double* p = out.mutable_data();
            for (std::size_t i = 0; i < g.size(); ++i) {
                auto x = g.node(i);
                for (int d = 0; d < g.dim(); ++d) p[i * g.dim() + d] = x[d];
            }
            return out;
        });

    py::class_<Density>(m, "Density")
        .def(py::init([](const Grid& g, const py::array_t<double>& v, bool normalize) {
                 return Density(g, to_vector(v), normalize);
             }),
             py::arg("grid"), py::arg("values"), py::arg("normalize") = true)
        .def_static("uniform", &Density::uniform)
        .def_property_readonly("values", &density_values)
        .def("total_mass", &Density::total_mass)
        .def("l1_distance", &Density::l1_distance);

    py::class_<MobilityField>(m, "MobilityField")
        .def_static("constant_scalar", &MobilityField::constant_scalar, py::arg("grid"),
                    py::arg("a"))
        .def_static(
            "scalar_1d",
            [](const Grid& g, const std::function<double(double)>& a) {
                return MobilityField::scalar_1d(g, a);
            },
            py::arg("grid"), py::arg("a"))
        .def_static("separable_diagonal", &MobilityField::separable_diagonal, py::arg("grid"),
                    py::arg("a0"), py::arg("a1"))
        .def("c0", &MobilityField::c0);

    py::class_<EmbeddingMap>(m, "EmbeddingMap")
        .def("values", [](const EmbeddingMap& b) {
            const Grid& g = b.grid();
            py::array_t<double> out({g.size(), std::size_t(g.dim())});
            double* p = out.mutable_data();
            for (std::size_t i = 0; i < g.size(); ++i)
                for (int d = 0; d < g.dim(); ++d) p[i * g.dim() + d] = b.value(i)[d];
            return out;
        });

    m.def("build_embedding", [](const MobilityField& A) { return build_embedding(A); },
          py::arg("mobility"));
    m.def("verify_embedding",
          [](EmbeddingMap& b, const MobilityField& A) { return verify_embedding(b, A); },
          py::arg("embedding"), py::arg("mobility"),
          "Max Gram residual |(grad b)^T grad b - B| over interior nodes");

    py::class_<EnergySpec>(m, "EnergySpec")
        .def(py::init([](const Grid& g, const py::array_t<double>& psi) {
                 return EnergySpec(g, to_vector(psi));
             }),
             py::arg("grid"), py::arg("psi"))
        .def("gibbs", &EnergySpec::gibbs);

    m.def(
        "wa_distance_exact",
        [](const Density& r0, const Density& r1, const MobilityField& A) {
            auto b = build_embedding(A);
            CostMatrix c(b);
            auto [cp, rep] = solve_kantorovich_exact(r0, r1, c);
            return py::make_tuple(report_dict(rep), coupling_matrix(cp));
        },
        py::arg("rho0"), py::arg("rho1"), py::arg("mobility"),
        "Exact LP value of W_A^2 with the optimal coupling");
    m.def(
        "wa_distance_entropic",
        [](const Density& r0, const Density& r1, const MobilityField& A, double epsilon,
           double tol) {
            auto b = build_embedding(A);
            CostMatrix c(b);
            EntropicOptions opt;
            opt.epsilon = epsilon;
            opt.tol = tol;
            auto [cp, rep] = solve_kantorovich_entropic(r0, r1, c, opt);
            return py::make_tuple(report_dict(rep), coupling_matrix(cp));
        },
        py::arg("rho0"), py::arg("rho1"), py::arg("mobility"), py::arg("epsilon") = 1e-3,
        py::arg("tol") = 1e-9);
    m.def(
        "wa_distance_1d",
        [](const Density& r0, const Density& r1, const MobilityField& A) {
            auto b = build_embedding(A);
            return wa_distance_1d(r0, r1, b).wa_squared;
        },
        py::arg("rho0"), py::arg("rho1"), py::arg("mobility"),
        "Closed-form 1d value of W_A^2 (quantile coupling)");
    m.def(
        "monotone_map_1d",
        [](const Density& r0, const Density& r1, const MobilityField& A) {
            auto b = build_embedding(A);
            auto map = map_1d_monotone(r0, r1, b);
            py::array_t<double> out({py::ssize_t(map.image.size())},
                                    {py::ssize_t(sizeof(double))});
            double* p = out.mutable_data();
            for (std::size_t i = 0; i < map.image.size(); ++i) p[i] = map.image[i][0];
            return out;
        },
        py::arg("rho0"), py::arg("rho1"), py::arg("mobility"));

    m.def(
        "run_jko",
        [](const Density& rho0, const EnergySpec& E, const MobilityField& A, double tau,
           int n_steps, const std::string& inner, double epsilon_floor) {
            JKOConfig cfg;
            cfg.tau = tau;
            cfg.n_steps = n_steps;
            cfg.inner = inner == "exact_small" ? InnerSolver::exact_small
                                               : InnerSolver::entropic;
            if (epsilon_floor > 0) cfg.epsilon_floor = epsilon_floor;
            auto b = build_embedding(A);
            auto traj = run_jko(rho0, E, b, cfg);
            py::dict d;
            d["densities"] = [&] {
                py::list out;
                for (const auto& r : traj.densities) out.append(density_values(r));
                return out;
            }();
            d["free_energies"] = traj.free_energies;
            d["wa_squared"] = traj.wa_squared;
            d["aborted_with"] = traj.aborted_with;
            return d;
        },
        py::arg("rho0"), py::arg("energy"), py::arg("mobility"), py::arg("tau"),
        py::arg("n_steps"), py::arg("inner") = "entropic", py::arg("epsilon_floor") = 0.0);

    m.def(
        "run_fv_reference",
        [](const Density& rho0, const EnergySpec& E, const MobilityField& A, double dt,
           double T) {
            auto traj = run_reference(A, E, rho0, dt, T);
            py::dict d;
            d["final"] = density_values(traj.densities.back());
            d["free_energies"] = traj.free_energies;
            d["times"] = traj.times;
            return d;
        },
        py::arg("rho0"), py::arg("energy"), py::arg("mobility"), py::arg("dt"), py::arg("T"));

    m.def(
        "run_experiment",
        [](const std::string& config_text, const std::filesystem::path& outdir,
           std::optional<std::uint64_t> seed) {
            ExperimentConfig cfg = parse_config_text(config_text);
            if (seed) cfg.seed = *seed;
            cfg.validate(".");
            auto result = run_experiment(cfg, outdir);
            py::dict d;
            d["all_pass"] = result.all_pass();
            py::list checks;
            for (const auto& c : result.checks) {
                py::dict e;
                e["name"] = c.name;
                e["pass"] = c.pass;
                e["detail"] = c.detail;
                checks.append(e);
            }
            d["checks"] = checks;
            return d;
        },
        py::arg("config_text"), py::arg("outdir"), py::arg("seed") = std::nullopt,
        "Run a config-driven experiment; writes the output bundle and returns its checks");
}
