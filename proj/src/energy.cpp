#include "wassmob/energy.hpp"

#include <cmath>

#include "wassmob/errors.hpp"

namespace wassmob {

EnergySpec::EnergySpec(const Grid& g, std::vector<double> psi)
    : grid_(g), psi_(std::move(psi)) {
    if (psi_.size() != g.size()) throw GridMismatch("EnergySpec: Psi sample count mismatch");
    for (double p : psi_)
        if (!(p >= 0.0)) throw ValidationError("EnergySpec: Psi must be nonnegative");
}

EnergySpec::EnergySpec(const Grid& g, const std::function<double(double, double)>& psi)
    : grid_(g) {
    psi_.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto x = g.node(i);
        psi_[i] = psi(x[0], x[1]);
        if (!(psi_[i] >= 0.0)) throw ValidationError("EnergySpec: Psi must be nonnegative");
    }
}

Density EnergySpec::gibbs() const { return Density::gibbs(grid_, psi_); }

double EnergySpec::log_z() const {
    double z = 0.0;
    for (double p : psi_) z += std::exp(-p);
    return std::log(z * grid_.cell_volume());
}

double free_energy(const Density& rho, const EnergySpec& E) {
    if (!rho.grid().same_as(E.grid())) throw GridMismatch("free_energy: grid mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        double z = rho[i];
        if (z > 0.0) acc += z * std::log(z) + z * E.psi(i);
    }
    return acc * rho.grid().cell_volume();
}

double entropy(const Density& rho) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i)
        if (rho[i] > 0.0) acc += rho[i] * std::log(rho[i]);
    return acc * rho.grid().cell_volume();
}

double embedded_second_moment(const Density& rho, const EmbeddingMap& b) {
    if (!rho.grid().same_as(b.grid()))
        throw GridMismatch("embedded_second_moment: grid mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const Vec2& v = b.value(i);
        acc += (v[0] * v[0] + v[1] * v[1]) * rho[i];
    }
    return acc * rho.grid().cell_volume();
}

}  // namespace wassmob
