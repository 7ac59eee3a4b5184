#pragma once

#include <functional>
#include <vector>

#include "wassmob/density.hpp"
#include "wassmob/embedding.hpp"

namespace wassmob {

// Free energy F(rho) = int (rho log rho + rho Psi) dx with U(z) = z log z the
// only supported internal energy; Psi >= 0 everywhere.
class EnergySpec {
public:
    EnergySpec(const Grid& g, std::vector<double> psi);
    EnergySpec(const Grid& g, const std::function<double(double, double)>& psi);

    const Grid& grid() const { return grid_; }
    const std::vector<double>& psi() const { return psi_; }
    double psi(std::size_t i) const { return psi_[i]; }

    Density gibbs() const;  // e^{-Psi}/Z
    double log_z() const;   // log of the Gibbs normalization

private:
    Grid grid_;
    std::vector<double> psi_;
};

double free_energy(const Density& rho, const EnergySpec& E);
// S(rho) = int rho log rho (0 log 0 = 0)
double entropy(const Density& rho);
// M_b(rho) = int |b(x)|^2 rho
double embedded_second_moment(const Density& rho, const EmbeddingMap& b);

}  // namespace wassmob
