#pragma once

#include <vector>

#include "wassmob/grid.hpp"

namespace wassmob {

// Nonnegative grid density with unit total mass (sum * cell_volume = 1).
class Density {
public:
    Density(Grid grid, std::vector<double> values, bool normalize = false);

    const Grid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

    // mass of cell i (density value times cell volume)
    double mass(std::size_t i) const { return values_[i] * grid_.cell_volume(); }
    double total_mass() const { return total_mass_; }

    double l1_distance(const Density& other) const;

    static Density uniform(const Grid& g);
    // Gibbs density e^{-psi}/Z for per-node potential values psi.
    static Density gibbs(const Grid& g, const std::vector<double>& psi);

private:
    Grid grid_;
    std::vector<double> values_;
    double total_mass_;
};

}  // namespace wassmob
