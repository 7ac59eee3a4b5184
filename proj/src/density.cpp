#include "wassmob/density.hpp"

#include <cmath>

#include "wassmob/errors.hpp"

namespace wassmob {

namespace {
double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}
}  // namespace

Density::Density(Grid grid, std::vector<double> values, bool normalize)
    : grid_(std::move(grid)), values_(std::move(values)), total_mass_(0.0) {
    if (values_.size() != grid_.size())
        throw GridMismatch("Density: value count does not match grid size");
    for (double v : values_)
        if (!(v >= 0.0)) throw ValidationError("Density: negative or NaN entry");
    double s = pairwise_sum(values_.data(), values_.size()) * grid_.cell_volume();
    if (normalize) {
        if (s <= 0.0) throw ValidationError("Density: cannot normalize zero mass");
        for (double& v : values_) v /= s;
        s = 1.0;
    }
    total_mass_ = s;
    if (std::abs(total_mass_ - 1.0) > 1e-12)
        throw ValidationError("Density: total mass differs from 1 beyond 1e-12");
}

double Density::l1_distance(const Density& other) const {
    if (!grid_.same_as(other.grid_)) throw GridMismatch("l1_distance: grids differ");
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
        s += std::abs(values_[i] - other.values_[i]);
    return s * grid_.cell_volume();
}

Density Density::uniform(const Grid& g) {
    std::vector<double> v(g.size(), 1.0);
    return Density(g, std::move(v), true);
}

Density Density::gibbs(const Grid& g, const std::vector<double>& psi) {
    if (psi.size() != g.size()) throw GridMismatch("gibbs: potential size mismatch");
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-psi[i]);
    return Density(g, std::move(v), true);
}

}  // namespace wassmob
