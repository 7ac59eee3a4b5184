#include "wassmob/grid.hpp"

#include <limits>

namespace wassmob {

Grid Grid::line(double lo, double hi, std::size_t n) {
    if (n < 2 || !(hi > lo)) throw ValidationError("Grid::line: need n >= 2 and hi > lo");
    Grid g;
    g.dim_ = 1;
    g.n_ = {n, 1};
    g.lo_ = {lo, 0.0};
    g.hi_ = {hi, 0.0};
    g.h_ = {(hi - lo) / double(n - 1), 0.0};
    g.cell_volume_ = g.h_[0];
    return g;
}

Grid Grid::box2d(double lo0, double hi0, std::size_t n0,
                 double lo1, double hi1, std::size_t n1) {
    if (n0 < 2 || n1 < 2 || !(hi0 > lo0) || !(hi1 > lo1))
        throw ValidationError("Grid::box2d: need n >= 2 per axis and hi > lo");
    Grid g;
    g.dim_ = 2;
    g.n_ = {n0, n1};
    g.lo_ = {lo0, lo1};
    g.hi_ = {hi0, hi1};
    g.h_ = {(hi0 - lo0) / double(n0 - 1), (hi1 - lo1) / double(n1 - 1)};
    g.cell_volume_ = g.h_[0] * g.h_[1];
    return g;
}

std::size_t Grid::anchor_index() const {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < size(); ++i) {
        auto x = node(i);
        double d = x[0] * x[0] + x[1] * x[1];
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

bool Grid::contains_origin(double tol) const {
    auto x = node(anchor_index());
    return std::abs(x[0]) <= tol && std::abs(x[1]) <= tol;
}

bool Grid::same_as(const Grid& o) const {
    if (dim_ != o.dim_) return false;
    for (int a = 0; a < dim_; ++a)
        if (n_[a] != o.n_[a] || lo_[a] != o.lo_[a] || hi_[a] != o.hi_[a]) return false;
    return true;
}

}  // namespace wassmob
