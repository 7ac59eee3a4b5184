#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "wassmob/errors.hpp"

namespace wassmob {

// Uniform rectangular grid on a box in R^d, d in {1,2}.
// Node i lies at min + i*h along each axis; all nodes carry the same
// quadrature weight cell_volume() (rectangle rule).
class Grid {
public:
    static Grid line(double lo, double hi, std::size_t n);
    static Grid box2d(double lo0, double hi0, std::size_t n0,
                      double lo1, double hi1, std::size_t n1);

    int dim() const { return dim_; }
    std::size_t n(int axis) const { return n_[axis]; }
    std::size_t size() const { return dim_ == 1 ? n_[0] : n_[0] * n_[1]; }
    double h(int axis) const { return h_[axis]; }
    double lo(int axis) const { return lo_[axis]; }
    double hi(int axis) const { return hi_[axis]; }
    double cell_volume() const { return cell_volume_; }

    // Coordinate of node `idx` (row-major in 2d: idx = i0*n1 + i1).
    std::array<double, 2> node(std::size_t idx) const {
        if (dim_ == 1) return {lo_[0] + double(idx) * h_[0], 0.0};
        std::size_t i0 = idx / n_[1], i1 = idx % n_[1];
        return {lo_[0] + double(i0) * h_[0], lo_[1] + double(i1) * h_[1]};
    }
    double node1d(std::size_t i) const { return lo_[0] + double(i) * h_[0]; }

    // Index of the node nearest to the origin; used as embedding anchor.
    std::size_t anchor_index() const;
    bool contains_origin(double tol = 1e-12) const;

    bool same_as(const Grid& o) const;

private:
    Grid() = default;
    int dim_ = 1;
    std::array<std::size_t, 2> n_{2, 1};
    std::array<double, 2> lo_{0, 0}, hi_{1, 0}, h_{1, 0};
    double cell_volume_ = 1.0;
};

}  // namespace wassmob
