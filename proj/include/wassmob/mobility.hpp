#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "wassmob/grid.hpp"

namespace wassmob {

// d x d symmetric matrix stored as {m00, m01, m10, m11}; 1d uses m00 only.
using Mat2 = std::array<double, 4>;

enum class MobilityFamily { constant, scalar_1d, separable_diagonal };

std::string to_string(MobilityFamily f);

// Per-node mobility A(x) and friction B(x) = A(x)^{-1}, SPD at every node
// with smallest eigenvalue of B bounded below by c0 > 0.
class MobilityField {
public:
    // Constant SPD mobility A on the grid.
    static MobilityField constant(const Grid& g, const Mat2& A);
    static MobilityField constant_scalar(const Grid& g, double a);
    // 1d scalar mobility a(x) > 0 sampled at nodes (B = 1/a).
    static MobilityField scalar_1d(const Grid& g, std::vector<double> a_values);
    static MobilityField scalar_1d(const Grid& g, const std::function<double(double)>& a);
    // 2d diagonal mobility with A_ii = alpha_i(x_i) depending on its own axis only.
    static MobilityField separable_diagonal(const Grid& g,
                                            const std::function<double(double)>& alpha0,
                                            const std::function<double(double)>& alpha1);
    // General per-node B field; family must describe the structure (checked).
    static MobilityField from_friction_samples(const Grid& g, std::vector<Mat2> B,
                                               MobilityFamily family);

    const Grid& grid() const { return grid_; }
    MobilityFamily family() const { return family_; }
    double c0() const { return c0_; }
    const Mat2& A(std::size_t i) const { return A_[i]; }
    const Mat2& B(std::size_t i) const { return B_[i]; }
    std::size_t size() const { return A_.size(); }

    bool is_diagonal(double tol = 1e-14) const;

private:
    MobilityField(Grid g, std::vector<Mat2> A, std::vector<Mat2> B, MobilityFamily f);
    void validate() const;

    Grid grid_;
    std::vector<Mat2> A_, B_;
    MobilityFamily family_;
    double c0_;
};

// Symmetric 2x2 helpers (closed forms; d <= 2 throughout).
double sym_min_eig(const Mat2& m, int dim);
Mat2 sym_inverse(const Mat2& m, int dim);
void check_spd(const Mat2& m, int dim, double tol = 1e-10);

}  // namespace wassmob
