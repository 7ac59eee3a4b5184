#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "wassmob/grid.hpp"
#include "wassmob/mobility.hpp"

namespace wassmob {

using Vec2 = std::array<double, 2>;

// Isometric embedding b with (grad b)^T grad b = B on the grid. Values are
// anchored so that b vanishes at the node nearest the origin; the constant
// shift cancels in every cost, which depends only on differences b(x)-b(y).
class EmbeddingMap {
public:
    enum class Kind { linear, curve_1d, separable };

    const Grid& grid() const { return grid_; }
    int q() const { return q_; }
    Kind kind() const { return kind_; }
    const Vec2& value(std::size_t node) const { return values_[node]; }
    std::size_t size() const { return values_.size(); }

    // b at an arbitrary point of the box (piecewise-linear in the tables).
    Vec2 eval(const Vec2& x) const;

    bool has_inverse() const { return kind_ != Kind::curve_1d || grid_.dim() == 1; }
    // Inverse map from embedded coordinates back to the box.
    Vec2 invert(const Vec2& xi) const;
    double invert_1d(double xi) const;

    double gram_residual() const { return gram_residual_; }
    void set_gram_residual(double r) { gram_residual_ = r; }

    static double interp_forward(const std::vector<double>& table, double lo, double h, double x);
    static double interp_inverse(const std::vector<double>& table, double lo, double h, double xi);

    // min over nodes (x != anchor) of |b(x)|^2 / |x - x_anchor|^2
    double coercivity_ratio() const;

private:
    friend EmbeddingMap build_embedding_1d(const Grid&, const std::function<double(double)>&);
    friend EmbeddingMap build_embedding_1d_from_samples(const Grid&, const std::vector<double>&);
    friend EmbeddingMap build_embedding_constant(const Mat2&, const Grid&);
    friend EmbeddingMap build_embedding_separable(const Grid&,
                                                  const std::function<double(double)>&,
                                                  const std::function<double(double)>&);
    EmbeddingMap() = default;

    Grid grid_ = Grid::line(0, 1, 2);
    int q_ = 1;
    Kind kind_ = Kind::curve_1d;
    std::vector<Vec2> values_;
    double gram_residual_ = -1.0;
    std::size_t anchor_ = 0;

    // linear case: b(x) = M(x - x_anchor), M upper triangular
    Mat2 M_{1, 0, 0, 1}, Minv_{1, 0, 0, 1};
    // separable case: per-axis monotone tables b_axis[a][i] at node i of axis a
    std::array<std::vector<double>, 2> axis_table_;
};

// 1d specialization b(x) = int_anchor^x sqrt(B(s)) ds, composite Simpson with
// node-aligned panels (midpoint sampled from the callable).
EmbeddingMap build_embedding_1d(const Grid& g, const std::function<double(double)>& B_scalar);
// Sample-only variant (CSV ingestion); trapezoid quadrature.
EmbeddingMap build_embedding_1d_from_samples(const Grid& g, const std::vector<double>& B_samples);

// Constant SPD mobility A: b(x) = M x with M the upper-triangular factor of
// B = A^{-1}, M^T M = B.
EmbeddingMap build_embedding_constant(const Mat2& A, const Grid& g);

// Diagonal B with B_ii = beta_i(x_i): componentwise 1d embeddings, q = d.
EmbeddingMap build_embedding_separable(const Grid& g,
                                       const std::function<double(double)>& beta0,
                                       const std::function<double(double)>& beta1);

// Builds the embedding matching a mobility field's declared family.
EmbeddingMap build_embedding(const MobilityField& B);

// Max over interior nodes of ||(D_h b)^T (D_h b) - B(x)||_max with central
// differences; records the residual on the map.
double verify_embedding(EmbeddingMap& b, const MobilityField& B);

}  // namespace wassmob
