#include "wassmob/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "wassmob/errors.hpp"

namespace wassmob {

namespace {

// Cumulative integral of sqrt(beta) along a 1d axis, anchored at `anchor`.
// Per-cell composite Simpson when a callable is available, trapezoid for
// sample-only input.
std::vector<double> cumulative_sqrt_table(std::size_t n, double lo, double h,
                                          std::size_t anchor,
                                          const std::function<double(double)>* fn,
                                          const std::vector<double>* samples) {
    auto beta_at_node = [&](std::size_t i) {
        double v = fn ? (*fn)(lo + double(i) * h) : (*samples)[i];
        if (!(v > 0.0)) throw NonPositiveMobility("embedding: nonpositive friction sample");
        return v;
    };
    std::vector<double> cell(n - 1);  // integral of sqrt(beta) over cell i
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double bl = beta_at_node(i), br = beta_at_node(i + 1);
        if (fn) {
            double bm = (*fn)(lo + (double(i) + 0.5) * h);
            if (!(bm > 0.0)) throw NonPositiveMobility("embedding: nonpositive friction sample");
            cell[i] = h / 6.0 * (std::sqrt(bl) + 4.0 * std::sqrt(bm) + std::sqrt(br));
        } else {
            cell[i] = h / 2.0 * (std::sqrt(bl) + std::sqrt(br));
        }
    }
    std::vector<double> table(n, 0.0);
    for (std::size_t i = anchor; i + 1 < n; ++i) table[i + 1] = table[i] + cell[i];
    for (std::size_t i = anchor; i > 0; --i) table[i - 1] = table[i] - cell[i - 1];
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(table[i + 1] > table[i]))
            throw NonPositiveMobility("embedding: table not strictly increasing");
    return table;
}

std::size_t axis_anchor(double lo, double h, std::size_t n) {
    // origin if the axis contains it, else the leftmost node
    if (lo <= 1e-12 && lo + double(n - 1) * h >= -1e-12) {
        double t = -lo / h;
        auto i = std::size_t(std::llround(t));
        if (i < n && std::abs(lo + double(i) * h) <= 1e-12) return i;
    }
    return 0;
}

}  // namespace

double EmbeddingMap::interp_forward(const std::vector<double>& table, double lo, double h,
                                    double x) {
    double t = (x - lo) / h;
    auto n = table.size();
    if (t <= 0.0) return table[0] + t * (table[1] - table[0]);
    if (t >= double(n - 1))
        return table[n - 1] + (t - double(n - 1)) * (table[n - 1] - table[n - 2]);
    auto i = std::size_t(t);
    double f = t - double(i);
    return table[i] + f * (table[i + 1] - table[i]);
}

double EmbeddingMap::interp_inverse(const std::vector<double>& table, double lo, double h,
                                    double xi) {
    auto n = table.size();
    if (xi <= table[0]) return lo + h * (xi - table[0]) / (table[1] - table[0]);
    if (xi >= table[n - 1])
        return lo + h * (double(n - 1) + (xi - table[n - 1]) / (table[n - 1] - table[n - 2]));
    auto it = std::upper_bound(table.begin(), table.end(), xi);
    auto i = std::size_t(it - table.begin()) - 1;
    double f = (xi - table[i]) / (table[i + 1] - table[i]);
    return lo + h * (double(i) + f);
}

Vec2 EmbeddingMap::eval(const Vec2& x) const {
    switch (kind_) {
        case Kind::linear: {
            double u = x[0] - grid_.node(anchor_)[0];
            double v = x[1] - grid_.node(anchor_)[1];
            if (grid_.dim() == 1) return {M_[0] * u, 0.0};
            return {M_[0] * u + M_[1] * v, M_[2] * u + M_[3] * v};
        }
        case Kind::curve_1d:
            return {interp_forward(axis_table_[0], grid_.lo(0), grid_.h(0), x[0]), 0.0};
        case Kind::separable:
            return {interp_forward(axis_table_[0], grid_.lo(0), grid_.h(0), x[0]),
                    interp_forward(axis_table_[1], grid_.lo(1), grid_.h(1), x[1])};
    }
    return {0, 0};
}

Vec2 EmbeddingMap::invert(const Vec2& xi) const {
    switch (kind_) {
        case Kind::linear: {
            auto xa = grid_.node(anchor_);
            if (grid_.dim() == 1) return {xa[0] + Minv_[0] * xi[0], 0.0};
            return {xa[0] + Minv_[0] * xi[0] + Minv_[1] * xi[1],
                    xa[1] + Minv_[2] * xi[0] + Minv_[3] * xi[1]};
        }
        case Kind::curve_1d:
            return {interp_inverse(axis_table_[0], grid_.lo(0), grid_.h(0), xi[0]), 0.0};
        case Kind::separable:
            return {interp_inverse(axis_table_[0], grid_.lo(0), grid_.h(0), xi[0]),
                    interp_inverse(axis_table_[1], grid_.lo(1), grid_.h(1), xi[1])};
    }
    throw NotInvertible("EmbeddingMap: no inverse for this family");
}

double EmbeddingMap::invert_1d(double xi) const {
    if (grid_.dim() != 1) throw DimensionMismatch("invert_1d requires a 1d embedding");
    return invert({xi, 0.0})[0];
}

double EmbeddingMap::coercivity_ratio() const {
    auto xa = grid_.node(anchor_);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < size(); ++i) {
        if (i == anchor_) continue;
        auto x = grid_.node(i);
        double dx2 = (x[0] - xa[0]) * (x[0] - xa[0]) + (x[1] - xa[1]) * (x[1] - xa[1]);
        double b2 = values_[i][0] * values_[i][0] + values_[i][1] * values_[i][1];
        worst = std::min(worst, b2 / dx2);
    }
    return worst;
}

EmbeddingMap build_embedding_1d(const Grid& g, const std::function<double(double)>& B_scalar) {
    if (g.dim() != 1) throw DimensionMismatch("build_embedding_1d requires a 1d grid");
    EmbeddingMap e;
    e.grid_ = g;
    e.q_ = 1;
    e.kind_ = EmbeddingMap::Kind::curve_1d;
    e.anchor_ = axis_anchor(g.lo(0), g.h(0), g.n(0));
    e.axis_table_[0] =
        cumulative_sqrt_table(g.n(0), g.lo(0), g.h(0), e.anchor_, &B_scalar, nullptr);
    e.values_.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) e.values_[i] = {e.axis_table_[0][i], 0.0};
    return e;
}

EmbeddingMap build_embedding_1d_from_samples(const Grid& g, const std::vector<double>& B_samples) {
    if (g.dim() != 1) throw DimensionMismatch("build_embedding_1d requires a 1d grid");
    if (B_samples.size() != g.size()) throw GridMismatch("embedding: sample count mismatch");
    EmbeddingMap e;
    e.grid_ = g;
    e.q_ = 1;
    e.kind_ = EmbeddingMap::Kind::curve_1d;
    e.anchor_ = axis_anchor(g.lo(0), g.h(0), g.n(0));
    e.axis_table_[0] =
        cumulative_sqrt_table(g.n(0), g.lo(0), g.h(0), e.anchor_, nullptr, &B_samples);
    e.values_.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) e.values_[i] = {e.axis_table_[0][i], 0.0};
    return e;
}

EmbeddingMap build_embedding_constant(const Mat2& A, const Grid& g) {
    check_spd(A, g.dim());
    Mat2 B = sym_inverse(A, g.dim());
    // upper-triangular M with M^T M = B (transpose of the lower Cholesky factor)
    Mat2 M{0, 0, 0, 0}, Minv{0, 0, 0, 0};
    if (g.dim() == 1) {
        M[0] = std::sqrt(B[0]);
        Minv[0] = 1.0 / M[0];
    } else {
        double l00 = std::sqrt(B[0]);
        double l10 = B[1] / l00;
        double l11 = std::sqrt(B[3] - l10 * l10);
        M = {l00, l10, 0.0, l11};
        Minv = {1.0 / l00, -l10 / (l00 * l11), 0.0, 1.0 / l11};
    }
    EmbeddingMap e;
    e.grid_ = g;
    e.q_ = g.dim();
    e.kind_ = EmbeddingMap::Kind::linear;
    e.M_ = M;
    e.Minv_ = Minv;
    e.anchor_ = g.contains_origin() ? g.anchor_index() : 0;
    e.values_.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto x = g.node(i);
        e.values_[i] = e.eval(x);
    }
    return e;
}

EmbeddingMap build_embedding_separable(const Grid& g,
                                       const std::function<double(double)>& beta0,
                                       const std::function<double(double)>& beta1) {
    if (g.dim() != 2) throw DimensionMismatch("build_embedding_separable requires a 2d grid");
    EmbeddingMap e;
    e.grid_ = g;
    e.q_ = 2;
    e.kind_ = EmbeddingMap::Kind::separable;
    std::size_t a0 = axis_anchor(g.lo(0), g.h(0), g.n(0));
    std::size_t a1 = axis_anchor(g.lo(1), g.h(1), g.n(1));
    e.anchor_ = a0 * g.n(1) + a1;
    e.axis_table_[0] = cumulative_sqrt_table(g.n(0), g.lo(0), g.h(0), a0, &beta0, nullptr);
    e.axis_table_[1] = cumulative_sqrt_table(g.n(1), g.lo(1), g.h(1), a1, &beta1, nullptr);
    e.values_.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::size_t i0 = i / g.n(1), i1 = i % g.n(1);
        e.values_[i] = {e.axis_table_[0][i0], e.axis_table_[1][i1]};
    }
    return e;
}

EmbeddingMap build_embedding(const MobilityField& mob) {
    const Grid& g = mob.grid();
    switch (mob.family()) {
        case MobilityFamily::constant:
            return build_embedding_constant(mob.A(0), g);
        case MobilityFamily::scalar_1d: {
            std::vector<double> b(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) b[i] = mob.B(i)[0];
            return build_embedding_1d_from_samples(g, b);
        }
        case MobilityFamily::separable_diagonal: {
            // sample the per-axis factors along each axis
            std::vector<double> b0(g.n(0)), b1(g.n(1));
            for (std::size_t i0 = 0; i0 < g.n(0); ++i0) b0[i0] = mob.B(i0 * g.n(1))[0];
            for (std::size_t i1 = 0; i1 < g.n(1); ++i1) b1[i1] = mob.B(i1)[3];
            auto f0 = [&](double x) {
                return EmbeddingMap::interp_forward(b0, g.lo(0), g.h(0), x);
            };
            auto f1 = [&](double x) {
                return EmbeddingMap::interp_forward(b1, g.lo(1), g.h(1), x);
            };
            return build_embedding_separable(g, f0, f1);
        }
    }
    throw UnsupportedMobility("build_embedding: unsupported mobility family");
}

double verify_embedding(EmbeddingMap& b, const MobilityField& mob) {
    if (!b.grid().same_as(mob.grid())) throw GridMismatch("verify_embedding: grids differ");
    const Grid& g = b.grid();
    const int d = g.dim();
    double worst = 0.0;
    auto accumulate = [&](const Mat2& gram, const Mat2& B) {
        int kmax = (d == 1) ? 1 : 4;
        for (int k = 0; k < kmax; ++k) worst = std::max(worst, std::abs(gram[k] - B[k]));
    };
    if (d == 1) {
        for (std::size_t i = 1; i + 1 < g.size(); ++i) {
            double db = (b.value(i + 1)[0] - b.value(i - 1)[0]) / (2.0 * g.h(0));
            accumulate({db * db, 0, 0, 0}, mob.B(i));
        }
    } else {
        std::size_t n0 = g.n(0), n1 = g.n(1);
        for (std::size_t i0 = 1; i0 + 1 < n0; ++i0)
            for (std::size_t i1 = 1; i1 + 1 < n1; ++i1) {
                std::size_t i = i0 * n1 + i1;
                Vec2 d0, d1;  // columns of D_h b (q x 2)
                for (int c = 0; c < 2; ++c) {
                    d0[c] = (b.value(i + n1)[c] - b.value(i - n1)[c]) / (2.0 * g.h(0));
                    d1[c] = (b.value(i + 1)[c] - b.value(i - 1)[c]) / (2.0 * g.h(1));
                }
                Mat2 gram{d0[0] * d0[0] + d0[1] * d0[1], d0[0] * d1[0] + d0[1] * d1[1],
                          d1[0] * d0[0] + d1[1] * d0[1], d1[0] * d1[0] + d1[1] * d1[1]};
                accumulate(gram, mob.B(i));
            }
    }
    b.set_gram_residual(worst);
    return worst;
}

}  // namespace wassmob
