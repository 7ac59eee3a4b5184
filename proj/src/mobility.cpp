#include "wassmob/mobility.hpp"

#include <algorithm>
#include <cmath>

#include "wassmob/errors.hpp"

namespace wassmob {

std::string to_string(MobilityFamily f) {
    switch (f) {
        case MobilityFamily::constant: return "constant";
        case MobilityFamily::scalar_1d: return "scalar_1d";
        case MobilityFamily::separable_diagonal: return "separable_diagonal";
    }
    return "?";
}

double sym_min_eig(const Mat2& m, int dim) {
    if (dim == 1) return m[0];
    double tr = m[0] + m[3];
    double det = m[0] * m[3] - m[1] * m[2];
    double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    return tr / 2.0 - disc;
}

Mat2 sym_inverse(const Mat2& m, int dim) {
    if (dim == 1) {
        if (m[0] == 0.0) throw NotSPD("sym_inverse: zero entry");
        return {1.0 / m[0], 0, 0, 0};
    }
    double det = m[0] * m[3] - m[1] * m[2];
    if (det == 0.0) throw NotSPD("sym_inverse: singular matrix");
    return {m[3] / det, -m[1] / det, -m[2] / det, m[0] / det};
}

void check_spd(const Mat2& m, int dim, double tol) {
    if (dim == 2 && std::abs(m[1] - m[2]) > tol)
        throw NotSPD("matrix is not symmetric within tolerance");
    if (sym_min_eig(m, dim) <= tol)
        throw NotSPD("matrix is not positive definite within tolerance");
}

MobilityField::MobilityField(Grid g, std::vector<Mat2> A, std::vector<Mat2> B,
                             MobilityFamily f)
    : grid_(std::move(g)), A_(std::move(A)), B_(std::move(B)), family_(f), c0_(0.0) {
    double c0 = std::numeric_limits<double>::infinity();
    for (const auto& b : B_) c0 = std::min(c0, sym_min_eig(b, grid_.dim()));
    c0_ = c0;
    validate();
}

void MobilityField::validate() const {
    const int d = grid_.dim();
    if (A_.size() != grid_.size() || B_.size() != grid_.size())
        throw GridMismatch("MobilityField: per-node count mismatch");
    if (c0_ <= 0.0) throw NotSPD("MobilityField: friction not uniformly positive definite");
    for (std::size_t i = 0; i < A_.size(); ++i) {
        check_spd(A_[i], d);
        check_spd(B_[i], d);
        // A*B = I to 1e-12 max norm
        const Mat2 &a = A_[i], &b = B_[i];
        double e;
        if (d == 1) {
            e = std::abs(a[0] * b[0] - 1.0);
        } else {
            double p00 = a[0] * b[0] + a[1] * b[2] - 1.0;
            double p01 = a[0] * b[1] + a[1] * b[3];
            double p10 = a[2] * b[0] + a[3] * b[2];
            double p11 = a[2] * b[1] + a[3] * b[3] - 1.0;
            e = std::max({std::abs(p00), std::abs(p01), std::abs(p10), std::abs(p11)});
        }
        if (e > 1e-12) throw ValidationError("MobilityField: A*B differs from identity");
    }
    // structural check of the declared family
    switch (family_) {
        case MobilityFamily::constant:
            for (const auto& a : A_)
                for (int k = 0; k < 4; ++k)
                    if (std::abs(a[k] - A_[0][k]) > 1e-12)
                        throw ValidationError("MobilityField: family 'constant' but A varies");
            break;
        case MobilityFamily::scalar_1d:
            if (d != 1) throw DimensionMismatch("MobilityField: scalar_1d requires d=1");
            break;
        case MobilityFamily::separable_diagonal:
            if (!is_diagonal())
                throw NotDiagonal("MobilityField: family 'separable_diagonal' but off-diagonals present");
            break;
    }
}

bool MobilityField::is_diagonal(double tol) const {
    if (grid_.dim() == 1) return true;
    for (const auto& b : B_)
        if (std::abs(b[1]) > tol || std::abs(b[2]) > tol) return false;
    return true;
}

MobilityField MobilityField::constant(const Grid& g, const Mat2& A) {
    check_spd(A, g.dim());
    Mat2 B = sym_inverse(A, g.dim());
    return MobilityField(g, std::vector<Mat2>(g.size(), A), std::vector<Mat2>(g.size(), B),
                         MobilityFamily::constant);
}

MobilityField MobilityField::constant_scalar(const Grid& g, double a) {
    Mat2 A{a, 0, 0, g.dim() == 2 ? a : 0.0};
    if (g.dim() == 1) return constant(g, {a, 0, 0, 0});
    return constant(g, A);
}

MobilityField MobilityField::scalar_1d(const Grid& g, std::vector<double> a_values) {
    if (g.dim() != 1) throw DimensionMismatch("scalar_1d mobility requires a 1d grid");
    if (a_values.size() != g.size()) throw GridMismatch("scalar_1d: sample count mismatch");
    std::vector<Mat2> A(g.size()), B(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(a_values[i] > 0.0))
            throw NonPositiveMobility("scalar_1d: nonpositive mobility sample");
        A[i] = {a_values[i], 0, 0, 0};
        B[i] = {1.0 / a_values[i], 0, 0, 0};
    }
    return MobilityField(g, std::move(A), std::move(B), MobilityFamily::scalar_1d);
}

MobilityField MobilityField::scalar_1d(const Grid& g, const std::function<double(double)>& a) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = a(g.node1d(i));
    return scalar_1d(g, std::move(v));
}

MobilityField MobilityField::separable_diagonal(const Grid& g,
                                                const std::function<double(double)>& alpha0,
                                                const std::function<double(double)>& alpha1) {
    if (g.dim() != 2) throw DimensionMismatch("separable_diagonal requires a 2d grid");
    std::vector<Mat2> A(g.size()), B(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto x = g.node(i);
        double a0 = alpha0(x[0]), a1 = alpha1(x[1]);
        if (!(a0 > 0.0) || !(a1 > 0.0))
            throw NonPositiveMobility("separable_diagonal: nonpositive mobility sample");
        A[i] = {a0, 0, 0, a1};
        B[i] = {1.0 / a0, 0, 0, 1.0 / a1};
    }
    return MobilityField(g, std::move(A), std::move(B), MobilityFamily::separable_diagonal);
}

MobilityField MobilityField::from_friction_samples(const Grid& g, std::vector<Mat2> B,
                                                   MobilityFamily family) {
    if (B.size() != g.size()) throw GridMismatch("from_friction_samples: count mismatch");
    std::vector<Mat2> A(B.size());
    for (std::size_t i = 0; i < B.size(); ++i) {
        check_spd(B[i], g.dim());
        A[i] = sym_inverse(B[i], g.dim());
    }
    return MobilityField(g, std::move(A), std::move(B), family);
}

}  // namespace wassmob
