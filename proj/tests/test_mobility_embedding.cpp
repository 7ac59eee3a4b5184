#include <doctest.h>

#include <cmath>

#include "wassmob/embedding.hpp"
#include "wassmob/errors.hpp"
#include "wassmob/mobility.hpp"

using namespace wassmob;

namespace {
// independent oracle: 5-point Gauss-Legendre per cell for int sqrt(B)
double gauss_integral_sqrt(const std::function<double(double)>& B, double a, double b, int cells) {
    static const double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                 0.5384693101056831, 0.9061798459386640};
    static const double ws[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                 0.4786286704993665, 0.2369268850561891};
    double h = (b - a) / cells, acc = 0.0;
    for (int c = 0; c < cells; ++c) {
        double mid = a + (c + 0.5) * h;
        for (int k = 0; k < 5; ++k) acc += 0.5 * h * ws[k] * std::sqrt(B(mid + 0.5 * h * xs[k]));
    }
    return acc;
}
}  // namespace

TEST_CASE("mobility validation catches structural problems") {
    Grid g = Grid::line(-1.0, 1.0, 9);
    CHECK_THROWS_AS(MobilityField::scalar_1d(g, std::vector<double>(9, -2.0)),
                    NonPositiveMobility);
    CHECK_THROWS_AS(MobilityField::constant(g, Mat2{0.0, 0, 0, 0}), NotSPD);
    Grid g2 = Grid::box2d(-1, 1, 4, -1, 1, 4);
    CHECK_THROWS_AS(MobilityField::constant(g2, Mat2{1.0, 2.0, 2.0, 1.0}), NotSPD);  // indefinite
    // declared separable but off-diagonal friction present
    std::vector<Mat2> B(16, Mat2{2.0, 0.5, 0.5, 2.0});
    CHECK_THROWS_AS(MobilityField::from_friction_samples(g2, B,
                                                         MobilityFamily::separable_diagonal),
                    NotDiagonal);
    CHECK_THROWS_AS(MobilityField::scalar_1d(g2, std::vector<double>(16, 1.0)),
                    DimensionMismatch);
}

TEST_CASE("c0 is the smallest friction eigenvalue over the grid") {
    Grid g = Grid::line(-1.0, 1.0, 17);
    auto A = MobilityField::scalar_1d(g, [](double x) { return std::exp(-2.0 * x); });
    // B = e^{2x}, smallest at x = -1
    CHECK(A.c0() == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("1d embedding of B=e^{2x} matches the closed form e^x - 1") {
    Grid g = Grid::line(-1.0, 1.0, 65);
    auto b = build_embedding_1d(g, [](double x) { return std::exp(2.0 * x); });
    for (std::size_t i = 0; i < g.size(); ++i) {
        double x = g.node1d(i);
        CHECK(b.value(i)[0] == doctest::Approx(std::exp(x) - 1.0).epsilon(1e-9));
    }
    // inverse round trip
    for (double x : {-0.9, -0.3, 0.0, 0.4, 0.97})
        CHECK(b.invert_1d(b.eval({x, 0})[0]) == doctest::Approx(x).epsilon(1e-9));
}

TEST_CASE("1d embedding agrees with a Gauss-Legendre quadrature oracle") {
    auto B = [](double x) { return 1.0 + x * x; };
    Grid g = Grid::line(-1.0, 1.0, 33);
    auto b = build_embedding_1d(g, B);
    for (std::size_t i = 0; i < g.size(); i += 4) {
        double x = g.node1d(i);
        double oracle = x >= 0.0 ? gauss_integral_sqrt(B, 0.0, x, 64)
                                 : -gauss_integral_sqrt(B, x, 0.0, 64);
        CHECK(b.value(i)[0] == doctest::Approx(oracle).epsilon(5e-8));
    }
}

TEST_CASE("constant-A embedding factors B exactly") {
    Grid g = Grid::box2d(-1, 1, 9, -1, 1, 9);
    Mat2 A{2.0, 0.5, 0.5, 1.0};
    auto mob = MobilityField::constant(g, A);
    auto b = build_embedding(mob);
    double res = verify_embedding(b, mob);
    CHECK(res <= 1e-12);  // linear map: finite differences are exact
    // b(0) = 0 at the anchor
    auto v0 = b.eval({0.0, 0.0});
    CHECK(std::abs(v0[0]) <= 1e-14);
    CHECK(std::abs(v0[1]) <= 1e-14);
    // |b(x)-b(y)|^2 = (x-y).B(x-y) for sample pairs
    Mat2 B = sym_inverse(A, 2);
    Vec2 x{0.5, -0.25}, y{-0.75, 0.5};
    auto bx = b.eval(x), by = b.eval(y);
    double lhs = (bx[0] - by[0]) * (bx[0] - by[0]) + (bx[1] - by[1]) * (bx[1] - by[1]);
    double dx = x[0] - y[0], dy = x[1] - y[1];
    double rhs = dx * (B[0] * dx + B[1] * dy) + dy * (B[2] * dx + B[3] * dy);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("gram residual decays at second order for curved families") {
    auto make_res_1d = [](std::size_t n) {
        Grid g = Grid::line(-1.0, 1.0, n);
        auto mob = MobilityField::scalar_1d(g, [](double x) { return std::exp(-2.0 * x); });
        auto b = build_embedding(mob);
        return verify_embedding(b, mob);
    };
    double r1 = make_res_1d(33), r2 = make_res_1d(65);
    CHECK(r1 / r2 > 3.5);
    CHECK(r1 / r2 < 4.5);

    auto make_res_2d = [](std::size_t n) {
        Grid g = Grid::box2d(-1, 1, n, -1, 1, n);
        auto mob = MobilityField::separable_diagonal(
            g, [](double x) { return 1.0 / (1.0 + x * x); },
            [](double y) { return std::exp(-y); });
        auto b = build_embedding(mob);
        return verify_embedding(b, mob);
    };
    double s1 = make_res_2d(17), s2 = make_res_2d(33);
    CHECK(s1 / s2 > 3.5);
    CHECK(s1 / s2 < 4.5);
}

TEST_CASE("coercivity: |b(x)|^2 >= c0 |x|^2 relative to the anchor") {
    Grid g = Grid::line(-1.0, 1.0, 65);
    auto mob = MobilityField::scalar_1d(g, [](double x) { return std::exp(-2.0 * x); });
    auto b = build_embedding(mob);
    CHECK(b.coercivity_ratio() >= mob.c0() - 1e-10);
}

TEST_CASE("nonpositive friction is rejected during embedding") {
    Grid g = Grid::line(-1.0, 1.0, 9);
    CHECK_THROWS_AS(build_embedding_1d(g, [](double x) { return x; }), NonPositiveMobility);
}
