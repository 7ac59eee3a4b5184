#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "wassmob/errors.hpp"
#include "wassmob/maps.hpp"

using namespace wassmob;

namespace {
EmbeddingMap identity_embedding(const Grid& g) {
    return build_embedding(MobilityField::constant_scalar(g, 1.0));
}

Density random_density(const Grid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> v(g.size());
    for (auto& x : v) x = u(rng);
    return Density(g, std::move(v), true);
}

// equal atom masses on the given nodes (monotone plans are permutations)
Density atoms(const Grid& g, const std::vector<std::size_t>& nodes) {
    std::vector<double> v(g.size(), 0.0);
    for (auto i : nodes) v[i] = 1.0 / (double(nodes.size()) * g.cell_volume());
    return Density(g, std::move(v));
}

Density smooth_bump(const Grid& g, double center, double width) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        double x = g.node1d(i);
        v[i] = 0.25 + std::exp(-(x - center) * (x - center) / (2.0 * width * width));
    }
    return Density(g, std::move(v), true);
}
}  // namespace

TEST_CASE("diagonal coupling yields the identity map") {
    Grid g = Grid::line(-1.0, 1.0, 33);
    auto b = build_embedding_1d(g, [](double x) { return std::exp(2.0 * x); });
    Density u = Density::uniform(g);
    CostMatrix c(b);
    auto [cp, rep] = solve_kantorovich_exact(u, u, c);
    auto m = map_from_coupling(cp, b);
    REQUIRE(m.has_raw_image);
    for (std::size_t i = 0; i < g.size(); ++i) {
        REQUIRE(m.defined[i]);
        CHECK(m.embedded_image[i][0] == doctest::Approx(b.value(i)[0]).epsilon(1e-12));
        CHECK(m.image[i][0] == doctest::Approx(g.node1d(i)).epsilon(1e-9));
    }
    CHECK(m.transport_cost(u, b) <= 1e-12);
}

TEST_CASE("translated point mass maps source to target exactly") {
    Grid g = Grid::line(-1.0, 1.0, 33);
    auto b = identity_embedding(g);
    Density r0 = atoms(g, {5}), r1 = atoms(g, {20});
    CostMatrix c(b);
    auto [cp, rep] = solve_kantorovich_exact(r0, r1, c);
    auto m = map_from_coupling(cp, b);
    CHECK(m.defined[5]);
    CHECK(m.image[5][0] == doctest::Approx(g.node1d(20)).epsilon(1e-12));
    // every other source row carries no mass and is marked undefined
    for (std::size_t i = 0; i < g.size(); ++i)
        if (i != 5) CHECK(!m.defined[i]);
}

TEST_CASE("barycentric map from the LP coupling matches the monotone map") {
    Grid g = Grid::line(-1.0, 1.0, 32);
    auto b = build_embedding_1d(g, [](double x) { return std::exp(2.0 * x); });
    CostMatrix c(b);
    std::mt19937_64 rng(41);
    for (int rep = 0; rep < 3; ++rep) {
        Density r0 = random_density(g, rng), r1 = random_density(g, rng);
        auto [cp, drep] = solve_kantorovich_exact(r0, r1, c);
        auto lp_map = map_from_coupling(cp, b);
        auto mono = map_1d_monotone(r0, r1, b);
        for (std::size_t i = 0; i < g.size(); ++i) {
            REQUIRE(lp_map.defined[i]);
            CHECK(std::abs(lp_map.image[i][0] - mono.image[i][0]) <= g.h(0) + 1e-9);
        }
    }
}

TEST_CASE("monotone map: identity, translation, and exact cost on atomic data") {
    Grid g = Grid::line(-1.0, 1.0, 65);
    auto ident = identity_embedding(g);
    Density u = Density::uniform(g);
    auto m_id = map_1d_monotone(u, u, ident);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(m_id.image[i][0] == doctest::Approx(g.node1d(i)).epsilon(1e-12));

    // shift by an integer number of cells
    std::vector<std::size_t> src, dst;
    for (std::size_t i = 4; i < 24; ++i) {
        src.push_back(i);
        dst.push_back(i + 8);
    }
    Density r0 = atoms(g, src), r1 = atoms(g, dst);
    auto m = map_1d_monotone(r0, r1, ident);
    double delta = 8.0 * g.h(0);
    for (auto i : src)
        CHECK(std::abs(m.image[i][0] - (g.node1d(i) + delta)) <= g.h(0) + 1e-12);

    // permutation instance: map cost equals the closed-form distance
    double wa = wa_distance_1d(r0, r1, ident).wa_squared;
    CHECK(m.transport_cost(r0, ident) == doctest::Approx(wa).epsilon(1e-10));
    CHECK(std::abs(m.transport_cost(r0, ident) - wa) <= 1e-8);
}

TEST_CASE("monotone map cost never exceeds the coupling cost on smooth data") {
    Grid g = Grid::line(-1.0, 1.0, 64);
    auto b = build_embedding_1d(g, [](double x) { return std::exp(2.0 * x); });
    Density r0 = smooth_bump(g, -0.3, 0.2), r1 = smooth_bump(g, 0.4, 0.25);
    double wa = wa_distance_1d(r0, r1, b).wa_squared;
    auto m = map_1d_monotone(r0, r1, b);
    // barycentric collapse can only lower the quadratic cost (Jensen)
    CHECK(m.transport_cost(r0, b) <= wa + 1e-9);
    CHECK(m.transport_cost(r0, b) >= wa - 5e-3);
    // embedded image is nondecreasing
    for (std::size_t i = 0; i + 1 < g.size(); ++i)
        CHECK(m.embedded_image[i][0] <= m.embedded_image[i + 1][0] + 1e-12);
}

TEST_CASE("pushforward consistency for low-degree moments") {
    Grid g = Grid::line(-1.0, 1.0, 128);
    auto b = build_embedding_1d(g, [](double x) { return std::exp(2.0 * x); });
    Density r0 = smooth_bump(g, -0.3, 0.2), r1 = smooth_bump(g, 0.4, 0.25);
    auto m = map_1d_monotone(r0, r1, b);
    auto moment_gap = [&](auto f, double lip) {
        double push = 0.0, tgt = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            push += f(m.image[i][0]) * r0.mass(i);
            tgt += f(g.node1d(i)) * r1.mass(i);
        }
        CHECK(std::abs(push - tgt) <= 5.0 * g.h(0) * lip);
    };
    moment_gap([](double x) { return x; }, 1.0);
    moment_gap([](double x) { return x * x; }, 2.0);
}

TEST_CASE("composed monotone maps transport rho1 to rho3") {
    Grid g = Grid::line(-1.0, 1.0, 65);
    auto ident = identity_embedding(g);
    std::vector<std::size_t> a, bn, cn;
    for (std::size_t i = 0; i < 12; ++i) {
        a.push_back(3 + i);
        bn.push_back(20 + 2 * i);
        cn.push_back(10 + 3 * i);
    }
    Density r1 = atoms(g, a), r2 = atoms(g, bn), r3 = atoms(g, cn);
    auto r = map_1d_monotone(r1, r2, ident);
    auto s = map_1d_monotone(r2, r3, ident);
    // push each atom of rho1 through s(r(x)) by nearest-node deposit
    std::vector<double> pushed(g.size(), 0.0);
    for (auto i : a) {
        double y = r.image[i][0];
        std::size_t jy = std::size_t(std::lround((y - g.node1d(0)) / g.h(0)));
        double z = s.image[jy][0];
        std::size_t jz = std::size_t(std::lround((z - g.node1d(0)) / g.h(0)));
        pushed[jz] += r1.mass(i);
    }
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(pushed[i] == doctest::Approx(r3.mass(i)).epsilon(1e-12));
}

TEST_CASE("optimality residual: trivial, refinement decay, and counterexample") {
    // identity map with constant phi has zero residual
    {
        Grid g = Grid::line(-1.0, 1.0, 33);
        auto b = identity_embedding(g);
        Density u = Density::uniform(g);
        CostMatrix c(b);
        auto [cp, rep] = solve_kantorovich_exact(u, u, c);
        auto m = map_from_coupling(cp, b);
        std::vector<double> phi(g.size(), 3.7);
        CHECK(optimality_residual(m, phi, b, MobilityField::constant_scalar(g, 1.0)) <= 1e-12);
        CHECK_THROWS_AS(optimality_residual(m, {}, b, MobilityField::constant_scalar(g, 1.0)),
                        MissingDuals);
    }

    auto residual_at = [](std::size_t n, TransportMap* out_map = nullptr,
                          std::vector<double>* out_phi = nullptr) {
        Grid g = Grid::line(-1.0, 1.0, n);
        auto mob = MobilityField::scalar_1d(g, [](double x) { return std::exp(-2.0 * x); });
        auto b = build_embedding(mob);
        CostMatrix c(b);
        Density r0 = smooth_bump(g, -0.3, 0.2), r1 = smooth_bump(g, 0.4, 0.25);
        auto [cp, rep] = solve_kantorovich_exact(r0, r1, c);
        auto m = map_from_coupling(cp, b);
        double res = optimality_residual(m, *cp.dual_phi, b, mob);
        if (out_map) *out_map = m;
        if (out_phi) *out_phi = *cp.dual_phi;
        return res;
    };
    double r64 = residual_at(64), r128 = residual_at(128), r256 = residual_at(256);
    double order1 = std::log2(r64 / r128), order2 = std::log2(r128 / r256);
    CHECK(order1 >= 0.8);
    CHECK(order2 >= 0.8);

    // swapping two interior images breaks the first-order condition by >= 10x
    {
        Grid g = Grid::line(-1.0, 1.0, 128);
        auto mob = MobilityField::scalar_1d(g, [](double x) { return std::exp(-2.0 * x); });
        auto b = build_embedding(mob);
        TransportMap m;
        std::vector<double> phi;
        double res = 0.0;
        {
            CostMatrix c(b);
            Density r0 = smooth_bump(g, -0.3, 0.2), r1 = smooth_bump(g, 0.4, 0.25);
            auto [cp, rep] = solve_kantorovich_exact(r0, r1, c);
            m = map_from_coupling(cp, b);
            phi = *cp.dual_phi;
            res = optimality_residual(m, phi, b, mob);
        }
        TransportMap bad = m;
        std::swap(bad.embedded_image[40], bad.embedded_image[90]);
        std::swap(bad.image[40], bad.image[90]);
        double bad_res = optimality_residual(bad, phi, b, mob);
        CHECK(bad_res >= 10.0 * res);
    }
}

TEST_CASE("cyclical monotonicity: diagonal, optimal, and anti-monotone couplings") {
    Grid g = Grid::line(-1.0, 1.0, 48);
    auto b = build_embedding_1d(g, [](double x) { return std::exp(2.0 * x); });
    const std::size_t n = g.size();

    // diagonal coupling passes every cycle
    Coupling diag;
    diag.n = n;
    diag.pi.assign(n * n, 0.0);
    diag.row_marginal.assign(n, 1.0 / double(n));
    diag.col_marginal = diag.row_marginal;
    for (std::size_t i = 0; i < n; ++i) diag.pi[i * n + i] = 1.0 / double(n);
    auto rep_d = cyclical_monotonicity_check(diag, b, 3);
    CHECK(rep_d.pass);
    CHECK(rep_d.violations == 0);
    CHECK(rep_d.cycles_tested == 200);

    // exact-LP coupling: 200/200 sampled 3-cycles pass
    std::mt19937_64 rng(53);
    Density r0 = random_density(g, rng), r1 = random_density(g, rng);
    CostMatrix c(b);
    auto [cp, rep] = solve_kantorovich_exact(r0, r1, c);
    auto rep_o = cyclical_monotonicity_check(cp, b, 3);
    CHECK(rep_o.pass);
    CHECK(rep_o.violations == 0);

    // anti-monotone coupling on the line is flagged
    Coupling anti = diag;
    std::fill(anti.pi.begin(), anti.pi.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) anti.pi[i * n + (n - 1 - i)] = 1.0 / double(n);
    auto rep_a = cyclical_monotonicity_check(anti, b, 3);
    CHECK(!rep_a.pass);
    CHECK(rep_a.violations > 0);
    CHECK(rep_a.worst < -1e-9);
}
