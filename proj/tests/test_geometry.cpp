#include "doctest.h"

#include <cmath>
#include <random>

#include "hslab/calibration.hpp"
#include "hslab/geometry.hpp"

using namespace hslab;

namespace {

RegionMask disc(const Grid& g, double cx, double cy, double r) {
    RegionMask m(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto x = g.position(k);
        m.set(k, std::hypot(x[0] - cx, x[1] - cy) <= r);
    }
    return m;
}

// Brute-force Hausdorff distance on coordinates, independent of the integer implementation.
double brute_hausdorff(const RegionMask& A, const RegionMask& B) {
    const Grid& g = A.grid();
    auto dir = [&](const RegionMask& X, const RegionMask& Y) {
        double worst = 0.0;
        for (std::size_t a = 0; a < X.size(); ++a) {
            if (!X[a]) continue;
            double best = 1e300;
            for (std::size_t b = 0; b < Y.size(); ++b) {
                if (!Y[b]) continue;
                const auto p = g.position(a), q = g.position(b);
                best = std::min(best, std::hypot(p[0] - q[0], p[1] - q[1]));
            }
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(dir(A, B), dir(B, A));
}

RegionMask random_mask(const Grid& g, std::mt19937_64& rng, double fill) {
    std::bernoulli_distribution coin(fill);
    RegionMask m(g);
    for (std::size_t k = 0; k < g.size(); ++k) m.set(k, coin(rng));
    if (m.empty()) m.set(0, true);
    return m;
}

long squared_cells(double d, double h) { return std::lround((d / h) * (d / h)); }

} // namespace

TEST_CASE("positivity sets") {
    Grid g(1, 32, 1.0);
    CHECK(positivity_set(ScalarField(g), 0.0).empty());
    ScalarField f(g);
    for (std::size_t i = 0; i < 32; ++i) f[i] = std::max(0.0, 0.5 - std::abs(g.center(i)));
    const auto lo = positivity_set(f, 0.1), hi = positivity_set(f, 0.3);
    CHECK(hi.subset_of(lo));
    CHECK(component_count(lo) == 1);
    CHECK_THROWS(positivity_set(f, -1.0));
}

TEST_CASE("Hausdorff distance examples") {
    Grid g1(1, 64, 2.0);
    RegionMask a(g1), b(g1);
    for (std::size_t i = 0; i < 64; ++i) {
        const double x = g1.center(i);
        a.set(i, x > 0.0 && x < 1.0);
        b.set(i, x > 0.0 && x < 2.0);
    }
    CHECK(hausdorff_distance(a, a) == 0.0);
    CHECK(std::abs(hausdorff_distance(a, b) - 1.0) <= g1.spacing());

    Grid g(2, 50, 1.0);
    const auto small = disc(g, 0.0, 0.0, 0.3), big = disc(g, 0.0, 0.0, 0.5);
    const double d = hausdorff_distance(small, big);
    CHECK(d == doctest::Approx(brute_hausdorff(small, big)).epsilon(1e-14));
    CHECK(std::abs(d - 0.2) <= 2.0 * g.spacing());

    RegionMask empty(g);
    CHECK(hausdorff_distance(empty, empty) == 0.0);
    CHECK(std::isinf(hausdorff_distance(empty, small)));
    CHECK(std::isinf(hausdorff_distance(small, empty)));
}

TEST_CASE("Hausdorff distance is a metric on random masks") {
    Grid g(2, 16, 1.0);
    const double h = g.spacing();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> fill(0.02, 0.5);
    for (int trial = 0; trial < 60; ++trial) {
        const auto A = random_mask(g, rng, fill(rng)), B = random_mask(g, rng, fill(rng)),
                   C = random_mask(g, rng, fill(rng));
        CHECK(hausdorff_distance(A, A) == 0.0);
        CHECK(hausdorff_distance(A, B) == hausdorff_distance(B, A));
        if (!(A == B)) CHECK(hausdorff_distance(A, B) > 0.0);
        CHECK(hausdorff_distance(A, B) == doctest::Approx(brute_hausdorff(A, B)).epsilon(1e-14));
        // triangle inequality decided exactly on squared integer cell distances
        const long ab = squared_cells(hausdorff_distance(A, B), h);
        const long bc = squared_cells(hausdorff_distance(B, C), h);
        const long ac = squared_cells(hausdorff_distance(A, C), h);
        const long excess = ac - ab - bc;
        CHECK((excess <= 0 || excess * excess <= 4 * ab * bc));
    }
}

TEST_CASE("neighborhoods") {
    Grid g(2, 100, 1.0); // h = 0.02
    RegionMask single(g);
    single.set(g.index(50, 50), true);
    CHECK(neighborhood(single, 0.0) == single);
    const auto v = neighborhood(single, 0.1);
    const double area = static_cast<double>(v.count()) * g.cell_volume();
    CHECK(std::abs(area - std::numbers::pi * 0.01) <= 2.0 * std::numbers::pi * 0.1 * g.spacing());

    std::mt19937_64 rng(11);
    Grid gs(2, 20, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const auto A = random_mask(gs, rng, 0.05);
        RegionMask B = A;
        B.set(37, true);
        const auto v1 = neighborhood(A, 0.15), v2 = neighborhood(A, 0.3);
        CHECK(A.subset_of(v1));
        CHECK(v1.subset_of(v2));
        CHECK(v1.subset_of(neighborhood(B, 0.15)));
        // every member of the neighborhood is within delta of A, and nothing closer is missed
        for (std::size_t k = 0; k < gs.size(); ++k) {
            RegionMask one(gs);
            one.set(k, true);
            CHECK(v1[k] == (directed_distance(one, A) <= 0.15));
        }
    }
}

TEST_CASE("minimal diameter") {
    Grid g(2, 64, 1.0);
    const double h = g.spacing();
    RegionMask row(g);
    for (std::size_t i = 10; i < 50; ++i) row.set(g.index(i, 20), true);
    CHECK(minimal_diameter(row) <= h + 1e-12);

    RegionMask square(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto x = g.position(k);
        square.set(k, std::abs(x[0]) < 0.5 && std::abs(x[1]) < 0.5);
    }
    const double fine = minimal_diameter(square, 3600);
    CHECK(std::abs(minimal_diameter(square) - 1.0) <= h + 1e-12);
    CHECK(std::abs(minimal_diameter(square) - fine) <= 1.0 * (std::numbers::pi / 360.0));

    const auto d = disc(g, 0.1, -0.1, 0.6);
    CHECK(std::abs(minimal_diameter(d) - 1.2) <= 2.0 * h);
    CHECK(minimal_diameter(RegionMask(g)) == 0.0);

    Grid g1(1, 40, 1.0);
    RegionMask seg(g1);
    for (std::size_t i = 5; i < 15; ++i) seg.set(i, true);
    CHECK(minimal_diameter(seg) == doctest::Approx(10.0 * g1.spacing()));

    std::mt19937_64 rng(23);
    Grid gs(2, 16, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const auto A = random_mask(gs, rng, 0.1);
        RegionMask B = A;
        for (std::size_t k = 0; k < gs.size(); k += 7) B.set(k, true);
        CHECK(minimal_diameter(A) <= diameter(A) + 1e-12);
        CHECK(minimal_diameter(A) <= minimal_diameter(B));
    }
}

TEST_CASE("flatness ratio and Lebesgue density") {
    Grid g(2, 80, 1.0);
    const double h = g.spacing(), r = 12.0 * h;
    const std::size_t c = g.index(40, 40);
    const ScalarField zero(g), full(g, 1.0);
    CHECK(lebesgue_density(zero, c, r, 1e-7) == 1.0);
    CHECK(std::abs(flatness_ratio(zero, c, r, 1e-7) - 2.0) <= 2.0 * h / r);
    CHECK(lebesgue_density(full, c, r, 1e-7) == 0.0);
    CHECK(flatness_ratio(full, c, r, 1e-7) == 0.0);

    // zero set = half plane through the cell center
    ScalarField half(g);
    const double x0 = g.position(c)[0];
    for (std::size_t k = 0; k < g.size(); ++k) half[k] = g.position(k)[0] <= x0 ? 0.0 : 1.0;
    CHECK(std::abs(lebesgue_density(half, c, r, 1e-7) - 0.5) <= h / r);
    CHECK(std::abs(flatness_ratio(half, c, r, 1e-7) - 1.0) <= 2.0 * h / r);

    CHECK_THROWS(lebesgue_density(zero, c, 2.0 * h, 1e-7));
    CHECK_THROWS(flatness_ratio(zero, g.index(2, 40), r, 1e-7));
}

TEST_CASE("density lower-bounds flatness on random sets") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int dim : {1, 2}) {
        Grid g(dim, dim == 1 ? 200 : 48, 1.0);
        const double c = dim == 1 ? kFlatnessDensityConstant1D : kFlatnessDensityConstant2D;
        const std::size_t mid = dim == 1 ? 100 : g.index(24, 24);
        for (int trial = 0; trial < 80; ++trial) {
            ScalarField p(g);
            const double fill = u(rng);
            for (std::size_t k = 0; k < g.size(); ++k) p[k] = u(rng) < fill ? 0.0 : 1.0;
            for (double r : {4.0, 8.0, 16.0}) {
                const double rr = r * g.spacing();
                CHECK(flatness_ratio(p, mid, rr, 0.5) >= c * lebesgue_density(p, mid, rr, 0.5));
            }
        }
    }
}

TEST_CASE("radial bounds") {
    Grid g(2, 80, 1.0);
    const double h = g.spacing();
    const auto d = disc(g, 0.0, 0.0, 0.5);
    const auto b = radial_bounds(d, {0.0, 0.0});
    CHECK(std::abs(b.R_plus - 0.5) <= h);
    CHECK(std::abs(b.R_minus - 0.5) <= h);

    RegionMask ring = d;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto x = g.position(k);
        if (std::hypot(x[0], x[1]) < 0.3) ring.set(k, false);
    }
    CHECK(radial_bounds(ring, {0.0, 0.0}).R_minus == 0.0);

    RegionMask two = disc(g, 0.0, 0.0, 0.4);
    std::size_t far = 0;
    double best = 1e300;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto x = g.position(k);
        const double e = std::abs(std::hypot(x[0], x[1]) - 0.9) + std::abs(x[1]);
        if (e < best) {
            best = e;
            far = k;
        }
    }
    two.set(far, true);
    const auto tb = radial_bounds(two, {0.0, 0.0});
    CHECK(std::abs(tb.R_plus - 0.9) <= h);
    CHECK(std::abs(tb.R_minus - 0.4) <= h);
    CHECK_THROWS(radial_bounds(RegionMask(g), {0.0, 0.0}));
}

TEST_CASE("components and boundary cells") {
    Grid g(2, 32, 1.0);
    RegionMask m = disc(g, -0.4, 0.0, 0.3);
    const auto other = disc(g, 0.5, 0.0, 0.2);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (other[k]) m.set(k, true);
    }
    CHECK(component_count(m) == 2);
    const auto edge = boundary_cells(m);
    CHECK(edge.subset_of(m));
    CHECK(edge.count() < m.count());
}
