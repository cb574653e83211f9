#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "hslab/obstacle.hpp"
#include "obstacle_oracles.hpp"

using namespace hslab;
using namespace hslab::testing;

namespace {

ObstacleSolution solve(const ScalarField& F, double omega, double tol = 1e-9) {
    ObstacleSpec spec{F, PsorSettings{tol, omega, 200000}, std::nullopt};
    return psor_solve(spec);
}

} // namespace

TEST_CASE("nonnegative forcing gives the zero solution") {
    Grid g(2, 24, 1.0);
    ScalarField F(g, 0.3);
    F[17] = 0.0;
    auto sol = solve(F, 1.7);
    CHECK(sol.converged);
    CHECK(sol.w.max() == 0.0);
    CHECK(sol.active_set.empty());
}

TEST_CASE("unconstrained Poisson case") {
    // F = -1 on [-1, 1], constraint inactive. With the ghost value 0 placed one
    // cell beyond the edge, the discrete problem is exact for the quadratic
    // vanishing at ±(1 + h/2); the nominal profile (1 - x^2)/2 is reached at O(h).
    auto errs = [](std::size_t n) {
        Grid g(1, n, 1.0);
        auto sol = solve(ScalarField(g, -1.0), optimal_sor_omega(g), 1e-11);
        REQUIRE(sol.converged);
        const double Le = 1.0 + 0.5 * g.spacing();
        double shifted = 0.0, nominal = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = g.center(i);
            shifted = std::max(shifted, std::abs(sol.w[i] - 0.5 * (Le * Le - x * x)));
            nominal = std::max(nominal, std::abs(sol.w[i] - 0.5 * (1.0 - x * x)));
        }
        return std::pair{shifted, nominal};
    };
    const auto [s1, n1] = errs(64);
    const auto [s2, n2] = errs(128);
    CHECK(s1 <= 1e-9);
    CHECK(s2 <= 1e-9);
    CHECK(n1 <= 2.0 / 64);
    CHECK(n1 / n2 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("free-boundary matching case") {
    // w'' = -1 on |x| < a, w'' = 3 on a < |x| < b, C1 contact at b = 4a/3.
    const FreeBoundaryOracle oracle{0.3};
    CHECK(oracle.b() == doctest::Approx(0.4).epsilon(1e-14));
    for (std::size_t n : {256u, 512u}) {
        Grid g(1, n, 1.0);
        auto sol = solve(oracle.forcing(g), optimal_sor_omega(g));
        REQUIRE(sol.converged);
        const double h = g.spacing();
        CHECK(std::abs(oracle.support_edge(sol.w) - oracle.b()) <= 2.0 * h);
        CHECK(oracle.max_error(sol.w) <= 2.0 * h * h);
        CHECK(complementarity_residual(sol.w, oracle.forcing(g)) <= 1e-9);
    }
}

TEST_CASE("complementarity residual examples") {
    Grid g(1, 64, 1.0);
    CHECK(complementarity_residual(ScalarField(g, 0.0), ScalarField(g, -1.0)) == doctest::Approx(1.0));
    // Samples of the quadratic that vanishes at the ghost location: truncation
    // error only, which is zero for quadratics up to roundoff.
    const double Le = 1.0 + 0.5 * g.spacing();
    ScalarField exact(g);
    for (std::size_t i = 0; i < 64; ++i) exact[i] = 0.5 * (Le * Le - g.center(i) * g.center(i));
    CHECK(complementarity_residual(exact, ScalarField(g, -1.0)) <= 1e-10);
    // Samples of (1 - x^2)/2: interior cells are still exact; only the edge
    // cells feel the half-cell boundary offset.
    ScalarField nominal(g);
    for (std::size_t i = 0; i < 64; ++i) nominal[i] = 0.5 * (1.0 - g.center(i) * g.center(i));
    const auto lap = laplacian(nominal);
    for (std::size_t i = 1; i + 1 < 64; ++i) CHECK(std::abs(lap[i] + 1.0) <= 1e-9);
}

TEST_CASE("discrete energy: minimality and monotone descent") {
    Grid g(1, 64, 1.0);
    CHECK(discrete_energy(ScalarField(g, 0.0), ScalarField(g, -1.0)) == 0.0);

    const FreeBoundaryOracle oracle{0.3};
    const auto F = oracle.forcing(g);
    std::vector<double> energies;
    ObstacleSpec spec{F, PsorSettings{1e-10, 1.7, 200000}, std::nullopt};
    auto sol = psor_solve(spec, [&](std::size_t, const ScalarField& w) { energies.push_back(discrete_energy(w, F)); });
    REQUIRE(sol.converged);
    for (std::size_t k = 1; k < energies.size(); ++k) CHECK(energies[k] <= energies[k - 1] + 1e-12);

    const double J = discrete_energy(sol.w, F);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 1e-3);
    for (int trial = 0; trial < 100; ++trial) {
        ScalarField v = sol.w;
        for (double& x : v.values()) x = std::max(0.0, x + noise(rng));
        CHECK(J <= discrete_energy(v, F) + 1e-14);
    }
}

TEST_CASE("solution is unique regardless of warm start") {
    Grid g(2, 32, 1.0);
    ScalarField F(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto x = g.position(k);
        F[k] = (x[0] * x[0] + x[1] * x[1] < 0.16) ? -1.0 : 0.5;
    }
    const double tol = 1e-10;
    auto cold = solve(F, optimal_sor_omega(g), tol);
    ObstacleSpec hot{F, PsorSettings{tol, optimal_sor_omega(g), 200000}, ScalarField(g, 5.0)};
    auto warm = psor_solve(hot);
    REQUIRE(cold.converged);
    REQUIRE(warm.converged);
    double d = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) d = std::max(d, std::abs(cold.w[k] - warm.w[k]));
    CHECK(d <= 10.0 * tol);
}

TEST_CASE("solution map is order reversing in F") {
    Grid g(2, 24, 1.0);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0), bump(0.0, 0.5);
    const double tol = 1e-10;
    for (int trial = 0; trial < 5; ++trial) {
        ScalarField Fa(g), Fb(g);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const auto x = g.position(k);
            const double base = (x[0] * x[0] + x[1] * x[1] < 0.3) ? -1.0 + 0.3 * u(rng) : 0.4 * u(rng);
            Fa[k] = base;
            Fb[k] = base + bump(rng);
        }
        auto a = solve(Fa, optimal_sor_omega(g), tol);
        auto b = solve(Fb, optimal_sor_omega(g), tol);
        for (std::size_t k = 0; k < g.size(); ++k) CHECK(a.w[k] >= b.w[k] - 10.0 * tol);
    }
}

TEST_CASE("active set consistency") {
    Grid g(2, 40, 1.0);
    ScalarField F(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto x = g.position(k);
        F[k] = (x[0] * x[0] + x[1] * x[1] < 0.09) ? -1.0 : 2.0;
    }
    const double tol = 1e-10;
    auto sol = solve(F, optimal_sor_omega(g), tol);
    REQUIRE(sol.converged);
    const auto lap = laplacian(sol.w);
    const std::size_t n = g.cells_per_axis();
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (sol.w[k] > tol) CHECK(std::abs(lap[k] - F[k]) * sol.w[k] <= tol);
        // deep inside the contact set: no active neighbor within two cells
        bool deep = sol.w[k] == 0.0;
        const std::size_t i = g.ix(k), j = g.iy(k);
        for (int dj = -2; dj <= 2 && deep; ++dj) {
            for (int di = -2; di <= 2 && deep; ++di) {
                const long ii = static_cast<long>(i) + di, jj = static_cast<long>(j) + dj;
                if (ii < 0 || jj < 0 || ii >= static_cast<long>(n) || jj >= static_cast<long>(n)) continue;
                if (sol.w.at(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj)) > 0.0) deep = false;
            }
        }
        if (deep) CHECK(lap[k] == 0.0);
    }
}

TEST_CASE("iteration count scaling on the matching family") {
    // Young-optimal relaxation: sweeps should grow no faster than cells^1.5 (factor-2 slack).
    const FreeBoundaryOracle oracle{0.3};
    std::vector<double> iters;
    for (std::size_t n : {64u, 128u, 256u, 512u}) {
        Grid g(1, n, 1.0);
        auto sol = solve(oracle.forcing(g), optimal_sor_omega(g));
        REQUIRE(sol.converged);
        iters.push_back(static_cast<double>(sol.iters));
    }
    for (std::size_t k = 1; k < iters.size(); ++k) CHECK(iters[k] / iters[k - 1] <= 2.0 * std::pow(2.0, 1.5));
}

TEST_CASE("psor input validation and non-convergence flag") {
    Grid g(1, 32, 1.0);
    ScalarField F(g, -1.0);
    CHECK_THROWS(psor_solve(ObstacleSpec{F, PsorSettings{1e-9, 2.0, 100}, std::nullopt}));
    CHECK_THROWS(psor_solve(ObstacleSpec{F, PsorSettings{0.0, 1.5, 100}, std::nullopt}));
    ScalarField bad = F;
    bad[3] = std::nan("");
    CHECK_THROWS_AS(psor_solve(ObstacleSpec{bad, PsorSettings{}, std::nullopt}), SolverError);
    auto capped = psor_solve(ObstacleSpec{F, PsorSettings{1e-12, 1.0, 5}, std::nullopt});
    CHECK_FALSE(capped.converged);
    CHECK(capped.iters == 5);
}

TEST_CASE("psor is deterministic") {
    Grid g(2, 20, 1.0);
    ScalarField F(g, 0.2);
    for (std::size_t k = 0; k < g.size(); k += 3) F[k] = -1.0;
    auto a = solve(F, 1.7);
    auto b = solve(F, 1.7);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(a.w[k] == b.w[k]);
    CHECK(a.iters == b.iters);
}
