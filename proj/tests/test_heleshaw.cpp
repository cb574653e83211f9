#include "doctest.h"

#include <cmath>

#include "hslab/heleshaw.hpp"

using namespace hslab;

namespace {

ScalarField interval(const Grid& g, double lo, double hi, double value) {
    ScalarField f(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double x = std::abs(g.position(k)[0]);
        if (x > lo && x < hi) f[k] = value;
    }
    return f;
}

// Closed-form 1D pressure of a saturated interval (-R, R) for G = g0 (1 - p/pM).
double cosh_pressure(double g0, double pM, double R, double x) {
    const double k = std::sqrt(g0 / pM);
    return pM * (1.0 - std::cosh(k * x) / std::cosh(k * R));
}

double front_ode(double R, double T) {
    const std::size_t steps = 10000;
    const double dt = T / steps;
    auto f = [](double r) { return std::tanh(r); };
    for (std::size_t s = 0; s < steps; ++s) {
        const double k1 = f(R), k2 = f(R + 0.5 * dt * k1), k3 = f(R + 0.5 * dt * k2), k4 = f(R + dt * k3);
        R += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return R;
}

// Right front from the C1 contact profile w ≈ F (R - x)^2 / 2 at the last active cell.
double right_front(const HsState& s) {
    const Grid& g = s.w.grid();
    std::size_t last = 0;
    for (std::size_t i = g.cells_per_axis() / 2; i < g.cells_per_axis(); ++i) {
        if (s.w[i] > 0.0) last = i;
    }
    return g.center(last) + std::sqrt(2.0 * s.w[last] / s.F[last]);
}

HsRunConfig config(double dt, double T, double every) {
    HsRunConfig cfg;
    cfg.dt = dt;
    cfg.T_final = T;
    cfg.snapshot_every = every;
    return cfg;
}

} // namespace

TEST_CASE("forcing at t = 0 and with zero pressure") {
    Grid g(1, 32, 1.0);
    const auto law = GrowthLaw::linear(2.0, 1.0);
    const auto n0 = interval(g, -1.0, 0.3, 0.7);
    HsState s = make_hs_state(n0, law, config(0.01, 1.0, 0.0));
    const auto at0 = forcing_F(s, 0.0, s.p);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(at0.F[k] == doctest::Approx(1.0 - n0[k]).epsilon(1e-15));

    // p ≡ 0 for all s: the integrand e^{-g0 s}(g0 - G(0)) vanishes.
    const ScalarField zero(g);
    for (int step = 0; step < 10; ++step) {
        const auto up = forcing_F(s, s.t + 0.05, zero);
        s.quad_accum = up.quad_accum;
        s.F = up.F;
        s.t += 0.05;
    }
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(s.quad_accum[k] == 0.0);
        CHECK(s.F[k] == doctest::Approx(std::exp(-2.0 * 0.5) - n0[k]).epsilon(1e-14));
    }
}

TEST_CASE("forcing of a saturated cell") {
    // p ≡ pM: integrand g0 e^{-g0 s}, exact integral 1 - e^{-g0 t}, so F = 1 - n0
    // up to the trapezoid error g0^3 dt^2 t / 12.
    Grid g(1, 16, 1.0);
    const double g0 = 1.5, dt = 0.01, T = 1.0;
    const auto law = GrowthLaw::linear(g0, 1.0);
    HsState s = make_hs_state(ScalarField(g, 1.0), law, config(dt, T, 0.0));
    s.p = ScalarField(g, 1.0);
    const ScalarField full(g, 1.0);
    for (int step = 0; step < 100; ++step) {
        const auto up = forcing_F(s, s.t + dt, full);
        s.quad_accum = up.quad_accum;
        s.F = up.F;
        s.t += dt;
    }
    const double bound = g0 * g0 * g0 * dt * dt * T / 12.0;
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(std::abs(s.F[k]) <= bound);
}

TEST_CASE("pressure on a saturated region") {
    Grid g(1, 32, 1.0);
    const auto law = GrowthLaw::linear(1.0, 1.0);
    CHECK(solve_pressure_on_region(RegionMask(g), law).max() == 0.0);

    // Mask = cells inside (-R, R) with R on a cell face. As for every Dirichlet
    // problem on this grid the ghost value sits half a cell beyond the last
    // member, so the discrete problem approximates the interval (-R - h/2, R + h/2).
    auto err = [&](std::size_t cells) {
        Grid gg(1, cells, 1.0);
        const double R = 0.5, h = gg.spacing();
        RegionMask m(gg);
        for (std::size_t i = 0; i < cells; ++i) m.set(i, std::abs(gg.center(i)) < R);
        const auto p = solve_pressure_on_region(m, law);
        double e = 0.0;
        for (std::size_t i = 0; i < cells; ++i) {
            const double x = gg.center(i);
            const double exact = m[i] ? cosh_pressure(1.0, 1.0, R + 0.5 * h, x) : 0.0;
            e = std::max(e, std::abs(p[i] - exact));
        }
        return e;
    };
    const double e1 = err(64), e2 = err(128), e3 = err(256);
    CHECK(e1 <= 0.5 * std::pow(2.0 / 64, 2));
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
    CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("pressure on a disc is rotation invariant") {
    Grid g(2, 48, 1.0);
    RegionMask disc(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto x = g.position(k);
        disc.set(k, std::hypot(x[0], x[1]) < 0.6);
    }
    const auto p = solve_pressure_on_region(disc, GrowthLaw::linear(2.0, 1.5));
    const std::size_t n = g.cells_per_axis();
    double asym = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) asym = std::max(asym, std::abs(p.at(i, j) - p.at(n - 1 - j, i)));
    }
    CHECK(asym <= 1e-8);
    CHECK(p.max() > 0.0);
    CHECK(p.max() < 1.5);
}

TEST_CASE("pressure with a tabulated law") {
    Grid g(1, 64, 1.0);
    std::vector<double> kp, kg;
    for (int k = 0; k <= 40; ++k) {
        kp.push_back(k / 40.0);
        kg.push_back(std::exp(-kp.back()) - std::exp(-1.0));
    }
    kg.back() = 0.0;
    const auto law = GrowthLaw::tabulated(kp, kg);
    RegionMask m(g);
    for (std::size_t i = 0; i < 64; ++i) m.set(i, std::abs(g.center(i)) < 0.7);
    const auto p = solve_pressure_on_region(m, law);
    for (std::size_t i = 0; i < 64; ++i) {
        if (m[i]) CHECK(std::abs(-laplacian_at(p, i) - law.eval(p[i])) <= 1e-9);
        else CHECK(p[i] == 0.0);
    }
}

TEST_CASE("vacuum stays vacuum") {
    Grid g(2, 16, 1.0);
    const auto cfg = config(0.05, 0.5, 0.1);
    const auto snaps = hs_run(make_hs_state(ScalarField(g), GrowthLaw::linear(1.0, 1.0), cfg), cfg);
    CHECK(snaps.size() == 6);
    for (const auto& s : snaps) {
        CHECK(s.n.max() == 0.0);
        CHECK(s.p.max() == 0.0);
        CHECK(s.w.max() == 0.0);
        CHECK(s.omega_mask.empty());
    }
    CHECK(hs_run(snaps.front(), config(0.05, 0.0, 0.1)).size() == 1);
}

TEST_CASE("saturated interval matches the region pressure at early time") {
    Grid g(1, 128, 2.0);
    const auto law = GrowthLaw::linear(1.0, 1.0);
    const auto n0 = interval(g, -1.0, 0.5, 1.0);
    const auto cfg = config(1e-3, 0.002, 0.0);
    const auto s0 = make_hs_state(n0, law, cfg);
    RegionMask ball(g);
    for (std::size_t k = 0; k < g.size(); ++k) ball.set(k, n0[k] == 1.0);
    const auto ref = solve_pressure_on_region(ball, law);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(s0.p[k] == doctest::Approx(ref[k]).epsilon(1e-12));
    const auto s2 = hs_run(s0, cfg).back();
    CHECK(s2.omega_mask == ball);
    double d = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) d = std::max(d, std::abs(s2.p[k] - ref[k]));
    CHECK(d <= 0.01);
}

TEST_CASE("1D front follows the derived ODE") {
    Grid g(1, 256, 2.0);
    const auto law = GrowthLaw::linear(1.0, 1.0);
    const auto cfg = config(2e-3, 1.0, 0.25);
    const auto snaps = hs_run(make_hs_state(interval(g, -1.0, 0.5, 1.0), law, cfg), cfg);
    for (const auto& s : snaps) {
        if (s.t == 0.0) continue;
        const double oracle = front_ode(0.5, s.t);
        CHECK(std::abs(right_front(s) - oracle) <= 0.03 * oracle);
    }
}

TEST_CASE("Hele-Shaw invariants along a run with a precancerous plateau") {
    Grid g(1, 256, 2.0);
    const auto law = GrowthLaw::linear(1.0, 1.0);
    ScalarField n0 = interval(g, -1.0, 0.4, 1.0);
    for (std::size_t i = 0; i < g.cells_per_axis(); ++i) {
        const double x = std::abs(g.center(i));
        if (x >= 0.4 && x < 0.8) n0[i] = 0.3;
    }
    const double thr = 1e-7;
    const auto cfg = config(2e-3, 0.8, 0.05);
    const auto snaps = hs_run(make_hs_state(n0, law, cfg), cfg);
    const double mass0 = integrate(n0);
    for (std::size_t q = 0; q < snaps.size(); ++q) {
        const auto& s = snaps[q];
        const double growth = std::exp(law.g0() * s.t);
        CHECK(s.n.min() >= 0.0);
        CHECK(s.n.max() <= 1.0);
        CHECK(s.p.min() >= 0.0);
        CHECK(s.p.max() <= law.pM() + 1e-8);
        CHECK(s.w.min() >= 0.0);
        CHECK(s.max_clamp <= kClampTolerance);
        CHECK(integrate(s.p) <= law.pM() * growth * mass0 * (1.0 + 1e-6));
        for (std::size_t k = 0; k < g.size(); ++k) {
            CHECK(s.omega_mask[k] == (s.p[k] > thr));
            if (s.n[k] < 1.0 - 1e-8) CHECK(s.p[k] <= 1e-8);
            if (s.w[k] == 0.0) CHECK(std::abs(s.n[k] - std::min(1.0, growth * n0[k])) <= 1e-8);
        }
        if (q == 0) continue;
        const auto& prev = snaps[q - 1];
        CHECK(prev.omega_mask.subset_of(s.omega_mask));
        for (std::size_t k = 0; k < g.size(); ++k) {
            CHECK(s.w[k] >= prev.w[k]);
            CHECK(s.p[k] >= prev.p[k] - 1e-9);
            if (prev.w[k] > 0.0) CHECK(s.w[k] > 0.0);
            // {w(t) > 0} ⊆ Ω(t) ⊆ {w(s) > 0} for t < s
            if (prev.w[k] > 0.0) CHECK(prev.omega_mask[k]);
            if (prev.omega_mask[k]) CHECK(s.w[k] > 0.0);
        }
    }
}

TEST_CASE("a far precancerous island activates at ln 2 / g0") {
    Grid g(1, 256, 2.0);
    const double g0 = 1.0, dt = 2e-3;
    const auto law = GrowthLaw::linear(g0, 1.0);
    ScalarField n0 = interval(g, -1.0, 0.4, 1.0);
    for (std::size_t i = 0; i < g.cells_per_axis(); ++i) {
        const double x = g.center(i);
        if (x > 1.4 && x < 1.5) n0[i] = 0.5;
    }
    auto cfg = config(dt, 0.8, 0.0);
    HsState s = make_hs_state(n0, law, cfg);
    double activation = -1.0;
    while (s.t < 0.8 && activation < 0.0) {
        s = hs_step(s, cfg);
        for (std::size_t i = 0; i < g.cells_per_axis(); ++i) {
            if (n0[i] == 0.5 && s.omega_mask[i]) activation = s.t;
        }
    }
    CHECK(std::abs(activation - std::log(2.0) / g0) <= 2.0 * dt);
}

TEST_CASE("hs_run is deterministic") {
    Grid g(2, 24, 1.5);
    ScalarField n0(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto x = g.position(k);
        n0[k] = std::hypot(x[0] - 0.2, x[1]) < 0.4 ? 1.0 : 0.0;
    }
    const auto cfg = config(5e-3, 0.05, 0.025);
    const auto a = hs_run(make_hs_state(n0, GrowthLaw::linear(1.0, 1.0), cfg), cfg);
    const auto b = hs_run(make_hs_state(n0, GrowthLaw::linear(1.0, 1.0), cfg), cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t q = 0; q < a.size(); ++q) {
        for (std::size_t k = 0; k < g.size(); ++k) {
            CHECK(a[q].w[k] == b[q].w[k]);
            CHECK(a[q].p[k] == b[q].p[k]);
        }
    }
}

TEST_CASE("config validation") {
    Grid g(1, 16, 1.0);
    auto bad = config(0.0, 1.0, 0.1);
    CHECK_THROWS(make_hs_state(ScalarField(g), GrowthLaw::linear(1.0, 1.0), bad));
    bad = config(0.1, 1.0, 0.1);
    bad.picard_iters = 0;
    CHECK_THROWS(make_hs_state(ScalarField(g), GrowthLaw::linear(1.0, 1.0), bad));
    CHECK_THROWS(make_hs_state(ScalarField(g, 1.2), GrowthLaw::linear(1.0, 1.0), config(0.1, 1.0, 0.1)));
}
