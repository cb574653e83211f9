#include "hslab/scenarios.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace hslab {

namespace {

void require_amplitude(double a) {
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("initial density amplitude must lie in [0, 1]");
}

void require_radius(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("radius must be positive and finite");
}

ScalarField rasterize(const Grid& g, const std::function<double(double, double)>& value) {
    ScalarField n(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto x = g.position(k);
        n[k] = value(x[0], x[1]);
    }
    return n;
}

double dist(double x, double y, std::array<double, 2> c) { return std::hypot(x - c[0], y - c[1]); }

Scenario hs_scenario(std::string name, ScalarField n0, double T, double dt, double every) {
    HsRunConfig cfg;
    cfg.T_final = T;
    cfg.dt = dt;
    cfg.snapshot_every = every;
    return {std::move(name), std::move(n0), GrowthLaw::linear(1.0, 1.0), cfg};
}

} // namespace

ScalarField ball_density(const Grid& g, std::array<double, 2> c, double radius, double amplitude) {
    require_radius(radius);
    require_amplitude(amplitude);
    return rasterize(g, [&](double x, double y) { return dist(x, y, c) < radius ? amplitude : 0.0; });
}

ScalarField annulus_density(const Grid& g, std::array<double, 2> c, double r_in, double r_out, double amplitude) {
    require_radius(r_in);
    require_radius(r_out);
    require_amplitude(amplitude);
    if (!(r_in < r_out)) throw std::invalid_argument("annulus needs inner radius below outer radius");
    return rasterize(g, [&](double x, double y) {
        const double d = dist(x, y, c);
        return d >= r_in && d < r_out ? amplitude : 0.0;
    });
}

ScalarField two_balls_density(const Grid& g, std::array<double, 2> c1, double r1, std::array<double, 2> c2,
                              double r2, double amplitude) {
    require_radius(r1);
    require_radius(r2);
    require_amplitude(amplitude);
    return rasterize(g, [&](double x, double y) {
        return dist(x, y, c1) < r1 || dist(x, y, c2) < r2 ? amplitude : 0.0;
    });
}

ScalarField plateau_density(const Grid& g, std::array<double, 2> c, double core, double outer, double amplitude) {
    require_radius(core);
    require_radius(outer);
    require_amplitude(amplitude);
    if (!(core < outer)) throw std::invalid_argument("plateau needs core radius below outer radius");
    return rasterize(g, [&](double x, double y) {
        const double d = dist(x, y, c);
        return d < core ? 1.0 : (d < outer ? amplitude : 0.0);
    });
}

Scenario reference_1d(std::size_t cells) {
    Grid g(1, cells, 2.0);
    return hs_scenario("reference_1d", ball_density(g, {0.0, 0.0}, 0.5), 0.5, 1e-3, 0.05);
}

Scenario stefan_chi_1d(std::size_t cells) {
    Grid g(1, cells, 2.0);
    return hs_scenario("stefan_chi_1d", ball_density(g, {0.0, 0.0}, 0.5), 1.0, 1e-3, 0.005);
}

Scenario plateau_1d(std::size_t cells) {
    Grid g(1, cells, 2.0);
    return hs_scenario("plateau_1d", plateau_density(g, {0.0, 0.0}, 0.5, 1.5, 0.5), 0.45, 1e-3, 0.005);
}

Scenario island_1d(std::size_t cells) {
    Grid g(1, cells, 2.0);
    ScalarField n0 = ball_density(g, {0.0, 0.0}, 0.5);
    for (std::size_t i = 0; i < cells; ++i) {
        const double x = g.center(i);
        if (x > 1.4 && x < 1.5) n0[i] = 0.5;
    }
    return hs_scenario("island_1d", std::move(n0), 0.8, 1e-3, 1e-3);
}

Scenario two_ball_2d(std::size_t cells) {
    Grid g(2, cells, 1.5);
    return hs_scenario("two_ball_2d", two_balls_density(g, {-0.3, 0.2}, 0.25, {0.35, -0.1}, 0.2), 1.5, 5e-3, 0.1);
}

Scenario radial_2d(std::size_t cells) {
    Grid g(2, cells, 1.5);
    return hs_scenario("radial_2d", ball_density(g, {0.0, 0.0}, 0.3), 1.0, 5e-3, 0.1);
}

Barrier reference_barrier(double gamma) {
    Barrier b;
    b.C = 1.0;
    b.r0 = 0.7;
    b.center = {1.2, 0.0};
    b.law = GrowthLaw::linear(1.0, 1.0);
    b.gamma = gamma;
    b.dim = 1;
    return b;
}

} // namespace hslab
