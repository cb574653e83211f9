#pragma once

#include <array>

#include "hslab/growth.hpp"

namespace hslab {

/**
 * Parabolic barrier P(x, t) = (C - (|x - center| - r0)^2 / (4t))_+ on the ball
 * |x - center| <= r0. It dominates the pressure equation
 * ∂t p = γ p Δp + |∇p|^2 + γ p G(0) for 0 < t <= window() and vanishes on the
 * inner ball of radius r0 (2 dim - 1) / (2 dim).
 */
struct Barrier {
    double C = 1.0;
    double r0 = 1.0;
    std::array<double, 2> center{0.0, 0.0};
    GrowthLaw law = GrowthLaw::linear(1.0, 1.0);
    double gamma = 2.0;
    int dim = 1;

    /// min(1 / (4 G(0)), r0^2 / (16 dim^2 C)); throws std::invalid_argument for invalid parameters.
    double window() const;
    double inner_radius() const;
    double distance(const std::array<double, 2>& x) const;
};

/// Throws std::domain_error outside 0 < t <= window() or outside the ball.
double barrier_eval(const Barrier& b, const std::array<double, 2>& x, double t);

/// ∂t P - γ P ΔP - |∇P|^2 - γ P G(0) from the closed-form derivatives; requires P(x, t) > 0.
double barrier_residual(const Barrier& b, const std::array<double, 2>& x, double t);

/// pM (1 - cosh(kx) / cosh(kR)), k = sqrt(g0 / pM), for a linear law and |x| <= R.
double cosh_profile(const GrowthLaw& law, double R, double x);

/// Right-hand side of the 1D front law dR/dt = pM k tanh(kR).
double front_speed(const GrowthLaw& law, double R);

/// RK4 integration of the front law from R0 over [0, T].
double integrate_front(const GrowthLaw& law, double R0, double T, std::size_t steps = 10000);

} // namespace hslab
