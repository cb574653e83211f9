#include "hslab/barriers.hpp"

#include <cmath>
#include <stdexcept>

namespace hslab {

double Barrier::window() const {
    if (!(C > 0.0) || !(r0 > 0.0)) throw std::invalid_argument("barrier needs C > 0 and r0 > 0");
    if (!(gamma > 1.0)) throw std::invalid_argument("barrier gamma must exceed 1");
    if (dim != 1 && dim != 2) throw std::invalid_argument("barrier dimension must be 1 or 2");
    const double n = dim;
    return std::min(1.0 / (4.0 * law.g0()), r0 * r0 / (16.0 * n * n * C));
}

double Barrier::inner_radius() const { return r0 * (2.0 * dim - 1.0) / (2.0 * dim); }

double Barrier::distance(const std::array<double, 2>& x) const {
    const double dx = x[0] - center[0];
    const double dy = dim == 2 ? x[1] - center[1] : 0.0;
    return std::hypot(dx, dy);
}

namespace {

void require_domain(const Barrier& b, double r, double t) {
    if (!(t > 0.0) || t > b.window()) throw std::domain_error("barrier time outside its validity window");
    if (r > b.r0) throw std::domain_error("point outside the barrier ball");
}

} // namespace

double barrier_eval(const Barrier& b, const std::array<double, 2>& x, double t) {
    const double r = b.distance(x);
    require_domain(b, r, t);
    const double s = r - b.r0;
    return std::max(0.0, b.C - s * s / (4.0 * t));
}

double barrier_residual(const Barrier& b, const std::array<double, 2>& x, double t) {
    const double r = b.distance(x);
    require_domain(b, r, t);
    const double s = b.r0 - r;
    const double P = b.C - s * s / (4.0 * t);
    if (!(P > 0.0) || !(r > 0.0)) throw std::domain_error("barrier residual needs P > 0 away from the center");
    const double dP_dt = s * s / (4.0 * t * t);
    const double dP_dr = s / (2.0 * t);
    const double d2P_dr2 = -1.0 / (2.0 * t);
    const double lap = d2P_dr2 + (b.dim - 1.0) / r * dP_dr;
    const double grad_sq = dP_dr * dP_dr;
    return dP_dt - b.gamma * P * lap - grad_sq - b.gamma * P * b.law.g0();
}

double cosh_profile(const GrowthLaw& law, double R, double x) {
    if (law.shape() != GrowthLaw::Shape::Linear) throw std::invalid_argument("cosh profile needs a linear law");
    if (std::abs(x) > R) throw std::domain_error("cosh profile evaluated outside [-R, R]");
    const double k = std::sqrt(law.g0() / law.pM());
    return law.pM() * (1.0 - std::cosh(k * x) / std::cosh(k * R));
}

double front_speed(const GrowthLaw& law, double R) {
    if (law.shape() != GrowthLaw::Shape::Linear) throw std::invalid_argument("front law needs a linear law");
    const double k = std::sqrt(law.g0() / law.pM());
    return law.pM() * k * std::tanh(k * R);
}

double integrate_front(const GrowthLaw& law, double R0, double T, std::size_t steps) {
    if (steps == 0) throw std::invalid_argument("need at least one step");
    const double dt = T / static_cast<double>(steps);
    double R = R0;
    for (std::size_t s = 0; s < steps; ++s) {
        const double k1 = front_speed(law, R);
        const double k2 = front_speed(law, R + 0.5 * dt * k1);
        const double k3 = front_speed(law, R + 0.5 * dt * k2);
        const double k4 = front_speed(law, R + dt * k3);
        R += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return R;
}

} // namespace hslab
