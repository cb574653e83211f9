#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "hslab/barriers.hpp"
#include "hslab/grid.hpp"
#include "hslab/growth.hpp"
#include "hslab/heleshaw.hpp"

namespace hslab {

// Initial densities are rasterized by cell-center membership. Amplitudes must
// lie in [0, 1]; radii must be positive. Violations throw std::invalid_argument.

ScalarField ball_density(const Grid& g, std::array<double, 2> center, double radius, double amplitude = 1.0);
ScalarField annulus_density(const Grid& g, std::array<double, 2> center, double r_in, double r_out,
                            double amplitude = 1.0);
ScalarField two_balls_density(const Grid& g, std::array<double, 2> c1, double r1, std::array<double, 2> c2,
                              double r2, double amplitude = 1.0);
/// 1 on |x - center| < core, `amplitude` on core <= |x - center| < outer, 0 beyond.
ScalarField plateau_density(const Grid& g, std::array<double, 2> center, double core, double outer,
                            double amplitude);

/// A Hele-Shaw run setup: initial density, law and stepping.
struct Scenario {
    std::string name;
    ScalarField n0;
    GrowthLaw law;
    HsRunConfig hs;
};

/// [-2, 2], n0 = χ_{|x| < 0.5}, g0 = pM = 1, T = 0.5, dt = 1e-3.
Scenario reference_1d(std::size_t cells = 512);
/// reference_1d continued to T = 1 with snapshots every 0.005 (front and weak Stefan studies).
Scenario stefan_chi_1d(std::size_t cells = 512);
/// Saturated core |x| < 0.5 inside a plateau n0 = 0.5 up to |x| < 1.5, T = 0.45.
Scenario plateau_1d(std::size_t cells = 512);
/// Saturated core |x| < 0.5 and an island n0 = 0.5 on 1.4 < x < 1.5, T = 0.8, snapshots every step.
Scenario island_1d(std::size_t cells = 512);
/// Off-center balls in [-1.5, 1.5]^2, T = 1.5, dt = 5e-3; support inside B_{0.65}.
Scenario two_ball_2d(std::size_t cells = 64);
/// Centered disc of radius 0.3 in [-1.5, 1.5]^2, T = 1, dt = 5e-3.
Scenario radial_2d(std::size_t cells = 64);

/// Radius of the centered ball holding the two-ball support.
inline constexpr double kTwoBallSupportRadius = 0.65;
/// Snapshots of the two-ball run from this time on count as late.
inline constexpr double kTwoBallLateTime = 1.0;

/// γ ladder of the stiff-limit study.
inline constexpr std::array<double, 5> kGammaLadder{5.0, 10.0, 20.0, 40.0, 80.0};

/// Barrier ball [0.5, 1.9] in the vacuum ahead of the reference data, C = pM.
Barrier reference_barrier(double gamma);

} // namespace hslab
