#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>

#include "hslab/grid.hpp"

namespace hslab {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tuning knobs of the projected SOR iteration.
struct PsorSettings {
    double tol = 1e-9;
    double omega = 1.7;
    std::size_t max_iters = 100000;
};

/**
 * Discrete obstacle problem: find w >= 0 with -Δ_h w + F >= 0 and
 * w (-Δ_h w + F) = 0, where Δ_h is the 3/5-point Laplacian with w = 0 beyond
 * the box edge.
 */
struct ObstacleSpec {
    ScalarField F;
    PsorSettings settings{};
    std::optional<ScalarField> warm_start{};
};

struct ObstacleSolution {
    ScalarField w;
    std::size_t iters = 0;
    double residual = 0.0;
    RegionMask active_set;
    bool converged = false;
};

/// Called after each full sweep with the sweep count and the current iterate.
using SweepObserver = std::function<void(std::size_t, const ScalarField&)>;

/**
 * Projected successive over-relaxation in fixed lexicographic order.
 * Stops once complementarity_residual <= tol; at max_iters it returns with
 * converged = false. Throws SolverError on non-finite input or when the
 * residual exceeds 10^6 times max(initial residual, 1).
 */
ObstacleSolution psor_solve(const ObstacleSpec& spec, const SweepObserver& observer = {});

/// max over cells of max(-w, -(-Δ_h w + F), |w (-Δ_h w + F)|).
double complementarity_residual(const ScalarField& w, const ScalarField& F);

/// Σ h^dim (½ |∇_h w|^2 + w F) with face differences, including the faces to the zero exterior.
double discrete_energy(const ScalarField& w, const ScalarField& F);

/// Young's optimal relaxation factor for the Dirichlet Laplacian on this grid.
double optimal_sor_omega(const Grid& grid);

} // namespace hslab
