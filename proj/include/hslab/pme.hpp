#pragma once

#include <cstddef>
#include <vector>

#include "hslab/grid.hpp"
#include "hslab/growth.hpp"
#include "hslab/obstacle.hpp"

namespace hslab {

/**
 * Density of the porous-medium family with pressure p = n^gamma.
 *
 * The audit fields are bookkeeping carried along with the physical state:
 * clip totals from the positivity guard, the running quartic dissipation
 * Σ dt Σ (n/p̂)|∇p|^4 h^dim / (2γ), and the step count.
 */
struct PmeState {
    double gamma = 0.0;
    double t = 0.0;
    ScalarField n;
    GrowthLaw law;

    double last_clip = 0.0;
    double max_clip = 0.0;
    double quartic_dissipation = 0.0;
    std::size_t steps = 0;
    /// Set once the support came within 10 cells of the box edge.
    bool edge_warning = false;
};

struct PmeRunConfig {
    double T_final = 0.0;
    double cfl_safety = 0.45;
    double snapshot_every = 0.0; ///< 0 means: only the initial and final states
};

/// Largest clip per step that still counts as roundoff.
inline constexpr double kClipTolerance = 1e-12;

/// Cellwise n^gamma; throws std::domain_error on a negative density.
ScalarField pressure_of(const ScalarField& n, double gamma);

/// pM^(1/gamma) n0; requires 0 <= n0 <= 1.
ScalarField scale_initial_data(const ScalarField& n0, double gamma, double pM);

double stable_dt(const PmeState& state, double cfl_safety);

/// One forward Euler step. Throws SolverError on blow-up, NaN or a clip above kClipTolerance.
PmeState pme_step(const PmeState& state, double dt);

/// Snapshots at t = 0, k * snapshot_every and T_final.
std::vector<PmeState> pme_run(const PmeState& state0, const PmeRunConfig& cfg);

/// h^dim Σ |∇p|^2 with the grad_sq stencil.
double gradient_energy(const ScalarField& p);

} // namespace hslab
