#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hslab/grid.hpp"
#include "hslab/growth.hpp"
#include "hslab/obstacle.hpp"

namespace hslab {

/**
 * Stiff-limit state. w is the time integral of e^{-g0 s} p(s); F is the
 * obstacle forcing at time t and quad_accum the running integral of
 * e^{-g0 s}(g0 - G(p(s))) per cell.
 *
 * w_prev/dt_prev keep one step of history for the second-order recovery of p
 * from w; max_clamp records the largest amount the recovered pressure had to
 * be pulled back into [0, pM].
 */
struct HsState {
    double t = 0.0;
    ScalarField n0;
    ScalarField n;
    ScalarField p;
    ScalarField w;
    ScalarField F;
    RegionMask omega_mask;
    ScalarField quad_accum;
    GrowthLaw law;

    std::optional<ScalarField> w_prev;
    /// Consecutive states, this one included, in which each cell has been in Ω; empty when unknown.
    std::vector<std::uint32_t> omega_age;
    double dt_prev = 0.0;
    double max_clamp = 0.0;
    std::size_t steps = 0;
    std::size_t psor_sweeps = 0;
    /// Largest residual of any obstacle solve so far, over all Picard rounds.
    double max_psor_residual = 0.0;
    bool edge_warning = false;
};

struct HsRunConfig {
    double dt = 1e-3;
    double T_final = 0.0;
    std::size_t picard_iters = 3;
    double p_threshold = 1e-7;
    double snapshot_every = 0.0; ///< 0 means: only the initial and final states
    PsorSettings psor{1e-10, 1.7, 200000};
    /// Replace psor.omega by optimal_sor_omega(grid).
    bool auto_omega = true;
};

/// Clamp excess above which a recovered pressure counts as a scheme error.
inline constexpr double kClampTolerance = 1e-8;

/// Initial state: w = 0, F = 1 - n0, p the pressure of the saturated set {n0 = 1}.
HsState make_hs_state(const ScalarField& n0, const GrowthLaw& law, const HsRunConfig& cfg);

struct ForcingUpdate {
    ScalarField F;
    ScalarField quad_accum;
};

/// F(t_new) with the quadrature advanced by the trapezoid rule between p(state.t) and p_predictor.
ForcingUpdate forcing_F(const HsState& state, double t_new, const ScalarField& p_predictor);

/// One time step of length cfg.dt (or `dt` when given).
HsState hs_step(const HsState& state, const HsRunConfig& cfg, std::optional<double> dt = std::nullopt);

/// Snapshots at t = 0, k * snapshot_every and T_final; the last step is shortened to land on each target.
std::vector<HsState> hs_run(const HsState& state0, const HsRunConfig& cfg);

/// -Δ_h p = G(p) on the mask cells, p = 0 elsewhere. Throws SolverError when the iteration stalls.
ScalarField solve_pressure_on_region(const RegionMask& mask, const GrowthLaw& law, double tol = 1e-10);

} // namespace hslab
