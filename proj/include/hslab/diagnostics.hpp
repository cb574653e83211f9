#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hslab/barriers.hpp"
#include "hslab/calibration.hpp"
#include "hslab/grid.hpp"
#include "hslab/heleshaw.hpp"
#include "hslab/pme.hpp"

namespace hslab {

/**
 * Outcome of one check. With relation "<=" the check passes iff
 * measured <= bound + tolerance, with ">=" iff measured >= bound - tolerance.
 * Checks with several sub-conditions state their predicate in the function
 * comment and list every sub-measurement in `details`. Relation "report"
 * marks a monitor that is never asserted (passed is then always true).
 */
struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double bound = 0.0;
    double tolerance = 0.0;
    std::string context;
    std::string relation = "<=";
    std::vector<std::pair<std::string, double>> details;
};

struct DiagnosticsReport {
    std::vector<CheckResult> checks;
    std::vector<std::pair<std::string, std::string>> run_manifest;

    /// Appends a result; throws std::invalid_argument on a duplicate name.
    void add(CheckResult result);
    bool all_passed() const;
    const CheckResult* find(const std::string& name) const;
};

/// measured against bound under the given relation.
bool satisfies(double measured, double bound, double tolerance, const std::string& relation);

/// Time range, snapshot count and grid of a snapshot sequence, for CheckResult::context.
std::string describe(std::span<const HsState> snaps);
std::string describe(std::span<const PmeState> snaps);

// ---- Hele-Shaw checks ----

/**
 * (a) max |n - min(1, e^{g0 t} n0)| on {p <= thr}, (b) max |n - 1| on {p > thr},
 * (c) max |Δ_h p + G(p)| on cells at least two cells inside the settled part
 * of Ω(t), i.e. cells in Ω for the last three states (see HsState::omega_age).
 * Passes iff (a), (b) <= 1e-8 and (c) <= K h; measured is (c).
 */
CheckResult check_structure_theorem(std::span<const HsState> snaps, double p_threshold,
                                    double K = kStructureK);

/**
 * Max over cells whose whole stencil lies in the settled part of Ω(t) of |p (Δ_h p + G(p))|
 * (measured, bound K h) together with the largest obstacle residual recorded
 * by the solver (must be <= obstacle_tol).
 */
CheckResult check_complementarity(std::span<const HsState> snaps, double p_threshold,
                                  double K = kComplementarityK, double obstacle_tol = 1e-9);

/// ∫n <= e^{g0 t}∫n0 (1 + 1e-8) and ∫p <= pM e^{g0 t}∫n0 (1 + 1e-6) at every snapshot.
CheckResult check_mass_bounds(std::span<const HsState> snaps);
/// Same bounds for a porous-medium run; n0 is the unscaled initial density n(0) / pM^(1/γ).
CheckResult check_mass_bounds(std::span<const PmeState> snaps);

/// Ω(t) nested, w and the grown density nondecreasing in time (up to tol).
CheckResult check_hs_monotonicity(std::span<const HsState> snaps, double p_threshold, double tol = 1e-8);

/// Piecewise-linear cutoff b_{ε,δ}: 0 below δ, 1 above δ + ε.
struct StefanRung {
    double eps = 0.0;
    double delta = 0.0;
};

/**
 * Smoothed weak Stefan residual over consecutive snapshot pairs:
 * Σ Δt Σ_cells b'_{ε,δ}(p̄) [(1 - e^{g0 t} n0) ∂t p - gradient_weight |∇p|^2] φ h^dim
 * with p̄ and t at interval midpoints, ∂t p a first difference, and φ a
 * smooth bump over the middle half of the box and of the time span.
 * Passes iff |residual| is nonincreasing down to its smallest value and the
 * last rung is at most a quarter of the first. Throws std::invalid_argument
 * when fewer than three snapshots fall in the time support of φ.
 */
CheckResult check_stefan_weak(std::span<const HsState> snaps, std::span<const StefanRung> ladder,
                              double gradient_weight = 1.0);

/// Default (ε, δ) ladder, halving from 0.2.
std::vector<StefanRung> default_stefan_ladder();

/**
 * Right free boundary of a 1D state. Located from the Baiocchi variable as
 * x + sqrt(2 w / F) at the cell two cells inside the last cell with w > 0
 * (nearer cells when w or F is not positive there); before w has support,
 * the outer face of the last cell with p > 0. Returns NaN when neither exists.
 */
double front_position_1d(const HsState& s);

/// |∇_h p| between the last positive cell of the right front and the cell inside it.
double front_gradient_1d(const HsState& s);

// The velocity checks difference front positions between snapshots at least
// min_interval apart (the first snapshot, then greedily), so that the
// locator error stays small against the displacement.

/**
 * Mean relative error of the front speed (differenced positions) against
 * |∇_h p| / (1 - e^{g0 t} n0) ahead of the front, averaged over the two ends
 * of each interval. Intervals with denominator below 0.05 are excluded and
 * counted; if none remain the result is report-only.
 */
CheckResult check_stefan_velocity(std::span<const HsState> snaps, double tolerance = 0.05,
                                  double min_interval = 0.05);

/// Mean relative error of the front displacement rate against the front law ODE (linear law, n0 = 0 ahead).
CheckResult check_front_ode(std::span<const HsState> snaps, double tolerance = 0.03, double min_interval = 0.05);

/**
 * Ratio of V / |∇_h p| in a plateau run to the mean of V / |∇_h p| in a
 * reference run with n0 = 0 ahead of the front, against 1 / (1 - e^{g0 t} n0).
 * Passes iff the mean relative error is at most tolerance.
 */
CheckResult check_stefan_amplification(std::span<const HsState> plateau, std::span<const HsState> reference,
                                       double tolerance = 0.10, double min_interval = 0.05);

/**
 * (a) max complementarity_residual(w, F) over snapshots <= solver_tol;
 * (b) w rebuilt by the trapezoid rule on e^{-g0 s} p(s) from the snapshot
 * history against the stepped w, max gap <= K Δt (Δt + h) T with Δt the
 * largest snapshot spacing. With weighted = false the e^{-g0 s} factor is
 * dropped (negative control). Throws std::invalid_argument when snapshots
 * are further apart than the step that produced them.
 */
CheckResult check_obstacle_equivalence(std::span<const HsState> snaps, double solver_tol = 1e-9,
                                       double K = kReconstructionK, bool weighted = true);

/**
 * Flatness ratio and Lebesgue density of {p <= thr} at up to sample_count
 * boundary cells of Ω where e^{g0 t} n0 < 0.95 on the smallest ball, for
 * r in {4h, 8h, 16h}. With assert_density the check requires every density
 * >= 0.3 (measured is the minimum); otherwise it only reports. Also reports
 * the perimeter proxy |∂Ω| ≈ (boundary cell count) h^{dim-1}.
 * Throws std::invalid_argument when no boundary cell qualifies.
 */
CheckResult check_flatness_criteria(const HsState& snap, std::size_t sample_count, double p_threshold,
                                    bool assert_density);

/**
 * Activation time of an island region (first snapshot where it meets Ω)
 * against ln(1 / a) / g0 for the island amplitude a. Passes iff the gap is at most 2 dt.
 */
CheckResult check_island_activation(std::span<const HsState> snaps, const RegionMask& island, double dt,
                                    double p_threshold);

// ---- shared checks ----

/**
 * For every pair of cells mirrored across a grid-aligned plane (faces and
 * diagonals) at distance >= R_support from the origin, p on the far side
 * must not exceed p on the near side by more than 10 tol (violations
 * counted; passes iff zero). Also R+ - R- <= 2 R_support + 2h for snapshots
 * with t >= late_from and nonempty Ω. Throws std::invalid_argument if the
 * initial support is not inside the ball.
 */
CheckResult check_reflection_monotonicity(std::span<const HsState> snaps, double R_support, double late_from,
                                          double p_threshold, double tol = 1e-10);
CheckResult check_reflection_monotonicity(std::span<const PmeState> snaps, double R_support, double late_from,
                                          double p_threshold, double tol = 1e-10);

// ---- porous-medium checks ----

/**
 * Lower bound Δ_h p + G(p) >= -c e^{-γct}/(1 - e^{-γct}) - K h for t >= 5/(γc),
 * on cells of supp n at physical distance >= interior from its complement
 * and >= 2 cells from the box edge. measured is the largest violation (>= 0).
 */
CheckResult check_aronson_benilan(std::span<const PmeState> snaps, double K = kAronsonBenilanK,
                                  double interior = 0.1);

/// ∂t p >= -γ p c e^{-γct}/(1 - e^{-γct}) - K h between snapshots (same cells and times as above).
CheckResult check_pressure_time_monotonicity(std::span<const PmeState> snaps, double K = kPressureTimeK,
                                             double interior = 0.1);

/// max (p - P)_+ over cells in the barrier ball for snapshots with 0 < t <= window; also reports max p on the inner ball.
CheckResult check_barrier_comparison(std::span<const PmeState> snaps, const Barrier& barrier,
                                     double K = kBarrierK);

/// Minimum of the exact barrier residual over a samples x samples lattice of (radius, time) with P > 0.
CheckResult check_barrier_supersolution(const Barrier& barrier, std::size_t samples = 50);

/// Report-only: gradient energy and accumulated quartic dissipation at the final snapshot.
CheckResult energy_monitor(std::span<const PmeState> snaps);

// ---- stiff limit ----

/**
 * At every time shared by all ladder runs and the Hele-Shaw run: L1 distances
 * of n and p and the Hausdorff distance of {n_γ > thr} to {n > thr}. Passes
 * iff each sequence in γ is nonincreasing with at most one inversion of at
 * most 10 %, the final Hausdorff distance is <= 4h, and at the final time
 * {n > 0} ⊆ V_{4h}({n_γ > 0}) and conversely for the largest γ.
 * Throws std::invalid_argument for an empty ladder, mismatched grids or no shared time.
 */
CheckResult check_gamma_convergence(std::span<const std::vector<PmeState>> ladder, std::span<const HsState> hs,
                                    double p_threshold);

/// Ladder inversion rule: nonincreasing, or exactly one increase of at most 10 %.
bool nonincreasing_with_slack(std::span<const double> values);

} // namespace hslab
