#include "hslab/heleshaw.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hslab {

namespace {

constexpr std::size_t kEdgeMarginCells = 10;

RegionMask threshold_mask(const ScalarField& p, double thr) {
    RegionMask m(p.grid());
    for (std::size_t k = 0; k < p.size(); ++k) m.set(k, p[k] > thr);
    return m;
}

// n = 1 on Ω, the exponentially grown initial density (capped at 1) elsewhere.
ScalarField density_from(const ScalarField& n0, const RegionMask& omega, double g0, double t) {
    const double growth = std::exp(g0 * t);
    ScalarField n(n0.grid());
    for (std::size_t k = 0; k < n.size(); ++k) n[k] = omega[k] ? 1.0 : std::min(1.0, growth * n0[k]);
    return n;
}

double integrand(const GrowthLaw& law, double s, double p) {
    return std::exp(-law.g0() * s) * (law.g0() - law.eval(p));
}

PsorSettings effective_psor(const HsRunConfig& cfg, const Grid& g) {
    PsorSettings s = cfg.psor;
    if (cfg.auto_omega) s.omega = optimal_sor_omega(g);
    return s;
}

void validate(const HsRunConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(cfg.T_final >= 0.0)) throw std::invalid_argument("T_final must be nonnegative");
    if (cfg.picard_iters < 1) throw std::invalid_argument("picard_iters must be at least 1");
    if (!(cfg.p_threshold >= 0.0)) throw std::invalid_argument("p_threshold must be nonnegative");
    if (cfg.snapshot_every < 0.0) throw std::invalid_argument("snapshot_every must be nonnegative");
}

} // namespace

ScalarField solve_pressure_on_region(const RegionMask& mask, const GrowthLaw& law, double tol) {
    const Grid& g = mask.grid();
    ScalarField p(g);
    const auto cells = mask.members();
    if (cells.empty() || law.shape() == GrowthLaw::Shape::Zero) return p;

    std::vector<long> slot(g.size(), -1);
    for (std::size_t r = 0; r < cells.size(); ++r) slot[cells[r]] = static_cast<long>(r);

    // Shift a >= max |G'| makes q -> G(q) + a q monotone, so the Picard
    // iteration (-Δ + a) p_{k+1} = G(p_k) + a p_k converges; for a linear law
    // a = g0 / pM and one pass is exact.
    double shift = law.g0() / law.pM();
    if (law.shape() == GrowthLaw::Shape::Tabulated) {
        const auto& kp = law.knots_p();
        const auto& kg = law.knots_g();
        for (std::size_t s = 0; s + 1 < kp.size(); ++s) {
            shift = std::max(shift, std::abs((kg[s + 1] - kg[s]) / (kp[s + 1] - kp[s])));
        }
    }

    const std::size_t m = g.cells_per_axis();
    const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
    const double diag = 2.0 * g.dim() * inv_h2 + shift;
    std::vector<Eigen::Triplet<double>> entries;
    for (std::size_t r = 0; r < cells.size(); ++r) {
        const std::size_t k = cells[r];
        entries.emplace_back(static_cast<int>(r), static_cast<int>(r), diag);
        auto link = [&](std::size_t nb) {
            if (slot[nb] >= 0) entries.emplace_back(static_cast<int>(r), static_cast<int>(slot[nb]), -inv_h2);
        };
        const std::size_t i = g.ix(k);
        if (i > 0) link(k - 1);
        if (i + 1 < m) link(k + 1);
        if (g.dim() == 2) {
            const std::size_t j = g.iy(k);
            if (j > 0) link(k - m);
            if (j + 1 < m) link(k + m);
        }
    }
    Eigen::SparseMatrix<double> A(static_cast<int>(cells.size()), static_cast<int>(cells.size()));
    A.setFromTriplets(entries.begin(), entries.end());
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-14);
    cg.setMaxIterations(static_cast<int>(20 * cells.size() + 100));
    cg.compute(A);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<long>(cells.size()));
    Eigen::VectorXd rhs(static_cast<long>(cells.size()));
    const double scale = std::max(1.0, law.g0());
    for (int round = 0; round < 500; ++round) {
        for (std::size_t r = 0; r < cells.size(); ++r) {
            const double q = std::max(0.0, x[static_cast<long>(r)]);
            rhs[static_cast<long>(r)] = law.eval(q) + shift * q;
        }
        x = cg.solveWithGuess(rhs, x);
        for (std::size_t r = 0; r < cells.size(); ++r) p[cells[r]] = std::max(0.0, x[static_cast<long>(r)]);
        double res = 0.0;
        for (std::size_t k : cells) res = std::max(res, std::abs(-laplacian_at(p, k) - law.eval(p[k])));
        if (res <= tol * scale) return p;
    }
    throw SolverError("pressure solve on region did not reach tolerance");
}

HsState make_hs_state(const ScalarField& n0, const GrowthLaw& law, const HsRunConfig& cfg) {
    validate(cfg);
    if (!n0.all_finite() || n0.min() < 0.0 || n0.max() > 1.0) {
        throw std::invalid_argument("initial density must lie in [0, 1]");
    }
    const Grid& g = n0.grid();
    RegionMask saturated(g);
    for (std::size_t k = 0; k < n0.size(); ++k) saturated.set(k, n0[k] >= 1.0);
    ScalarField p = solve_pressure_on_region(saturated, law);
    for (double& v : p.values()) {
        if (v <= cfg.p_threshold) v = 0.0;
    }
    const RegionMask omega = threshold_mask(p, cfg.p_threshold);
    ScalarField F(g);
    for (std::size_t k = 0; k < F.size(); ++k) F[k] = 1.0 - n0[k];
    HsState s{.t = 0.0,
              .n0 = n0,
              .n = density_from(n0, omega, law.g0(), 0.0),
              .p = p,
              .w = ScalarField(g),
              .F = F,
              .omega_mask = omega,
              .quad_accum = ScalarField(g),
              .law = law,
              .w_prev = std::nullopt,
              .omega_age = {}};
    s.omega_age.assign(g.size(), 0);
    for (std::size_t k : omega.members()) s.omega_age[k] = 1;
    s.edge_warning = support_margin(s.n) < kEdgeMarginCells;
    return s;
}

ForcingUpdate forcing_F(const HsState& state, double t_new, const ScalarField& p_predictor) {
    require_same_grid(state.p.grid(), p_predictor.grid(), "forcing_F");
    const GrowthLaw& law = state.law;
    const double half = 0.5 * (t_new - state.t);
    const double decay = std::exp(-law.g0() * t_new);
    ForcingUpdate out{ScalarField(state.p.grid()), state.quad_accum};
    for (std::size_t k = 0; k < out.F.size(); ++k) {
        if (half != 0.0) {
            out.quad_accum[k] += half * (integrand(law, state.t, state.p[k]) + integrand(law, t_new, p_predictor[k]));
        }
        out.F[k] = decay - state.n0[k] + out.quad_accum[k];
    }
    return out;
}

HsState hs_step(const HsState& state, const HsRunConfig& cfg, std::optional<double> dt_override) {
    validate(cfg);
    const double dt = dt_override.value_or(cfg.dt);
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    const Grid& g = state.w.grid();
    const GrowthLaw& law = state.law;
    const double t_new = state.t + dt;
    const double growth = std::exp(law.g0() * t_new);
    const double pM = law.pM();
    PsorSettings settings = effective_psor(cfg, g);

    // Recovery weights for ∂t w at t_new: BDF2 on the (possibly uneven) last
    // two steps, backward Euler on the first step.
    double c0 = 1.0 / dt, c1 = -1.0 / dt, c2 = 0.0;
    const bool second_order = state.w_prev.has_value() && state.dt_prev > 0.0;
    if (second_order) {
        const double d1 = state.dt_prev, d2 = dt;
        c0 = (2.0 * d2 + d1) / (d2 * (d1 + d2));
        c1 = -(d1 + d2) / (d1 * d2);
        c2 = d2 / (d1 * (d1 + d2));
    }

    ScalarField warm = state.w;
    if (second_order) {
        const double r = dt / state.dt_prev;
        for (std::size_t k = 0; k < warm.size(); ++k) {
            warm[k] = std::max(0.0, state.w[k] + r * (state.w[k] - (*state.w_prev)[k]));
        }
    }

    ScalarField p_hat = state.p;
    ForcingUpdate forcing{ScalarField(g), ScalarField(g)};
    ObstacleSolution sol{ScalarField(g), 0, 0.0, RegionMask(g), false};
    double clamp = 0.0;
    double worst_residual = 0.0;
    std::size_t sweeps = 0;
    for (std::size_t round = 0; round < cfg.picard_iters; ++round) {
        forcing = forcing_F(state, t_new, p_hat);
        sol = psor_solve(ObstacleSpec{forcing.F, settings, round == 0 ? warm : sol.w});
        sweeps += sol.iters;
        worst_residual = std::max(worst_residual, sol.residual);
        if (!sol.converged) {
            std::ostringstream msg;
            msg << "obstacle solve did not converge at t = " << t_new << " (residual " << sol.residual << ")";
            throw SolverError(msg.str());
        }
        clamp = 0.0;
        for (std::size_t k = 0; k < p_hat.size(); ++k) {
            double d = c0 * sol.w[k] + c1 * state.w[k];
            if (second_order) d += c2 * (*state.w_prev)[k];
            double v = growth * d;
            if (v < 0.0) {
                clamp = std::max(clamp, -v);
                v = 0.0;
            } else if (v > pM) {
                clamp = std::max(clamp, v - pM);
                v = pM;
            }
            p_hat[k] = v <= cfg.p_threshold ? 0.0 : v;
        }
    }

    const double mono_tol = 100.0 * settings.tol;
    for (std::size_t k = 0; k < sol.w.size(); ++k) {
        if (sol.w[k] < state.w[k] - mono_tol) {
            std::ostringstream msg;
            msg << "Baiocchi variable decreased at cell " << k << ", t = " << t_new << " ("
                << state.w[k] - sol.w[k] << ")";
            throw SolverError(msg.str());
        }
    }

    HsState next = state;
    next.t = t_new;
    next.w_prev = state.w;
    next.dt_prev = dt;
    next.w = std::move(sol.w);
    next.p = std::move(p_hat);
    next.F = std::move(forcing.F);
    next.quad_accum = std::move(forcing.quad_accum);
    next.omega_mask = threshold_mask(next.p, cfg.p_threshold);
    next.n = density_from(state.n0, next.omega_mask, law.g0(), t_new);
    next.omega_age.assign(g.size(), 0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const std::uint32_t before = state.omega_age.empty() ? 0 : state.omega_age[k];
        if (next.omega_mask[k]) next.omega_age[k] = before + 1;
    }
    next.max_clamp = std::max(state.max_clamp, clamp);
    next.steps = state.steps + 1;
    next.psor_sweeps = state.psor_sweeps + sweeps;
    next.max_psor_residual = std::max(state.max_psor_residual, worst_residual);
    if (support_margin(next.n) < kEdgeMarginCells) next.edge_warning = true;
    return next;
}

std::vector<HsState> hs_run(const HsState& state0, const HsRunConfig& cfg) {
    validate(cfg);
    std::vector<HsState> out{state0};
    HsState s = state0;
    const double t0 = s.t;
    const double t_end = t0 + cfg.T_final;
    std::size_t next_index = 1;
    auto next_target = [&]() {
        if (cfg.snapshot_every <= 0.0) return t_end;
        return std::min(t_end, t0 + static_cast<double>(next_index) * cfg.snapshot_every);
    };
    double target = next_target();
    // A step within this fraction of dt of the target is stretched to land on it.
    constexpr double kLandingSlack = 1e-6;
    while (s.t < t_end) {
        const double remaining = target - s.t;
        const bool lands = remaining <= cfg.dt * (1.0 + kLandingSlack);
        s = hs_step(s, cfg, lands ? remaining : cfg.dt);
        if (lands) {
            s.t = target;
            out.push_back(s);
            ++next_index;
            target = next_target();
        }
    }
    return out;
}

} // namespace hslab
