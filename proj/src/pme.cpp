#include "hslab/pme.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hslab {

ScalarField pressure_of(const ScalarField& n, double gamma) {
    ScalarField p(n.grid());
    for (std::size_t k = 0; k < n.size(); ++k) {
        if (n[k] < 0.0) throw std::domain_error("pressure_of: negative density");
        p[k] = n[k] > 0.0 ? std::pow(n[k], gamma) : 0.0;
    }
    return p;
}

ScalarField scale_initial_data(const ScalarField& n0, double gamma, double pM) {
    if (!(gamma > 1.0)) throw std::invalid_argument("gamma must exceed 1");
    if (!(pM > 0.0)) throw std::invalid_argument("pM must be positive");
    const double s = std::pow(pM, 1.0 / gamma);
    ScalarField out(n0.grid());
    for (std::size_t k = 0; k < n0.size(); ++k) {
        if (!(n0[k] >= 0.0 && n0[k] <= 1.0)) throw std::invalid_argument("initial density outside [0, 1]");
        out[k] = s * n0[k];
    }
    return out;
}

namespace {

constexpr double kVacuumGuard = 1e-30;
constexpr double kPressureFloor = 1e-6;
constexpr std::size_t kEdgeMarginCells = 10;

double dt_from(const ScalarField& p, const ScalarField& gsq, double gamma, double cfl_safety) {
    const Grid& g = p.grid();
    const double h = g.spacing();
    const double denom = 2.0 * g.dim() * (gamma * p.max() + std::sqrt(gsq.max()) * h + kVacuumGuard);
    return cfl_safety * h * h / denom;
}

// Buffers reused across steps of a run.
struct Workspace {
    ScalarField p, div, gsq;
    explicit Workspace(const Grid& g) : p(g), div(g), gsq(g) {}
};

void fill_pressure(const ScalarField& n, double gamma, ScalarField& p) {
    for (std::size_t k = 0; k < n.size(); ++k) p[k] = n[k] > 0.0 ? std::pow(n[k], gamma) : 0.0;
}

double quartic_rate(const PmeState& s, const ScalarField& p, const ScalarField& gsq) {
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (s.n[k] > 0.0) acc += s.n[k] / std::max(p[k], kPressureFloor) * gsq[k] * gsq[k];
    }
    return acc * s.n.grid().cell_volume() / (2.0 * s.gamma);
}

// Advances `s` in place. Assumes ws.p and ws.gsq already hold the pressure of s.n and its grad_sq.
void advance(PmeState& s, double dt, Workspace& ws) {
    flux_divergence(s.n, ws.p, ws.div);
    s.quartic_dissipation += dt * quartic_rate(s, ws.p, ws.gsq);
    const double cap = 2.0 * std::pow(s.law.pM(), 1.0 / s.gamma);
    double clip = 0.0;
    for (std::size_t k = 0; k < s.n.size(); ++k) {
        double v = s.n[k] + dt * (ws.div[k] + s.n[k] * s.law.eval(ws.p[k]));
        if (!std::isfinite(v) || v > cap) {
            std::ostringstream msg;
            msg << "porous medium step unstable at cell " << k << " (t = " << s.t << ", value " << v << ")";
            throw SolverError(msg.str());
        }
        if (v < 0.0) {
            clip = std::max(clip, -v);
            v = 0.0;
        }
        s.n[k] = v;
    }
    if (clip > kClipTolerance) {
        std::ostringstream msg;
        msg << "porous medium step clipped " << clip << " at t = " << s.t << ", above roundoff";
        throw SolverError(msg.str());
    }
    s.last_clip = clip;
    s.max_clip = std::max(s.max_clip, clip);
    s.t += dt;
    ++s.steps;
    if (support_margin(s.n) < kEdgeMarginCells) s.edge_warning = true;
}

void validate(const PmeState& s) {
    if (!(s.gamma > 1.0)) throw std::invalid_argument("gamma must exceed 1");
    if (!(s.t >= 0.0)) throw std::invalid_argument("time must be nonnegative");
    if (!s.n.all_finite()) throw std::invalid_argument("density has non-finite values");
    if (s.n.min() < 0.0) throw std::invalid_argument("density has negative values");
}

} // namespace

double stable_dt(const PmeState& state, double cfl_safety) {
    const auto p = pressure_of(state.n, state.gamma);
    return dt_from(p, grad_sq(p), state.gamma, cfl_safety);
}

PmeState pme_step(const PmeState& state, double dt) {
    validate(state);
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    PmeState next = state;
    Workspace ws(state.n.grid());
    fill_pressure(next.n, next.gamma, ws.p);
    ws.gsq = grad_sq(ws.p);
    advance(next, dt, ws);
    return next;
}

std::vector<PmeState> pme_run(const PmeState& state0, const PmeRunConfig& cfg) {
    validate(state0);
    if (!(cfg.T_final >= 0.0)) throw std::invalid_argument("T_final must be nonnegative");
    if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0)) throw std::invalid_argument("cfl_safety must lie in (0, 1]");
    if (cfg.snapshot_every < 0.0) throw std::invalid_argument("snapshot_every must be nonnegative");

    std::vector<PmeState> out{state0};
    if (support_margin(state0.n) < kEdgeMarginCells) out.back().edge_warning = true;
    PmeState s = out.back();
    Workspace ws(s.n.grid());
    const double t0 = s.t;
    const double t_end = t0 + cfg.T_final;
    std::size_t next_index = 1;
    auto next_target = [&]() {
        if (cfg.snapshot_every <= 0.0) return t_end;
        return std::min(t_end, t0 + static_cast<double>(next_index) * cfg.snapshot_every);
    };
    double target = next_target();
    while (s.t < t_end) {
        fill_pressure(s.n, s.gamma, ws.p);
        ws.gsq = grad_sq(ws.p);
        const double dt_max = dt_from(ws.p, ws.gsq, s.gamma, cfg.cfl_safety);
        const double remaining = target - s.t;
        const bool lands = dt_max >= remaining;
        advance(s, lands ? remaining : dt_max, ws);
        if (lands) {
            s.t = target;
            out.push_back(s);
            ++next_index;
            target = next_target();
        }
    }
    return out;
}

double gradient_energy(const ScalarField& p) { return integrate(grad_sq(p)); }

} // namespace hslab
