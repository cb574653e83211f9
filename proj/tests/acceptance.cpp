// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "hslab/app.hpp"
#include "hslab/diagnostics.hpp"
#include "hslab/geometry.hpp"
#include "hslab/obstacle.hpp"
#include "hslab/scenarios.hpp"
#include "obstacle_oracles.hpp"

using namespace hslab;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void verdict(int id, const char* title, bool ok, const std::string& detail) {
    std::printf("%s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string summary(const CheckResult& r) {
    std::ostringstream os;
    os << r.name << (r.passed ? " ok" : " FAILED") << " [" << r.measured << " " << r.relation << " " << r.bound
       << "]";
    return os.str();
}

std::vector<HsState> run(const Scenario& s) { return hs_run(make_hs_state(s.n0, s.law, s.hs), s.hs); }

Scenario per_step(Scenario s) {
    s.hs.snapshot_every = s.hs.dt;
    return s;
}

double detail(const CheckResult& r, const std::string& key) {
    for (const auto& [k, v] : r.details) {
        if (k == key) return v;
    }
    return std::nan("");
}

// Runs shared between criteria.
struct Shared {
    std::vector<HsState> reference;        // reference 1D, per-step snapshots
    std::vector<HsState> stefan_chi;       // χ data to T = 1
    std::vector<HsState> plateau;          // plateau data, per-step snapshots
    std::vector<HsState> island;           // far island
    std::vector<HsState> two_ball;         // 2D off-center pair
    std::vector<std::vector<PmeState>> ladder;
};

// ---- 1: obstacle solver exactness ----
void criterion_1() {
    const testing::FreeBoundaryOracle oracle{0.3};
    double fb_worst = 0.0, C = 0.0;
    std::vector<double> l1, linf;
    for (std::size_t n : {256u, 512u}) {
        const Grid g(1, n, 1.0);
        const auto sol = psor_solve({oracle.forcing(g), PsorSettings{1e-11, optimal_sor_omega(g), 400000}, {}});
        const double h = g.spacing();
        fb_worst = std::max(fb_worst, std::abs(oracle.support_edge(sol.w) - oracle.b()) / h);
        const double e = oracle.max_error(sol.w);
        C = std::max(C, e / (h * h));
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += std::abs(sol.w[i] - oracle.exact(g.center(i))) * h;
        l1.push_back(s);
        linf.push_back(e);
    }
    const double ratio = l1[0] / l1[1];
    std::ostringstream os;
    os << "free boundary within " << fb_worst << " h (<= 2), max error " << C << " h^2 (<= 0.5), L1 ratio " << ratio
       << " (>= 3.5), max-norm ratio " << linf[0] / linf[1] << " (info)";
    verdict(1, "obstacle solver exactness", fb_worst <= 2.0 && C <= 0.5 && ratio >= 3.5, os.str());
}

// ---- 2: complementarity ----
void criterion_2(const Shared& s) {
    bool ok = true;
    std::ostringstream os;
    double obstacle = 0.0;
    for (const auto* snaps : {&s.reference, &s.plateau, &s.island, &s.two_ball, &s.stefan_chi}) {
        const auto r = check_complementarity(*snaps, 1e-7);
        ok = ok && r.passed;
        obstacle = std::max(obstacle, detail(r, "max_obstacle_residual"));
        os << summary(r) << "; ";
    }
    os << "max obstacle residual " << obstacle << " (<= 1e-9)";
    verdict(2, "complementarity", ok && obstacle <= 1e-9, os.str());
}

// ---- 3: mass bounds ----
void criterion_3(const Shared& s) {
    bool ok = true;
    double worst = 0.0;
    std::size_t runs = 0;
    for (const auto* snaps : {&s.reference, &s.plateau, &s.island, &s.two_ball, &s.stefan_chi}) {
        const auto r = check_mass_bounds(std::span<const HsState>(*snaps));
        ok = ok && r.passed;
        worst = std::max(worst, std::max(r.measured / 1e-8, detail(r, "pressure_relative_excess") / 1e-6));
        ++runs;
    }
    for (const auto& member : s.ladder) {
        const auto r = check_mass_bounds(std::span<const PmeState>(member));
        ok = ok && r.passed;
        worst = std::max(worst, std::max(r.measured / 1e-8, detail(r, "pressure_relative_excess") / 1e-6));
        ++runs;
    }
    std::ostringstream os;
    os << runs << " runs, largest excess as a fraction of its allowance " << worst;
    verdict(3, "mass bounds", ok, os.str());
}

// ---- 4: Aronson-Benilan ----
void criterion_4(const Shared& s) {
    const auto it = std::find_if(s.ladder.begin(), s.ladder.end(),
                                 [](const auto& m) { return m.front().gamma == 40.0; });
    const auto r = check_aronson_benilan(*it);
    verdict(4, "Aronson-Benilan, gamma 40", r.passed && detail(r, "snapshots_used") > 0,
            summary(r) + ", snapshots " + fmt("%.0f", detail(r, "snapshots_used")));
}

// ---- 5: structure theorem ----
void criterion_5(const Shared& s) {
    bool ok = true;
    std::ostringstream os;
    for (const auto* snaps : {&s.reference, &s.plateau, &s.island, &s.two_ball, &s.stefan_chi}) {
        const auto r = check_structure_theorem(*snaps, 1e-7);
        ok = ok && r.passed;
        os << summary(r) << " (a " << detail(r, "outside_density_error") << ", b "
           << detail(r, "inside_density_error") << "); ";
    }
    verdict(5, "structure theorem", ok, os.str());
}

// ---- 6: Stefan condition ----
void criterion_6(const Shared& s) {
    // Closed form of the front law for g0 = pM = 1: d(sinh R)/dt = sinh R.
    const auto& snaps = s.stefan_chi;
    const double R0 = 0.5;
    std::vector<std::size_t> idx{0};
    for (std::size_t i = 1; i < snaps.size(); ++i) {
        if (snaps[i].t - snaps[idx.back()].t >= 0.05 - 1e-12) idx.push_back(i);
    }
    double sum = 0.0, worst = 0.0;
    for (std::size_t q = 1; q < idx.size(); ++q) {
        const auto& a = snaps[idx[q - 1]];
        const auto& b = snaps[idx[q]];
        const double Ra = std::asinh(std::sinh(R0) * std::exp(a.t));
        const double Rb = std::asinh(std::sinh(R0) * std::exp(b.t));
        const double exact = (Rb - Ra) / (b.t - a.t);
        const double measured = (front_position_1d(b) - front_position_1d(a)) / (b.t - a.t);
        const double e = std::abs(measured - exact) / exact;
        sum += e;
        worst = std::max(worst, e);
    }
    const double mean = sum / static_cast<double>(idx.size() - 1);
    const auto amp = check_stefan_amplification(s.plateau, s.stefan_chi);
    const auto weak = check_stefan_weak(s.stefan_chi, default_stefan_ladder());
    const double first = weak.bound * 4.0;
    std::ostringstream os;
    os << "front speed vs closed-form law: mean " << 100 * mean << " %, max " << 100 * worst << " % (<= 3 %); "
       << summary(amp) << "; weak residual " << first << " -> " << weak.measured << " (x" << first / weak.measured
       << ", >= 4)";
    verdict(6, "Stefan condition", mean <= 0.03 && amp.passed && weak.passed, os.str());
}

// ---- 7: stiff-limit convergence ----
void criterion_7(const Shared& s) {
    const auto r = check_gamma_convergence(s.ladder, s.reference, 1e-7);
    std::ostringstream os;
    os << summary(r) << "; final L1 n:";
    for (double g : kGammaLadder) os << " " << detail(r, "L1_n_gamma_" + fmt("%g", g));
    os << "; L1 p:";
    for (double g : kGammaLadder) os << " " << detail(r, "L1_p_gamma_" + fmt("%g", g));
    os << "; Hausdorff:";
    for (double g : kGammaLadder) os << " " << detail(r, "hausdorff_gamma_" + fmt("%g", g));
    os << "; shared times " << detail(r, "shared_times");
    verdict(7, "stiff-limit convergence", r.passed, os.str());
}

// ---- 8: barrier ----
void criterion_8() {
    bool ok = true;
    std::ostringstream os;
    for (double gamma : {10.0, 50.0, 100.0}) {
        const auto r = check_barrier_supersolution(reference_barrier(gamma), 50);
        ok = ok && r.passed;
        os << "gamma " << gamma << " min residual " << r.measured << "; ";
    }
    const Barrier b = reference_barrier(40.0);
    const Scenario ref = reference_1d(512);
    PmeState s0{40.0, 0.0, scale_initial_data(ref.n0, 40.0, 1.0), ref.law};
    PmeRunConfig cfg;
    cfg.T_final = b.window();
    cfg.snapshot_every = b.window() / 50.0;
    const auto win = pme_run(s0, cfg);
    const auto r = check_barrier_comparison(win, b);
    os << summary(r) << ", inner-ball pressure " << detail(r, "inner_ball_max_pressure");
    verdict(8, "barrier supersolution", ok && r.passed, os.str());
}

// ---- 9: reflection ----
void criterion_9(const Shared& s) {
    const auto r = check_reflection_monotonicity(s.two_ball, kTwoBallSupportRadius, kTwoBallLateTime, 1e-7);
    std::ostringstream os;
    os << summary(r) << ", late snapshots " << detail(r, "late_snapshots") << ", R+ - R- max "
       << detail(r, "max_radial_spread") << " (<= " << detail(r, "radial_spread_bound") << ")";
    verdict(9, "reflection corollaries", r.passed && detail(r, "late_snapshots") > 0, os.str());
}

// ---- 10: geometry instruments ----
double brute_directed(const RegionMask& A, const RegionMask& B) {
    const Grid& g = A.grid();
    double worst = 0.0;
    for (std::size_t a : A.members()) {
        double best = INFINITY;
        for (std::size_t b : B.members()) {
            const auto x = g.position(a), y = g.position(b);
            best = std::min(best, std::hypot(x[0] - y[0], x[1] - y[1]));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

void criterion_10(const Shared& s) {
    std::mt19937_64 rng(2024);
    std::bernoulli_distribution coin(0.15);
    const Grid g(2, 24, 1.0);
    auto random_mask = [&] {
        RegionMask m(g);
        for (std::size_t k = 0; k < g.size(); ++k) m.set(k, coin(rng));
        if (m.empty()) m.set(0, true);
        return m;
    };
    bool axioms = true;
    double oracle_gap = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
        const auto A = random_mask(), B = random_mask(), C = random_mask();
        const double ab = hausdorff_distance(A, B), ba = hausdorff_distance(B, A);
        const double bc = hausdorff_distance(B, C), ac = hausdorff_distance(A, C);
        axioms = axioms && hausdorff_distance(A, A) == 0.0 && ab == ba && ac <= ab + bc + 1e-12 &&
                 (ab == 0.0) == (A == B);
        oracle_gap = std::max(oracle_gap,
                              std::abs(ab - std::max(brute_directed(A, B), brute_directed(B, A))));
    }

    const Grid sq(2, 128, 1.0);
    RegionMask square(sq);
    for (std::size_t k = 0; k < sq.size(); ++k) {
        const auto x = sq.position(k);
        square.set(k, std::abs(x[0]) < 0.5 && std::abs(x[1]) < 0.5);
    }
    const double md = minimal_diameter(square);
    const double md_tol = sq.spacing() + std::acos(-1.0) / 360.0;

    const Scenario isl = island_1d(512);
    RegionMask island(isl.n0.grid());
    for (std::size_t k = 0; k < isl.n0.size(); ++k) island.set(k, isl.n0[k] == 0.5);
    const auto act = check_island_activation(s.island, island, isl.hs.dt, 1e-7);

    std::ostringstream os;
    os << "Hausdorff axioms " << (axioms ? "hold" : "violated") << ", brute-force gap " << oracle_gap
       << "; MD(unit square) " << md << " (tolerance " << md_tol << "); island activation "
       << detail(act, "activation_time") << " vs ln 2 = " << std::log(2.0) << " (+- 2 dt)";
    verdict(10, "geometry instruments",
            axioms && oracle_gap <= 1e-12 && std::abs(md - 1.0) <= md_tol && act.passed, os.str());
}

// ---- 11: determinism ----
std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::size_t compare_trees(const fs::path& a, const fs::path& b, bool& same) {
    std::size_t n = 0;
    std::vector<fs::path> left, right;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (e.is_regular_file() && e.path().filename() != "timing.json") left.push_back(fs::relative(e.path(), a));
    }
    for (const auto& e : fs::recursive_directory_iterator(b)) {
        if (e.is_regular_file() && e.path().filename() != "timing.json") right.push_back(fs::relative(e.path(), b));
    }
    std::sort(left.begin(), left.end());
    std::sort(right.begin(), right.end());
    if (left != right) same = false;
    for (const auto& rel : left) {
        if (slurp(a / rel) != slurp(b / rel)) same = false;
        ++n;
    }
    return n;
}

void criterion_11() {
    // Both executions use the same config file and output location; the first
    // result tree is moved aside before the second run.
    const fs::path root = fs::temp_directory_path() / "hslab_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path work = root / "run";
    const fs::path config = root / "suite.conf";
    std::ofstream conf(config);
    conf << "output.plotdata = front_position, mass, pressure_profile, masks\n"
         << "verify.inputs = " << (work / "sweep" / "hs").string();
    for (double g : kGammaLadder) conf << ", " << (work / "sweep" / ("gamma_" + fmt("%g", g))).string();
    conf << "\n";
    conf.close();
    const std::string cli = HSLAB_CLI;
    bool same = true;
    std::vector<int> codes;
    for (const char* copy : {"a", "b"}) {
        for (const char* mode : {"sweep", "verify"}) {
            const std::string cmd = cli + " " + mode + " --config " + config.string() + " --out " +
                                    (work / mode).string() + " > /dev/null 2>&1";
            const int status = std::system(cmd.c_str());
            codes.push_back(WIFEXITED(status) ? WEXITSTATUS(status) : -1);
        }
        fs::rename(work, root / copy);
    }
    const std::size_t files = compare_trees(root / "a", root / "b", same);
    const bool codes_match = codes[0] == codes[2] && codes[1] == codes[3];
    const bool codes_ok = std::all_of(codes.begin(), codes.end(), [](int c) { return c == 0; });
    std::ostringstream os;
    os << files << " files from two sweep + verify executions, " << (same ? "byte-identical" : "DIFFERENT")
       << ", exit codes";
    for (int c : codes) os << " " << c;
    verdict(11, "determinism", same && codes_match && codes_ok && files > 20, os.str());
}

} // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

    criterion_1();

    Shared s;
    s.reference = run(per_step(reference_1d(512)));
    s.stefan_chi = run(stefan_chi_1d(512));
    s.plateau = run(per_step(plateau_1d(512)));
    s.island = run(island_1d(512));
    s.two_ball = run(two_ball_2d(64));
    {
        const Scenario ref = reference_1d(512);
        for (double gamma : kGammaLadder) {
            PmeState s0{gamma, 0.0, scale_initial_data(ref.n0, gamma, ref.law.pM()), ref.law};
            PmeRunConfig cfg;
            cfg.T_final = ref.hs.T_final;
            cfg.snapshot_every = 0.01;
            s.ladder.push_back(pme_run(s0, cfg));
        }
    }
    std::printf("(shared runs ready after %.1f s)\n", elapsed());

    criterion_2(s);
    criterion_3(s);
    criterion_4(s);
    criterion_5(s);
    criterion_6(s);
    criterion_7(s);
    criterion_8();
    criterion_9(s);
    criterion_10(s);
    criterion_11();

    std::printf("%d of 11 criteria failed, %.1f s\n", failures, elapsed());
    return failures == 0 ? 0 : 1;
}
