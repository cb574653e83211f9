// Refinement study for the O(h) tolerance constants in calibration.hpp.
// Writes one row per (quantity, scenario, resolution) and prints the constant
// each quantity implies under the freezing rule.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "hslab/diagnostics.hpp"
#include "hslab/scenarios.hpp"

using namespace hslab;

namespace {

struct Row {
    std::string quantity;
    std::string scenario;
    std::size_t cells;
    double h;
    double value;
    double scale;
};

double round_up_2sig(double x) {
    if (x <= 0.0) return 0.0;
    const double mag = std::pow(10.0, std::floor(std::log10(x)) - 1.0);
    return std::ceil(x / mag - 1e-9) * mag;
}

double detail(const CheckResult& r, const std::string& key) {
    for (const auto& [k, v] : r.details) {
        if (k == key) return v;
    }
    throw std::runtime_error("missing detail " + key);
}

std::vector<HsState> run_hs(const Scenario& s) { return hs_run(make_hs_state(s.n0, s.law, s.hs), s.hs); }

std::vector<PmeState> run_pme(const ScalarField& n0, const GrowthLaw& law, double gamma, double T, double every) {
    PmeState s0{gamma, 0.0, scale_initial_data(n0, gamma, law.pM()), law};
    PmeRunConfig cfg;
    cfg.T_final = T;
    cfg.snapshot_every = every;
    return pme_run(s0, cfg);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Refinement study for the frozen tolerance constants"};
    std::string out_path = "data/calibration.csv";
    app.add_option("--out", out_path, "CSV output path");
    CLI11_PARSE(app, argc, argv);

    std::vector<Row> rows;
    auto log = [&](Row r) {
        std::cerr << r.quantity << " " << r.scenario << " " << r.cells << ": " << r.value / r.scale << "\n";
        rows.push_back(std::move(r));
    };
    const double thr = HsRunConfig{}.p_threshold;

    using Maker = Scenario (*)(std::size_t);
    const std::vector<std::pair<Maker, std::vector<std::size_t>>> hs_families{
        {reference_1d, {256, 512, 1024}}, {stefan_chi_1d, {256, 512, 1024}}, {plateau_1d, {256, 512, 1024}},
        {island_1d, {256, 512, 1024}},    {two_ball_2d, {32, 48, 64}},       {radial_2d, {32, 48, 64}}};
    for (const auto& [make, resolutions] : hs_families) {
        for (std::size_t cells : resolutions) {
            Scenario s = make(cells);
            s.hs.snapshot_every = s.hs.dt; // every step: the structure checks see every emitted state
            const auto snaps = run_hs(s);
            const double h = s.n0.grid().spacing();
            const auto st = check_structure_theorem(snaps, thr, 0.0);
            const auto cp = check_complementarity(snaps, thr, 0.0);
            log({"structure", s.name, cells, h, st.measured, h});
            log({"complementarity", s.name, cells, h, cp.measured, h});
            if (s.n0.grid().dim() == 1) {
                const auto oe = check_obstacle_equivalence(snaps, 1e-9, 0.0);
                const double spacing = detail(oe, "snapshot_spacing");
                const double T = snaps.back().t - snaps.front().t;
                log({"reconstruction", s.name, cells, h, oe.measured, spacing * (spacing + h) * T});
            }
        }
    }

    const GrowthLaw law = GrowthLaw::linear(1.0, 1.0);
    for (std::size_t cells : {256u, 512u, 1024u}) {
        const Scenario ref = reference_1d(cells);
        const double h = ref.n0.grid().spacing();
        const auto pme = run_pme(ref.n0, law, 40.0, 0.5, 0.01);
        log({"aronson_benilan", "reference_1d_gamma_40", cells, h, check_aronson_benilan(pme, 0.0).measured, h});
        log({"pressure_time", "reference_1d_gamma_40", cells, h,
             check_pressure_time_monotonicity(pme, 0.0).measured, h});
        for (double gamma : {40.0, 80.0}) {
            const Barrier b = reference_barrier(gamma);
            const auto win = run_pme(ref.n0, law, gamma, b.window(), b.window() / 50.0);
            log({"barrier", "reference_barrier_gamma_" + std::to_string(static_cast<int>(gamma)), cells, h,
                 check_barrier_comparison(win, b, 0.0).measured, h});
        }
    }

    std::ofstream csv(out_path);
    if (!csv) {
        std::cerr << "cannot write " << out_path << "\n";
        return 2;
    }
    csv << "quantity,scenario,cells,h,value,scale,value_over_scale\n";
    csv << std::setprecision(10);
    std::map<std::string, double> worst;
    for (const auto& r : rows) {
        const double ratio = r.value / r.scale;
        csv << r.quantity << ',' << r.scenario << ',' << r.cells << ',' << r.h << ',' << r.value << ',' << r.scale
            << ',' << ratio << '\n';
        worst[r.quantity] = std::max(worst[r.quantity], ratio);
    }
    for (const auto& [q, w] : worst) {
        std::printf("%-16s max ratio %.4g -> K = %.3g\n", q.c_str(), w, std::max(0.1, round_up_2sig(1.25 * w)));
    }
    return 0;
}
