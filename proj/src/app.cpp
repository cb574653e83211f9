#include "hslab/app.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hslab/geometry.hpp"
#include "hslab/scenarios.hpp"
#include "hslab/snapshot_io.hpp"

namespace hslab {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

Json number_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw ConfigError({"output.dir: cannot write " + path.string()});
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

GrowthLaw config_law(const RunConfig& cfg) {
    try {
        return cfg.law();
    } catch (const std::exception& e) {
        throw ConfigError({std::string(cfg.law_shape == "tabulated" ? "law.table: " : "law: ") + e.what()});
    }
}

std::string gamma_label(double gamma) { return "gamma_" + format_double(gamma); }

template <class State>
void write_snapshots(const fs::path& dir, const std::vector<State>& snaps) {
    for (std::size_t i = 0; i < snaps.size(); ++i) write_snapshot(dir / "snapshots" / snapshot_name(i), snaps[i]);
}

template <class State>
void write_plotdata(const fs::path& dir, std::span<const State> snaps, const RunConfig& cfg) {
    for (const auto& what : cfg.plotdata) write_file(dir / ("plot_" + what + ".csv"), plotdata_csv(snaps, what, cfg.p_threshold));
}

void add_named(DiagnosticsReport& report, CheckResult r, const std::string& label) {
    if (!label.empty()) r.name = label + "." + r.name;
    report.add(std::move(r));
}

void note(DiagnosticsReport& report, const std::string& label, const std::string& text) {
    report.run_manifest.emplace_back(label.empty() ? "note" : label + ".note", text);
}

std::vector<HsState> simulate_hs(const RunConfig& cfg, const ScalarField& n0, const GrowthLaw& law) {
    const HsRunConfig h = cfg.hs_config();
    HsState s0 = [&] {
        try {
            return make_hs_state(n0, law, h);
        } catch (const SolverError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw ConfigError({std::string("solver: ") + e.what()});
        }
    }();
    return hs_run(s0, h);
}

std::vector<PmeState> simulate_pme(const RunConfig& cfg, const ScalarField& n0, const GrowthLaw& law, double gamma) {
    PmeState s0{gamma, 0.0, scale_initial_data(n0, gamma, law.pM()), law};
    return pme_run(s0, cfg.pme_config());
}

Json run_entry(const std::string& label, const std::string& kind, std::size_t count, double t_final,
               std::size_t steps) {
    Json j;
    j["label"] = label;
    j["kind"] = kind;
    j["snapshots"] = count;
    j["final_time"] = number_json(t_final);
    j["steps"] = steps;
    return j;
}

Json manifest_json(const RunConfig& cfg, const Json& runs, const DiagnosticsReport* report) {
    Json m;
    m["program"] = "hslab";
    m["version"] = kVersion;
    m["snapshot_format"] = kSnapshotFormatVersion;
    m["mode"] = cfg.mode;
    Json conf = Json::object();
    std::istringstream is(config_text(cfg));
    for (std::string line; std::getline(is, line);) {
        const auto eq = line.find(" = ");
        const std::string key = line.substr(0, eq);
        if (key == "output.dir") continue; // the manifest lives there; runs into different directories compare equal
        conf[key] = line.substr(eq + 3);
    }
    m["config"] = conf;
    m["runs"] = runs;
    if (report) {
        Json notes = Json::object();
        for (const auto& [k, v] : report->run_manifest) notes[k] = v;
        m["notes"] = notes;
    }
    return m;
}

int finish(const RunConfig& cfg, const DiagnosticsReport& report, const Json& runs, std::ostream& log) {
    const fs::path out = cfg.output_dir;
    write_file(out / "report.json", report_json(report));
    write_file(out / "manifest.json", dump(manifest_json(cfg, runs, &report)));
    std::size_t failed = 0;
    for (const auto& c : report.checks) {
        if (!c.passed) {
            ++failed;
            log << "check failed: " << c.name << " (measured " << format_double(c.measured) << ", bound "
                << format_double(c.bound) << ")\n";
        }
    }
    log << report.checks.size() - failed << "/" << report.checks.size() << " checks passed\n";
    return failed == 0 ? kExitOk : kExitCheck;
}

int run_hs_mode(const RunConfig& cfg, std::ostream& log) {
    const GrowthLaw law = config_law(cfg);
    const auto snaps = simulate_hs(cfg, initial_density(cfg), law);
    write_snapshots(cfg.output_dir, snaps);
    write_plotdata<HsState>(cfg.output_dir, snaps, cfg);
    DiagnosticsReport report;
    add_hs_checks(report, snaps, cfg, "");
    Json runs = Json::array({run_entry("hs", "hele_shaw", snaps.size(), snaps.back().t, snaps.back().steps)});
    return finish(cfg, report, runs, log);
}

int run_pme_mode(const RunConfig& cfg, std::ostream& log) {
    const GrowthLaw law = config_law(cfg);
    const auto snaps = simulate_pme(cfg, initial_density(cfg), law, cfg.gamma);
    write_snapshots(cfg.output_dir, snaps);
    write_plotdata<PmeState>(cfg.output_dir, snaps, cfg);
    DiagnosticsReport report;
    add_pme_checks(report, snaps, cfg, "");
    Json runs = Json::array(
        {run_entry(gamma_label(cfg.gamma), "porous_medium", snaps.size(), snaps.back().t, snaps.back().steps)});
    return finish(cfg, report, runs, log);
}

int run_sweep_mode(const RunConfig& cfg, std::ostream& log) {
    const GrowthLaw law = config_law(cfg);
    const ScalarField n0 = initial_density(cfg);
    const fs::path out = cfg.output_dir;
    DiagnosticsReport report;
    Json runs = Json::array();
    std::vector<std::vector<PmeState>> ladder;
    for (double gamma : cfg.gamma_ladder) {
        const std::string label = gamma_label(gamma);
        log << "running " << label << "\n";
        ladder.push_back(simulate_pme(cfg, n0, law, gamma));
        const auto& snaps = ladder.back();
        write_snapshots(out / label, snaps);
        write_plotdata<PmeState>(out / label, snaps, cfg);
        add_pme_checks(report, snaps, cfg, label);
        runs.push_back(run_entry(label, "porous_medium", snaps.size(), snaps.back().t, snaps.back().steps));
    }
    log << "running hs\n";
    const auto hs = simulate_hs(cfg, n0, law);
    write_snapshots(out / "hs", hs);
    write_plotdata<HsState>(out / "hs", hs, cfg);
    add_hs_checks(report, hs, cfg, "hs");
    runs.push_back(run_entry("hs", "hele_shaw", hs.size(), hs.back().t, hs.back().steps));
    report.add(check_gamma_convergence(ladder, hs, cfg.p_threshold));
    return finish(cfg, report, runs, log);
}

struct LoadedRun {
    std::string label;
    std::vector<HsState> hs;
    std::vector<PmeState> pme;
};

LoadedRun load_run(const std::string& input) {
    fs::path dir = input;
    if (fs::is_directory(dir / "snapshots")) dir /= "snapshots";
    const auto files = snapshot_files(dir);
    if (files.empty()) throw ConfigError({"verify.inputs: no snapshot files in '" + input + "'"});
    LoadedRun run{input, {}, {}};
    for (const auto& f : files) {
        auto loaded = read_snapshot(f);
        if (loaded.hs) run.hs.push_back(std::move(*loaded.hs));
        else run.pme.push_back(std::move(*loaded.pme));
    }
    if (!run.hs.empty() && !run.pme.empty()) {
        throw ConfigError({"verify.inputs: '" + input + "' mixes Hele-Shaw and porous-medium snapshots"});
    }
    for (std::size_t i = 1; i < run.pme.size(); ++i) {
        if (run.pme[i].gamma != run.pme[0].gamma) {
            throw ConfigError({"verify.inputs: '" + input + "' mixes gamma values"});
        }
    }
    return run;
}

int run_verify_mode(const RunConfig& cfg, std::ostream& log) {
    std::vector<LoadedRun> runs;
    for (const auto& input : cfg.verify_inputs) runs.push_back(load_run(input));
    DiagnosticsReport report;
    Json entries = Json::array();
    std::vector<std::vector<PmeState>> ladder;
    const HsState* hs_final = nullptr;
    std::span<const HsState> hs_run_snaps;
    std::size_t hs_count = 0;
    for (const auto& run : runs) {
        const std::string label = runs.size() > 1 ? run.label : "";
        if (!run.hs.empty()) {
            add_hs_checks(report, run.hs, cfg, label);
            entries.push_back(run_entry(run.label, "hele_shaw", run.hs.size(), run.hs.back().t, run.hs.back().steps));
            hs_run_snaps = run.hs;
            hs_final = &run.hs.back();
            ++hs_count;
        } else {
            add_pme_checks(report, run.pme, cfg, label);
            entries.push_back(
                run_entry(run.label, "porous_medium", run.pme.size(), run.pme.back().t, run.pme.back().steps));
            ladder.push_back(run.pme);
        }
    }
    if (hs_count == 1 && !ladder.empty() && hs_final) {
        report.add(check_gamma_convergence(ladder, hs_run_snaps, cfg.p_threshold));
    }
    return finish(cfg, report, entries, log);
}

int run_geometry_mode(const RunConfig& cfg, std::ostream& log) {
    const auto loaded = read_snapshot(cfg.geometry_snapshot);
    const ScalarField p = loaded.hs ? loaded.hs->p : pressure_of(loaded.pme->n, loaded.pme->gamma);
    const Grid& g = p.grid();
    const RegionMask omega = positivity_set(p, cfg.p_threshold);
    const auto radial = radial_bounds(omega, {0.0, 0.0});
    const double h = g.spacing();
    Json j;
    j["snapshot"] = fs::path(cfg.geometry_snapshot).filename().string();
    j["time"] = loaded.hs ? loaded.hs->t : loaded.pme->t;
    j["gamma"] = loaded.hs ? Json("inf") : Json(loaded.pme->gamma);
    j["cells_in_omega"] = omega.count();
    j["measure"] = static_cast<double>(omega.count()) * g.cell_volume();
    j["components"] = component_count(omega);
    j["diameter"] = diameter(omega);
    j["minimal_diameter"] = minimal_diameter(omega);
    j["R_minus"] = radial.R_minus;
    j["R_plus"] = radial.R_plus;
    j["perimeter_proxy"] =
        static_cast<double>(boundary_cells(omega).count()) * (g.dim() == 2 ? h : 1.0);
    if (loaded.hs && cfg.verify_flatness_samples > 0 && !omega.empty()) {
        try {
            const auto r = check_flatness_criteria(*loaded.hs, cfg.verify_flatness_samples, cfg.p_threshold, false);
            Json f = Json::object();
            for (const auto& [k, v] : r.details) f[k] = number_json(v);
            j["flatness"] = f;
        } catch (const std::invalid_argument& e) {
            j["flatness"] = std::string("unavailable: ") + e.what();
        }
    }
    write_file(fs::path(cfg.output_dir) / "geometry.json", dump(j));
    write_file(fs::path(cfg.output_dir) / "manifest.json", dump(manifest_json(cfg, Json::array(), nullptr)));
    log << "geometry of " << cfg.geometry_snapshot << " written\n";
    return kExitOk;
}

template <class State>
std::string profile_rows(std::span<const State> snaps, const std::string& what, double thr,
                         const std::function<ScalarField(const State&)>& pressure) {
    std::ostringstream os;
    const Grid& g = pressure(snaps.front()).grid();
    const bool two = g.dim() == 2;
    os << (what == "masks" ? (two ? "t,x,y\n" : "t,x\n") : (two ? "t,x,y,p\n" : "t,x,p\n"));
    for (const auto& s : snaps) {
        const ScalarField p = pressure(s);
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (what == "masks" && !(p[k] > thr)) continue;
            const auto x = g.position(k);
            os << format_double(s.t) << ',' << format_double(x[0]);
            if (two) os << ',' << format_double(x[1]);
            if (what != "masks") os << ',' << format_double(p[k]);
            os << '\n';
        }
    }
    return os.str();
}

} // namespace

ScalarField initial_density(const RunConfig& cfg) {
    const Grid g = cfg.grid();
    const InitConfig& i = cfg.init;
    try {
        if (i.kind == "ball") return ball_density(g, i.center, i.radius, i.amplitude);
        if (i.kind == "annulus") return annulus_density(g, i.center, i.r_in, i.r_out, i.amplitude);
        if (i.kind == "two_balls") return two_balls_density(g, i.center, i.radius, i.center2, i.radius2, i.amplitude);
        if (i.kind == "plateau") return plateau_density(g, i.center, i.core, i.outer, i.amplitude);
    } catch (const std::invalid_argument& e) {
        throw ConfigError({"init: " + std::string(e.what())});
    }
    if (i.kind == "file") {
        LoadedSnapshot s;
        try {
            s = read_snapshot(i.file);
        } catch (const SnapshotFormatError& e) {
            throw ConfigError({"init.file: " + std::string(e.what())});
        }
        const ScalarField& n = s.hs ? s.hs->n : s.pme->n;
        if (!(n.grid() == g)) throw ConfigError({"init.file: snapshot grid differs from grid.*"});
        if (!n.all_finite() || n.min() < 0.0 || n.max() > 1.0) {
            throw ConfigError({"init.file: initial density must lie in [0, 1]"});
        }
        return n;
    }
    throw ConfigError({"init.kind: unknown kind '" + i.kind + "'"});
}

void add_hs_checks(DiagnosticsReport& report, std::span<const HsState> snaps, const RunConfig& cfg,
                   const std::string& label) {
    const double thr = cfg.p_threshold;
    add_named(report, check_structure_theorem(snaps, thr), label);
    add_named(report, check_complementarity(snaps, thr), label);
    add_named(report, check_mass_bounds(snaps), label);
    add_named(report, check_hs_monotonicity(snaps, thr), label);
    try {
        add_named(report, check_obstacle_equivalence(snaps), label);
    } catch (const std::invalid_argument& e) {
        note(report, label, std::string("obstacle_equivalence skipped: ") + e.what());
    }
    if (cfg.verify_reflection_radius > 0.0) {
        add_named(report,
                  check_reflection_monotonicity(snaps, cfg.verify_reflection_radius, cfg.verify_late_from, thr),
                  label);
    }
    if (cfg.verify_flatness_samples > 0) {
        try {
            add_named(report, check_flatness_criteria(snaps.back(), cfg.verify_flatness_samples, thr, false), label);
        } catch (const std::invalid_argument& e) {
            note(report, label, std::string("flatness skipped: ") + e.what());
        }
    }
}

void add_pme_checks(DiagnosticsReport& report, std::span<const PmeState> snaps, const RunConfig& cfg,
                    const std::string& label) {
    add_named(report, check_mass_bounds(snaps), label);
    add_named(report, check_aronson_benilan(snaps), label);
    add_named(report, check_pressure_time_monotonicity(snaps), label);
    add_named(report, energy_monitor(snaps), label);
    if (cfg.verify_reflection_radius > 0.0) {
        add_named(report,
                  check_reflection_monotonicity(snaps, cfg.verify_reflection_radius, cfg.verify_late_from,
                                                cfg.p_threshold),
                  label);
    }
}

std::string report_json(const DiagnosticsReport& report) {
    Json checks = Json::array();
    for (const auto& c : report.checks) {
        Json j;
        j["name"] = c.name;
        j["passed"] = c.passed;
        j["relation"] = c.relation;
        j["measured"] = number_json(c.measured);
        j["bound"] = number_json(c.bound);
        j["tolerance"] = number_json(c.tolerance);
        j["context"] = c.context;
        Json d = Json::object();
        for (const auto& [k, v] : c.details) d[k] = number_json(v);
        j["details"] = d;
        checks.push_back(j);
    }
    Json out;
    out["all_passed"] = report.all_passed();
    out["checks"] = checks;
    Json manifest = Json::object();
    for (const auto& [k, v] : report.run_manifest) manifest[k] = v;
    out["manifest"] = manifest;
    return dump(out);
}

std::string plotdata_csv(std::span<const HsState> snaps, const std::string& what, double thr) {
    if (snaps.empty()) throw std::invalid_argument("plot data needs snapshots");
    std::ostringstream os;
    if (what == "front_position") {
        os << "t,R\n";
        for (const auto& s : snaps) {
            const double R = s.p.grid().dim() == 1 ? front_position_1d(s)
                                                   : radial_bounds(positivity_set(s.p, thr), {0.0, 0.0}).R_plus;
            os << format_double(s.t) << ',' << format_double(R) << '\n';
        }
        return os.str();
    }
    if (what == "mass") {
        os << "t,mass,bound\n";
        const double m0 = integrate(snaps.front().n0);
        for (const auto& s : snaps) {
            os << format_double(s.t) << ',' << format_double(integrate(s.n)) << ','
               << format_double(std::exp(s.law.g0() * s.t) * m0) << '\n';
        }
        return os.str();
    }
    if (what == "pressure_profile" || what == "masks") {
        return profile_rows<HsState>(snaps, what, thr, [](const HsState& s) { return s.p; });
    }
    throw std::invalid_argument("unknown plot data '" + what + "'");
}

std::string plotdata_csv(std::span<const PmeState> snaps, const std::string& what, double thr) {
    if (snaps.empty()) throw std::invalid_argument("plot data needs snapshots");
    std::ostringstream os;
    if (what == "front_position") {
        os << "t,R\n";
        for (const auto& s : snaps) {
            const double R = radial_bounds(positivity_set(s.n, 0.0), {0.0, 0.0}).R_plus;
            os << format_double(s.t) << ',' << format_double(R) << '\n';
        }
        return os.str();
    }
    if (what == "mass") {
        os << "t,mass,bound\n";
        const auto& s0 = snaps.front();
        const double m0 = integrate(s0.n) / std::pow(s0.law.pM(), 1.0 / s0.gamma);
        for (const auto& s : snaps) {
            os << format_double(s.t) << ',' << format_double(integrate(s.n)) << ','
               << format_double(std::exp(s.law.g0() * (s.t - s0.t)) * m0) << '\n';
        }
        return os.str();
    }
    if (what == "pressure_profile" || what == "masks") {
        return profile_rows<PmeState>(snaps, what, thr,
                                      [](const PmeState& s) { return pressure_of(s.n, s.gamma); });
    }
    throw std::invalid_argument("unknown plot data '" + what + "'");
}

int run_mode(const RunConfig& cfg, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    int code = kExitOk;
    try {
        fs::create_directories(cfg.output_dir);
        if (cfg.mode == "hs") code = run_hs_mode(cfg, log);
        else if (cfg.mode == "pme") code = run_pme_mode(cfg, log);
        else if (cfg.mode == "sweep") code = run_sweep_mode(cfg, log);
        else if (cfg.mode == "verify") code = run_verify_mode(cfg, log);
        else if (cfg.mode == "geometry") code = run_geometry_mode(cfg, log);
        else throw ConfigError({"mode: unknown mode '" + cfg.mode + "'"});
    } catch (const ConfigError& e) {
        for (const auto& p : e.problems()) log << "config error: " << p << "\n";
        return kExitConfig;
    } catch (const SnapshotFormatError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const fs::filesystem_error& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SolverError& e) {
        log << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        log << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Json timing;
    timing["wall_seconds"] = wall;
    try {
        write_file(fs::path(cfg.output_dir) / "timing.json", dump(timing));
    } catch (const ConfigError& e) {
        log << "config error: " << e.problems().front() << "\n";
        return kExitConfig;
    }
    return code;
}

} // namespace hslab
