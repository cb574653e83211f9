#include "hslab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace hslab {

namespace {

std::string join(const std::vector<std::string>& items, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.emplace_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

// Value parsers throw std::string with the reason.
double to_double(std::string_view s) {
    s = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw std::string("expected a number, got '") + std::string(s) + "'";
    }
    if (!std::isfinite(v)) throw std::string("must be finite");
    return v;
}

std::size_t to_count(std::string_view s) {
    s = trim(s);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw std::string("expected a nonnegative integer, got '") + std::string(s) + "'";
    }
    return v;
}

std::array<double, 2> to_point(std::string_view s) {
    const auto parts = split_list(s);
    if (parts.size() != 2) throw std::string("expected two comma-separated coordinates");
    return {to_double(parts[0]), to_double(parts[1])};
}

std::vector<double> to_doubles(std::string_view s) {
    std::vector<double> out;
    for (const auto& part : split_list(s)) out.push_back(to_double(part));
    return out;
}

std::string list_text(const std::vector<double>& v) {
    std::vector<std::string> parts;
    for (double x : v) parts.push_back(format_double(x));
    return join(parts, ", ");
}

struct Field {
    std::string key;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field number(std::string key, T RunConfig::*member) {
    return {key,
            [member](RunConfig& c, std::string_view v) {
                if constexpr (std::is_same_v<T, double>) c.*member = to_double(v);
                else c.*member = static_cast<T>(to_count(v));
            },
            [member](const RunConfig& c) {
                if constexpr (std::is_same_v<T, double>) return format_double(c.*member);
                else return std::to_string(c.*member);
            }};
}

template <class T>
Field init_number(std::string key, T InitConfig::*member) {
    return {key, [member](RunConfig& c, std::string_view v) { c.init.*member = to_double(v); },
            [member](const RunConfig& c) { return format_double(c.init.*member); }};
}

Field text(std::string key, std::string RunConfig::*member) {
    return {key, [member](RunConfig& c, std::string_view v) { c.*member = std::string(trim(v)); },
            [member](const RunConfig& c) { return c.*member; }};
}

Field strings(std::string key, std::vector<std::string> RunConfig::*member) {
    return {key, [member](RunConfig& c, std::string_view v) { c.*member = split_list(v); },
            [member](const RunConfig& c) { return join(c.*member, ", "); }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> all = [] {
        std::vector<Field> f{
            text("mode", &RunConfig::mode),
            {"grid.dim", [](RunConfig& c, std::string_view v) { c.dim = static_cast<int>(to_count(v)); },
             [](const RunConfig& c) { return std::to_string(c.dim); }},
            number("grid.cells", &RunConfig::cells),
            number("grid.half_width", &RunConfig::half_width),
            text("law.shape", &RunConfig::law_shape),
            number("law.g0", &RunConfig::g0),
            number("law.pM", &RunConfig::pM),
            text("law.table", &RunConfig::law_table),
            {"init.kind", [](RunConfig& c, std::string_view v) { c.init.kind = std::string(trim(v)); },
             [](const RunConfig& c) { return c.init.kind; }},
            {"init.center", [](RunConfig& c, std::string_view v) { c.init.center = to_point(v); },
             [](const RunConfig& c) { return list_text({c.init.center[0], c.init.center[1]}); }},
            init_number("init.radius", &InitConfig::radius),
            init_number("init.amplitude", &InitConfig::amplitude),
            init_number("init.r_in", &InitConfig::r_in),
            init_number("init.r_out", &InitConfig::r_out),
            {"init.center2", [](RunConfig& c, std::string_view v) { c.init.center2 = to_point(v); },
             [](const RunConfig& c) { return list_text({c.init.center2[0], c.init.center2[1]}); }},
            init_number("init.radius2", &InitConfig::radius2),
            init_number("init.core", &InitConfig::core),
            init_number("init.outer", &InitConfig::outer),
            {"init.file", [](RunConfig& c, std::string_view v) { c.init.file = std::string(trim(v)); },
             [](const RunConfig& c) { return c.init.file; }},
            number("solver.gamma", &RunConfig::gamma),
            {"solver.gamma_ladder", [](RunConfig& c, std::string_view v) { c.gamma_ladder = to_doubles(v); },
             [](const RunConfig& c) { return list_text(c.gamma_ladder); }},
            number("solver.dt", &RunConfig::dt),
            number("solver.T_final", &RunConfig::T_final),
            number("solver.snapshot_every", &RunConfig::snapshot_every),
            number("solver.cfl_safety", &RunConfig::cfl_safety),
            number("solver.psor_tol", &RunConfig::psor_tol),
            {"solver.psor_omega",
             [](RunConfig& c, std::string_view v) { c.psor_omega = trim(v) == "auto" ? 0.0 : to_double(v); },
             [](const RunConfig& c) { return c.psor_omega == 0.0 ? std::string("auto") : format_double(c.psor_omega); }},
            number("solver.psor_max_iters", &RunConfig::psor_max_iters),
            number("solver.picard_iters", &RunConfig::picard_iters),
            number("solver.p_threshold", &RunConfig::p_threshold),
            text("output.dir", &RunConfig::output_dir),
            strings("output.plotdata", &RunConfig::plotdata),
            strings("verify.inputs", &RunConfig::verify_inputs),
            number("verify.reflection_radius", &RunConfig::verify_reflection_radius),
            number("verify.late_from", &RunConfig::verify_late_from),
            number("verify.flatness_samples", &RunConfig::verify_flatness_samples),
            text("geometry.snapshot", &RunConfig::geometry_snapshot),
        };
        std::sort(f.begin(), f.end(), [](const Field& a, const Field& b) { return a.key < b.key; });
        return f;
    }();
    return all;
}

const Field* find_field(std::string_view key) {
    for (const auto& f : fields()) {
        if (f.key == key) return &f;
    }
    return nullptr;
}

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
    return std::any_of(options.begin(), options.end(), [&](const char* o) { return v == o; });
}

void validate(const RunConfig& c, std::vector<std::string>& bad) {
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) bad.push_back(msg);
    };
    need(one_of(c.mode, {"pme", "hs", "sweep", "verify", "geometry"}),
         "mode: must be one of pme, hs, sweep, verify, geometry");
    need(c.dim == 1 || c.dim == 2, "grid.dim: must be 1 or 2");
    need(c.cells >= 8, "grid.cells: must be at least 8");
    need(c.half_width > 0.0, "grid.half_width: must be positive");
    need(one_of(c.law_shape, {"linear", "tabulated"}), "law.shape: must be linear or tabulated");
    if (c.law_shape == "linear") {
        need(c.g0 > 0.0, "law.g0: must be positive");
        need(c.pM > 0.0, "law.pM: must be positive");
    } else if (c.law_shape == "tabulated") {
        need(!c.law_table.empty(), "law.table: required for the tabulated shape");
    }

    const InitConfig& i = c.init;
    need(one_of(i.kind, {"ball", "annulus", "two_balls", "plateau", "file"}),
         "init.kind: must be one of ball, annulus, two_balls, plateau, file");
    need(i.amplitude >= 0.0 && i.amplitude <= 1.0, "init.amplitude: initial density must lie in [0, 1]");
    if (i.kind == "ball" || i.kind == "two_balls") need(i.radius > 0.0, "init.radius: must be positive");
    if (i.kind == "two_balls") need(i.radius2 > 0.0, "init.radius2: must be positive");
    if (i.kind == "annulus") {
        need(i.r_in > 0.0, "init.r_in: must be positive");
        need(i.r_out > i.r_in, "init.r_out: must exceed init.r_in");
    }
    if (i.kind == "plateau") {
        need(i.core > 0.0, "init.core: must be positive");
        need(i.outer > i.core, "init.outer: must exceed init.core");
    }
    if (i.kind == "file") need(!i.file.empty(), "init.file: required for the file kind");

    need(c.gamma > 1.0, "solver.gamma: gamma must exceed 1");
    need(!c.gamma_ladder.empty(), "solver.gamma_ladder: must not be empty");
    for (double g : c.gamma_ladder) {
        if (!(g > 1.0)) {
            bad.push_back("solver.gamma_ladder: gamma must exceed 1 (got " + format_double(g) + ")");
            break;
        }
    }
    need(c.dt > 0.0, "solver.dt: must be positive");
    need(c.T_final >= 0.0, "solver.T_final: must be nonnegative");
    need(c.snapshot_every >= 0.0, "solver.snapshot_every: must be nonnegative");
    need(c.cfl_safety > 0.0 && c.cfl_safety <= 0.5, "solver.cfl_safety: must lie in (0, 0.5]");
    need(c.psor_tol > 0.0, "solver.psor_tol: must be positive");
    need(c.psor_omega == 0.0 || (c.psor_omega > 0.0 && c.psor_omega < 2.0),
         "solver.psor_omega: must lie in (0, 2) or be auto");
    need(c.psor_max_iters >= 1, "solver.psor_max_iters: must be at least 1");
    need(c.picard_iters >= 1, "solver.picard_iters: must be at least 1");
    need(c.p_threshold >= 0.0, "solver.p_threshold: must be nonnegative");
    need(!c.output_dir.empty(), "output.dir: must not be empty");
    for (const auto& w : c.plotdata) {
        need(one_of(w, {"front_position", "mass", "pressure_profile", "masks"}),
             "output.plotdata: unknown export '" + w + "'");
    }
    need(c.verify_reflection_radius >= 0.0, "verify.reflection_radius: must be nonnegative");
    if (c.mode == "verify") need(!c.verify_inputs.empty(), "verify.inputs: at least one snapshot directory required");
    if (c.mode == "geometry") need(!c.geometry_snapshot.empty(), "geometry.snapshot: required in geometry mode");
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("invalid configuration: " + join(problems, "; ")), problems_(std::move(problems)) {}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

GrowthLaw RunConfig::law() const {
    if (law_shape == "tabulated") return GrowthLaw::from_csv(law_table);
    return GrowthLaw::linear(g0, pM);
}

HsRunConfig RunConfig::hs_config() const {
    HsRunConfig h;
    h.dt = dt;
    h.T_final = T_final;
    h.picard_iters = picard_iters;
    h.p_threshold = p_threshold;
    h.snapshot_every = snapshot_every;
    h.psor.tol = psor_tol;
    h.psor.max_iters = psor_max_iters;
    h.auto_omega = psor_omega == 0.0;
    if (psor_omega != 0.0) h.psor.omega = psor_omega;
    return h;
}

PmeRunConfig RunConfig::pme_config() const {
    PmeRunConfig p;
    p.T_final = T_final;
    p.cfl_safety = cfl_safety;
    p.snapshot_every = snapshot_every;
    return p;
}

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
    RunConfig cfg;
    std::vector<std::string> bad;
    std::set<std::string> seen;

    auto apply = [&](std::string_view key, std::string_view value, const std::string& where) {
        const Field* f = find_field(key);
        if (!f) {
            bad.push_back(where + "unknown key '" + std::string(key) + "'");
            return;
        }
        try {
            f->set(cfg, value);
        } catch (const std::string& why) {
            bad.push_back(std::string(key) + ": " + why);
        }
    };

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(line_no) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            bad.push_back(where + "expected 'key = value'");
            continue;
        }
        const auto key = trim(line.substr(0, eq));
        if (!seen.insert(std::string(key)).second) {
            bad.push_back(where + "duplicate key '" + std::string(key) + "'");
            continue;
        }
        apply(key, line.substr(eq + 1), where);
    }
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) {
            bad.push_back("override '" + o + "': expected KEY=VALUE");
            continue;
        }
        apply(trim(std::string_view(o).substr(0, eq)), std::string_view(o).substr(eq + 1), "override: ");
    }
    validate(cfg, bad);
    if (!bad.empty()) throw ConfigError(std::move(bad));
    return cfg;
}

std::string config_text(const RunConfig& cfg) {
    std::ostringstream os;
    for (const auto& f : fields()) os << f.key << " = " << f.get(cfg) << "\n";
    return os.str();
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& f : fields()) k.push_back(f.key);
        return k;
    }();
    return keys;
}

} // namespace hslab
