#include "hslab/snapshot_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "hslab/config.hpp"
#include "hslab/geometry.hpp"

namespace hslab {

namespace {

namespace fs = std::filesystem;

std::string law_text(const GrowthLaw& law) {
    switch (law.shape()) {
    case GrowthLaw::Shape::Linear:
        return "linear " + format_double(law.g0()) + " " + format_double(law.pM());
    case GrowthLaw::Shape::Zero:
        return "zero " + format_double(law.pM());
    case GrowthLaw::Shape::Tabulated: {
        std::string out = "tabulated";
        for (std::size_t i = 0; i < law.knots_p().size(); ++i) {
            out += " " + format_double(law.knots_p()[i]) + ":" + format_double(law.knots_g()[i]);
        }
        return out;
    }
    }
    return {};
}

double number(std::string_view s, const std::string& what) {
    double v = 0.0;
    if (s == "nan") return std::nan("");
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw SnapshotFormatError("bad number '" + std::string(s) + "' in " + what);
    }
    return v;
}

std::size_t count(std::string_view s, const std::string& what) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw SnapshotFormatError("bad integer '" + std::string(s) + "' in " + what);
    }
    return v;
}

std::vector<std::string> words(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    for (std::string w; is >> w;) out.push_back(w);
    return out;
}

GrowthLaw parse_law(const std::vector<std::string>& w) {
    if (w.size() == 3 && w[0] == "linear") return GrowthLaw::linear(number(w[1], "law"), number(w[2], "law"));
    if (w.size() == 2 && w[0] == "zero") return GrowthLaw::zero(number(w[1], "law"));
    if (w.size() >= 3 && w[0] == "tabulated") {
        std::vector<double> p, g;
        for (std::size_t i = 1; i < w.size(); ++i) {
            const auto colon = w[i].find(':');
            if (colon == std::string::npos) throw SnapshotFormatError("bad law knot '" + w[i] + "'");
            p.push_back(number(std::string_view(w[i]).substr(0, colon), "law"));
            g.push_back(number(std::string_view(w[i]).substr(colon + 1), "law"));
        }
        return GrowthLaw::tabulated(std::move(p), std::move(g));
    }
    throw SnapshotFormatError("unrecognized law header");
}

void header(std::ostringstream& os, const char* key, const std::string& value) { os << "# " << key << " " << value << "\n"; }

void common_header(std::ostringstream& os, double t, const std::string& gamma, const Grid& g, const GrowthLaw& law,
                   std::size_t steps) {
    os << "# hslab snapshot\n";
    header(os, "version", std::to_string(kSnapshotFormatVersion));
    header(os, "time", format_double(t));
    header(os, "gamma", gamma);
    header(os, "grid", std::to_string(g.dim()) + " " + std::to_string(g.cells_per_axis()) + " " +
                           format_double(g.half_width()));
    header(os, "law", law_text(law));
    header(os, "steps", std::to_string(steps));
}

void coordinates(std::ostringstream& os, const Grid& g, std::size_t k) {
    const auto x = g.position(k);
    os << format_double(x[0]);
    if (g.dim() == 2) os << ',' << format_double(x[1]);
}

std::string coordinate_columns(const Grid& g) { return g.dim() == 2 ? "x,y" : "x"; }

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

} // namespace

std::string snapshot_text(const HsState& s) {
    const Grid& g = s.p.grid();
    std::ostringstream os;
    common_header(os, s.t, "inf", g, s.law, s.steps);
    header(os, "dt_prev", format_double(s.dt_prev));
    header(os, "max_psor_residual", format_double(s.max_psor_residual));
    header(os, "max_clamp", format_double(s.max_clamp));
    header(os, "psor_sweeps", std::to_string(s.psor_sweeps));
    header(os, "edge_warning", s.edge_warning ? "1" : "0");
    os << coordinate_columns(g) << ",n0,n,p,w,F,quad_accum,omega_age\n";
    for (std::size_t k = 0; k < g.size(); ++k) {
        coordinates(os, g, k);
        for (const ScalarField* f : {&s.n0, &s.n, &s.p, &s.w, &s.F, &s.quad_accum}) os << ',' << format_double((*f)[k]);
        os << ',' << (s.omega_age.empty() ? 0u : s.omega_age[k]) << '\n';
    }
    return os.str();
}

std::string snapshot_text(const PmeState& s) {
    const Grid& g = s.n.grid();
    std::ostringstream os;
    common_header(os, s.t, format_double(s.gamma), g, s.law, s.steps);
    header(os, "max_clip", format_double(s.max_clip));
    header(os, "last_clip", format_double(s.last_clip));
    header(os, "quartic_dissipation", format_double(s.quartic_dissipation));
    header(os, "edge_warning", s.edge_warning ? "1" : "0");
    os << coordinate_columns(g) << ",n,p\n";
    const ScalarField p = pressure_of(s.n, s.gamma);
    for (std::size_t k = 0; k < g.size(); ++k) {
        coordinates(os, g, k);
        os << ',' << format_double(s.n[k]) << ',' << format_double(p[k]) << '\n';
    }
    return os.str();
}

void write_snapshot(const fs::path& path, const HsState& s) { write_text(path, snapshot_text(s)); }
void write_snapshot(const fs::path& path, const PmeState& s) { write_text(path, snapshot_text(s)); }

LoadedSnapshot parse_snapshot(const std::string& text) {
    std::istringstream is(text);
    std::map<std::string, std::vector<std::string>> head;
    std::string line;
    std::string columns;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] != '#') {
            columns = line;
            break;
        }
        auto w = words(line.substr(1));
        if (w.empty()) continue;
        const std::string key = w.front();
        w.erase(w.begin());
        head[key] = std::move(w);
    }
    auto field = [&](const char* key) -> const std::vector<std::string>& {
        const auto it = head.find(key);
        if (it == head.end() || it->second.empty()) {
            throw SnapshotFormatError(std::string("missing header '") + key + "'");
        }
        return it->second;
    };
    if (!head.count("hslab")) throw SnapshotFormatError("not a snapshot file");
    if (count(field("version")[0], "version") != static_cast<std::size_t>(kSnapshotFormatVersion)) {
        throw SnapshotFormatError("unsupported snapshot version");
    }
    const auto& gw = field("grid");
    if (gw.size() != 3) throw SnapshotFormatError("bad grid header");
    const Grid g(static_cast<int>(count(gw[0], "grid")), count(gw[1], "grid"), number(gw[2], "grid"));
    const GrowthLaw law = parse_law(field("law"));
    const double t = number(field("time")[0], "time");
    const bool hele_shaw = field("gamma")[0] == "inf";
    const std::size_t steps = count(field("steps")[0], "steps");
    const bool edge = field("edge_warning")[0] == "1";

    const std::string coords = g.dim() == 2 ? "x,y" : "x";
    const std::string expected = coords + (hele_shaw ? ",n0,n,p,w,F,quad_accum,omega_age" : ",n,p");
    if (columns != expected) throw SnapshotFormatError("unexpected columns '" + columns + "'");
    const std::size_t ncoord = static_cast<std::size_t>(g.dim());
    const std::size_t ncol = hele_shaw ? ncoord + 7 : ncoord + 2;

    std::vector<std::vector<double>> cols(ncol);
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::size_t start = 0;
        for (std::size_t c = 0; c < ncol; ++c) {
            const auto comma = line.find(',', start);
            const bool last = c + 1 == ncol;
            if (last != (comma == std::string::npos)) {
                throw SnapshotFormatError("row " + std::to_string(rows + 1) + " has the wrong number of fields");
            }
            cols[c].push_back(number(std::string_view(line).substr(start, last ? line.npos : comma - start), "row"));
            start = comma + 1;
        }
        ++rows;
    }
    if (rows != g.size()) throw SnapshotFormatError("expected " + std::to_string(g.size()) + " rows");
    auto column = [&](std::size_t c) { return ScalarField(g, cols[ncoord + c]); };

    LoadedSnapshot out;
    if (hele_shaw) {
        HsState s{.t = t,
                  .n0 = column(0),
                  .n = column(1),
                  .p = column(2),
                  .w = column(3),
                  .F = column(4),
                  .omega_mask = RegionMask(g),
                  .quad_accum = column(5),
                  .law = law,
                  .w_prev = std::nullopt,
                  .omega_age = {}};
        for (std::size_t k = 0; k < g.size(); ++k) s.omega_age.push_back(static_cast<std::uint32_t>(cols[ncoord + 6][k]));
        s.steps = steps;
        s.dt_prev = number(field("dt_prev")[0], "dt_prev");
        s.max_psor_residual = number(field("max_psor_residual")[0], "max_psor_residual");
        s.max_clamp = number(field("max_clamp")[0], "max_clamp");
        s.psor_sweeps = count(field("psor_sweeps")[0], "psor_sweeps");
        s.edge_warning = edge;
        // omega_mask is derived from the pressure with the default threshold, as in the stepper.
        s.omega_mask = positivity_set(s.p, HsRunConfig{}.p_threshold);
        out.hs = std::move(s);
    } else {
        PmeState s{number(field("gamma")[0], "gamma"), t, column(0), law};
        s.steps = steps;
        s.max_clip = number(field("max_clip")[0], "max_clip");
        s.last_clip = number(field("last_clip")[0], "last_clip");
        s.quartic_dissipation = number(field("quartic_dissipation")[0], "quartic_dissipation");
        s.edge_warning = edge;
        out.pme = std::move(s);
    }
    return out;
}

LoadedSnapshot read_snapshot(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SnapshotFormatError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_snapshot(buf.str());
    } catch (const SnapshotFormatError& e) {
        throw SnapshotFormatError(path.string() + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw SnapshotFormatError(path.string() + ": " + e.what());
    }
}

std::vector<fs::path> snapshot_files(const fs::path& dir) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string snapshot_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snap_%05zu.csv", index);
    return buf;
}

} // namespace hslab
