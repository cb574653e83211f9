// Command-line front end: hslab <pme|hs|sweep|verify|geometry> [--config PATH] [--out DIR] [--override KEY=VALUE]...

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hslab/app.hpp"
#include "hslab/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Porous-medium and Hele-Shaw tumor growth simulations with verification checks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", hslab::kVersion);

    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::vector<std::string> exports;

    const std::vector<std::pair<std::string, std::string>> modes{
        {"pme", "porous-medium run at solver.gamma"},
        {"hs", "Hele-Shaw run"},
        {"sweep", "gamma ladder plus a Hele-Shaw run and the stiff-limit check"},
        {"verify", "diagnostics report over existing snapshot directories (verify.inputs)"},
        {"geometry", "set metrics of one snapshot (geometry.snapshot)"}};
    for (const auto& [name, help] : modes) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "key = value configuration file");
        sub->add_option("--out", out_dir, "output directory (output.dir)");
        sub->add_option("--override", overrides, "KEY=VALUE applied after the file (repeatable)");
        sub->add_option("--export", exports, "plot data: front_position, mass, pressure_profile, masks (repeatable)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? hslab::kExitOk : hslab::kExitConfig;
    }

    std::string text;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "config error: cannot read " << config_path << "\n";
            return hslab::kExitConfig;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }

    std::vector<std::string> all{"mode=" + app.get_subcommands().front()->get_name()};
    if (!out_dir.empty()) all.push_back("output.dir=" + out_dir);
    if (!exports.empty()) {
        std::string list;
        for (const auto& e : exports) list += (list.empty() ? "" : ",") + e;
        all.push_back("output.plotdata=" + list);
    }
    all.insert(all.end(), overrides.begin(), overrides.end());

    hslab::RunConfig cfg;
    try {
        cfg = hslab::parse_config(text, all);
    } catch (const hslab::ConfigError& e) {
        for (const auto& p : e.problems()) std::cerr << "config error: " << p << "\n";
        return hslab::kExitConfig;
    }
    return hslab::run_mode(cfg, std::cerr);
}
