#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "hslab/config.hpp"
#include "hslab/diagnostics.hpp"

namespace hslab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitCheck = 4;

inline constexpr const char* kVersion = "1.0.0";

/// Rasterized initial density of the config (kind "file" reads the n column of a snapshot).
ScalarField initial_density(const RunConfig& cfg);

/**
 * Runs one mode and writes its artifacts under cfg.output_dir:
 *   pme, hs    snapshots/, report.json, manifest.json
 *   sweep      gamma_<g>/snapshots/ per ladder member, hs/snapshots/, report.json, manifest.json
 *   verify     report.json, manifest.json over cfg.verify_inputs
 *   geometry   geometry.json, manifest.json for cfg.geometry_snapshot
 * plus the requested plot data and timing.json (wall time, the only
 * nondeterministic file). Returns one of the kExit codes; messages go to `log`.
 */
int run_mode(const RunConfig& cfg, std::ostream& log);

/// Default checks of one run; names get "<label>." in front when label is nonempty.
void add_hs_checks(DiagnosticsReport& report, std::span<const HsState> snaps, const RunConfig& cfg,
                   const std::string& label);
void add_pme_checks(DiagnosticsReport& report, std::span<const PmeState> snaps, const RunConfig& cfg,
                    const std::string& label);

/// Report as pretty-printed JSON with keys in insertion order.
std::string report_json(const DiagnosticsReport& report);

/**
 * Tidy CSV for plotting. what: front_position (t,R), mass (t,mass,bound),
 * pressure_profile (t,x[,y],p), masks (t,x[,y] for each cell of Ω(t)).
 * Throws std::invalid_argument for anything else.
 */
std::string plotdata_csv(std::span<const HsState> snaps, const std::string& what, double p_threshold);
std::string plotdata_csv(std::span<const PmeState> snaps, const std::string& what, double p_threshold);

} // namespace hslab
