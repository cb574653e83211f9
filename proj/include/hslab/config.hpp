#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hslab/grid.hpp"
#include "hslab/growth.hpp"
#include "hslab/heleshaw.hpp"
#include "hslab/pme.hpp"

namespace hslab {

/// Rejected configuration; `problems` names every violated key individually.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

struct InitConfig {
    std::string kind = "ball"; ///< ball | annulus | two_balls | plateau | file
    std::array<double, 2> center{0.0, 0.0};
    double radius = 0.5;
    double amplitude = 1.0;
    double r_in = 0.2;              ///< annulus
    double r_out = 0.5;             ///< annulus
    std::array<double, 2> center2{0.5, 0.0}; ///< two_balls, second ball
    double radius2 = 0.25;          ///< two_balls, second ball
    double core = 0.5;              ///< plateau: saturated core radius
    double outer = 1.5;             ///< plateau: outer radius of the plateau
    std::string file;               ///< file: snapshot whose n column becomes n0
};

struct RunConfig {
    std::string mode = "hs"; ///< pme | hs | sweep | verify | geometry

    int dim = 1;
    std::size_t cells = 512;
    double half_width = 2.0;

    std::string law_shape = "linear"; ///< linear | tabulated
    double g0 = 1.0;
    double pM = 1.0;
    std::string law_table; ///< CSV knots for the tabulated shape

    InitConfig init;

    double gamma = 40.0;
    std::vector<double> gamma_ladder{5.0, 10.0, 20.0, 40.0, 80.0};
    double dt = 1e-3;
    double T_final = 0.5;
    double snapshot_every = 0.05;
    double cfl_safety = 0.45;
    double psor_tol = 1e-10;
    double psor_omega = 0.0; ///< 0 selects the optimal factor for the grid
    std::size_t psor_max_iters = 200000;
    std::size_t picard_iters = 3;
    double p_threshold = 1e-7;

    std::string output_dir = "out";
    std::vector<std::string> plotdata; ///< front_position | mass | pressure_profile | masks

    std::vector<std::string> verify_inputs;
    double verify_reflection_radius = 0.0; ///< > 0 enables the reflection check
    double verify_late_from = 0.0;
    std::size_t verify_flatness_samples = 0; ///< > 0 enables the flatness report

    std::string geometry_snapshot;

    Grid grid() const { return Grid(dim, cells, half_width); }
    GrowthLaw law() const;
    HsRunConfig hs_config() const;
    PmeRunConfig pme_config() const;
};

/**
 * Parses a flat `key = value` document with dotted keys (grid.cells,
 * solver.gamma_ladder = 5, 10, ...). Blank lines and '#' comments are ignored.
 * Overrides are KEY=VALUE strings applied after the document. Unknown keys,
 * duplicates within the document, malformed values and out-of-range values
 * are all collected and thrown together as a ConfigError.
 */
RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});

/// Canonical document for a config: every key, sorted, shortest round-trip numbers.
std::string config_text(const RunConfig& cfg);

/// Every accepted key.
const std::vector<std::string>& config_keys();

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

} // namespace hslab
