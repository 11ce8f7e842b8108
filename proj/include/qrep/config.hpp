#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qrep/cascade.hpp"
#include "qrep/cavity_design.hpp"
#include "qrep/key_rate.hpp"
#include "qrep/repeater.hpp"

namespace qrep {

// Inputs of the cavity design calculator for one cavity.
struct CavityDesignConfig {
    double length = 0.0;          // [m]
    double roc_hr = 0.0;          // mirror 1 (high reflector) [m]
    double roc_oc = 0.0;          // mirror 2 (outcoupler) [m]
    double wavelength = 0.0;      // [m]
    double t_oc_ppm = 0.0;        // outcoupler transmission
    double t_hr_ppm = 0.0;        // high-reflector transmission
    double parasitic_ppm = 0.0;   // absorption+scatter per mirror
    double gamma_partial = 0.0;   // dipole decay rate of the coupled line [1/s]
    double gamma_total = 0.0;     // full population decay of the upper level
    double atom_offset = 0.0;     // atom position along axis, from center [m]
    double fiber_mode_radius = 0.0;  // mode-field radius of the fiber (0: none)
    double fiber_index = 1.468;
};

CavityDesignConfig entangling_cavity_defaults();
CavityDesignConfig heralding_cavity_defaults();

// Full resolved configuration of the tool; every field has the baseline
// design value as its default, so an empty config file is valid.
struct ScenarioConfig {
    CavityDesignConfig cavity_t = entangling_cavity_defaults();
    CavityDesignConfig cavity_h = heralding_cavity_defaults();

    LevelScheme scheme;
    CrossedCavityParams cavities;
    CascadeBuildOptions cascade;
    double pulse_fwhm = 5.9e-9;  // [s]
    std::size_t n_traj = 20000;

    LinkParams link;
    int repeater_n = 2;
    Strategy repeater_strategy = Strategy::restart;
    std::size_t repeater_runs = 200000;

    double keyrate_contrast = 0.97;
    double keyrate_bsm_fidelity = 0.95;
    int keyrate_n = 2;
    double keyrate_target_r = 0.0;
    double keyrate_gate_error = 0.04;
    GateErrorConvention keyrate_convention = GateErrorConvention::state_error;
    PurificationCost keyrate_cost = PurificationCost::quarter;
};

// Parse failure; `line` is 1-based (0 when not tied to a line).
class ConfigError : public std::runtime_error {
  public:
    ConfigError(int line_no, const std::string& msg);
    int line;
};

// Parse `section.key = value [unit]` lines ('#' starts a comment; blank
// lines are ignored).  Unknown keys, wrong or missing units, malformed
// numbers, and out-of-range values raise ConfigError with the line number.
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig parse_config_file(const std::string& path);

// The full configuration as "section.key" / "value [unit]" pairs, in the
// file syntax and units; used for the self-describing output headers.
std::vector<std::pair<std::string, std::string>> resolved_entries(
    const ScenarioConfig& cfg);

}  // namespace qrep
