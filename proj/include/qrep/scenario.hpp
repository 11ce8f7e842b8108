#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qrep/config.hpp"

namespace qrep {

enum class OutputFormat { csv, json };

struct OutputOptions {
    std::string out_dir = ".";
    OutputFormat format = OutputFormat::csv;
    std::uint64_t seed = 0;
    bool have_seed = false;
};

// Each subcommand writes one artifact file (a CSV table or a JSON object,
// both prefixed/wrapped with the fully resolved configuration) and returns
// its path.  Subcommands that sample trajectories or run Monte Carlo throw
// ConfigError unless a seed was supplied; given the same seed and
// configuration the written bytes are identical across runs.

std::string run_cavity_design(const ScenarioConfig& cfg,
                              const OutputOptions& opts);

std::string run_cascade_flux(const ScenarioConfig& cfg,
                             const OutputOptions& opts);
std::string run_cascade_pht(const ScenarioConfig& cfg,
                            const OutputOptions& opts);
std::string run_cascade_sweep(const ScenarioConfig& cfg,
                              const OutputOptions& opts,
                              const std::vector<double>& fwhms_ns);
std::string run_cascade_multiphoton(const ScenarioConfig& cfg,
                                    const OutputOptions& opts);

std::string run_contrast(const ScenarioConfig& cfg, const OutputOptions& opts,
                         const std::vector<double>& windows_ns);

std::string run_herald_fidelity(const ScenarioConfig& cfg,
                                const OutputOptions& opts, double a, double b,
                                double c);

std::string run_repeater_rate(const ScenarioConfig& cfg,
                              const OutputOptions& opts, double l_min_km,
                              double l_max_km, double step_km);
std::string run_repeater_storage(const ScenarioConfig& cfg,
                                 const OutputOptions& opts, double l_min_km,
                                 double l_max_km, double step_km);

std::string run_keyrate_table(const ScenarioConfig& cfg,
                              const OutputOptions& opts);
std::string run_keyrate_threshold(const ScenarioConfig& cfg,
                                  const OutputOptions& opts);
std::string run_keyrate_purification(const ScenarioConfig& cfg,
                                     const OutputOptions& opts);

}  // namespace qrep
