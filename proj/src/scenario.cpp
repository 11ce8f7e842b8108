#include "qrep/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qrep/cascade.hpp"
#include "qrep/cavity_design.hpp"
#include "qrep/constants.hpp"
#include "qrep/herald_fidelity.hpp"
#include "qrep/kde.hpp"
#include "qrep/key_rate.hpp"
#include "qrep/repeater.hpp"

namespace qrep {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct Table {
    std::string subcommand;  // echoed in the header
    std::string stem;        // file name without extension
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
};

std::string write_artifact(const ScenarioConfig& cfg, const OutputOptions& opts,
                           const Table& t) {
    namespace fs = std::filesystem;
    fs::create_directories(opts.out_dir);
    const bool json_out = opts.format == OutputFormat::json;
    const fs::path path =
        fs::path(opts.out_dir) / (t.stem + (json_out ? ".json" : ".csv"));

    const auto entries = resolved_entries(cfg);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());

    if (!json_out) {
        out << "# tool = qrepsim\n";
        out << "# subcommand = " << t.subcommand << "\n";
        out << "# format = csv\n";
        if (opts.have_seed) out << "# seed = " << opts.seed << "\n";
        for (const auto& [k, v] : entries) out << "# " << k << " = " << v << "\n";
        for (std::size_t i = 0; i < t.columns.size(); ++i)
            out << (i ? "," : "") << t.columns[i];
        out << "\n";
        for (const auto& r : t.rows) {
            for (std::size_t i = 0; i < r.size(); ++i)
                out << (i ? "," : "") << r[i];
            out << "\n";
        }
    } else {
        nlohmann::json j;
        j["tool"] = "qrepsim";
        j["subcommand"] = t.subcommand;
        j["format"] = "json";
        if (opts.have_seed) j["seed"] = opts.seed;
        nlohmann::json c;
        for (const auto& [k, v] : entries) c[k] = v;
        j["config"] = c;
        j["columns"] = t.columns;
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : t.rows) rows.push_back(r);
        j["rows"] = rows;
        out << j.dump(2) << "\n";
    }
    out.close();
    return path.string();
}

void require_seed(const OutputOptions& opts, const char* what) {
    if (!opts.have_seed)
        throw ConfigError(0, std::string(what) + " requires --seed");
}

ControlPulse calibrated_pulse(const ScenarioConfig& cfg) {
    ControlPulse pulse;
    pulse.fwhm = cfg.pulse_fwhm;
    pulse.center = simulation_window(cfg.pulse_fwhm).pulse_center;
    pulse.omega0 = calibrate_pulse(cfg.scheme, cfg.cavities, cfg.pulse_fwhm);
    return pulse;
}

}  // namespace

std::string run_cavity_design(const ScenarioConfig& cfg,
                              const OutputOptions& opts) {
    Table t;
    t.subcommand = "cavity-design";
    t.stem = "cavity_design";
    t.columns = {"cavity", "quantity", "value"};

    const auto emit = [&](const std::string& cavity, const CavityDesignConfig& c) {
        const CavityGeometry geom{c.length, c.roc_hr, c.roc_oc, c.wavelength};
        const ModeGeometry mode = mode_geometry(geom);
        const KappaRates kappa = kappa_rates(
            MirrorSet{c.t_oc_ppm, c.t_hr_ppm, c.parasitic_ppm}, c.length);
        const double atom_z = 0.5 * c.length + c.atom_offset;
        const double g_atom = coupling_g(geom, c.gamma_partial, atom_z);
        const double g_waist = coupling_g(geom, c.gamma_partial, mode.waist_position);

        const auto add = [&](const char* q, double v) {
            t.row({cavity, q, fmt(v)});
        };
        add("w0_um", mode.w0 / um);
        add("waist_position_um", mode.waist_position / um);
        add("rayleigh_range_um", mode.rayleigh_range / um);
        add("atom_mode_radius_um", mode.radius_at(atom_z) / um);
        add("oc_mode_radius_um", mode.radius_at(c.length) / um);
        add("kappa_oc_mhz_2pi", kappa.kappa_oc / mhz_2pi(1.0));
        add("kappa_loss_mhz_2pi", kappa.kappa_loss / mhz_2pi(1.0));
        add("g_waist_mhz_2pi", g_waist / mhz_2pi(1.0));
        add("g_atom_mhz_2pi", g_atom / mhz_2pi(1.0));
        add("cooperativity_waist",
            cooperativity(g_waist, kappa.total(), c.gamma_total));
        add("cooperativity_atom",
            cooperativity(g_atom, kappa.total(), c.gamma_total));
        if (c.fiber_mode_radius > 0.0)
            add("fiber_overlap",
                fiber_overlap(mode.radius_at(c.length), c.roc_oc,
                              c.fiber_mode_radius, c.wavelength, c.fiber_index));
    };
    emit("entangling", cfg.cavity_t);
    emit("heralding", cfg.cavity_h);
    return write_artifact(cfg, opts, t);
}

std::string run_cascade_flux(const ScenarioConfig& cfg,
                             const OutputOptions& opts) {
    const ControlPulse pulse = calibrated_pulse(cfg);
    const CascadeModel model =
        build_model(cfg.scheme, cfg.cavities, pulse, cfg.cascade);
    const SimulationWindow win = simulation_window(cfg.pulse_fwhm);
    std::vector<double> times;
    for (double tt = 0.0; tt <= win.t_end + 0.5 * 0.25 * ns; tt += 0.25 * ns)
        times.push_back(tt);
    const FluxCurves flux = flux_curves(model, times);

    Table t;
    t.subcommand = "cascade flux";
    t.stem = "cascade_flux";
    t.columns = {"time_ns", "flux_entangling_per_ns", "flux_heralding_per_ns"};
    const bool second = !flux.flux_heralding2.empty();
    if (second) t.columns.push_back("flux_heralding2_per_ns");
    for (std::size_t i = 0; i < flux.times.size(); ++i) {
        std::vector<std::string> r = {fmt(flux.times[i] / ns),
                                      fmt(flux.flux_entangling[i] * 1e-9),
                                      fmt(flux.flux_heralding[i] * 1e-9)};
        if (second) r.push_back(fmt(flux.flux_heralding2[i] * 1e-9));
        t.row(std::move(r));
    }
    return write_artifact(cfg, opts, t);
}

std::string run_cascade_pht(const ScenarioConfig& cfg,
                            const OutputOptions& opts) {
    require_seed(opts, "cascade pht");
    const ControlPulse pulse = calibrated_pulse(cfg);
    const CascadeModel model =
        build_model(cfg.scheme, cfg.cavities, pulse, cfg.cascade);
    const CascadeOutcome res = success_probability(model, cfg.n_traj, opts.seed);

    Table t;
    t.subcommand = "cascade pht";
    t.stem = "cascade_pht";
    t.columns = {"quantity", "value", "stderr"};
    t.row({"p_ht", fmt(res.p_ht), fmt(res.p_ht_stderr)});
    for (const auto& [k, v] : res.loss_budget)
        t.row({"loss_" + k, fmt(v), fmt(res.loss_budget_stderr.at(k))});
    t.row({"n_traj", std::to_string(res.n_traj), ""});
    t.row({"n_success", std::to_string(res.n_success), ""});
    return write_artifact(cfg, opts, t);
}

std::string run_cascade_sweep(const ScenarioConfig& cfg,
                              const OutputOptions& opts,
                              const std::vector<double>& fwhms_ns) {
    require_seed(opts, "cascade sweep");
    std::vector<double> fwhms;
    for (double f : fwhms_ns) fwhms.push_back(f * ns);
    const auto points =
        sweep_fwhm(cfg.scheme, cfg.cavities, fwhms, cfg.n_traj, opts.seed);

    Table t;
    t.subcommand = "cascade sweep";
    t.stem = "cascade_pht_sweep";
    t.columns = {"fwhm_ns", "p_ht", "stderr"};
    for (const auto& p : points)
        t.row({fmt(p.fwhm / ns), fmt(p.p_ht), fmt(p.stderr_)});
    return write_artifact(cfg, opts, t);
}

std::string run_cascade_multiphoton(const ScenarioConfig& cfg,
                                    const OutputOptions& opts) {
    require_seed(opts, "cascade multiphoton");
    CascadeBuildOptions options = cfg.cascade;
    options.worst_case_recycling = true;
    options.telecom_truncation = std::max(options.telecom_truncation, 2);
    const ControlPulse pulse = calibrated_pulse(cfg);
    const CascadeModel model =
        build_model(cfg.scheme, cfg.cavities, pulse, options);
    const MultiphotonResult res =
        multiphoton_fraction(model, cfg.n_traj, opts.seed);

    Table t;
    t.subcommand = "cascade multiphoton";
    t.stem = "cascade_multiphoton";
    t.columns = {"fraction", "ci_lo", "ci_hi", "n_heralded", "n_multi",
                 "n_traj"};
    t.row({fmt(res.fraction), fmt(res.ci95.lo), fmt(res.ci95.hi),
           std::to_string(res.n_heralded), std::to_string(res.n_multi),
           std::to_string(cfg.n_traj)});
    return write_artifact(cfg, opts, t);
}

std::string run_contrast(const ScenarioConfig& cfg, const OutputOptions& opts,
                         const std::vector<double>& windows_ns) {
    require_seed(opts, "contrast");
    const ControlPulse pulse = calibrated_pulse(cfg);
    const CascadeModel model =
        build_model(cfg.scheme, cfg.cavities, pulse, cfg.cascade);
    const CascadeOutcome res = success_probability(model, cfg.n_traj, opts.seed);
    const KdeEstimate kde =
        kde2d(res.samples, cfg.cavities.kappa_t_oc + cfg.cavities.kappa_t_loss,
              cfg.cavities.kappa_h_oc + cfg.cavities.kappa_h_loss);
    const ContrastEstimate c = average_contrast_error(kde);

    std::vector<double> windows;
    for (double w : windows_ns) windows.push_back(w * ns);
    const auto trade = postselect_tradeoff(kde, windows);

    Table t;
    t.subcommand = "contrast";
    t.stem = "contrast";
    t.columns = {"window_ns", "contrast", "retained", "stderr", "fidelity"};
    t.row({"inf", fmt(c.value), fmt(1.0), fmt(c.stderr_),
           fmt(fidelity_from_contrast(c.value))});
    for (const auto& p : trade)
        t.row({fmt(p.window / ns), fmt(p.contrast), fmt(p.retained), "",
               fmt(fidelity_from_contrast(p.contrast))});
    return write_artifact(cfg, opts, t);
}

std::string run_herald_fidelity(const ScenarioConfig& cfg,
                                const OutputOptions& opts, double a, double b,
                                double c) {
    TransitionAmplitudes amps{a, a, b, b, c, c};
    const PostselectedState st = postselected_state(amps);
    const double f = degenerate_mode_fidelity(a, b, c);
    const double f_check = degenerate_mode_fidelity_overlap(amps);

    Table t;
    t.subcommand = "herald-fidelity";
    t.stem = "herald_fidelity";
    t.columns = {"quantity", "value"};
    t.row({"w_h", fmt(st.w_h)});
    t.row({"w_v", fmt(st.w_v)});
    t.row({"fidelity", fmt(f)});
    t.row({"fidelity_overlap_check", fmt(f_check)});
    t.row({"infidelity_percent", fmt(100.0 * (1.0 - f))});
    return write_artifact(cfg, opts, t);
}

namespace {
std::vector<double> distance_grid(double l_min, double l_max, double step) {
    if (!(l_min > 0.0) || !(l_max >= l_min) || !(step > 0.0))
        throw ConfigError(0, "invalid distance grid (need 0 < L-min <= L-max, step > 0)");
    std::vector<double> grid;
    for (double l = l_min; l <= l_max + 0.5 * step; l += step)
        grid.push_back(l);
    return grid;
}
}  // namespace

std::string run_repeater_rate(const ScenarioConfig& cfg,
                              const OutputOptions& opts, double l_min_km,
                              double l_max_km, double step_km) {
    if (cfg.repeater_strategy == Strategy::keep && cfg.repeater_n > 1)
        require_seed(opts, "repeater rate (keep strategy)");
    const auto grid = distance_grid(l_min_km, l_max_km, step_km);
    const auto points =
        rate_vs_distance(cfg.link, cfg.repeater_n, cfg.repeater_strategy, grid,
                         cfg.repeater_runs, opts.seed);

    Table t;
    t.subcommand = "repeater rate";
    t.stem = "repeater_rate";
    t.columns = {"L_km", "rate_per_s", "ci_lo", "ci_hi"};
    for (const auto& p : points)
        t.row({fmt(p.l_km), fmt(p.rate_hz), fmt(p.rate_ci.lo),
               fmt(p.rate_ci.hi)});
    return write_artifact(cfg, opts, t);
}

std::string run_repeater_storage(const ScenarioConfig& cfg,
                                 const OutputOptions& opts, double l_min_km,
                                 double l_max_km, double step_km) {
    require_seed(opts, "repeater storage");
    const auto grid = distance_grid(l_min_km, l_max_km, step_km);
    const auto points =
        storage_vs_distance(cfg.link, cfg.repeater_n, cfg.repeater_strategy,
                            grid, cfg.repeater_runs, opts.seed);

    Table t;
    t.subcommand = "repeater storage";
    t.stem = "repeater_storage";
    t.columns = {"L_km", "storage_ms", "ci_lo", "ci_hi"};
    for (const auto& p : points)
        t.row({fmt(p.l_km), fmt(p.storage_s * 1e3), fmt(p.storage_ci.lo * 1e3),
               fmt(p.storage_ci.hi * 1e3)});
    return write_artifact(cfg, opts, t);
}

std::string run_keyrate_table(const ScenarioConfig& cfg,
                              const OutputOptions& opts) {
    Table t;
    t.subcommand = "keyrate table";
    t.stem = "keyrate_table";
    t.columns = {"f_bsm", "secret_fraction_raw", "secret_fraction"};
    for (int i = 0; i <= 80; ++i) {
        const double f = 0.80 + 0.0025 * i;
        const double r = secret_fraction(chain_state(
            cfg.keyrate_n, cfg.keyrate_contrast, bsm_weight_from_fidelity(f)));
        t.row({fmt(f), fmt(r), fmt(std::min(1.0, std::max(0.0, r)))});
    }
    return write_artifact(cfg, opts, t);
}

std::string run_keyrate_threshold(const ScenarioConfig& cfg,
                                  const OutputOptions& opts) {
    std::set<double> targets{0.0, 0.25, 0.5};
    targets.insert(cfg.keyrate_target_r);

    Table t;
    t.subcommand = "keyrate threshold";
    t.stem = "keyrate_threshold";
    t.columns = {"target_r", "threshold_fidelity"};
    for (double target : targets)
        t.row({fmt(target),
               fmt(threshold_fidelity(cfg.keyrate_contrast, cfg.keyrate_n,
                                      target))});
    return write_artifact(cfg, opts, t);
}

std::string run_keyrate_purification(const ScenarioConfig& cfg,
                                     const OutputOptions& opts) {
    const double c = cfg.keyrate_contrast;
    const int n = cfg.keyrate_n;
    const PurificationReport rep =
        purification_benefit(c, n, cfg.keyrate_gate_error, cfg.keyrate_convention);

    Table t;
    t.subcommand = "keyrate purification";
    t.stem = "keyrate_purification";
    t.columns = {"quantity", "value"};
    t.row({"fidelity_raw", fmt(rep.fidelity_raw)});
    t.row({"fidelity_purified", fmt(rep.fidelity_purified)});
    t.row({"gain", fmt(rep.gain)});
    t.row({"gain_threshold_mixing_weight",
           fmt(fidelity_gain_threshold(c, n, GateErrorConvention::mixing_weight))});
    t.row({"gain_threshold_state_error",
           fmt(fidelity_gain_threshold(c, n, GateErrorConvention::state_error))});
    t.row({"c_star_half_cost",
           fmt(keyrate_benefit_threshold(n, PurificationCost::half))});
    t.row({"c_star_quarter_cost",
           fmt(keyrate_benefit_threshold(n, PurificationCost::quarter))});
    return write_artifact(cfg, opts, t);
}

}  // namespace qrep
