#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qrep/config.hpp"
#include "qrep/scenario.hpp"

namespace {

void require_power_of_two_flag(int n, const char* flag) {
    if (n < 1 || (n & (n - 1)) != 0)
        throw qrep::ConfigError(0, std::string(flag) + " must be a power of two");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace qrep;

    CLI::App app{"Design calculator and simulator for a telecom-wavelength "
                 "single-atom quantum repeater"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand name

    std::string config_path;
    std::string out_dir = ".";
    std::string format = "csv";
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "configuration file");
    app.add_option("--seed", seed,
                   "RNG seed (required for subcommands that sample)");
    app.add_option("--out-dir", out_dir, "directory for output artifacts");
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));

    auto* cavity = app.add_subcommand(
        "cavity-design", "mode geometry, decay rates, coupling, overlap");

    auto* cascade = app.add_subcommand(
        "cascade", "two-photon emission cascade (master equation and MC)");
    cascade->require_subcommand(1);
    auto* flux = cascade->add_subcommand(
        "flux", "output photon flux vs time (master equation)");
    auto* pht = cascade->add_subcommand(
        "pht", "heralded success probability and loss budget");
    auto* sweep =
        cascade->add_subcommand("sweep", "p_ht over a list of pulse lengths");
    std::vector<double> fwhms{5.0, 5.9, 7.0, 8.5, 10.0};
    sweep->add_option("--fwhms", fwhms, "pulse FWHM list [ns]")
        ->delimiter(',');
    auto* multi = cascade->add_subcommand(
        "multiphoton", "heralded multi-photon fraction (worst-case recycling)");

    auto* contrast = app.add_subcommand(
        "contrast", "two-photon interference contrast from arrival-time KDE");
    std::vector<double> windows{0.5, 1.0, 2.0, 5.0, 10.0};
    contrast->add_option("--windows", windows, "herald coincidence windows [ns]")
        ->delimiter(',');

    auto* herald = app.add_subcommand(
        "herald-fidelity", "analytic fidelity with a degenerate herald mode");
    double ha = -1.0, hb = std::sqrt(3.0), hc = -std::sqrt(6.0);
    herald->add_option("--a", ha, "pi amplitude toward m0")->required();
    herald->add_option("--b", hb, "herald transition amplitude")->required();
    herald->add_option("--c", hc, "pi amplitude toward m-2")->required();

    auto* repeater =
        app.add_subcommand("repeater", "entanglement distribution over a chain");
    repeater->require_subcommand(1);
    int rep_n = 0;
    std::string strategy;
    double l_min = 10.0, l_max = 200.0, l_step = 10.0;
    const auto add_rep_opts = [&](CLI::App* sub) {
        sub->add_option("--N", rep_n, "number of elementary links");
        sub->add_option("--strategy", strategy, "keep | restart")
            ->check(CLI::IsMember({"keep", "restart"}));
        sub->add_option("--L-min", l_min, "total distance, start [km]");
        sub->add_option("--L-max", l_max, "total distance, end [km]");
        sub->add_option("--step", l_step, "distance step [km]");
    };
    auto* rate = repeater->add_subcommand("rate", "distribution rate vs distance");
    add_rep_opts(rate);
    auto* storage =
        repeater->add_subcommand("storage", "memory storage time vs distance");
    add_rep_opts(storage);

    auto* keyrate = app.add_subcommand(
        "keyrate", "secret fraction of the distributed states");
    keyrate->require_subcommand(1);
    double kr_c = -1.0;
    int kr_n = 0;
    const auto add_kr_opts = [&](CLI::App* sub) {
        sub->add_option("--C", kr_c, "link contrast");
        sub->add_option("--N", kr_n, "number of links");
    };
    auto* kr_table =
        keyrate->add_subcommand("table", "secret fraction vs swap fidelity");
    add_kr_opts(kr_table);
    auto* kr_threshold = keyrate->add_subcommand(
        "threshold", "swap fidelity needed for target secret fractions");
    add_kr_opts(kr_threshold);
    auto* kr_purification = keyrate->add_subcommand(
        "purification", "purification thresholds and pay-off contrast");
    add_kr_opts(kr_purification);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ScenarioConfig cfg;
        if (!config_path.empty()) cfg = parse_config_file(config_path);

        if (rep_n != 0) {
            require_power_of_two_flag(rep_n, "--N");
            cfg.repeater_n = rep_n;
        }
        if (!strategy.empty())
            cfg.repeater_strategy =
                strategy == "keep" ? Strategy::keep : Strategy::restart;
        if (kr_c >= 0.0) {
            if (kr_c > 1.0) throw ConfigError(0, "--C must be in [0, 1]");
            cfg.keyrate_contrast = kr_c;
        }
        if (kr_n != 0) {
            require_power_of_two_flag(kr_n, "--N");
            cfg.keyrate_n = kr_n;
        }
        for (double w : windows)
            if (w < 0.0) throw ConfigError(0, "--windows entries must be >= 0");
        for (double f : fwhms)
            if (f < 0.5 || f > 50.0)
                throw ConfigError(0, "--fwhms entries must be in [0.5, 50] ns");

        OutputOptions opts;
        opts.out_dir = out_dir;
        opts.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
        opts.seed = seed;
        opts.have_seed = app.count("--seed") > 0;

        std::string path;
        if (*cavity) path = run_cavity_design(cfg, opts);
        else if (*flux) path = run_cascade_flux(cfg, opts);
        else if (*pht) path = run_cascade_pht(cfg, opts);
        else if (*sweep) path = run_cascade_sweep(cfg, opts, fwhms);
        else if (*multi) path = run_cascade_multiphoton(cfg, opts);
        else if (*contrast) path = run_contrast(cfg, opts, windows);
        else if (*herald) path = run_herald_fidelity(cfg, opts, ha, hb, hc);
        else if (*rate) path = run_repeater_rate(cfg, opts, l_min, l_max, l_step);
        else if (*storage)
            path = run_repeater_storage(cfg, opts, l_min, l_max, l_step);
        else if (*kr_table) path = run_keyrate_table(cfg, opts);
        else if (*kr_threshold) path = run_keyrate_threshold(cfg, opts);
        else if (*kr_purification) path = run_keyrate_purification(cfg, opts);
        else {
            std::cerr << "no subcommand selected\n";
            return 2;
        }
        std::cout << path << "\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
