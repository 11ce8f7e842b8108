#include "qrep/config.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qrep/constants.hpp"

namespace qrep {

namespace {

using Get = double& (*)(ScenarioConfig&);

struct NumKey {
    const char* name;
    const char* unit;  // "" = dimensionless (no unit token allowed)
    double scale;      // file value * scale = stored value
    double lo, hi;     // allowed range of the file value
    Get get;
};

// clang-format off
const std::array<NumKey, 47> kNumKeys = {{
    {"cavity_t.length",            "um",     1e-6, 1e-3, 1e5,  [](ScenarioConfig& c) -> double& { return c.cavity_t.length; }},
    {"cavity_t.roc_hr",            "um",     1e-6, 1e-3, 1e9,  [](ScenarioConfig& c) -> double& { return c.cavity_t.roc_hr; }},
    {"cavity_t.roc_oc",            "um",     1e-6, 1e-3, 1e9,  [](ScenarioConfig& c) -> double& { return c.cavity_t.roc_oc; }},
    {"cavity_t.wavelength",        "nm",     1e-9, 1.0,  1e5,  [](ScenarioConfig& c) -> double& { return c.cavity_t.wavelength; }},
    {"cavity_t.t_oc",              "ppm",    1.0,  0.0,  1e6,  [](ScenarioConfig& c) -> double& { return c.cavity_t.t_oc_ppm; }},
    {"cavity_t.t_hr",              "ppm",    1.0,  0.0,  1e6,  [](ScenarioConfig& c) -> double& { return c.cavity_t.t_hr_ppm; }},
    {"cavity_t.parasitic",         "ppm",    1.0,  0.0,  1e6,  [](ScenarioConfig& c) -> double& { return c.cavity_t.parasitic_ppm; }},
    {"cavity_t.gamma_partial",     "MHz2pi", mhz_2pi(1.0), 1e-9, 1e6, [](ScenarioConfig& c) -> double& { return c.cavity_t.gamma_partial; }},
    {"cavity_t.gamma_total",       "MHz2pi", mhz_2pi(1.0), 1e-9, 1e6, [](ScenarioConfig& c) -> double& { return c.cavity_t.gamma_total; }},
    {"cavity_t.atom_offset",       "um",     1e-6, -1e5, 1e5,  [](ScenarioConfig& c) -> double& { return c.cavity_t.atom_offset; }},
    {"cavity_t.fiber_mode_radius", "um",     1e-6, 0.0,  1e4,  [](ScenarioConfig& c) -> double& { return c.cavity_t.fiber_mode_radius; }},
    {"cavity_t.fiber_index",       "",       1.0,  1.0,  3.0,  [](ScenarioConfig& c) -> double& { return c.cavity_t.fiber_index; }},
    {"cavity_h.length",            "um",     1e-6, 1e-3, 1e5,  [](ScenarioConfig& c) -> double& { return c.cavity_h.length; }},
    {"cavity_h.roc_hr",            "um",     1e-6, 1e-3, 1e9,  [](ScenarioConfig& c) -> double& { return c.cavity_h.roc_hr; }},
    {"cavity_h.roc_oc",            "um",     1e-6, 1e-3, 1e9,  [](ScenarioConfig& c) -> double& { return c.cavity_h.roc_oc; }},
    {"cavity_h.wavelength",        "nm",     1e-9, 1.0,  1e5,  [](ScenarioConfig& c) -> double& { return c.cavity_h.wavelength; }},
    {"cavity_h.t_oc",              "ppm",    1.0,  0.0,  1e6,  [](ScenarioConfig& c) -> double& { return c.cavity_h.t_oc_ppm; }},
    {"cavity_h.t_hr",              "ppm",    1.0,  0.0,  1e6,  [](ScenarioConfig& c) -> double& { return c.cavity_h.t_hr_ppm; }},
    {"cavity_h.parasitic",         "ppm",    1.0,  0.0,  1e6,  [](ScenarioConfig& c) -> double& { return c.cavity_h.parasitic_ppm; }},
    {"cavity_h.gamma_partial",     "MHz2pi", mhz_2pi(1.0), 1e-9, 1e6, [](ScenarioConfig& c) -> double& { return c.cavity_h.gamma_partial; }},
    {"cavity_h.gamma_total",       "MHz2pi", mhz_2pi(1.0), 1e-9, 1e6, [](ScenarioConfig& c) -> double& { return c.cavity_h.gamma_total; }},
    {"cavity_h.atom_offset",       "um",     1e-6, -1e5, 1e5,  [](ScenarioConfig& c) -> double& { return c.cavity_h.atom_offset; }},
    {"cavity_h.fiber_mode_radius", "um",     1e-6, 0.0,  1e4,  [](ScenarioConfig& c) -> double& { return c.cavity_h.fiber_mode_radius; }},
    {"cavity_h.fiber_index",       "",       1.0,  1.0,  3.0,  [](ScenarioConfig& c) -> double& { return c.cavity_h.fiber_index; }},
    {"cascade.g_t",                "MHz2pi", mhz_2pi(1.0), 0.0, 1e5, [](ScenarioConfig& c) -> double& { return c.cavities.g_t; }},
    {"cascade.kappa_t_oc",         "MHz2pi", mhz_2pi(1.0), 0.0, 1e6, [](ScenarioConfig& c) -> double& { return c.cavities.kappa_t_oc; }},
    {"cascade.kappa_t_loss",       "MHz2pi", mhz_2pi(1.0), 0.0, 1e6, [](ScenarioConfig& c) -> double& { return c.cavities.kappa_t_loss; }},
    {"cascade.g_h",                "MHz2pi", mhz_2pi(1.0), 0.0, 1e5, [](ScenarioConfig& c) -> double& { return c.cavities.g_h; }},
    {"cascade.kappa_h_oc",         "MHz2pi", mhz_2pi(1.0), 0.0, 1e6, [](ScenarioConfig& c) -> double& { return c.cavities.kappa_h_oc; }},
    {"cascade.kappa_h_loss",       "MHz2pi", mhz_2pi(1.0), 0.0, 1e6, [](ScenarioConfig& c) -> double& { return c.cavities.kappa_h_loss; }},
    {"cascade.second_mode_detuning", "MHz2pi", mhz_2pi(1.0), -1e6, 1e6, [](ScenarioConfig& c) -> double& { return c.cavities.second_mode_detuning; }},
    {"cascade.fiber_overlap",      "",       1.0,  0.0,  1.0,  [](ScenarioConfig& c) -> double& { return c.cavities.fiber_overlap; }},
    {"cascade.fwhm",               "ns",     1e-9, 0.5,  50.0, [](ScenarioConfig& c) -> double& { return c.pulse_fwhm; }},
    {"cascade.gamma_e_to_i",       "MHz2pi", mhz_2pi(1.0), 1e-9, 1e6, [](ScenarioConfig& c) -> double& { return c.scheme.gamma_e_to_i; }},
    {"cascade.gamma_e_out",        "MHz2pi", mhz_2pi(1.0), 0.0, 1e6, [](ScenarioConfig& c) -> double& { return c.scheme.gamma_e_out; }},
    {"cascade.gamma_i",            "MHz2pi", mhz_2pi(1.0), 1e-9, 1e6, [](ScenarioConfig& c) -> double& { return c.scheme.gamma_i_total; }},
    {"cascade.sigma_fraction",     "",       1.0,  0.0,  0.5,  [](ScenarioConfig& c) -> double& { return c.scheme.sigma_fraction; }},
    {"cascade.branching_f1",       "",       1.0,  0.0,  0.99, [](ScenarioConfig& c) -> double& { return c.scheme.branching_f1; }},
    {"cascade.recycling_boost",    "",       1.0,  1e-3, 1e6,  [](ScenarioConfig& c) -> double& { return c.cascade.recycling_boost; }},
    {"cascade.light_shift",        "MHz2pi", mhz_2pi(1.0), -1e5, 1e5, [](ScenarioConfig& c) -> double& { return c.cascade.light_shift; }},
    {"cascade.dark_detuning",      "MHz2pi", mhz_2pi(1.0), -1e6, 1e6, [](ScenarioConfig& c) -> double& { return c.cascade.dark_detuning; }},
    {"cascade.dark_drive_ratio",   "",       1.0,  0.0,  100.0, [](ScenarioConfig& c) -> double& { return c.cascade.dark_drive_ratio; }},
    {"repeater.attenuation",       "km",     1.0,  1e-3, 1e6,  [](ScenarioConfig& c) -> double& { return c.link.attenuation_km; }},
    {"repeater.fiber_speed",       "km_per_s", 1.0, 1.0, 1e7,  [](ScenarioConfig& c) -> double& { return c.link.fiber_speed_km_s; }},
    {"repeater.processing_time",   "us",     1e-6, 0.0,  1e9,  [](ScenarioConfig& c) -> double& { return c.link.processing_time_s; }},
    {"keyrate.target_r",           "",       1.0,  0.0,  1.0,  [](ScenarioConfig& c) -> double& { return c.keyrate_target_r; }},
    {"keyrate.gate_error",         "",       1.0,  0.0,  0.74, [](ScenarioConfig& c) -> double& { return c.keyrate_gate_error; }},
}};

const std::array<NumKey, 7> kProbKeys = {{
    {"repeater.p_ht",       "", 1.0, 0.0, 1.0, [](ScenarioConfig& c) -> double& { return c.link.p_ht; }},
    {"repeater.eta_h",      "", 1.0, 0.0, 1.0, [](ScenarioConfig& c) -> double& { return c.link.eta_h; }},
    {"repeater.eta_t",      "", 1.0, 0.0, 1.0, [](ScenarioConfig& c) -> double& { return c.link.eta_t; }},
    {"repeater.retrieval",  "", 1.0, 0.0, 1.0, [](ScenarioConfig& c) -> double& { return c.link.retrieval; }},
    {"repeater.projection", "", 1.0, 0.0, 1.0, [](ScenarioConfig& c) -> double& { return c.link.projection; }},
    {"keyrate.contrast",    "", 1.0, 0.0, 1.0, [](ScenarioConfig& c) -> double& { return c.keyrate_contrast; }},
    {"keyrate.bsm_fidelity","", 1.0, 0.25, 1.0, [](ScenarioConfig& c) -> double& { return c.keyrate_bsm_fidelity; }},
}};
// clang-format on

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError(line, msg);
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_number(const std::string& s, const std::string& key, int line) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        fail(line, "key '" + key + "': malformed number '" + s + "'");
    }
    if (pos != s.size())
        fail(line, "key '" + key + "': malformed number '" + s + "'");
    if (!std::isfinite(v)) fail(line, "key '" + key + "': non-finite value");
    return v;
}

void check_unit(const std::string& got, const char* want,
                const std::string& key, int line) {
    if (*want == '\0') {
        if (!got.empty())
            fail(line, "key '" + key + "' is dimensionless, got unit '" + got + "'");
    } else if (got.empty()) {
        fail(line, "key '" + key + "' requires unit '" + std::string(want) + "'");
    } else if (got != want) {
        fail(line, "key '" + key + "' requires unit '" + std::string(want) +
                       "', got '" + got + "'");
    }
}

double apply_numeric(const NumKey& k, const std::string& value,
                     const std::string& unit, int line) {
    check_unit(unit, k.unit, k.name, line);
    const double v = parse_number(value, k.name, line);
    if (v < k.lo || v > k.hi) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "key '%s': value %g out of range [%g, %g]", k.name, v,
                      k.lo, k.hi);
        fail(line, buf);
    }
    return v * k.scale;
}

bool parse_bool(const std::string& value, const std::string& key, int line) {
    if (value == "true") return true;
    if (value == "false") return false;
    fail(line, "key '" + key + "': expected true or false, got '" + value + "'");
}

double parse_theta(const std::string& value, const std::string& key, int line) {
    if (value == "0") return 0.0;
    if (value == "pi") return pi;
    fail(line, "key '" + key + "': expected 0 or pi, got '" + value + "'");
}

long long parse_count(const std::string& value, const std::string& key,
                      int line, long long lo, long long hi,
                      bool pow2 = false) {
    const double v = parse_number(value, key, line);
    if (v != std::floor(v))
        fail(line, "key '" + key + "': expected an integer");
    const auto n = static_cast<long long>(v);
    if (n < lo || n > hi) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "key '%s': value %lld out of range [%lld, %lld]",
                      key.c_str(), n, lo, hi);
        fail(line, buf);
    }
    if (pow2 && (n & (n - 1)) != 0)
        fail(line, "key '" + key + "': must be a power of two");
    return n;
}

void apply_key(ScenarioConfig& cfg, const std::string& key,
               const std::string& value, const std::string& unit, int line) {
    for (const auto& k : kNumKeys)
        if (key == k.name) {
            k.get(cfg) = apply_numeric(k, value, unit, line);
            return;
        }
    for (const auto& k : kProbKeys)
        if (key == k.name) {
            k.get(cfg) = apply_numeric(k, value, unit, line);
            return;
        }

    const auto no_unit = [&] {
        if (!unit.empty())
            fail(line, "key '" + key + "' takes no unit, got '" + unit + "'");
    };

    if (key == "cascade.amp_a" || key == "cascade.amp_b" ||
        key == "cascade.amp_c") {
        no_unit();
        const double v = parse_number(value, key, line);
        if (std::abs(v) > 100.0) fail(line, "key '" + key + "': out of range");
        if (key == "cascade.amp_a") cfg.scheme.a = cfg.scheme.a_p = v;
        if (key == "cascade.amp_b") cfg.scheme.b = cfg.scheme.b_p = v;
        if (key == "cascade.amp_c") cfg.scheme.c = cfg.scheme.c_p = v;
        return;
    }
    if (key == "cascade.theta") {
        no_unit();
        cfg.scheme.theta = parse_theta(value, key, line);
        return;
    }
    if (key == "cascade.theta_tilde") {
        no_unit();
        cfg.scheme.theta_tilde = parse_theta(value, key, line);
        return;
    }
    if (key == "cascade.worst_case_recycling") {
        no_unit();
        cfg.cascade.worst_case_recycling = parse_bool(value, key, line);
        return;
    }
    if (key == "cascade.second_heralding_mode") {
        no_unit();
        cfg.cascade.second_heralding_mode = parse_bool(value, key, line);
        return;
    }
    if (key == "cascade.dark_state") {
        no_unit();
        cfg.cascade.dark_state = parse_bool(value, key, line);
        return;
    }
    if (key == "cascade.telecom_truncation") {
        no_unit();
        cfg.cascade.telecom_truncation =
            static_cast<int>(parse_count(value, key, line, 1, 4));
        return;
    }
    if (key == "cascade.n_traj") {
        no_unit();
        cfg.n_traj =
            static_cast<std::size_t>(parse_count(value, key, line, 100, 1000000000));
        return;
    }
    if (key == "repeater.n") {
        no_unit();
        cfg.repeater_n =
            static_cast<int>(parse_count(value, key, line, 1, 1024, true));
        return;
    }
    if (key == "repeater.runs") {
        no_unit();
        cfg.repeater_runs =
            static_cast<std::size_t>(parse_count(value, key, line, 2, 1000000000));
        return;
    }
    if (key == "repeater.strategy") {
        no_unit();
        if (value == "keep") cfg.repeater_strategy = Strategy::keep;
        else if (value == "restart") cfg.repeater_strategy = Strategy::restart;
        else fail(line, "key '" + key + "': expected keep or restart");
        return;
    }
    if (key == "keyrate.n") {
        no_unit();
        cfg.keyrate_n =
            static_cast<int>(parse_count(value, key, line, 1, 1024, true));
        return;
    }
    if (key == "keyrate.convention") {
        no_unit();
        if (value == "mixing_weight")
            cfg.keyrate_convention = GateErrorConvention::mixing_weight;
        else if (value == "state_error")
            cfg.keyrate_convention = GateErrorConvention::state_error;
        else fail(line, "key '" + key + "': expected mixing_weight or state_error");
        return;
    }
    if (key == "keyrate.cost") {
        no_unit();
        if (value == "half") cfg.keyrate_cost = PurificationCost::half;
        else if (value == "quarter") cfg.keyrate_cost = PurificationCost::quarter;
        else fail(line, "key '" + key + "': expected half or quarter");
        return;
    }
    fail(line, "unknown key '" + key + "'");
}

std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

ConfigError::ConfigError(int line_no, const std::string& msg)
    : std::runtime_error(line_no > 0
                             ? "config line " + std::to_string(line_no) + ": " + msg
                             : msg),
      line(line_no) {}

CavityDesignConfig entangling_cavity_defaults() {
    CavityDesignConfig c;
    c.length = 75e-6;
    c.roc_hr = 100e-6;
    c.roc_oc = 200e-6;
    c.wavelength = 1476e-9;
    c.t_oc_ppm = 600.0;
    c.t_hr_ppm = 10.0;
    c.parasitic_ppm = 20.0;
    c.gamma_partial = mhz_2pi(0.675);
    c.gamma_total = mhz_2pi(1.92);
    c.atom_offset = 0.0;
    c.fiber_mode_radius = 5e-6;
    c.fiber_index = 1.468;
    return c;
}

CavityDesignConfig heralding_cavity_defaults() {
    CavityDesignConfig c;
    c.length = 400e-6;
    c.roc_hr = 500e-6;
    c.roc_oc = 500e-6;
    c.wavelength = 795e-9;
    c.t_oc_ppm = 400.0;
    c.t_hr_ppm = 10.0;
    c.parasitic_ppm = 20.0;
    c.gamma_partial = mhz_2pi(1.4375);
    c.gamma_total = mhz_2pi(5.75);
    c.atom_offset = 100e-6;
    c.fiber_mode_radius = 0.0;
    c.fiber_index = 1.468;
    return c;
}

ScenarioConfig parse_config_text(const std::string& text) {
    ScenarioConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        raw = trim(raw);
        if (raw.empty()) continue;
        const auto eq = raw.find('=');
        if (eq == std::string::npos)
            fail(line_no, "expected 'section.key = value [unit]'");
        const std::string key = trim(raw.substr(0, eq));
        if (key.find('.') == std::string::npos)
            fail(line_no, "key '" + key + "' must be of the form section.key");
        std::istringstream rest(raw.substr(eq + 1));
        std::string value, unit, extra;
        rest >> value >> unit >> extra;
        if (value.empty()) fail(line_no, "key '" + key + "': missing value");
        if (!extra.empty())
            fail(line_no, "key '" + key + "': trailing text '" + extra + "'");
        apply_key(cfg, key, value, unit, line_no);
    }
    return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::vector<std::pair<std::string, std::string>> resolved_entries(
    const ScenarioConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    ScenarioConfig tmp = cfg;
    const auto unit_str = [](const char* u) {
        return *u == '\0' ? std::string() : " " + std::string(u);
    };
    for (const auto& k : kNumKeys)
        out.emplace_back(k.name, fmt_num(k.get(tmp) / k.scale) + unit_str(k.unit));
    for (const auto& k : kProbKeys)
        out.emplace_back(k.name, fmt_num(k.get(tmp) / k.scale) + unit_str(k.unit));
    out.emplace_back("cascade.amp_a", fmt_num(cfg.scheme.a));
    out.emplace_back("cascade.amp_b", fmt_num(cfg.scheme.b));
    out.emplace_back("cascade.amp_c", fmt_num(cfg.scheme.c));
    out.emplace_back("cascade.theta", cfg.scheme.theta == 0.0 ? "0" : "pi");
    out.emplace_back("cascade.theta_tilde",
                     cfg.scheme.theta_tilde == 0.0 ? "0" : "pi");
    out.emplace_back("cascade.worst_case_recycling",
                     cfg.cascade.worst_case_recycling ? "true" : "false");
    out.emplace_back("cascade.second_heralding_mode",
                     cfg.cascade.second_heralding_mode ? "true" : "false");
    out.emplace_back("cascade.dark_state",
                     cfg.cascade.dark_state ? "true" : "false");
    out.emplace_back("cascade.telecom_truncation",
                     std::to_string(cfg.cascade.telecom_truncation));
    out.emplace_back("cascade.n_traj", std::to_string(cfg.n_traj));
    out.emplace_back("repeater.n", std::to_string(cfg.repeater_n));
    out.emplace_back("repeater.runs", std::to_string(cfg.repeater_runs));
    out.emplace_back("repeater.strategy",
                     cfg.repeater_strategy == Strategy::keep ? "keep" : "restart");
    out.emplace_back("keyrate.n", std::to_string(cfg.keyrate_n));
    out.emplace_back(
        "keyrate.convention",
        cfg.keyrate_convention == GateErrorConvention::mixing_weight
            ? "mixing_weight"
            : "state_error");
    out.emplace_back("keyrate.cost",
                     cfg.keyrate_cost == PurificationCost::half ? "half"
                                                                : "quarter");
    return out;
}

}  // namespace qrep
