#include "tumorlab/config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace tumorlab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double out;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': not a number: '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError("key '" + key + "': trailing junk in '" + v + "'");
    return out;
}

int parse_int(const std::string& key, const std::string& v) {
    const double d = parse_double(key, v);
    const int i = static_cast<int>(d);
    if (d != static_cast<double>(i))
        throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    return i;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt(v[i]);
    }
    return out;
}

}  // namespace

Config parse_config(std::istream& in) {
    Config c;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        const auto hash = s.find('#');
        if (hash != std::string::npos) s = trim(s.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
            section = s.substr(1, s.size() - 2);
            if (section != "model" && section != "grid" && section != "time" &&
                section != "initial" && section != "sweep" && section != "checks")
                throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" +
                                  section + "]");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
        const std::string q = section + "." + key;

        Kinetics& kin = c.sim.params.kinetics;
        if (q == "model.kappa") c.sim.params.kappa = parse_double(key, val);
        else if (q == "model.eps") c.sim.params.eps = parse_double(key, val);
        else if (q == "model.growth_form") kin.growth_form = val;
        else if (q == "model.growth_max") kin.growth_max = parse_double(key, val);
        else if (q == "model.growth_half") kin.growth_half = parse_double(key, val);
        else if (q == "model.death_form") kin.death_form = val;
        else if (q == "model.death_max") kin.death_max = parse_double(key, val);
        else if (q == "model.death_decay") kin.death_decay = parse_double(key, val);
        else if (q == "model.consumption_form") kin.consumption_form = val;
        else if (q == "model.consumption_rate") kin.consumption_rate = parse_double(key, val);
        else if (q == "model.removal_rate") kin.removal_rate = parse_double(key, val);
        else if (q == "model.nutrient_diffusion") kin.nutrient_diffusion = parse_double(key, val);
        else if (q == "model.nutrient_boundary") kin.nutrient_boundary = parse_double(key, val);
        else if (q == "grid.cells") c.sim.cells = parse_int(key, val);
        else if (q == "grid.x_min") c.sim.x_min = parse_double(key, val);
        else if (q == "grid.x_max") c.sim.x_max = parse_double(key, val);
        else if (q == "grid.face_average") c.sim.face_average = val;
        else if (q == "time.mode") {
            if (val == "degenerate") c.sim.mode = Mode::Degenerate;
            else if (val == "regularized") c.sim.mode = Mode::Regularized;
            else throw ConfigError("key 'mode': expected degenerate or regularized");
        }
        else if (q == "time.t_end") c.sim.t_end = parse_double(key, val);
        else if (q == "time.snapshots") c.sim.snapshots = parse_int(key, val);
        else if (q == "time.dt_init") c.sim.time.dt_init = parse_double(key, val);
        else if (q == "time.dt_max") c.sim.time.dt_max = parse_double(key, val);
        else if (q == "time.cfl_safety") c.sim.time.cfl_safety = parse_double(key, val);
        else if (q == "time.growth_factor") c.sim.time.growth_factor = parse_double(key, val);
        else if (q == "time.newton_tol") c.sim.time.newton_tol = parse_double(key, val);
        else if (q == "time.newton_max_iter") c.sim.time.newton_max_iter = parse_int(key, val);
        else if (q == "initial.bump_amplitude") c.sim.initial.bump_amplitude = parse_double(key, val);
        else if (q == "initial.bump_center") c.sim.initial.bump_center = parse_double(key, val);
        else if (q == "initial.bump_width") c.sim.initial.bump_width = parse_double(key, val);
        else if (q == "initial.dead_level") c.sim.initial.dead_level = parse_double(key, val);
        else if (q == "initial.kappa_offset") c.sim.initial.kappa_offset = parse_bool(key, val);
        else if (q == "initial.theta_min") c.sim.initial.theta_min = parse_double(key, val);
        else if (q == "sweep.kappa_values") c.sweep.kappa_values = parse_list(key, val);
        else if (q == "sweep.eps_values") c.sweep.eps_values = parse_list(key, val);
        else if (q == "sweep.slack_factor") c.sweep.slack_factor = parse_double(key, val);
        else if (q == "sweep.kappa_h") {
            if (val != "larger" && val != "smaller")
                throw ConfigError("key 'kappa_h': expected larger or smaller");
            c.sweep.kappa_h = val;
        }
        else if (q == "checks.mass_tolerance") c.checks.mass_tolerance = parse_double(key, val);
        else if (q == "checks.segregation_tolerance")
            c.checks.segregation_tolerance = parse_double(key, val);
        else if (q == "checks.barrier_rho_min") c.checks.barrier_rho_min = parse_double(key, val);
        else if (q == "checks.positivity_tolerance")
            c.checks.positivity_tolerance = parse_double(key, val);
        else
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key +
                              "' in section [" + section + "]");
    }

    const Kinetics& kin = c.sim.params.kinetics;
    if (kin.growth_form != "monod")
        throw ConfigError("key 'growth_form': unsupported form '" + kin.growth_form + "'");
    if (kin.death_form != "inverse_linear")
        throw ConfigError("key 'death_form': unsupported form '" + kin.death_form + "'");
    if (kin.consumption_form != "linear")
        throw ConfigError("key 'consumption_form': unsupported form '" +
                          kin.consumption_form + "'");
    try {
        c.sim.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

Config parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config(in);
}

std::string serialize_config(const Config& c) {
    const Kinetics& kin = c.sim.params.kinetics;
    std::ostringstream os;
    os << "[model]\n";
    os << "kappa = " << fmt(c.sim.params.kappa) << "\n";
    os << "eps = " << fmt(c.sim.params.eps) << "\n";
    os << "growth_form = " << kin.growth_form << "\n";
    os << "growth_max = " << fmt(kin.growth_max) << "\n";
    os << "growth_half = " << fmt(kin.growth_half) << "\n";
    os << "death_form = " << kin.death_form << "\n";
    os << "death_max = " << fmt(kin.death_max) << "\n";
    os << "death_decay = " << fmt(kin.death_decay) << "\n";
    os << "consumption_form = " << kin.consumption_form << "\n";
    os << "consumption_rate = " << fmt(kin.consumption_rate) << "\n";
    os << "removal_rate = " << fmt(kin.removal_rate) << "\n";
    os << "nutrient_diffusion = " << fmt(kin.nutrient_diffusion) << "\n";
    os << "nutrient_boundary = " << fmt(kin.nutrient_boundary) << "\n";
    os << "\n[grid]\n";
    os << "cells = " << c.sim.cells << "\n";
    os << "x_min = " << fmt(c.sim.x_min) << "\n";
    os << "x_max = " << fmt(c.sim.x_max) << "\n";
    os << "face_average = " << c.sim.face_average << "\n";
    os << "\n[time]\n";
    os << "mode = " << (c.sim.mode == Mode::Degenerate ? "degenerate" : "regularized") << "\n";
    os << "t_end = " << fmt(c.sim.t_end) << "\n";
    os << "snapshots = " << c.sim.snapshots << "\n";
    os << "dt_init = " << fmt(c.sim.time.dt_init) << "\n";
    os << "dt_max = " << fmt(c.sim.time.dt_max) << "\n";
    os << "cfl_safety = " << fmt(c.sim.time.cfl_safety) << "\n";
    os << "growth_factor = " << fmt(c.sim.time.growth_factor) << "\n";
    os << "newton_tol = " << fmt(c.sim.time.newton_tol) << "\n";
    os << "newton_max_iter = " << c.sim.time.newton_max_iter << "\n";
    os << "\n[initial]\n";
    os << "bump_amplitude = " << fmt(c.sim.initial.bump_amplitude) << "\n";
    os << "bump_center = " << fmt(c.sim.initial.bump_center) << "\n";
    os << "bump_width = " << fmt(c.sim.initial.bump_width) << "\n";
    os << "dead_level = " << fmt(c.sim.initial.dead_level) << "\n";
    os << "kappa_offset = " << (c.sim.initial.kappa_offset ? "true" : "false") << "\n";
    os << "theta_min = " << fmt(c.sim.initial.theta_min) << "\n";
    os << "\n[sweep]\n";
    os << "kappa_values = " << fmt_list(c.sweep.kappa_values) << "\n";
    os << "eps_values = " << fmt_list(c.sweep.eps_values) << "\n";
    os << "slack_factor = " << fmt(c.sweep.slack_factor) << "\n";
    os << "kappa_h = " << c.sweep.kappa_h << "\n";
    os << "\n[checks]\n";
    os << "mass_tolerance = " << fmt(c.checks.mass_tolerance) << "\n";
    os << "segregation_tolerance = " << fmt(c.checks.segregation_tolerance) << "\n";
    os << "barrier_rho_min = " << fmt(c.checks.barrier_rho_min) << "\n";
    os << "positivity_tolerance = " << fmt(c.checks.positivity_tolerance) << "\n";
    return os.str();
}

std::string emit_defaults() { return serialize_config(Config{}); }

std::uint64_t config_hash(const Config& c) {
    const std::string s = serialize_config(c);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace tumorlab
