#include "nmgle/config_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "nmgle/errors.hpp"
#include "nmgle/series_io.hpp"

namespace nmgle {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(const std::string& key, std::size_t line, const std::string& what) {
    throw ConfigError("config key '" + key + "' (line " + std::to_string(line) + "): " + what);
}

double parse_double(const std::string& key, std::size_t line, const std::string& value) {
    const char* begin = value.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') fail(key, line, "expected a number, got '" + value + "'");
    if (errno == ERANGE || !std::isfinite(v)) fail(key, line, "value out of range: '" + value + "'");
    return v;
}

long long parse_int(const std::string& key, std::size_t line, const std::string& value) {
    const char* begin = value.c_str();
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(begin, &end, 10);
    if (end == begin || *end != '\0') fail(key, line, "expected an integer, got '" + value + "'");
    if (errno == ERANGE) fail(key, line, "value out of range: '" + value + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& key, std::size_t line, const std::string& value) {
    const char* begin = value.c_str();
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(begin, &end, 10);
    if (end == begin || *end != '\0' || value.front() == '-') {
        fail(key, line, "expected a non-negative integer, got '" + value + "'");
    }
    if (errno == ERANGE) fail(key, line, "value out of range: '" + value + "'");
    return v;
}

bool parse_bool(const std::string& key, std::size_t line, const std::string& value) {
    if (value == "true" || value == "on" || value == "1") return true;
    if (value == "false" || value == "off" || value == "0") return false;
    fail(key, line, "expected true/false, got '" + value + "'");
}

Vec3 parse_vec3(const std::string& key, std::size_t line, const std::string& value) {
    std::istringstream in(value);
    Vec3 v;
    std::string a, b, c, rest;
    if (!(in >> a >> b >> c) || (in >> rest)) {
        fail(key, line, "expected three numbers, got '" + value + "'");
    }
    v.x = parse_double(key, line, a);
    v.y = parse_double(key, line, b);
    v.z = parse_double(key, line, c);
    return v;
}

}  // namespace

SimConfig parse_config_text(const std::string& text) {
    SimConfig config;

    using Setter = std::function<void(SimConfig&, const std::string&, std::size_t, const std::string&)>;
    static const std::map<std::string, Setter> setters = {
        {"units.hbar", [](SimConfig& c, auto& k, auto l, auto& v) { c.units.hbar = parse_double(k, l, v); }},
        {"units.c", [](SimConfig& c, auto& k, auto l, auto& v) { c.units.c = parse_double(k, l, v); }},
        {"particle.mass", [](SimConfig& c, auto& k, auto l, auto& v) { c.particle.mass = parse_double(k, l, v); }},
        {"particle.charge", [](SimConfig& c, auto& k, auto l, auto& v) { c.particle.charge = parse_double(k, l, v); }},
        {"particle.coupling_scale",
         [](SimConfig& c, auto& k, auto l, auto& v) { c.particle.coupling_scale = parse_double(k, l, v); }},
        {"lattice.box_length",
         [](SimConfig& c, auto& k, auto l, auto& v) { c.box_length = parse_double(k, l, v); }},
        {"lattice.n_max",
         [](SimConfig& c, auto& k, auto l, auto& v) {
             const long long n = parse_int(k, l, v);
             if (n < 1) fail(k, l, "must be at least 1");
             c.n_max = static_cast<int>(n);
         }},
        {"dynamics.approximation",
         [](SimConfig& c, auto& k, auto l, auto& v) {
             if (v == "dipole") c.approx = Approximation::Dipole;
             else if (v == "quadrupole") c.approx = Approximation::Quadrupole;
             else fail(k, l, "expected dipole or quadrupole, got '" + v + "'");
         }},
        {"dynamics.formulation",
         [](SimConfig& c, auto& k, auto l, auto& v) {
             if (v == "local") c.formulation = Formulation::Local;
             else if (v == "reduced") c.formulation = Formulation::Reduced;
             else fail(k, l, "expected local or reduced, got '" + v + "'");
         }},
        {"dynamics.convolution",
         [](SimConfig& c, auto& k, auto l, auto& v) {
             if (v == "naive") c.convolution = ConvolutionMethod::Naive;
             else if (v == "incremental") c.convolution = ConvolutionMethod::Incremental;
             else fail(k, l, "expected naive or incremental, got '" + v + "'");
         }},
        {"grid.t_start", [](SimConfig& c, auto& k, auto l, auto& v) { c.grid.t0 = parse_double(k, l, v); }},
        {"grid.dt",
         [](SimConfig& c, auto& k, auto l, auto& v) {
             c.grid.dt = parse_double(k, l, v);
             if (!(c.grid.dt > 0.0)) fail(k, l, "must be positive");
         }},
        {"grid.n_steps",
         [](SimConfig& c, auto& k, auto l, auto& v) {
             const long long n = parse_int(k, l, v);
             if (n < 1) fail(k, l, "must be at least 1");
             c.grid.n_steps = static_cast<std::size_t>(n);
         }},
        {"noise.enabled",
         [](SimConfig& c, auto& k, auto l, auto& v) { c.noise.enabled = parse_bool(k, l, v); }},
        {"noise.sigma",
         [](SimConfig& c, auto& k, auto l, auto& v) {
             c.noise.sigma = parse_double(k, l, v);
             if (c.noise.sigma < 0.0) fail(k, l, "must be non-negative");
         }},
        {"noise.tau_c",
         [](SimConfig& c, auto& k, auto l, auto& v) {
             c.noise.tau_c = parse_double(k, l, v);
             if (!(c.noise.tau_c > 0.0)) fail(k, l, "must be positive");
         }},
        {"initial.mode_dist",
         [](SimConfig& c, auto& k, auto l, auto& v) {
             if (v == "vacuum") c.initial_dist.kind = InitialModeDist::Kind::Vacuum;
             else if (v == "fixed") c.initial_dist.kind = InitialModeDist::Kind::FixedOccupation;
             else if (v == "thermal") c.initial_dist.kind = InitialModeDist::Kind::Thermal;
             else fail(k, l, "expected vacuum, fixed or thermal, got '" + v + "'");
         }},
        {"initial.occupation",
         [](SimConfig& c, auto& k, auto l, auto& v) {
             c.initial_dist.occupation = parse_double(k, l, v);
             if (c.initial_dist.occupation < 0.0) fail(k, l, "must be non-negative");
         }},
        {"initial.temperature",
         [](SimConfig& c, auto& k, auto l, auto& v) {
             c.initial_dist.temperature = parse_double(k, l, v);
             if (c.initial_dist.temperature < 0.0) fail(k, l, "must be non-negative");
         }},
        {"initial.x0", [](SimConfig& c, auto& k, auto l, auto& v) { c.x0 = parse_vec3(k, l, v); }},
        {"initial.p0", [](SimConfig& c, auto& k, auto l, auto& v) { c.p0 = parse_vec3(k, l, v); }},
        {"ensemble.n_trajectories",
         [](SimConfig& c, auto& k, auto l, auto& v) {
             c.n_trajectories = parse_u64(k, l, v);
             if (c.n_trajectories < 1) fail(k, l, "must be at least 1");
         }},
        {"ensemble.master_seed",
         [](SimConfig& c, auto& k, auto l, auto& v) { c.master_seed = parse_u64(k, l, v); }},
    };

    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value', got '" +
                              line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw ConfigError("unknown config key '" + key + "' at line " + std::to_string(line_no));
        }
        it->second(config, key, line_no, value);
    }

    validate_config(config);
    return config;
}

SimConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::string echo_config(const SimConfig& config) {
    std::ostringstream out;
    auto d = [](double v) { return format_double(v); };
    out << "units.hbar = " << d(config.units.hbar) << "\n";
    out << "units.c = " << d(config.units.c) << "\n";
    out << "particle.mass = " << d(config.particle.mass) << "\n";
    out << "particle.charge = " << d(config.particle.charge) << "\n";
    out << "particle.coupling_scale = " << d(config.particle.coupling_scale) << "\n";
    out << "lattice.box_length = " << d(config.box_length) << "\n";
    out << "lattice.n_max = " << config.n_max << "\n";
    out << "dynamics.approximation = "
        << (config.approx == Approximation::Dipole ? "dipole" : "quadrupole") << "\n";
    out << "dynamics.formulation = "
        << (config.formulation == Formulation::Local ? "local" : "reduced") << "\n";
    out << "dynamics.convolution = "
        << (config.convolution == ConvolutionMethod::Naive ? "naive" : "incremental") << "\n";
    out << "grid.t_start = " << d(config.grid.t0) << "\n";
    out << "grid.dt = " << d(config.grid.dt) << "\n";
    out << "grid.n_steps = " << config.grid.n_steps << "\n";
    out << "noise.enabled = " << (config.noise.enabled ? "true" : "false") << "\n";
    out << "noise.sigma = " << d(config.noise.sigma) << "\n";
    out << "noise.tau_c = " << d(config.noise.tau_c) << "\n";
    const char* dist = "vacuum";
    if (config.initial_dist.kind == InitialModeDist::Kind::FixedOccupation) dist = "fixed";
    if (config.initial_dist.kind == InitialModeDist::Kind::Thermal) dist = "thermal";
    out << "initial.mode_dist = " << dist << "\n";
    out << "initial.occupation = " << d(config.initial_dist.occupation) << "\n";
    out << "initial.temperature = " << d(config.initial_dist.temperature) << "\n";
    out << "initial.x0 = " << d(config.x0.x) << " " << d(config.x0.y) << " " << d(config.x0.z) << "\n";
    out << "initial.p0 = " << d(config.p0.x) << " " << d(config.p0.y) << " " << d(config.p0.z) << "\n";
    out << "ensemble.n_trajectories = " << config.n_trajectories << "\n";
    out << "ensemble.master_seed = " << config.master_seed << "\n";
    return out.str();
}

}  // namespace nmgle
