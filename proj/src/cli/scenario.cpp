#include "scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <sys/stat.h>

#include "cavitysense/version.hpp"

#ifndef CAVITYSENSE_SOURCE_CONFIG_DIR
#define CAVITYSENSE_SOURCE_CONFIG_DIR ""
#endif

namespace cavitysense::cli {

namespace {

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "N",          "alpha",      "g",           "delta_c",      "kappa",
        "gamma",      "variant",    "tau1",        "tau2",         "beta",
        "phi",        "sigma_det",  "regime",      "method",       "approx",
        "objective",  "n_max",      "threads",     "freq_convention",
        "simulator.max_bytes",      "sweep.axis",  "sweep.min",    "sweep.max",
        "sweep.points",             "sweep.spacing",
        "wigner.times",             "wigner.half_width",           "wigner.step",
        "envelope.t_max",           "envelope.points",             "out",
    };
    return keys;
}

bool is_known_key(const std::string& k) {
    const auto& keys = known_keys();
    return std::find(keys.begin(), keys.end(), k) != keys.end();
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string env_name(const std::string& key) {
    std::string out = "CAVITYSENSE_";
    for (char c : key) {
        if (c == '.')
            out += '_';
        else
            out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return out;
}

bool one_of(const std::string& v, std::initializer_list<const char*> opts) {
    for (const char* o : opts)
        if (v == o) return true;
    return false;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    return out;
}

bool file_exists(const std::string& path) {
    struct stat st { };
    return !path.empty() && ::stat(path.c_str(), &st) == 0 && S_ISREG(st.st_mode);
}

}  // namespace

double parse_double(const std::string& key, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE)
        throw config_error("bad numeric value for '" + key + "': '" + value + "'");
    return v;
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE)
        throw config_error("bad integer value for '" + key + "': '" + value + "'");
    return v;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!is_known_key(key))
            throw config_error(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (value.empty())
            throw config_error(path + ":" + std::to_string(lineno) + ": empty value for '" + key + "'");
        out[key] = value;
    }
    return out;
}

std::map<std::string, std::string> environment_overrides() {
    std::map<std::string, std::string> out;
    for (const std::string& key : known_keys()) {
        const char* v = std::getenv(env_name(key).c_str());
        if (v != nullptr && *v != '\0') out[key] = v;
    }
    return out;
}

Scenario build_scenario(const std::map<std::string, std::string>& file_map,
                        const std::map<std::string, std::string>& env_map,
                        const std::map<std::string, std::string>& flag_map) {
    std::map<std::string, std::string> m = env_map;
    for (const auto& [k, v] : file_map) m[k] = v;
    for (const auto& [k, v] : flag_map) {
        if (!is_known_key(k)) throw config_error("unknown key '" + k + "'");
        m[k] = v;
    }

    Scenario s;
    s.merged = m;
    auto get = [&](const char* key) -> const std::string* {
        auto it = m.find(key);
        return it == m.end() ? nullptr : &it->second;
    };

    if (const auto* v = get("N")) s.params.N = parse_int("N", *v);
    if (const auto* v = get("alpha")) s.params.alpha = parse_double("alpha", *v);
    if (const auto* v = get("g")) s.params.g = parse_double("g", *v);
    if (const auto* v = get("delta_c")) s.params.delta_c = parse_double("delta_c", *v);
    if (const auto* v = get("kappa")) s.params.kappa = parse_double("kappa", *v);
    if (const auto* v = get("gamma")) s.params.gamma = parse_double("gamma", *v);
    if (const auto* v = get("variant")) s.protocol.variant = parse_variant(*v);
    if (const auto* v = get("tau1")) s.protocol.tau1 = parse_double("tau1", *v);
    if (const auto* v = get("tau2")) s.protocol.tau2 = parse_double("tau2", *v);
    if (const auto* v = get("beta")) s.protocol.beta = parse_double("beta", *v);
    if (const auto* v = get("phi")) {
        if (*v == "auto") {
            s.protocol.phi_auto = true;
        } else {
            s.protocol.phi = parse_double("phi", *v);
            s.protocol.phi_auto = false;
        }
    }
    if (const auto* v = get("sigma_det")) s.protocol.sigma_det = parse_double("sigma_det", *v);
    if (const auto* v = get("regime")) {
        if (!one_of(*v, {"auto", "ideal", "kappa", "gamma"}))
            throw config_error("regime must be auto|ideal|kappa|gamma, got '" + *v + "'");
        s.regime = *v;
    }
    if (const auto* v = get("method")) {
        if (!one_of(*v, {"auto", "eigen", "gaussian"}))
            throw config_error("method must be auto|eigen|gaussian, got '" + *v + "'");
        s.method = *v;
    }
    if (const auto* v = get("approx")) {
        if (!one_of(*v, {"exact", "closed", "short_time"}))
            throw config_error("approx must be exact|closed|short_time, got '" + *v + "'");
        s.approx = *v;
    }
    if (const auto* v = get("objective")) {
        if (!one_of(*v, {"sensitivity", "qfi"}))
            throw config_error("objective must be sensitivity|qfi, got '" + *v + "'");
        s.objective = *v;
    }
    if (const auto* v = get("n_max")) s.n_max = static_cast<int>(parse_int("n_max", *v));
    if (const auto* v = get("threads")) s.threads = static_cast<int>(parse_int("threads", *v));
    if (const auto* v = get("freq_convention")) {
        if (!one_of(*v, {"rad", "hz2pi"}))
            throw config_error("freq_convention must be rad|hz2pi, got '" + *v + "'");
        s.freq_convention = *v;
    }
    if (const auto* v = get("simulator.max_bytes")) {
        const std::int64_t b = parse_int("simulator.max_bytes", *v);
        if (b <= 0) throw config_error("simulator.max_bytes must be positive");
        s.max_bytes = static_cast<std::uint64_t>(b);
    }
    if (const auto* v = get("sweep.axis")) {
        if (!one_of(*v, {"time", "kappa_ratio", "phi", "tau2", "sigma_det"}))
            throw config_error("sweep.axis must be time|kappa_ratio|phi|tau2|sigma_det");
        s.sweep.axis = *v;
    }
    if (const auto* v = get("sweep.min")) s.sweep.min = parse_double("sweep.min", *v);
    if (const auto* v = get("sweep.max")) s.sweep.max = parse_double("sweep.max", *v);
    if (const auto* v = get("sweep.points"))
        s.sweep.points = static_cast<int>(parse_int("sweep.points", *v));
    if (const auto* v = get("sweep.spacing")) {
        if (!one_of(*v, {"linear", "log"}))
            throw config_error("sweep.spacing must be linear|log, got '" + *v + "'");
        s.sweep.spacing = *v;
    }
    if (const auto* v = get("wigner.times")) s.wigner.times = parse_double_list("wigner.times", *v);
    if (const auto* v = get("wigner.half_width"))
        s.wigner.half_width = parse_double("wigner.half_width", *v);
    if (const auto* v = get("wigner.step")) s.wigner.step = parse_double("wigner.step", *v);
    if (const auto* v = get("out")) s.out = *v;

    if (s.freq_convention == "hz2pi") {
        s.params.g *= two_pi;
        s.params.delta_c *= two_pi;
        s.params.kappa *= two_pi;
        s.params.gamma *= two_pi;
    }

    s.params.validate();
    return s;
}

std::uint64_t scenario_hash(const Scenario& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a 64
    auto mix = [&](const std::string& text) {
        for (unsigned char c : text) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
    };
    for (const auto& [k, v] : s.merged) {  // std::map: already sorted
        mix(k);
        mix("=");
        mix(v);
        mix("\n");
    }
    return h;
}

std::string scenario_hash_hex(const Scenario& s) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(scenario_hash(s)));
    return buf;
}

std::vector<double> sweep_grid(const SweepSpec& spec) {
    if (spec.points < 1)
        throw config_error("empty sweep grid: sweep.points = " + std::to_string(spec.points));
    if (!(spec.min <= spec.max))
        throw config_error("sweep.min must not exceed sweep.max");
    if (spec.spacing == "log" && !(spec.min > 0.0))
        throw config_error("log spacing needs sweep.min > 0");
    std::vector<double> grid(static_cast<std::size_t>(spec.points));
    if (spec.points == 1) {
        grid[0] = spec.min;
        return grid;
    }
    if (spec.spacing == "log") {
        const double la = std::log(spec.min), lb = std::log(spec.max);
        for (int i = 0; i < spec.points; ++i)
            grid[static_cast<std::size_t>(i)] =
                std::exp(la + (lb - la) * i / (spec.points - 1));
    } else {
        for (int i = 0; i < spec.points; ++i)
            grid[static_cast<std::size_t>(i)] =
                spec.min + (spec.max - spec.min) * i / (spec.points - 1);
    }
    return grid;
}

std::string csv_header(const Scenario& s) {
    return std::string("# cavity-sense v") + CAVITYSENSE_VERSION + ", scenario " +
           scenario_hash_hex(s);
}

void write_gain_csv(std::ostream& os, const Scenario& s, const GainCurve& curve,
                    const std::vector<std::string>& methods) {
    const bool with_method = !methods.empty();
    os << csv_header(s) << "\n";
    os << "sweep_value,delta_beta_sq,gain_db,qfi_bound_db,validity_flags";
    if (with_method) os << ",method";
    os << "\n";
    char buf[160];
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const GainPoint& pt = curve.points[i];
        std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e,", pt.sweep_value, pt.delta_beta_sq,
                      pt.gain_db);
        os << buf;
        if (pt.qfi_bound_db.has_value()) {
            std::snprintf(buf, sizeof buf, "%.12e", *pt.qfi_bound_db);
            os << buf;
        } else {
            os << "nan";
        }
        os << "," << flag::to_string(pt.flags);
        if (with_method) os << "," << methods[i];
        os << "\n";
    }
}

std::string resolve_config_path(const std::string& name) {
    std::vector<std::string> dirs;
    if (const char* d = std::getenv("CAVITYSENSE_CONFIG_DIR"); d != nullptr && *d != '\0')
        dirs.emplace_back(d);
    dirs.emplace_back("configs");
    if (const char* src = CAVITYSENSE_SOURCE_CONFIG_DIR; *src != '\0') dirs.emplace_back(src);
    for (const std::string& d : dirs) {
        const std::string p = d + "/" + name;
        if (file_exists(p)) return p;
    }
    throw config_error("config '" + name + "' not found (searched $CAVITYSENSE_CONFIG_DIR, "
                       "./configs and the installed presets)");
}

}  // namespace cavitysense::cli
