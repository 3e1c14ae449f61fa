// scenario.hpp — CLI-side scenario assembly: flat key=value config files,
// CAVITYSENSE_* environment overlay, flag overrides, sweep grids, the
// scenario hash and the pinned CSV formats.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cavitysense/simulator.hpp"
#include "cavitysense/types.hpp"

namespace cavitysense::cli {

struct SweepSpec {
    std::string axis = "time";       // time | kappa_ratio | phi | tau2 | sigma_det
    double min = 0.0;
    double max = 0.0;
    int points = 0;                  // 0 = unset; an empty grid is a config error
    std::string spacing = "linear";  // linear | log
};

struct WignerSpec {
    std::vector<double> times;       // evaluation times (seconds)
    double half_width = 6.5;         // square window [−h, h]²
    double step = 0.05;
};

struct Scenario {
    SystemParams params;
    ProtocolConfig protocol;
    std::string regime = "auto";     // auto | ideal | kappa | gamma
    std::string method = "auto";     // auto | eigen | gaussian  (qfi)
    std::string approx = "exact";    // exact | closed | short_time  (sensitivity)
    std::string objective = "sensitivity";  // optimize: sensitivity | qfi
    int n_max = 0;                   // 0 = automatic Fock cutoff
    int threads = 0;                 // 0 = library default
    std::string freq_convention = "rad";    // rad | hz2pi
    std::uint64_t max_bytes = default_max_bytes;
    SweepSpec sweep;
    WignerSpec wigner;
    std::string out;                 // output path ("" or "-" = stdout)

    // canonical merged key=value view (what the scenario hash covers)
    std::map<std::string, std::string> merged;
};

// key = value per line, '#' comments, unknown keys rejected
std::map<std::string, std::string> parse_config_file(const std::string& path);

// CAVITYSENSE_<KEY> with dots mapped to underscores, uppercase
std::map<std::string, std::string> environment_overrides();

// precedence: flags > file > environment
Scenario build_scenario(const std::map<std::string, std::string>& file_map,
                        const std::map<std::string, std::string>& env_map,
                        const std::map<std::string, std::string>& flag_map);

// FNV-1a 64 over the sorted canonical "key=value" lines
std::uint64_t scenario_hash(const Scenario& s);
std::string scenario_hash_hex(const Scenario& s);

// sweep grid; throws config_error on an empty or malformed grid
std::vector<double> sweep_grid(const SweepSpec& spec);

// `# cavity-sense v…, scenario <hash>` header line
std::string csv_header(const Scenario& s);

// pinned sweep CSV: sweep_value,delta_beta_sq,gain_db,qfi_bound_db,validity_flags
// plus a trailing `method` column when `methods` is non-empty
void write_gain_csv(std::ostream& os, const Scenario& s, const GainCurve& curve,
                    const std::vector<std::string>& methods = {});

double parse_double(const std::string& key, const std::string& value);
std::int64_t parse_int(const std::string& key, const std::string& value);

// config file search: $CAVITYSENSE_CONFIG_DIR, ./configs, then the source tree
std::string resolve_config_path(const std::string& name);

}  // namespace cavitysense::cli
