// cavity-sense — CLI front end: scenario assembly, subcommand dispatch and
// exit-code mapping (0 ok, 2 config, 3 numeric, 4 validation).
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cavitysense/parallel.hpp"
#include "cavitysense/version.hpp"
#include "checks.hpp"
#include "commands.hpp"
#include "scenario.hpp"

namespace {

using namespace cavitysense;
using namespace cavitysense::cli;

struct CommonOpts {
    std::string config;
    std::string out;
    int threads = 0;
    std::string freq_convention;
    std::vector<std::string> sets;  // key=value overrides
};

void add_common(CLI::App* sub, CommonOpts& o) {
    sub->add_option("--config", o.config, "scenario config file (key = value lines)");
    sub->add_option("--out", o.out, "output CSV path ('-' = stdout)");
    sub->add_option("--threads", o.threads, "OpenMP thread count (0 = default)");
    sub->add_option("--freq-convention", o.freq_convention,
                    "rad: rates in rad/s; hz2pi: rates in Hz, scaled by 2π on load")
        ->check(CLI::IsMember({"rad", "hz2pi"}));
    sub->add_option("--set", o.sets, "override any config key, e.g. --set alpha=12")
        ->take_all();
}

Scenario assemble(const CommonOpts& o) {
    std::map<std::string, std::string> file_map;
    if (!o.config.empty()) file_map = parse_config_file(o.config);
    std::map<std::string, std::string> flag_map;
    for (const std::string& kv : o.sets) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw config_error("--set expects key=value, got '" + kv + "'");
        flag_map[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    if (!o.out.empty()) flag_map["out"] = o.out;
    if (o.threads > 0) flag_map["threads"] = std::to_string(o.threads);
    if (!o.freq_convention.empty()) flag_map["freq_convention"] = o.freq_convention;
    return build_scenario(file_map, environment_overrides(), flag_map);
}

}  // namespace

int main(int argc, char** argv) {
    // keep BLAS single threaded; parallelism lives in the OpenMP kernels
    ::setenv("OPENBLAS_NUM_THREADS", "1", 0);

    CLI::App app{std::string("cavity-sense ") + CAVITYSENSE_VERSION +
                 " — atom-light cat-state displacement metrology"};
    app.require_subcommand(1);
    app.set_version_flag("--version", CAVITYSENSE_VERSION);

    CommonOpts o;
    std::string action;
    std::string fig_name;
    bool full = false;
    bool fast = false;

    for (const char* name : {"sensitivity", "qfi", "wigner", "optimize"}) {
        CLI::App* sub = app.add_subcommand(
            name, std::string("compute a ") + name + " sweep to CSV");
        add_common(sub, o);
        sub->callback([&action, name] { action = name; });
    }

    CLI::App* val = app.add_subcommand("validate", "run the self-check suites");
    val->add_flag("--full", full, "include the slow simulator cross-checks");
    val->add_flag("--fast", fast, "fast property suites only (default)");
    val->callback([&action] { action = "validate"; });

    CLI::App* fig = app.add_subcommand("figure", "replay a committed figure preset");
    fig->add_option("name", fig_name, "preset name (fig1..fig10)")->required();
    fig->add_option("--out", o.out, "output directory (default '.')");
    fig->add_option("--threads", o.threads, "OpenMP thread count");
    fig->callback([&action] { action = "figure"; });

    for (int i = 1; i <= 10; ++i) {
        const std::string name = "fig" + std::to_string(i);
        CLI::App* sub = app.add_subcommand(name, "shortcut for: figure " + name);
        sub->add_option("--out", o.out, "output directory (default '.')");
        sub->add_option("--threads", o.threads, "OpenMP thread count");
        sub->callback([&action, &fig_name, name] {
            action = "figure";
            fig_name = name;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage problems are config errors
    }

    try {
        if (action == "validate") {
            const int failures = run_checks(full, std::cout);
            return failures == 0 ? 0 : 4;
        }
        if (action == "figure") {
            if (o.threads > 0) set_threads(o.threads);
            return run_figure(fig_name, o.out.empty() ? "." : o.out, o.threads);
        }
        const Scenario s = assemble(o);
        if (s.threads > 0) set_threads(s.threads);
        if (action == "sensitivity") return cmd_sensitivity(s);
        if (action == "qfi") return cmd_qfi(s);
        if (action == "wigner") return cmd_wigner(s);
        if (action == "optimize") return cmd_optimize(s);
        throw config_error("no subcommand selected");
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
