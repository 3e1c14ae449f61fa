// commands.hpp — the CLI subcommands.  Each takes an assembled Scenario,
// writes CSV output and returns a process exit code (0 on success); config
// and numeric failures are thrown and mapped by main().
#pragma once

#include <string>

#include "cavitysense/analytic.hpp"
#include "scenario.hpp"

namespace cavitysense::cli {

// gamma > 0 wins over kappa > 0 in "auto"; both set at once is a config error.
NoiseRegime resolve_regime(const Scenario& s);

// One sensitivity point with the sweep axis applied; exposed for optimize.
GainPoint sensitivity_point(const Scenario& s, NoiseRegime regime, double x);

int cmd_sensitivity(const Scenario& s);
int cmd_qfi(const Scenario& s);
int cmd_wigner(const Scenario& s);
int cmd_optimize(const Scenario& s);

// Figure presets: replay committed config files with zero overrides.
// `out_dir` receives the CSV files; `threads` > 0 pins the thread count.
int run_figure(const std::string& name, const std::string& out_dir, int threads);

}  // namespace cavitysense::cli
