// checks.hpp — self-validation registry behind `cavity-sense validate`.
// Fast checks are randomized property suites (≥100 cases each, deterministic
// seeds); full checks add simulator cross-validations that take minutes.
#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace cavitysense::cli {

enum class CheckLevel { Fast, Full };

struct CheckResult {
    bool pass = false;
    std::string detail;  // first failing case, or a summary statistic
};

struct CheckDef {
    std::string name;
    CheckLevel level;
    std::function<CheckResult()> fn;
};

const std::vector<CheckDef>& check_registry();

// Runs fast checks (and full ones when `full`), printing one line per check.
// Returns the number of failures.
int run_checks(bool full, std::ostream& os);

}  // namespace cavitysense::cli
