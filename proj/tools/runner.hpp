#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace plurilab::cli {

// exit codes
inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNonConvergence = 3;

struct RunReport {
    std::string config_echo;
    std::vector<std::string> lines; // per-check text, one per line
    std::string csv;                // main CSV artifact (empty if none)
    int exit_code = kExitPass;
    double wall_seconds = 0.0;

    std::string to_text() const;
};

/// Executes the configured operation. Throws ConfigError for config-level
/// problems; numerical failures are reported through the exit code.
RunReport run_experiment(const ExperimentConfig& cfg);

struct SuiteCheck {
    std::string name;
    bool passed = false;
    bool converged = true;
    double seconds = 0.0;
    std::string detail;
};

struct SuiteResult {
    std::vector<SuiteCheck> checks;
    int exit_code = kExitPass;
    double wall_seconds = 0.0;
    // name -> CSV bytes for every artifact the suite emits
    std::vector<std::pair<std::string, std::string>> artifacts;

    std::string to_text() const;
};

/// The acceptance-criteria batch. `profile` selects the per-integral budget
/// (quick = 1e5, full = 1e6). Deterministic for a fixed seed. With kappa
/// mode `paper` the Jensen checks run against the identity as printed and
/// report their residuals as check failures, not numerical ones.
SuiteResult run_suite(const std::string& profile, std::uint64_t seed, const std::string& out_dir,
                      KappaMode kappa_mode = KappaMode::calibrated);

/// list-fixtures table.
std::string fixture_table(const std::string& filter);

} // namespace plurilab::cli
