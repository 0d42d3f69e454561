#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace plurilab::cli {

enum class KappaMode { paper, calibrated };

/// One experiment: fixture, operation, grids and numeric policy. Parsed
/// from a flat key = value file; command-line flags override file values.
struct ExperimentConfig {
    std::string operation;
    std::string fixture;
    std::vector<std::complex<double>> z0; // empty = origin
    std::vector<double> grid;
    std::vector<std::complex<double>> scales;
    double r1 = 0.5, r2 = 1.0;
    double r0 = 1.0;
    double eps = 0.5;
    double r = 1.0;
    int k = 1;
    int p = 1;
    double tol = 1e-3;
    std::int64_t budget = 1'000'000;
    std::uint64_t seed = 20240;
    KappaMode kappa_mode = KappaMode::calibrated;
    std::string kappa_artifact; // path; empty = derive from out dir
    std::string out;            // CSV output path; empty = no file
    std::string filter;         // list-fixtures filter
    std::string profile = "quick";

    std::string echo() const;
};

struct ConfigError {
    std::string message;
};

/// Parses `key = value` lines; '#' starts a comment. Unknown keys are
/// config errors.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Applies a key/value map onto a config. Throws ConfigError on bad values.
void apply_key_values(ExperimentConfig& cfg, const std::map<std::string, std::string>& kv);

/// Range checks shared by every operation. Throws ConfigError.
void validate(const ExperimentConfig& cfg);

std::vector<double> parse_double_list(const std::string& s);
std::vector<std::complex<double>> parse_scale_list(const std::string& s);

} // namespace plurilab::cli
