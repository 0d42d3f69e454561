// Acceptance gate: runs the full-profile check battery twice, prints one
// pass/fail line per criterion (with its runtime limit), and verifies that
// the two runs produce byte-identical CSV artifacts.

#include <cstdio>
#include <map>
#include <string>

#include "runner.hpp"

using plurilab::cli::run_suite;
using plurilab::cli::SuiteResult;

namespace {
struct Criterion {
    const char* check_name;
    const char* label;
    double time_limit; // seconds; 0 = covered by the total budget only
};

const Criterion kCriteria[] = {
    {"normalization", "1 ball-mass normalization of beta^n", 30.0},
    {"nu_profiles", "2 nu profiles for H, T2, T1, T0", 0.0},
    {"jensen_calibration", "3 Lelong-Jensen identity and kappa calibration", 60.0},
    {"condition_integrals", "4 Dini and dd^c condition integrals", 0.0},
    {"tangent_cones", "5 tangent-cone experiments", 120.0},
    {"demailly_fuzz", "6 positive-form coefficient bound fuzz", 10.0},
    {"restriction_identity", "7 hypersurface restriction identity", 30.0},
    {"blowup_mass", "8 blow-up mass bounds", 60.0},
};
} // namespace

int main() {
    const std::uint64_t seed = 20240;
    std::printf("running the acceptance battery (full profile, seed %llu)\n",
                static_cast<unsigned long long>(seed));
    SuiteResult first = run_suite("full", seed, "");
    SuiteResult second = run_suite("full", seed, "");

    std::map<std::string, const plurilab::cli::SuiteCheck*> by_name;
    for (const auto& c : first.checks) by_name[c.name] = &c;

    int failures = 0;
    for (const auto& crit : kCriteria) {
        auto it = by_name.find(crit.check_name);
        if (it == by_name.end()) {
            std::printf("[FAIL] criterion %s: check missing\n", crit.label);
            ++failures;
            continue;
        }
        const auto& c = *it->second;
        bool ok = c.passed && (crit.time_limit == 0.0 || c.seconds < crit.time_limit);
        std::printf("[%s] criterion %s: %s (%.2f s%s)\n", ok ? "PASS" : "FAIL", crit.label,
                    c.detail.c_str(), c.seconds,
                    crit.time_limit > 0 ? (" / limit " + std::to_string(int(crit.time_limit)) + " s").c_str()
                                        : "");
        if (!ok) ++failures;
    }

    // criterion 9: identical seeds give byte-identical CSV artifacts
    bool deterministic = first.artifacts.size() == second.artifacts.size();
    if (deterministic) {
        for (size_t i = 0; i < first.artifacts.size(); ++i) {
            if (first.artifacts[i].first != second.artifacts[i].first ||
                first.artifacts[i].second != second.artifacts[i].second) {
                deterministic = false;
                break;
            }
        }
    }
    std::printf("[%s] criterion 9 determinism: %zu artifacts byte-compared across two full runs\n",
                deterministic ? "PASS" : "FAIL", first.artifacts.size());
    if (!deterministic) ++failures;

    bool within_budget = first.wall_seconds < 360.0;
    std::printf("[%s] total full-suite wall time %.2f s (budget 360 s)\n",
                within_budget ? "PASS" : "FAIL", first.wall_seconds);
    if (!within_budget) ++failures;

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
