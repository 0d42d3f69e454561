#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "config.hpp"
#include "runner.hpp"

using namespace plurilab::cli;

int main(int argc, char** argv) {
    CLI::App app{"plurilab: a numerical laboratory for positive (p,p)-currents"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string config_path;
    std::string kappa_str, grid_str, scales_str, z0_str;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "flat key = value experiment file");
        sub->add_option("--fixture", cfg.fixture, "fixture id (see list-fixtures)");
        sub->add_option("--seed", cfg.seed, "RNG seed (results are bit-reproducible per seed)");
        sub->add_option("--budget", cfg.budget, "max density evaluations per integral");
        sub->add_option("--tol", cfg.tol, "relative tolerance per integral");
        sub->add_option("--kappa", kappa_str, "paper | calibrated dd^c-term scaling");
        sub->add_option("--out", cfg.out, "CSV output path (suite: output directory)");
        sub->add_option("--grid", grid_str, "comma-separated radius grid");
        sub->add_option("--scales", scales_str, "comma list of |a| values or geometric,<ratio>,<count>");
        sub->add_option("--z0", z0_str, "base point, re,im pairs");
        sub->add_option("--r1", cfg.r1, "inner radius");
        sub->add_option("--r2", cfg.r2, "outer radius");
        sub->add_option("--r0", cfg.r0, "condition-integral endpoint");
        sub->add_option("--r", cfg.r, "ball radius");
        sub->add_option("--eps", cfg.eps, "inner annulus radius");
        sub->add_option("--k", cfg.k, "polydisc slab coordinate");
        sub->add_option("--p", cfg.p, "bidimension for calibration");
        sub->add_option("--kappa-artifact", cfg.kappa_artifact, "calibration artifact path");
    };

    std::vector<std::pair<std::string, std::string>> subs = {
        {"nu", "projective-mass profile over a radius grid"},
        {"lelong-number", "extrapolate nu to r -> 0"},
        {"lambda", "corrected monotone Lambda profile"},
        {"conditions", "Dini and dd^c condition integrals plus the psi criterion"},
        {"jensen", "Lelong-Jensen identity residual on an annulus"},
        {"calibrate", "fit the dd^c-term constant kappa and store the artifact"},
        {"alpha-mass", "annulus alpha-mass law for conic candidates"},
        {"cone", "dilatation-limit experiment"},
        {"conic-check", "dilatation invariance and the conic signature"},
        {"coeff-masses", "chart coefficient masses over U by index class"},
        {"blowup-mass", "lifted mass over the blow-up vs the nu bound"},
        {"restriction", "hypersurface restriction identity"},
        {"suite", "acceptance batch (profile quick|full)"},
        {"list-fixtures", "fixture registry"},
    };
    for (auto& [name, desc] : subs) {
        CLI::App* sub = app.add_subcommand(name, desc);
        add_common(sub);
        if (name == "suite") sub->add_option("--profile", cfg.profile, "quick | full");
        if (name == "list-fixtures") sub->add_option("filter", cfg.filter, "substring filter");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.operation = app.get_subcommands().front()->get_name();
        if (!config_path.empty()) apply_key_values(cfg, read_config_file(config_path));
        // flags typed on the command line override file values
        if (!kappa_str.empty()) {
            if (kappa_str == "paper") cfg.kappa_mode = KappaMode::paper;
            else if (kappa_str == "calibrated") cfg.kappa_mode = KappaMode::calibrated;
            else throw ConfigError{"--kappa: want paper or calibrated"};
        }
        if (!grid_str.empty()) cfg.grid = parse_double_list(grid_str);
        if (!scales_str.empty()) cfg.scales = parse_scale_list(scales_str);
        if (!z0_str.empty()) {
            auto reals = parse_double_list(z0_str);
            if (reals.size() % 2 != 0) throw ConfigError{"--z0: want re,im pairs"};
            cfg.z0.clear();
            for (size_t i = 0; i + 1 < reals.size(); i += 2) cfg.z0.emplace_back(reals[i], reals[i + 1]);
        }

        RunReport rep = run_experiment(cfg);
        std::fputs(rep.to_text().c_str(), stdout);
        return rep.exit_code;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.message.c_str());
        return kExitConfigError;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitCheckFailed;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNonConvergence;
    }
}
