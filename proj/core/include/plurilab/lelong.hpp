#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "plurilab/current.hpp"

namespace plurilab::lelong {

using currents::Current;
using currents::Options;
using forms::Point;
using numerics::ValueWithError;

enum class ProfileLabel { nu_T, nu_ddcT, Lambda, gamma_T, gamma_ddcT };

std::string to_string(ProfileLabel label);

/// Sampled map r -> value on a radius grid with per-point error bars.
struct RadialProfile {
    ProfileLabel label = ProfileLabel::nu_T;
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<double> errors;
    bool converged = true;

    std::string to_csv() const; // columns: r,value,error
};

/// nu_T(z0, r) = sigma_T(B(z0, r)) / r^{2p}.
ValueWithError nu(const Current& T, const Point& z0, double r, const Options& opt);

/// Shared-sample nu profile over a radius grid.
RadialProfile nu_profile(const Current& T, const Point& z0, std::span<const double> grid,
                         const Options& opt);

/// nu profile of the (declared or finite-difference) dd^c of T.
RadialProfile nu_ddc_profile(const Current& T, const Point& z0, std::span<const double> grid,
                             const Options& opt, const forms::DdcOptions& fd = {});

struct LelongNumberResult {
    enum class Kind { value, does_not_exist, inconclusive };
    Kind kind = Kind::inconclusive;
    double value = 0.0;
    double error = 0.0;
    double fitted_log_slope = 0.0; // slope of nu against log r when divergent
    RadialProfile profile;
};

/// Extrapolates nu(z0, r) to r -> 0. The grid must reach down to 1e-3.
LelongNumberResult lelong_number(const Current& T, const Point& z0, std::span<const double> grid,
                                 const Options& opt);

struct ConditionVerdict {
    enum class Kind { finite, divergent, inconclusive };
    Kind kind = Kind::inconclusive;
    double value = 0.0; // when finite
    double error = 0.0;
    int divergence_sign = 0; // +1 / -1 when divergent
};

/// A scalar condition integral of the form int_0^{r0} f(t) dt with a
/// possibly singular endpoint at 0, classified by a fitted exponent.
struct ConditionReport {
    std::string name;
    double r0 = 0.0;
    ConditionVerdict verdict;
    double fitted_exponent = 0.0;
    RadialProfile integrand; // the sampled integrand over the t-grid

    bool finite() const { return verdict.kind == ConditionVerdict::Kind::finite; }
    bool divergent() const { return verdict.kind == ConditionVerdict::Kind::divergent; }
    std::string to_csv() const;
    std::string to_text() const;
};

/// Classify and evaluate a 1-d integral from integrand samples on a log grid.
/// Exposed for the other condition-style integrals in the analysis module.
ConditionVerdict classify_log_integral(std::span<const double> t, std::span<const double> f,
                                       std::span<const double> ferr, double* fitted_exponent);

/// Plain 1-d integral of sampled values over [t.front(), t.back()] with no
/// endpoint extrapolation (trapezoid in log t, Richardson-refined).
ValueWithError log_grid_integral(std::span<const double> t, std::span<const double> f,
                                 std::span<const double> ferr);

/// Log-spaced grid of `count` nodes on [lo, hi].
std::vector<double> log_grid(double lo, double hi, int count);

/// Lambda_{z0}(r) = nu(r) + kappa * int_0^r (t^{2p}/r^{2p} - 1) nu_ddc(t)/t dt.
/// The correction constant kappa comes from the Jensen calibration artifact.
/// Throws on a divergent inner integral (the dd^c condition fails).
ValueWithError lambda(const Current& T, const Point& z0, double r, double kappa, const Options& opt);

RadialProfile lambda_profile(const Current& T, const Point& z0, std::span<const double> grid,
                             double kappa, const Options& opt);

/// int_0^{r0} nu_ddc(z0, t)/t dt with the singular-endpoint policy.
ConditionReport condition_C(const Current& T, const Point& z0, double r0, const Options& opt);

/// int_0^{r0} |nu(r) - nu(0)|/r dr; divergent when the Lelong number does
/// not exist. The extrapolation residual is folded into the error.
ConditionReport dini(const Current& T, double r0, const Options& opt);

/// gamma_T(r) = nu(r) - nu(r/2) and the same for dd^c T.
std::pair<ValueWithError, ValueWithError> gammas(const Current& T, double r, const Options& opt);

struct PsiReport {
    ConditionReport main;      // int r |log r| psi(r) dr
    ConditionReport gamma_log; // int (gamma_T + gamma_ddc)(r)/r |log r| dr (equivalent form)
    ConditionReport dini_part;
    ConditionReport condition_part;
};

/// psi(r) = |gamma_T + gamma_ddc|(r)/r^2 + sqrt(|gamma_T + gamma_ddc|(r))/r,
/// integrated against r |log r|; also reports the equivalent split integrals.
PsiReport psi_criterion(const Current& T, double r0, const Options& opt);

} // namespace plurilab::lelong
