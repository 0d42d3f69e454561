#include "plurilab/lelong.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "plurilab/csv.hpp"

namespace plurilab::lelong {

using forms::Complex;
using numerics::KahanSum;

std::string to_string(ProfileLabel label) {
    switch (label) {
        case ProfileLabel::nu_T: return "nu_T";
        case ProfileLabel::nu_ddcT: return "nu_ddcT";
        case ProfileLabel::Lambda: return "Lambda";
        case ProfileLabel::gamma_T: return "gamma_T";
        default: return "gamma_ddcT";
    }
}

std::string RadialProfile::to_csv() const {
    csv::Table t({"r", "value", "error"});
    for (size_t i = 0; i < grid.size(); ++i)
        t.add_row({csv::format_double(grid[i]), csv::format_double(values[i]), csv::format_double(errors[i])});
    return t.to_string();
}

std::vector<double> log_grid(double lo, double hi, int count) {
    std::vector<double> g(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) g[size_t(i)] = lo * std::pow(hi / lo, double(i) / (count - 1));
    g.back() = hi;
    return g;
}

namespace {
void check_domain(const Current& T, const Point& z0, double r) {
    double reach = std::sqrt(forms::abs2(z0)) + r;
    if (reach > T.domain_radius() * (1.0 + 1e-12))
        throw std::domain_error("ball exceeds the working domain of " +
                                (T.name().empty() ? std::string("the current") : T.name()));
}
} // namespace

ValueWithError nu(const Current& T, const Point& z0, double r, const Options& opt) {
    check_domain(T, z0, r);
    auto mass = currents::sigma_mass(T, quadrature::Ball{z0, r}, opt);
    double scale = std::pow(r, -2.0 * T.bidim());
    return {mass.value.real() * scale, (mass.error + std::abs(mass.value.imag())) * scale};
}

RadialProfile nu_profile(const Current& T, const Point& z0, std::span<const double> grid,
                         const Options& opt) {
    check_domain(T, z0, grid.back());
    auto prof = currents::sigma_profile(T, z0, grid, opt);
    RadialProfile out;
    out.label = ProfileLabel::nu_T;
    out.grid.assign(grid.begin(), grid.end());
    out.converged = prof.converged;
    out.values.resize(grid.size());
    out.errors.resize(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        double scale = std::pow(grid[i], -2.0 * T.bidim());
        out.values[i] = prof.values[i] * scale;
        out.errors[i] = prof.errors[i] * scale;
    }
    return out;
}

RadialProfile nu_ddc_profile(const Current& T, const Point& z0, std::span<const double> grid,
                             const Options& opt, const forms::DdcOptions& fd) {
    Current D = currents::ddc(T, fd);
    RadialProfile out = nu_profile(D, z0, grid, opt);
    out.label = ProfileLabel::nu_ddcT;
    return out;
}

namespace {
struct LinearFit {
    double intercept = 0.0, slope = 0.0, residual = 0.0;
};

LinearFit fit_linear(std::span<const double> x, std::span<const double> y) {
    size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LinearFit f;
    double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-30) {
        f.intercept = sy / double(n);
        return f;
    }
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / double(n);
    for (size_t i = 0; i < n; ++i)
        f.residual = std::max(f.residual, std::abs(y[i] - f.intercept - f.slope * x[i]));
    return f;
}

/// Trapezoid in s = log t with every-other-node Richardson extrapolation.
struct TrapezoidResult {
    double value = 0.0;
    double error = 0.0;
};

TrapezoidResult log_trapezoid(std::span<const double> t, std::span<const double> f,
                              std::span<const double> ferr) {
    size_t n = t.size();
    TrapezoidResult out;
    if (n < 3) return out;
    auto trap = [&](size_t stride) {
        KahanSum acc;
        size_t prev = 0;
        for (size_t i = stride; i < n; i += stride) {
            double s0 = std::log(t[prev]), s1 = std::log(t[i]);
            acc.add(0.5 * (f[prev] * t[prev] + f[i] * t[i]) * (s1 - s0));
            prev = i;
        }
        if (prev != n - 1) {
            double s0 = std::log(t[prev]), s1 = std::log(t[n - 1]);
            acc.add(0.5 * (f[prev] * t[prev] + f[n - 1] * t[n - 1]) * (s1 - s0));
        }
        return acc.get();
    };
    double full = trap(1), half = trap(2);
    out.value = full + (full - half) / 3.0;
    out.error = std::abs(full - half) * 0.34 + 1e-16 * std::abs(full);
    KahanSum errs;
    size_t prev = 0;
    for (size_t i = 1; i < n; ++i) {
        double ds = std::log(t[i]) - std::log(t[prev]);
        errs.add(0.5 * (ferr[prev] * t[prev] + ferr[i] * t[i]) * ds);
        prev = i;
    }
    out.error += errs.get();
    return out;
}
} // namespace

ValueWithError log_grid_integral(std::span<const double> t, std::span<const double> f,
                                 std::span<const double> ferr) {
    TrapezoidResult tr = log_trapezoid(t, f, ferr);
    return {tr.value, tr.error};
}

ConditionVerdict classify_log_integral(std::span<const double> t, std::span<const double> f,
                                       std::span<const double> ferr, double* fitted_exponent) {
    ConditionVerdict v;
    size_t n = t.size();
    double scale = 0.0;
    for (size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(f[i]) * t[i]);
    if (fitted_exponent) *fitted_exponent = 0.0;
    if (scale < 1e-13) {
        v.kind = ConditionVerdict::Kind::finite;
        v.value = 0.0;
        double e = 0.0;
        for (size_t i = 0; i < n; ++i) e = std::max(e, ferr[i] * t[i]);
        v.error = e;
        return v;
    }

    // endpoint exponent from the smallest usable nodes; nodes that are
    // statistically zero (inside their own error bars) carry no slope
    // information and are skipped
    std::vector<double> lx, ly;
    int sign_pos = 0, sign_neg = 0;
    for (size_t i = 0; i < std::min<size_t>(n, 12); ++i) {
        if (std::abs(f[i]) * t[i] > 1e-12 * scale && std::abs(f[i]) > 3.0 * ferr[i]) {
            lx.push_back(std::log(t[i]));
            ly.push_back(std::log(std::abs(f[i])));
            (f[i] >= 0 ? sign_pos : sign_neg)++;
        }
    }
    double exponent = 2.0; // vanishing near the endpoint: treat as harmless
    double fit_res = 0.0;
    if (lx.size() >= 4) {
        LinearFit fit = fit_linear(lx, ly);
        exponent = fit.slope;
        fit_res = fit.residual;
    }
    if (fitted_exponent) *fitted_exponent = exponent;

    if (exponent <= -0.9) {
        if (fit_res > 1.0 && sign_pos > 0 && sign_neg > 0) {
            v.kind = ConditionVerdict::Kind::inconclusive;
            return v;
        }
        v.kind = ConditionVerdict::Kind::divergent;
        v.divergence_sign = (sign_pos >= sign_neg) ? 1 : -1;
        return v;
    }

    TrapezoidResult tr = log_trapezoid(t, f, ferr);
    // endpoint tail below the first node, from the fitted power
    double tail = 0.0;
    if (lx.size() >= 4 && exponent > -0.9) {
        double c = std::abs(f[0]);
        tail = c * t[0] / (exponent + 1.0);
        if (f[0] < 0) tail = -tail;
    }
    v.kind = ConditionVerdict::Kind::finite;
    v.value = tr.value + tail;
    v.error = tr.error + std::abs(tail);
    return v;
}

LelongNumberResult lelong_number(const Current& T, const Point& z0, std::span<const double> grid,
                                 const Options& opt) {
    if (grid.front() > 1e-3 * (1.0 + 1e-9))
        throw std::invalid_argument("lelong_number: grid must reach down to 1e-3");
    LelongNumberResult out;
    out.profile = nu_profile(T, z0, grid, opt);

    size_t K = std::min<size_t>(8, grid.size());
    std::vector<double> lx(K), vy(K), x2(K);
    double avg_err = 0.0;
    for (size_t i = 0; i < K; ++i) {
        lx[i] = std::log(grid[i]);
        vy[i] = out.profile.values[i];
        x2[i] = grid[i] * grid[i];
        avg_err += out.profile.errors[i] / double(K);
    }
    LinearFit logfit = fit_linear(lx, vy);
    if (logfit.slope < -0.01 && logfit.residual < 0.5 * std::abs(logfit.slope)) {
        out.kind = LelongNumberResult::Kind::does_not_exist;
        out.fitted_log_slope = logfit.slope;
        return out;
    }
    LinearFit sqfit = fit_linear(x2, vy);
    out.value = sqfit.intercept;
    out.error = 2.0 * sqfit.residual + avg_err;
    double ref = std::max(std::abs(out.value), 0.1);
    out.kind = (sqfit.residual > std::max(0.03 * ref, 20.0 * avg_err + 1e-9))
                   ? LelongNumberResult::Kind::inconclusive
                   : LelongNumberResult::Kind::value;
    out.fitted_log_slope = logfit.slope;
    return out;
}

std::string ConditionReport::to_csv() const { return integrand.to_csv(); }

std::string ConditionReport::to_text() const {
    std::ostringstream os;
    os << name << " over (0, " << r0 << "]: ";
    switch (verdict.kind) {
        case ConditionVerdict::Kind::finite:
            os << "finite, value " << verdict.value << " +- " << verdict.error;
            break;
        case ConditionVerdict::Kind::divergent:
            os << "divergent (" << (verdict.divergence_sign >= 0 ? "+" : "-") << "inf)";
            break;
        default: os << "inconclusive";
    }
    os << ", endpoint exponent " << fitted_exponent;
    return os.str();
}

ConditionReport condition_C(const Current& T, const Point& z0, double r0, const Options& opt) {
    ConditionReport rep;
    rep.name = "ddc_condition";
    rep.r0 = r0;
    auto grid = log_grid(1e-4 * r0, r0, 129);
    RadialProfile ddc = nu_ddc_profile(T, z0, grid, opt);
    rep.integrand.label = ProfileLabel::nu_ddcT;
    rep.integrand.grid = grid;
    rep.integrand.converged = ddc.converged;
    rep.integrand.values.resize(grid.size());
    rep.integrand.errors.resize(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        rep.integrand.values[i] = ddc.values[i] / grid[i];
        rep.integrand.errors[i] = ddc.errors[i] / grid[i];
    }
    rep.verdict = classify_log_integral(grid, rep.integrand.values, rep.integrand.errors, &rep.fitted_exponent);
    return rep;
}

ConditionReport dini(const Current& T, double r0, const Options& opt) {
    ConditionReport rep;
    rep.name = "dini";
    rep.r0 = r0;
    Point z0(size_t(T.dim()), Complex(0.0));
    auto ext_grid = log_grid(1e-3, std::max(0.5 * r0, 2e-3), 17);
    LelongNumberResult ln = lelong_number(T, z0, ext_grid, opt);

    auto grid = log_grid(1e-4 * r0, r0, 129);
    RadialProfile nus = nu_profile(T, z0, grid, opt);
    rep.integrand.label = ProfileLabel::nu_T;
    rep.integrand.grid = grid;
    rep.integrand.converged = nus.converged;
    rep.integrand.values.resize(grid.size());
    rep.integrand.errors.resize(grid.size());

    if (ln.kind == LelongNumberResult::Kind::does_not_exist) {
        for (size_t i = 0; i < grid.size(); ++i) {
            rep.integrand.values[i] = std::abs(nus.values[i]) / grid[i];
            rep.integrand.errors[i] = nus.errors[i] / grid[i];
        }
        rep.verdict.kind = ConditionVerdict::Kind::divergent;
        rep.verdict.divergence_sign = 1;
        rep.fitted_exponent = -1.0;
        return rep;
    }
    if (ln.kind == LelongNumberResult::Kind::inconclusive) {
        rep.verdict.kind = ConditionVerdict::Kind::inconclusive;
        return rep;
    }
    for (size_t i = 0; i < grid.size(); ++i) {
        rep.integrand.values[i] = std::abs(nus.values[i] - ln.value) / grid[i];
        rep.integrand.errors[i] = (nus.errors[i] + ln.error) / grid[i];
    }
    rep.verdict = classify_log_integral(grid, rep.integrand.values, rep.integrand.errors, &rep.fitted_exponent);
    return rep;
}

ValueWithError lambda(const Current& T, const Point& z0, double r, double kappa, const Options& opt) {
    int p = T.bidim();
    auto grid = log_grid(1e-4 * r, r, 129);
    RadialProfile ddc = nu_ddc_profile(T, z0, grid, opt);
    std::vector<double> f(grid.size()), ferr(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        double w = std::pow(grid[i] / r, 2.0 * p) - 1.0;
        f[i] = w * ddc.values[i] / grid[i];
        ferr[i] = std::abs(w) * ddc.errors[i] / grid[i];
    }
    double expn = 0.0;
    ConditionVerdict inner = classify_log_integral(grid, f, ferr, &expn);
    if (inner.kind != ConditionVerdict::Kind::finite)
        throw std::domain_error("lambda: divergent inner integral (the dd^c condition fails)");
    ValueWithError base = nu(T, z0, r, opt);
    return {base.value + kappa * inner.value, base.error + std::abs(kappa) * inner.error};
}

RadialProfile lambda_profile(const Current& T, const Point& z0, std::span<const double> grid,
                             double kappa, const Options& opt) {
    int p = T.bidim();
    double r_max = grid.back();
    // one shared fine grid containing every requested radius
    std::vector<double> fine = log_grid(1e-4 * grid.front(), r_max, 161);
    fine.insert(fine.end(), grid.begin(), grid.end());
    std::sort(fine.begin(), fine.end());
    fine.erase(std::unique(fine.begin(), fine.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12 * std::max(a, b); }),
               fine.end());
    RadialProfile ddc = nu_ddc_profile(T, z0, fine, opt);
    RadialProfile nus = nu_profile(T, z0, grid, opt);

    RadialProfile out;
    out.label = ProfileLabel::Lambda;
    out.grid.assign(grid.begin(), grid.end());
    out.values.resize(grid.size());
    out.errors.resize(grid.size());
    out.converged = ddc.converged && nus.converged;
    for (size_t gi = 0; gi < grid.size(); ++gi) {
        double r = grid[gi];
        std::vector<double> t, f, ferr;
        for (size_t i = 0; i < fine.size() && fine[i] <= r * (1.0 + 1e-12); ++i) {
            double w = std::pow(fine[i] / r, 2.0 * p) - 1.0;
            t.push_back(fine[i]);
            f.push_back(w * ddc.values[i] / fine[i]);
            ferr.push_back(std::abs(w) * ddc.errors[i] / fine[i]);
        }
        double expn = 0.0;
        ConditionVerdict inner = classify_log_integral(t, f, ferr, &expn);
        if (inner.kind != ConditionVerdict::Kind::finite)
            throw std::domain_error("lambda: divergent inner integral (the dd^c condition fails)");
        out.values[gi] = nus.values[gi] + kappa * inner.value;
        out.errors[gi] = nus.errors[gi] + std::abs(kappa) * inner.error;
    }
    return out;
}

std::pair<ValueWithError, ValueWithError> gammas(const Current& T, double r, const Options& opt) {
    Point z0(size_t(T.dim()), Complex(0.0));
    std::vector<double> grid{0.5 * r, r};
    RadialProfile nus = nu_profile(T, z0, grid, opt);
    RadialProfile ddc = nu_ddc_profile(T, z0, grid, opt);
    ValueWithError gt{nus.values[1] - nus.values[0], nus.errors[1] + nus.errors[0]};
    ValueWithError gd{ddc.values[1] - ddc.values[0], ddc.errors[1] + ddc.errors[0]};
    return {gt, gd};
}

PsiReport psi_criterion(const Current& T, double r0, const Options& opt) {
    PsiReport rep;
    Point z0(size_t(T.dim()), Complex(0.0));
    auto grid = log_grid(1e-4 * r0, r0, 65);
    std::vector<double> all;
    for (double t : grid) {
        all.push_back(0.5 * t);
        all.push_back(t);
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12 * std::max(a, b); }),
              all.end());
    RadialProfile nus = nu_profile(T, z0, all, opt);
    RadialProfile ddc = nu_ddc_profile(T, z0, all, opt);
    auto at = [&](const RadialProfile& p, double t) {
        auto it = std::lower_bound(p.grid.begin(), p.grid.end(), t * (1.0 - 1e-9));
        return size_t(it - p.grid.begin());
    };
    std::vector<double> psi(grid.size()), psi_err(grid.size());
    std::vector<double> glog(grid.size()), glog_err(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        double t = grid[i];
        size_t ih = at(nus, t), il = at(nus, 0.5 * t);
        double gsum = (nus.values[ih] - nus.values[il]) + (ddc.values[ih] - ddc.values[il]);
        double gerr = nus.errors[ih] + nus.errors[il] + ddc.errors[ih] + ddc.errors[il];
        double ag = std::abs(gsum);
        double psival = ag / (t * t) + std::sqrt(ag) / t;
        double psierr = gerr / (t * t) + (ag > 1e-30 ? 0.5 * gerr / std::sqrt(ag) : 0.0) / t;
        double lt = std::abs(std::log(t));
        psi[i] = t * lt * psival;
        psi_err[i] = t * lt * psierr;
        glog[i] = ag / t * lt;
        glog_err[i] = gerr / t * lt;
    }
    rep.main.name = "psi_criterion";
    rep.main.r0 = r0;
    rep.main.integrand.grid = grid;
    rep.main.integrand.values = psi;
    rep.main.integrand.errors = psi_err;
    rep.main.verdict = classify_log_integral(grid, psi, psi_err, &rep.main.fitted_exponent);
    rep.gamma_log.name = "gamma_log";
    rep.gamma_log.r0 = r0;
    rep.gamma_log.integrand.grid = grid;
    rep.gamma_log.integrand.values = glog;
    rep.gamma_log.integrand.errors = glog_err;
    rep.gamma_log.verdict = classify_log_integral(grid, glog, glog_err, &rep.gamma_log.fitted_exponent);
    rep.dini_part = dini(T, r0, opt);
    rep.condition_part = condition_C(T, z0, r0, opt);
    return rep;
}

} // namespace plurilab::lelong
