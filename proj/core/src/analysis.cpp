#include "plurilab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "plurilab/csv.hpp"
#include "plurilab/reference_forms.hpp"

namespace plurilab::analysis {

using currents::SignClass;
using forms::Complex;
using forms::Form;
using lelong::ConditionVerdict;
using lelong::LelongNumberResult;
using quadrature::Annulus;

namespace {
double binomial(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

ValueWithError nu_ddc_at_zero(const Current& T, const Options& opt) {
    Current D = currents::ddc(T);
    auto grid = lelong::log_grid(1e-3, 0.25, 13);
    Point z0(size_t(T.dim()), Complex(0.0));
    LelongNumberResult ln = lelong::lelong_number(D, z0, grid, opt);
    if (ln.kind != LelongNumberResult::Kind::value)
        throw std::domain_error("nu_ddc(0) extrapolation failed");
    return {ln.value, ln.error};
}
} // namespace

std::string JensenReport::to_text() const {
    std::ostringstream os;
    os << "jensen " << fixture << " (" << r1 << "," << r2 << ") kappa=" << kappa << ": lhs=" << lhs.value
       << " alpha=" << alpha_term.value << " ddc=" << ddc_sum() << " residual=" << residual
       << " budget=" << error_budget << (ok() ? " [ok]" : " [RESIDUAL EXCEEDS BUDGET]");
    return os.str();
}

JensenReport jensen_check(const Current& S, const Point& z0, double r1, double r2, double kappa,
                          const Options& opt) {
    if (!(0.0 < r1 && r1 < r2)) throw std::invalid_argument("jensen_check: need 0 < r1 < r2");
    JensenReport rep;
    rep.fixture = S.name();
    rep.r1 = r1;
    rep.r2 = r2;
    rep.kappa = kappa;
    int p = S.bidim();

    std::vector<double> ends{r1, r2};
    auto nus = lelong::nu_profile(S, z0, ends, opt);
    rep.lhs = {nus.values[1] - nus.values[0], nus.errors[1] + nus.errors[0]};

    auto am = currents::alpha_beta_mass(S, z0, p, Annulus{z0, r1, r2}, opt);
    rep.alpha_term = {am.value.real(), am.error + std::abs(am.value.imag())};

    // m(t) = integral over B(t) of ddc S ^ beta^{p-1}, one shared profile
    Current D = currents::ddc(S);
    auto gridA = lelong::log_grid(1e-4 * r1, r1, 65);
    auto gridB = lelong::log_grid(r1, r2, 65);
    std::vector<double> fine = gridA;
    fine.insert(fine.end(), gridB.begin() + 1, gridB.end());
    auto mprof = currents::sigma_profile(D, z0, fine, opt);

    // term1 over [r1, r2]
    {
        std::vector<double> t, f, ferr;
        double w2 = std::pow(r2, -2.0 * p);
        for (size_t i = gridA.size() - 1; i < fine.size(); ++i) {
            double w = std::pow(fine[i], -2.0 * p) - w2;
            t.push_back(fine[i]);
            f.push_back(w * fine[i] * mprof.values[i]);
            ferr.push_back(std::abs(w) * fine[i] * mprof.errors[i]);
        }
        rep.ddc_term1 = lelong::log_grid_integral(t, f, ferr);
    }
    // term2 over (0, r1], endpoint handled by the classifier
    {
        std::vector<double> t, f, ferr;
        for (size_t i = 0; i < gridA.size(); ++i) {
            t.push_back(fine[i]);
            f.push_back(fine[i] * mprof.values[i]);
            ferr.push_back(fine[i] * mprof.errors[i]);
        }
        double expn = 0.0;
        ConditionVerdict inner = lelong::classify_log_integral(t, f, ferr, &expn);
        if (inner.kind != ConditionVerdict::Kind::finite)
            throw std::domain_error("jensen_check: inner dd^c integral failed to converge");
        double scale = std::pow(r1, -2.0 * p) - std::pow(r2, -2.0 * p);
        rep.ddc_term2 = {scale * inner.value, scale * inner.error};
    }

    rep.residual = std::abs(rep.lhs.value - rep.alpha_term.value - kappa * rep.ddc_sum());
    rep.error_budget = rep.lhs.error + rep.alpha_term.error +
                       std::abs(kappa) * (rep.ddc_term1.error + rep.ddc_term2.error);
    return rep;
}

std::string CalibrationArtifact::to_text() const {
    std::ostringstream os;
    os << "p = " << p << "\n";
    os << "kappa = " << csv::format_double(kappa) << "\n";
    os << "error = " << csv::format_double(error) << "\n";
    os << "fixtures = ";
    for (size_t i = 0; i < fixtures.size(); ++i) os << (i ? "," : "") << fixtures[i];
    os << "\n";
    return os.str();
}

void CalibrationArtifact::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("calibration: cannot open " + path);
    f << to_text();
}

CalibrationArtifact CalibrationArtifact::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("calibration: cannot open " + path);
    CalibrationArtifact art;
    std::string line;
    while (std::getline(f, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            s.erase(0, s.find_first_not_of(" \t"));
            auto e = s.find_last_not_of(" \t\r");
            s.erase(e == std::string::npos ? 0 : e + 1);
        };
        trim(key);
        trim(val);
        if (key == "p") art.p = std::stoi(val);
        else if (key == "kappa") art.kappa = std::stod(val);
        else if (key == "error") art.error = std::stod(val);
        else if (key == "fixtures") {
            std::stringstream ss(val);
            std::string item;
            while (std::getline(ss, item, ',')) art.fixtures.push_back(item);
        }
    }
    return art;
}

CalibrationArtifact calibrate_kappa(int p, std::span<const Current> fixtures,
                                    std::span<const std::pair<double, double>> radius_pairs,
                                    const Options& opt) {
    if (fixtures.size() < 2) throw std::invalid_argument("calibrate_kappa: need at least two fixtures");
    std::vector<double> ys, ds, errs;
    CalibrationArtifact art;
    art.p = p;
    for (const auto& T : fixtures) {
        if (T.bidim() != p) throw std::invalid_argument("calibrate_kappa: fixture bidimension mismatch");
        art.fixtures.push_back(T.name());
        Point z0(size_t(T.dim()), Complex(0.0));
        for (const auto& [r1, r2] : radius_pairs) {
            if (r2 > T.domain_radius()) continue;
            JensenReport rep = jensen_check(T, z0, r1, r2, 1.0, opt);
            ys.push_back(rep.lhs.value - rep.alpha_term.value);
            ds.push_back(rep.ddc_sum());
            errs.push_back(rep.error_budget);
        }
    }
    double dd = 0.0, dy = 0.0, dscale = 0.0, escale = 0.0;
    for (size_t i = 0; i < ds.size(); ++i) {
        dd += ds[i] * ds[i];
        dy += ds[i] * ys[i];
        dscale = std::max(dscale, std::abs(ds[i]));
        escale = std::max(escale, errs[i]);
    }
    if (dscale <= 50.0 * (escale + 1e-12))
        throw std::runtime_error("calibrate_kappa: dd^c terms carry no signal (closed fixtures?)");
    art.kappa = dy / dd;

    double resid2 = 0.0, prop = 0.0;
    for (size_t i = 0; i < ds.size(); ++i) {
        double r = ys[i] - art.kappa * ds[i];
        resid2 += r * r;
        prop += errs[i] * std::abs(ds[i]);
        if (std::abs(ds[i]) > 0.2 * dscale) {
            double ki = ys[i] / ds[i];
            double tol = std::max(0.05, 10.0 * errs[i] / std::abs(ds[i]));
            if (std::abs(ki - art.kappa) > tol)
                throw std::runtime_error("calibrate_kappa: fixtures disagree beyond tolerance");
        }
    }
    size_t m = ds.size();
    art.error = std::sqrt(resid2 / std::max<size_t>(m - 1, 1)) / std::sqrt(dd) + prop / dd;
    return art;
}

AlphaMassReport alpha_mass_identity(const Current& T, double eps, double r, double kappa,
                                    const Options& opt, double kappa_error) {
    if (!(0.0 < eps && eps < r)) throw std::invalid_argument("alpha_mass_identity: need 0 < eps < r");
    AlphaMassReport rep;
    rep.eps = eps;
    rep.r = r;
    Point z0(size_t(T.dim()), Complex(0.0));
    auto am = currents::alpha_beta_mass(T, z0, T.bidim(), Annulus{z0, eps, r}, opt);
    rep.annulus_mass = {am.value.real(), am.error + std::abs(am.value.imag())};
    rep.nu_ddc_zero = nu_ddc_at_zero(T, opt);
    double lg = std::log(eps / r);
    rep.literal_rhs = rep.nu_ddc_zero.value * lg;
    rep.kappa_rhs = kappa * rep.literal_rhs;
    double tol = 3.0 * (rep.annulus_mass.error + std::abs(lg) * rep.nu_ddc_zero.error) +
                 1e-9 * std::max(1.0, std::abs(rep.annulus_mass.value));
    rep.matches_literal = std::abs(rep.annulus_mass.value - rep.literal_rhs) <= tol;
    double kappa_tol = tol * std::max(1.0, std::abs(kappa)) + 3.0 * kappa_error * std::abs(rep.literal_rhs);
    rep.matches_kappa = std::abs(rep.annulus_mass.value - rep.kappa_rhs) <= kappa_tol;
    return rep;
}

std::string ConvergenceReport::to_csv() const {
    csv::Table t({"k", "abs_a", "form", "re", "im", "error"});
    for (size_t f = 0; f < form_ids.size(); ++f)
        for (size_t k = 0; k < scales.size(); ++k)
            t.add_row({std::to_string(k), csv::format_double(std::abs(scales[k])), form_ids[f],
                       csv::format_double(pairings[f][k].value.real()),
                       csv::format_double(pairings[f][k].value.imag()),
                       csv::format_double(pairings[f][k].error)});
    return t.to_string();
}

std::string ConvergenceReport::to_text() const {
    std::ostringstream os;
    os << "cone experiment: ";
    switch (verdict) {
        case Verdict::converged: os << (constant_sequence ? "converged (constant pairings)" : "converged"); break;
        case Verdict::diverged: os << "diverged"; break;
        default: os << "inconclusive";
    }
    if (!constant_sequence) os << ", fitted decay exponent " << fitted_decay;
    if (!hypothesis_ok) os << " [hypothesis failed: " << hypothesis_note << "]";
    return os.str();
}

ConvergenceReport cone_experiment(const Current& T, const DilatationFamily& family,
                                  std::span<const TestForm> test_forms, const Options& opt) {
    if (family.scales.size() < 4) throw std::invalid_argument("cone_experiment: need at least 4 scales");
    ConvergenceReport rep;
    rep.scales = family.scales;

    double r0 = std::min(1.0, T.domain_radius());
    ConditionReport dini_rep = lelong::dini(T, r0, opt);
    rep.hypothesis_ok = dini_rep.finite();
    if (!dini_rep.finite()) rep.hypothesis_note = "Dini integral " + std::string(dini_rep.divergent() ? "divergent" : "inconclusive");
    if (T.sign_class() == SignClass::plurisuperharmonic) {
        Point z0(size_t(T.dim()), Complex(0.0));
        ConditionReport cc = lelong::condition_C(T, z0, r0, opt);
        if (!cc.finite()) {
            rep.hypothesis_ok = false;
            rep.hypothesis_note += std::string(rep.hypothesis_note.empty() ? "" : "; ") +
                                   "dd^c condition integral " + (cc.divergent() ? "divergent" : "inconclusive");
        }
    }

    size_t K = family.scales.size();
    rep.pairings.resize(test_forms.size());
    for (size_t f = 0; f < test_forms.size(); ++f) {
        rep.form_ids.push_back(test_forms[f].id);
        rep.pairings[f].resize(K);
    }
    for (size_t k = 0; k < K; ++k) {
        Current Tk = currents::dilate_pullback(T, family.scales[k]);
        for (size_t f = 0; f < test_forms.size(); ++f)
            rep.pairings[f][k] = currents::pair(Tk, test_forms[f], opt);
    }

    double scale = 0.0;
    for (const auto& row : rep.pairings)
        for (const auto& pr : row) scale = std::max(scale, std::abs(pr.value));

    rep.cauchy.resize(K - 1);
    rep.cauchy_err.resize(K - 1);
    for (size_t k = 0; k + 1 < K; ++k) {
        double d = 0.0, e = 0.0;
        for (size_t f = 0; f < test_forms.size(); ++f) {
            d = std::max(d, std::abs(rep.pairings[f][k + 1].value - rep.pairings[f][k].value));
            e = std::max(e, rep.pairings[f][k + 1].error + rep.pairings[f][k].error);
        }
        rep.cauchy[k] = d;
        rep.cauchy_err[k] = e;
    }

    bool constant = true;
    for (size_t k = 0; k + 1 < K; ++k)
        if (rep.cauchy[k] > 3.0 * rep.cauchy_err[k] + 1e-11 * std::max(scale, 1.0)) constant = false;
    rep.constant_sequence = constant;

    auto fill_limits = [&]() {
        for (size_t f = 0; f < test_forms.size(); ++f) {
            rep.limits.push_back(rep.pairings[f].back().value);
            rep.limit_errors.push_back(rep.pairings[f].back().error + rep.cauchy.back());
        }
    };

    if (constant) {
        rep.verdict = ConvergenceReport::Verdict::converged;
        rep.fitted_decay = 0.0;
        fill_limits();
        return rep;
    }

    std::vector<double> lx, ly;
    for (size_t k = 0; k + 1 < K; ++k) {
        if (rep.cauchy[k] > 3.0 * rep.cauchy_err[k] + 1e-13 * std::max(scale, 1.0)) {
            lx.push_back(std::log(std::abs(family.scales[k])));
            ly.push_back(std::log(rep.cauchy[k]));
        }
    }
    if (lx.size() >= 3) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
        }
        double det = double(lx.size()) * sxx - sx * sx;
        rep.fitted_decay = (double(lx.size()) * sxy - sx * sy) / det;
    }

    size_t m = rep.cauchy.size();
    bool tail_decreasing = m >= 3 && rep.cauchy[m - 1] < rep.cauchy[m - 2] && rep.cauchy[m - 2] < rep.cauchy[m - 3];
    if (tail_decreasing && rep.fitted_decay > 0.5) {
        rep.verdict = ConvergenceReport::Verdict::converged;
        fill_limits();
    } else if (rep.fitted_decay < 0.05 &&
               rep.cauchy.back() > 10.0 * (rep.cauchy_err.back() + 1e-12 * std::max(scale, 1.0))) {
        rep.verdict = ConvergenceReport::Verdict::diverged;
    } else {
        rep.verdict = ConvergenceReport::Verdict::inconclusive;
    }
    return rep;
}

InterleavingReport corollary2_check(const Current& T, const DilatationFamily& a,
                                    const DilatationFamily& b, std::span<const TestForm> test_forms,
                                    const Options& opt) {
    if (a.scales.size() != b.scales.size())
        throw std::invalid_argument("corollary2_check: sequence lengths differ");
    InterleavingReport rep;
    for (size_t k = 0; k < a.scales.size(); ++k) {
        double r1 = std::abs(a.scales[k] / b.scales[k]);
        rep.ratio_bound = std::max({rep.ratio_bound, r1, 1.0 / r1});
    }
    double scale = 0.0;
    for (size_t k = 0; k < a.scales.size(); ++k) {
        Current Ta = currents::dilate_pullback(T, a.scales[k]);
        Current Tb = currents::dilate_pullback(T, b.scales[k]);
        double d = 0.0, e = 0.0;
        for (const auto& phi : test_forms) {
            auto pa = currents::pair(Ta, phi, opt);
            auto pb = currents::pair(Tb, phi, opt);
            d = std::max(d, std::abs(pa.value - pb.value));
            e = std::max(e, pa.error + pb.error);
            scale = std::max({scale, std::abs(pa.value), std::abs(pb.value)});
        }
        rep.differences.push_back(d);
        rep.errors.push_back(e);
    }
    double d0 = rep.differences.front(), dl = rep.differences.back();
    rep.ok = dl <= std::max(3.0 * rep.errors.back() + 1e-11 * std::max(scale, 1.0), 0.05 * d0);
    return rep;
}

ConicReport conic_check(const Current& T, std::span<const Complex> a_samples,
                        std::span<const TestForm> test_forms, double kappa, const Options& opt,
                        double kappa_error) {
    ConicReport rep;
    double scale = 0.0;
    double drift = 0.0, drift_err = 0.0;
    std::vector<QuadratureResult> base;
    for (const auto& phi : test_forms) {
        base.push_back(currents::pair(T, phi, opt));
        scale = std::max(scale, std::abs(base.back().value));
    }
    for (const auto& a : a_samples) {
        Current Ta = currents::dilate_pullback(T, a);
        for (size_t f = 0; f < test_forms.size(); ++f) {
            auto pa = currents::pair(Ta, test_forms[f], opt);
            drift = std::max(drift, std::abs(pa.value - base[f].value));
            drift_err = std::max(drift_err, pa.error + base[f].error);
        }
    }
    rep.worst_pairing_drift = drift;
    rep.pairing_drift_error = drift_err;
    rep.pairing_invariant = drift <= 3.0 * drift_err + 1e-10 * std::max(scale, 1.0);

    std::vector<double> grid;
    for (double r : {0.25, 0.5, 1.0, 2.0})
        if (r <= T.domain_radius()) grid.push_back(r);
    Point z0(size_t(T.dim()), Complex(0.0));
    auto nus = lelong::nu_profile(T, z0, grid, opt);
    double lo = nus.values[0], hi = nus.values[0], err = 0.0;
    for (size_t i = 0; i < grid.size(); ++i) {
        lo = std::min(lo, nus.values[i]);
        hi = std::max(hi, nus.values[i]);
        err = std::max(err, nus.errors[i]);
    }
    rep.nu_spread = hi - lo;
    rep.nu_spread_error = err;
    rep.nu_constant = rep.nu_spread <= 3.0 * err + 1e-9 * std::max(1.0, hi);

    auto dds = lelong::nu_ddc_profile(T, z0, grid, opt);
    double dlo = dds.values[0], dhi = dds.values[0], derr = 0.0;
    for (size_t i = 0; i < grid.size(); ++i) {
        dlo = std::min(dlo, dds.values[i]);
        dhi = std::max(dhi, dds.values[i]);
        derr = std::max(derr, dds.errors[i]);
    }
    rep.nu_ddc_constant = (dhi - dlo) <= 3.0 * derr + 1e-9 * std::max(1.0, std::abs(dhi));
    rep.nu_ddc_zero = nu_ddc_at_zero(T, opt);
    rep.alpha_law = alpha_mass_identity(T, 0.5, 1.0, kappa, opt, kappa_error);
    rep.pluriharmonic = std::abs(rep.nu_ddc_zero.value) <= 3.0 * rep.nu_ddc_zero.error + 1e-9;
    rep.conic = rep.pairing_invariant && rep.nu_constant && rep.nu_ddc_constant;
    return rep;
}

std::string CoefficientMassReport::to_csv() const {
    csv::Table t({"re_a", "im_a", "class_plain", "err_plain", "class_both", "err_both", "class_mixed",
                  "err_mixed", "gamma_sum", "gamma_sum_err"});
    for (const auto& row : rows)
        t.add_row({csv::format_double(row.a.real()), csv::format_double(row.a.imag()),
                   csv::format_double(row.class_plain), csv::format_double(row.err_plain),
                   csv::format_double(row.class_both), csv::format_double(row.err_both),
                   csv::format_double(row.class_mixed), csv::format_double(row.err_mixed),
                   csv::format_double(row.gamma_sum), csv::format_double(row.gamma_sum_error)});
    return t.to_string();
}

CoefficientMassReport coefficient_mass_estimates(const Current& T, std::span<const Complex> a_values,
                                                 const Options& opt) {
    CoefficientMassReport rep;
    ChartCurrent chart = currents::to_chart(T);
    int n = T.dim(), q = T.dim() - T.bidim();
    auto idx = MultiIndex::all(n, q);
    for (const auto& a : a_values) {
        ChartCurrent Ca = currents::chart_dilate(chart, a);
        CoefficientMassRow row;
        row.a = a;
        for (const auto& I : idx) {
            for (const auto& J : idx) {
                auto mass = currents::coefficient_mass(Ca, I, J, opt);
                double v = mass.value.real(), e = mass.error;
                bool in_I = I.contains(n), in_J = J.contains(n);
                row.class_plain = std::max(row.class_plain, v);
                row.err_plain = std::max(row.err_plain, e);
                if (in_I && in_J) {
                    row.class_both += v;
                    row.err_both += e;
                } else if (in_I || in_J) {
                    row.class_mixed += v;
                    row.err_mixed += e;
                }
            }
        }
        auto [gt, gd] = lelong::gammas(T, std::abs(a), opt);
        row.gamma_sum = std::abs(gt.value + gd.value);
        row.gamma_sum_error = gt.error + gd.error;
        if (row.gamma_sum > 1e-14) {
            row.ratio_both = row.class_both / row.gamma_sum;
            row.ratio_mixed = row.class_mixed * row.class_mixed / row.gamma_sum;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

QuadratureResult chart_coefficient_pairing(const Current& T, const MultiIndex& I, const MultiIndex& J,
                                           Complex a, const currents::ScalarField& phi,
                                           const Options& opt) {
    int n = T.dim();
    if (I.contains(n) || J.contains(n))
        throw std::invalid_argument("chart_coefficient_pairing: indices must avoid n");
    ChartCurrent Ca = currents::chart_dilate(currents::to_chart(T), a);
    return currents::coefficient_pairing(Ca, I, J, phi, opt);
}

std::string BlowupMassReport::to_csv() const {
    csv::Table t({"eps", "mass", "error", "bound", "bound_error"});
    for (size_t j = 0; j < eps.size(); ++j)
        t.add_row({csv::format_double(eps[j]), csv::format_double(masses[j].value),
                   csv::format_double(masses[j].error), csv::format_double(bound.value),
                   csv::format_double(bound.error)});
    return t.to_string();
}

BlowupMassReport blowup_mass(const Current& T, double r, std::span<const double> eps_seq, double kappa,
                             const Options& opt) {
    for (size_t j = 1; j < eps_seq.size(); ++j)
        if (eps_seq[j] >= eps_seq[j - 1]) throw std::invalid_argument("blowup_mass: eps must decrease");
    BlowupMassReport rep;
    rep.r = r;
    rep.eps.assign(eps_seq.begin(), eps_seq.end());
    int p = T.bidim();
    Point z0(size_t(T.dim()), Complex(0.0));

    rep.masses.assign(eps_seq.size(), ValueWithError{});
    for (int k = 0; k <= p; ++k) {
        double c = binomial(p, k);
        for (size_t j = 0; j < eps_seq.size(); ++j) {
            auto m = currents::alpha_beta_mass(T, z0, p - k, Annulus{z0, eps_seq[j], r}, opt);
            rep.masses[j].value += c * m.value.real();
            rep.masses[j].error += c * (m.error + std::abs(m.value.imag()));
        }
    }

    size_t J = eps_seq.size();
    rep.bounded = true;
    if (J >= 3) {
        double d1 = rep.masses[J - 1].value - rep.masses[J - 2].value;
        double d0 = rep.masses[J - 2].value - rep.masses[J - 3].value;
        double errl = rep.masses[J - 1].error + rep.masses[J - 2].error;
        if (std::abs(d1) <= 3.0 * errl + 1e-11) {
            rep.extrapolated = rep.masses[J - 1];
        } else {
            double ratio = d1 / d0;
            if (ratio >= 0.97) {
                rep.bounded = false;
                rep.extrapolated = rep.masses[J - 1];
            } else {
                double tail = d1 * ratio / (1.0 - ratio);
                rep.extrapolated = {rep.masses[J - 1].value + tail,
                                    rep.masses[J - 1].error + std::abs(tail)};
            }
        }
    } else {
        rep.extrapolated = rep.masses.back();
    }

    for (int k = 1; k <= p; ++k) {
        rep.C_r += binomial(p, k) * std::pow(r, 2 * k);
        rep.Cp_r += binomial(p, k) * std::pow(r, 2 * k) / (2.0 * k);
    }

    ValueWithError nu_r = lelong::nu(T, z0, r, opt);
    auto grid = lelong::log_grid(1e-3, std::min(0.5, 0.5 * r), 13);
    LelongNumberResult ln = lelong::lelong_number(T, z0, grid, opt);
    bool bound_finite = (ln.kind == LelongNumberResult::Kind::value);
    double nu0 = bound_finite ? ln.value : 0.0;
    double nu0_err = bound_finite ? ln.error : 0.0;

    if (T.sign_class() == SignClass::plurisuperharmonic) {
        if (bound_finite) {
            auto dds = lelong::nu_ddc_profile(T, z0, std::vector<double>{r}, opt);
            try {
                ValueWithError lam = lelong::lambda(T, z0, r, kappa, opt);
                ValueWithError j0 = {lam.value - nu_r.value, lam.error + nu_r.error};
                rep.bound.value = std::abs(nu_r.value - nu0) + rep.C_r * nu_r.value -
                                  kappa * rep.Cp_r * dds.values[0] + j0.value;
                rep.bound.error = nu_r.error + nu0_err + rep.C_r * nu_r.error +
                                  std::abs(kappa) * rep.Cp_r * dds.errors[0] + j0.error;
            } catch (const std::domain_error&) {
                bound_finite = false;
            }
        }
        if (!bound_finite) {
            rep.bound = {std::numeric_limits<double>::infinity(), 0.0};
        }
    } else {
        if (bound_finite) {
            rep.bound.value = nu_r.value - nu0 + rep.C_r * nu_r.value;
            rep.bound.error = nu_r.error + nu0_err + rep.C_r * nu_r.error;
        } else {
            rep.bound = {std::numeric_limits<double>::infinity(), 0.0};
        }
    }
    rep.within_bound = rep.bounded && rep.extrapolated.value <=
                                          rep.bound.value + 3.0 * (rep.extrapolated.error + rep.bound.error) +
                                              1e-9 * std::max(1.0, std::abs(rep.bound.value));
    return rep;
}

std::string RestrictionReport::to_csv() const {
    csv::Table t({"side", "value", "error"});
    t.add_row({"lhs", csv::format_double(lhs.value), csv::format_double(lhs.error)});
    t.add_row({"rhs", csv::format_double(rhs.value), csv::format_double(rhs.error)});
    return t.to_string();
}

namespace {
/// sigma_S over the slab {z in unit polydisc, 0 < |z_k| < r} as a function
/// of r on a grid, shared sampling per component.
std::pair<std::vector<double>, std::vector<double>> slab_sigma_profile(const Current& S, int k,
                                                                       std::span<const double> rgrid,
                                                                       const Options& opt) {
    std::vector<double> vals(rgrid.size(), 0.0), errs(rgrid.size(), 0.0);
    Form betap = forms::beta_power(S.dim(), S.bidim());
    for (const auto& comp : S.components()) {
        if (std::holds_alternative<currents::CarrierComponent>(comp)) {
            const auto& cc = std::get<currents::CarrierComponent>(comp);
            if (cc.carrier.dim != 1 || forms::abs2(cc.carrier.anchor) > 0.0)
                throw std::invalid_argument("restriction: only linear 1-d carriers supported");
            const Point& b = cc.carrier.basis[0];
            double bk = std::abs(b[size_t(k - 1)]);
            if (bk < 1e-14) continue; // carrier inside {z_k = 0}: flagged by the caller
            double Rdisc = std::numeric_limits<double>::infinity();
            for (int j = 0; j < S.dim(); ++j) {
                double bj = std::abs(b[size_t(j)]);
                if (bj > 1e-14) Rdisc = std::min(Rdisc, 1.0 / bj);
            }
            // carrier u-radius along the slab: min(r/bk, Rdisc)
            std::vector<double> urad;
            std::vector<size_t> slot;
            for (size_t i = 0; i < rgrid.size(); ++i) {
                double u = std::min(rgrid[i] / bk, Rdisc);
                if (urad.empty() || u > urad.back() * (1.0 + 1e-13)) {
                    urad.push_back(u);
                    slot.push_back(urad.size() - 1);
                } else {
                    slot.push_back(urad.size() - 1);
                }
            }
            quadrature::Density dens;
            dens.dim = 1;
            const Form w = cc.weight;
            Form top = w.wedge(forms::beta_power(1, 1));
            dens.eval = [top](std::span<const Complex> u) { return top.top_density(u); };
            dens.singular = w.singular_points();
            Point u0{Complex(0.0)};
            auto prof = quadrature::radial_profile(dens, u0, urad, opt);
            for (size_t i = 0; i < rgrid.size(); ++i) {
                vals[i] += prof.values[slot[i]];
                errs[i] += prof.errors[slot[i]];
            }
        } else if (std::holds_alternative<currents::SmoothComponent>(comp)) {
            const auto& sc = std::get<currents::SmoothComponent>(comp);
            Form top = sc.coefficient.wedge(betap);
            quadrature::Density dens;
            dens.dim = S.dim();
            dens.singular = top.singular_points();
            dens.eval = [top](std::span<const Complex> z) { return top.top_density(z); };
            for (size_t i = 0; i < rgrid.size(); ++i) {
                auto m = quadrature::integrate(dens, quadrature::PolydiscSlab{S.dim(), k, rgrid[i]}, opt);
                vals[i] += m.value.real();
                errs[i] += m.error + std::abs(m.value.imag());
            }
        }
        // atoms sit at the origin, inside {z_k = 0}: no slab mass
    }
    return {vals, errs};
}

ValueWithError log_weighted_sigma(const Current& S, int k, double zk_min, const Options& opt) {
    // integral of -log|z_k| against sigma_S over {zk_min <= |z_k|, z in polydisc}
    ValueWithError total;
    Form betap = forms::beta_power(S.dim(), S.bidim());
    for (const auto& comp : S.components()) {
        if (std::holds_alternative<currents::CarrierComponent>(comp)) {
            const auto& cc = std::get<currents::CarrierComponent>(comp);
            const Point& b = cc.carrier.basis[0];
            double bk = std::abs(b[size_t(k - 1)]);
            if (bk < 1e-14) continue;
            double Rdisc = std::numeric_limits<double>::infinity();
            for (int j = 0; j < S.dim(); ++j) {
                double bj = std::abs(b[size_t(j)]);
                if (bj > 1e-14) Rdisc = std::min(Rdisc, 1.0 / bj);
            }
            quadrature::Density dens;
            dens.dim = 1;
            const Form w = cc.weight;
            Form top = w.wedge(forms::beta_power(1, 1));
            dens.eval = [top, bk](std::span<const Complex> u) -> Complex {
                double zk = bk * std::abs(u[0]);
                if (zk <= 0.0) return {0.0, 0.0};
                return -std::log(zk) * top.top_density(u);
            };
            dens.singular = w.singular_points();
            dens.singular.push_back({Point{Complex(0.0)}, 0.3});
            double lo = zk_min / bk;
            auto m = quadrature::integrate(dens, quadrature::Annulus{Point{Complex(0.0)}, lo, Rdisc}, opt);
            total.value += m.value.real();
            total.error += m.error + std::abs(m.value.imag());
        } else if (std::holds_alternative<currents::SmoothComponent>(comp)) {
            const auto& sc = std::get<currents::SmoothComponent>(comp);
            Form top = sc.coefficient.wedge(betap);
            quadrature::Density dens;
            dens.dim = S.dim();
            dens.singular = top.singular_points();
            int kc = k;
            dens.eval = [top, kc, zk_min](std::span<const Complex> z) -> Complex {
                double zk = std::abs(z[size_t(kc - 1)]);
                if (zk < zk_min) return {0.0, 0.0};
                return -std::log(zk) * top.top_density(z);
            };
            auto m = quadrature::integrate(dens, quadrature::PolydiscSlab{S.dim(), kc, 1.0}, opt);
            total.value += m.value.real();
            total.error += m.error + std::abs(m.value.imag());
        }
    }
    return total;
}
} // namespace

RestrictionReport restriction_identity(const Current& S, int k, const Options& opt) {
    RestrictionReport rep;
    rep.k = k;
    rep.carrier_in_plane = currents::carrier_inside_plane(S, k);

    auto rgrid = lelong::log_grid(1e-4, 1.0, 129);
    auto [sig, sigerr] = slab_sigma_profile(S, k, rgrid, opt);
    std::vector<double> f(rgrid.size()), ferr(rgrid.size());
    for (size_t i = 0; i < rgrid.size(); ++i) {
        f[i] = sig[i] / rgrid[i];
        ferr[i] = sigerr[i] / rgrid[i];
    }
    double expn = 0.0;
    ConditionVerdict v = lelong::classify_log_integral(rgrid, f, ferr, &expn);
    if (v.kind == ConditionVerdict::Kind::finite) {
        rep.lhs = {v.value, v.error};
    } else {
        rep.lhs = {std::numeric_limits<double>::infinity(), 0.0};
    }

    rep.rhs = log_weighted_sigma(S, k, 0.0, opt);

    for (double u : {0.3, 0.05}) {
        RestrictionReport::Truncation tr;
        tr.u = u;
        tr.lower = log_weighted_sigma(S, k, u, opt).value;
        std::vector<double> t2, f2, fe2;
        for (size_t i = 0; i < rgrid.size(); ++i) {
            if (rgrid[i] >= u) {
                t2.push_back(rgrid[i]);
                f2.push_back(f[i]);
                fe2.push_back(ferr[i]);
            }
        }
        tr.mid = lelong::log_grid_integral(t2, f2, fe2).value;
        tr.upper = rep.rhs.value;
        rep.truncations.push_back(tr);
    }

    double scale = std::max(std::abs(rep.lhs.value), std::abs(rep.rhs.value));
    rep.ok = std::isfinite(rep.lhs.value) &&
             std::abs(rep.lhs.value - rep.rhs.value) <= 3.0 * (rep.lhs.error + rep.rhs.error) + 1e-9 * std::max(1.0, scale);
    return rep;
}

AdherenceReport adherence_classify(const Current& limit, double kappa, const Options& opt,
                                   double kappa_error) {
    AdherenceReport rep;
    Options o = opt;
    Point z0(size_t(limit.dim()), Complex(0.0));
    std::vector<double> grid{0.25, 0.5, 1.0};
    auto nus = lelong::nu_profile(limit, z0, grid, o);
    double lo = nus.values[0], hi = nus.values[0], err = 0.0;
    for (size_t i = 0; i < grid.size(); ++i) {
        lo = std::min(lo, nus.values[i]);
        hi = std::max(hi, nus.values[i]);
        err = std::max(err, nus.errors[i]);
    }
    rep.nu_spread = hi - lo;
    rep.nu_constant = rep.nu_spread <= 3.0 * err + 1e-9 * std::max(1.0, hi);
    rep.nu_ddc_zero = nu_ddc_at_zero(limit, o);
    auto am = currents::alpha_beta_mass(limit, z0, limit.bidim(), Annulus{z0, 0.5, 1.0}, o);
    rep.alpha_mass = {am.value.real(), am.error + std::abs(am.value.imag())};
    rep.pluriharmonic = std::abs(rep.nu_ddc_zero.value) <= 3.0 * rep.nu_ddc_zero.error + 1e-9;
    bool alpha_zero = std::abs(rep.alpha_mass.value) <= 3.0 * rep.alpha_mass.error + 1e-9;
    if (rep.pluriharmonic) {
        rep.conic_signature = rep.nu_constant && alpha_zero;
    } else {
        // conic with an atomic dd^c: the alpha-mass follows the log law
        double want = kappa * rep.nu_ddc_zero.value * std::log(0.5);
        rep.conic_signature = rep.nu_constant &&
                              std::abs(rep.alpha_mass.value - want) <=
                                  3.0 * (rep.alpha_mass.error + rep.nu_ddc_zero.error +
                                         kappa_error * std::abs(rep.nu_ddc_zero.value) * std::log(2.0)) +
                                      1e-9;
        rep.atomic_ddc_flag = rep.conic_signature;
    }
    return rep;
}

} // namespace plurilab::analysis
