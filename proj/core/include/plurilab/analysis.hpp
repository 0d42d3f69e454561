#pragma once

#include <string>

#include "plurilab/chart.hpp"
#include "plurilab/current.hpp"
#include "plurilab/lelong.hpp"

namespace plurilab::analysis {

using currents::ChartCurrent;
using currents::Current;
using currents::DilatationFamily;
using currents::Options;
using currents::TestForm;
using forms::MultiIndex;
using forms::Point;
using lelong::ConditionReport;
using numerics::ValueWithError;
using quadrature::QuadratureResult;

/// One evaluation of the Lelong-Jensen identity on an annulus: the nu
/// difference against the annulus alpha-mass plus the two dd^c terms, the
/// latter scaled by the calibration constant kappa.
struct JensenReport {
    std::string fixture;
    double r1 = 0.0, r2 = 0.0;
    double kappa = 1.0;
    ValueWithError lhs;        // nu(r2) - nu(r1)
    ValueWithError alpha_term; // annulus mass of S ^ alpha^p
    ValueWithError ddc_term1;  // int_{r1}^{r2} (t^{-2p} - r2^{-2p}) t m(t) dt, unscaled
    ValueWithError ddc_term2;  // (r1^{-2p} - r2^{-2p}) int_0^{r1} t m(t) dt, unscaled
    double residual = 0.0;     // |lhs - alpha - kappa (term1 + term2)|
    double error_budget = 0.0;

    double ddc_sum() const { return ddc_term1.value + ddc_term2.value; }
    bool ok(double factor = 3.0) const { return residual <= factor * error_budget + 1e-12; }
    std::string to_text() const;
};

JensenReport jensen_check(const Current& S, const Point& z0, double r1, double r2, double kappa,
                          const Options& opt);

/// Calibrated dd^c-term coefficient of the Jensen identity, stored as a
/// small text artifact (fields: p, kappa, error, fixtures).
struct CalibrationArtifact {
    int p = 1;
    double kappa = 1.0;
    double error = 0.0;
    std::vector<std::string> fixtures;

    std::string to_text() const;
    void save(const std::string& path) const;
    static CalibrationArtifact load(const std::string& path);
};

/// Least-squares kappa over fixtures and radius pairs. Throws when the dd^c
/// terms carry no signal (closed fixtures only) or the fixtures disagree.
CalibrationArtifact calibrate_kappa(int p, std::span<const Current> fixtures,
                                    std::span<const std::pair<double, double>> radius_pairs,
                                    const Options& opt);

/// Annulus alpha-mass law for conic candidates:
/// int_{B(eps,r)} T ^ alpha^p compared with nu_ddc(0) log(eps/r), reported
/// both as printed and with the kappa scaling of the calibrated identity.
struct AlphaMassReport {
    double eps = 0.0, r = 0.0;
    ValueWithError annulus_mass;
    ValueWithError nu_ddc_zero;
    double literal_rhs = 0.0; // nu_ddc(0) log(eps/r)
    double kappa_rhs = 0.0;   // kappa-scaled
    bool matches_literal = false;
    bool matches_kappa = false;
};

AlphaMassReport alpha_mass_identity(const Current& T, double eps, double r, double kappa,
                                    const Options& opt, double kappa_error = 0.0);

/// Weak-convergence experiment for the dilatation family h_a.
struct ConvergenceReport {
    enum class Verdict { converged, diverged, inconclusive };
    std::vector<forms::Complex> scales;
    std::vector<std::string> form_ids;
    // pairings[form][k] = <h_{a_k}^* T, phi_form>
    std::vector<std::vector<QuadratureResult>> pairings;
    std::vector<double> cauchy;      // max over forms of |P_{k+1} - P_k|
    std::vector<double> cauchy_err;
    double fitted_decay = 0.0;       // slope of log cauchy against log|a|
    bool constant_sequence = false;  // all differences within errors
    Verdict verdict = Verdict::inconclusive;
    bool hypothesis_ok = true;       // Dini (and dd^c condition) satisfied
    std::string hypothesis_note;
    std::vector<forms::Complex> limits; // per form, when converged
    std::vector<double> limit_errors;

    bool converged() const { return verdict == Verdict::converged; }
    std::string to_csv() const;
    std::string to_text() const;
};

ConvergenceReport cone_experiment(const Current& T, const DilatationFamily& family,
                                  std::span<const TestForm> test_forms, const Options& opt);

/// Interleaved-sequence check: with |a_k/b_k| and |b_k/a_k| bounded, the
/// pairings of the two dilated families must drift together.
struct InterleavingReport {
    std::vector<double> differences; // max over forms |<h_a T,phi> - <h_b T,phi>|
    std::vector<double> errors;
    double ratio_bound = 0.0; // max(|a/b|, |b/a|) over k
    bool ok = false;
};

InterleavingReport corollary2_check(const Current& T, const DilatationFamily& a,
                                    const DilatationFamily& b, std::span<const TestForm> test_forms,
                                    const Options& opt);

/// Dilatation-invariance verdict: pairing invariance under sampled a, nu and
/// nu_ddc constant in r, and the annulus alpha-mass law.
struct ConicReport {
    bool pairing_invariant = false;
    double worst_pairing_drift = 0.0;
    double pairing_drift_error = 0.0;
    bool nu_constant = false;
    double nu_spread = 0.0;
    double nu_spread_error = 0.0;
    bool nu_ddc_constant = false;
    ValueWithError nu_ddc_zero;
    AlphaMassReport alpha_law;
    bool conic = false;
    bool pluriharmonic = false; // nu_ddc ~ 0
};

ConicReport conic_check(const Current& T, std::span<const forms::Complex> a_samples,
                        std::span<const TestForm> test_forms, double kappa, const Options& opt,
                        double kappa_error = 0.0);

/// Chart coefficient masses over U grouped by membership of n in (I, J).
struct CoefficientMassRow {
    forms::Complex a;
    double class_plain = 0.0;   // largest single-coefficient mass over all (I, J)
    double class_both = 0.0;    // n in I and J: summed mass
    double class_mixed = 0.0;   // n in exactly one: summed mass
    double err_plain = 0.0, err_both = 0.0, err_mixed = 0.0;
    double gamma_sum = 0.0;     // gamma_T(|a|) + gamma_ddc(|a|)
    double gamma_sum_error = 0.0;
    double ratio_both = 0.0;    // class_both / gamma_sum
    double ratio_mixed = 0.0;   // class_mixed^2 / gamma_sum
};

struct CoefficientMassReport {
    std::vector<CoefficientMassRow> rows;
    std::string to_csv() const;
};

CoefficientMassReport coefficient_mass_estimates(const Current& T, std::span<const forms::Complex> a_values,
                                                 const Options& opt);

/// f_{I,J}(a) = int_U T^a_{I,J} phi d tau, for n not in I and n not in J.
QuadratureResult chart_coefficient_pairing(const Current& T, const MultiIndex& I, const MultiIndex& J,
                                           forms::Complex a, const currents::ScalarField& phi,
                                           const Options& opt);

/// Mass of the lift of T to the blow-up over the ball B(r), computed as the
/// eps -> 0 limit of int_{B(eps,r)} T ^ (alpha + beta)^p, against the
/// nu-based bound (dd^c parts kappa-scaled).
struct BlowupMassReport {
    double r = 0.0;
    std::vector<double> eps;
    std::vector<ValueWithError> masses; // over B(eps_j, r)
    ValueWithError extrapolated;
    bool bounded = true;
    ValueWithError bound;
    double C_r = 0.0;  // sum_k C(p,k) r^{2k}
    double Cp_r = 0.0; // sum_k C(p,k) r^{2k} / (2k)
    bool within_bound = false;
    std::string to_csv() const;
};

BlowupMassReport blowup_mass(const Current& T, double r, std::span<const double> eps_seq, double kappa,
                             const Options& opt);

/// The two sides of the hypersurface-restriction identity
///   int_0^1 sigma_S(slab_k(r))/r dr = int -log|z_k| d sigma_S over {z_k != 0},
/// plus monotone truncation bounds.
struct RestrictionReport {
    int k = 1;
    ValueWithError lhs;
    ValueWithError rhs;
    bool carrier_in_plane = false; // some carrier lies inside {z_k = 0}
    struct Truncation {
        double u;
        double lower, mid, upper;
    };
    std::vector<Truncation> truncations;
    bool ok = false;
    std::string to_csv() const;
};

RestrictionReport restriction_identity(const Current& S, int k, const Options& opt);

/// Conic/pluriharmonic signature of a dilatation-limit current.
struct AdherenceReport {
    bool nu_constant = false;
    double nu_spread = 0.0;
    ValueWithError nu_ddc_zero;
    ValueWithError alpha_mass;
    bool pluriharmonic = false;
    bool conic_signature = false;
    bool atomic_ddc_flag = false; // conic with nonzero dd^c mass at 0
};

AdherenceReport adherence_classify(const Current& limit, double kappa, const Options& opt,
                                   double kappa_error = 0.0);

} // namespace plurilab::analysis
