#include "plurilab/chart.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "plurilab/reference_forms.hpp"

namespace plurilab::currents {

using numerics::HaltonSequence;
using numerics::KahanSum;
using numerics::KahanSumComplex;

namespace {
constexpr double kPi = std::numbers::pi;

double ball_coeff(int d) {
    double c = 1.0;
    for (int i = 1; i <= d; ++i) c *= kPi / i;
    return c;
}

MultiIndex full_prime_index(int n) {
    std::vector<int> v;
    for (int j = 1; j < n; ++j) v.push_back(j);
    return MultiIndex(v);
}
} // namespace

forms::HolomorphicMap projective_chart_map(int n) {
    forms::HolomorphicMap phi;
    phi.from_dim = n;
    phi.to_dim = n;
    phi.apply = [n](std::span<const Complex> w, std::span<Complex> z) {
        for (int j = 0; j + 1 < n; ++j) z[size_t(j)] = w[size_t(j)] * w[size_t(n - 1)];
        z[size_t(n - 1)] = w[size_t(n - 1)];
    };
    phi.jacobian = [n](std::span<const Complex> w, int j, int k) -> Complex {
        if (j == n) return k == n ? Complex(1.0) : Complex(0.0);
        if (k == n) return w[size_t(j - 1)];
        return j == k ? w[size_t(n - 1)] : Complex(0.0);
    };
    return phi;
}

ChartCurrent to_chart(const Current& T) {
    int n = T.dim();
    ChartCurrent out(n, T.bidim());
    auto chart = projective_chart_map(n);
    for (const auto& comp : T.components()) {
        if (std::holds_alternative<SmoothComponent>(comp)) {
            const Form& F = std::get<SmoothComponent>(comp).coefficient;
            std::vector<forms::SingularPoint> sing;
            for (const auto& s : F.singular_points()) {
                if (std::abs(s.where[size_t(n - 1)]) > 1e-14) {
                    forms::SingularPoint t = s;
                    Complex zn = s.where[size_t(n - 1)];
                    for (int j = 0; j + 1 < n; ++j) t.where[size_t(j)] = s.where[size_t(j)] / zn;
                    t.where[size_t(n - 1)] = zn;
                    sing.push_back(std::move(t));
                } // singular points on {z_n = 0} are outside the chart
            }
            out.add(ChartSmooth{F.pulled_back(chart, std::move(sing))});
        } else if (std::holds_alternative<CarrierComponent>(comp)) {
            const auto& cc = std::get<CarrierComponent>(comp);
            if (cc.carrier.dim != 1 || forms::abs2(cc.carrier.anchor) > 0.0)
                throw std::invalid_argument("to_chart: only lines through the origin are supported");
            if (cc.weight.deg_holo() != 0)
                throw std::invalid_argument("to_chart: carrier weight must be scalar");
            const Point& v = cc.carrier.basis[0];
            Complex vn = v[size_t(n - 1)];
            if (std::abs(vn) < 1e-14)
                throw std::invalid_argument("to_chart: carrier inside {z_n = 0} is chart-invisible");
            ChartCarrier carrier;
            for (int j = 0; j + 1 < n; ++j) carrier.w_prime.push_back(v[size_t(j)] / vn);
            // weight as a function of w_n: original arc parameter u = w_n / v_n
            Form g(1, 0, 0);
            const Form weight = cc.weight;
            g.set_coefficient(MultiIndex{}, MultiIndex{}, [weight, vn](std::span<const Complex> wn) {
                Point u{wn[0] / vn};
                return weight.raw_coefficient(MultiIndex{}, MultiIndex{}, u);
            });
            for (const auto& s : cc.weight.singular_points())
                g.declare_singular({Point{s.where[0] * vn}, s.order});
            carrier.weight = std::move(g);
            out.add(std::move(carrier));
        }
        // atoms sit at the origin, outside the chart: they contribute nothing
    }
    return out;
}

namespace {
forms::HolomorphicMap chart_dilatation_map(int n, Complex a) {
    forms::HolomorphicMap phi;
    phi.from_dim = n;
    phi.to_dim = n;
    phi.apply = [n, a](std::span<const Complex> w, std::span<Complex> z) {
        for (int j = 0; j + 1 < n; ++j) z[size_t(j)] = w[size_t(j)];
        z[size_t(n - 1)] = a * w[size_t(n - 1)];
    };
    phi.jacobian = [n, a](std::span<const Complex>, int j, int k) -> Complex {
        if (j != k) return {0.0, 0.0};
        return j == n ? a : Complex(1.0);
    };
    return phi;
}
} // namespace

ChartCurrent chart_dilate(const ChartCurrent& C, Complex a) {
    if (a == Complex(0.0)) throw std::invalid_argument("chart_dilate: a = 0");
    int n = C.dim();
    ChartCurrent out(n, C.bidim());
    auto map = chart_dilatation_map(n, a);
    for (const auto& comp : C.components()) {
        if (std::holds_alternative<ChartSmooth>(comp)) {
            const Form& F = std::get<ChartSmooth>(comp).coefficient;
            std::vector<forms::SingularPoint> sing;
            for (const auto& s : F.singular_points()) {
                forms::SingularPoint t = s;
                t.where[size_t(n - 1)] /= a;
                sing.push_back(std::move(t));
            }
            out.add(ChartSmooth{F.pulled_back(map, std::move(sing))});
        } else {
            const auto& cc = std::get<ChartCarrier>(comp);
            Form g(1, 0, 0);
            const Form w = cc.weight;
            g.set_coefficient(MultiIndex{}, MultiIndex{}, [w, a](std::span<const Complex> wn) {
                Point u{a * wn[0]};
                return w.raw_coefficient(MultiIndex{}, MultiIndex{}, u);
            });
            for (const auto& s : w.singular_points()) g.declare_singular({Point{s.where[0] / a}, s.order});
            out.add(ChartCarrier{cc.w_prime, std::move(g)});
        }
    }
    return out;
}

ChartCurrent chart_pullback(const Current& T, Complex a) { return chart_dilate(to_chart(T), a); }

QuadratureResult chart_region_integral(int n, const ScalarField& f, const Options& opt) {
    QuadratureResult res;
    const int K = 8, R = 8;
    int dprime = n - 1;
    int qdim = 2 + 2 * dprime;
    std::vector<double> u(static_cast<size_t>(qdim));
    Point w(static_cast<size_t>(n));
    std::vector<Complex> dir(static_cast<size_t>(dprime));
    std::int64_t used = 0;
    for (int level = 0;; ++level) {
        int per_replicate = 128 << (2 * level);
        KahanSumComplex total;
        KahanSum err2;
        std::int64_t level_evals = 0;
        for (int shell = 0; shell < K; ++shell) {
            double t_lo = 0.5 + 0.5 * shell / K, t_hi = 0.5 + 0.5 * (shell + 1) / K;
            double s_lo = t_lo * t_lo, s_hi = t_hi * t_hi;
            double shell_area = kPi * (s_hi - s_lo);
            double reps_re[R], reps_im[R];
            for (int rep = 0; rep < R; ++rep) {
                HaltonSequence seq(qdim, numerics::hash_combine(opt.seed, std::uint64_t(shell) * 8 + rep + 0xc4a7));
                KahanSumComplex acc;
                for (int i = 0; i < per_replicate; ++i) {
                    seq.next(u);
                    double t = std::sqrt(s_lo + u[0] * (s_hi - s_lo));
                    double th = 2.0 * kPi * u[1];
                    w[size_t(n - 1)] = t * Complex(std::cos(th), std::sin(th));
                    double rho = std::sqrt(std::max(1.0 - t * t, 0.0)) / t;
                    double vol;
                    if (dprime == 1) {
                        double tp = rho * std::sqrt(u[2]);
                        double ap = 2.0 * kPi * u[3];
                        w[0] = tp * Complex(std::cos(ap), std::sin(ap));
                        vol = kPi * rho * rho;
                    } else {
                        // w' in a ball of C^2
                        double tp = rho * std::pow(std::max(u[2], 1e-12), 0.25);
                        double s2a = u[3];
                        double th1 = 2.0 * kPi * u[4], th2 = 2.0 * kPi * u[5];
                        dir[0] = std::sqrt(1.0 - s2a) * Complex(std::cos(th1), std::sin(th1));
                        dir[1] = std::sqrt(s2a) * Complex(std::cos(th2), std::sin(th2));
                        w[0] = tp * dir[0];
                        w[1] = tp * dir[1];
                        vol = ball_coeff(2) * std::pow(rho, 4);
                    }
                    acc.add(vol * f(w));
                }
                level_evals += per_replicate;
                Complex mean = acc.get() / double(per_replicate);
                reps_re[rep] = mean.real() * shell_area;
                reps_im[rep] = mean.imag() * shell_area;
            }
            double mr = 0.0, mi = 0.0;
            for (int r = 0; r < R; ++r) {
                mr += reps_re[r];
                mi += reps_im[r];
            }
            mr /= R;
            mi /= R;
            double var = 0.0;
            for (int r = 0; r < R; ++r)
                var += (reps_re[r] - mr) * (reps_re[r] - mr) + (reps_im[r] - mi) * (reps_im[r] - mi);
            var /= (R * (R - 1));
            total.add(Complex(mr, mi));
            err2.add(var * 2.6 * 2.6);
        }
        used += level_evals;
        res.value = total.get();
        res.error = std::sqrt(err2.get());
        res.evaluations = used;
        res.converged = true;
        if (res.error <= std::max(opt.rel_tol * std::abs(res.value), opt.abs_tol)) break;
        if (used + level_evals * 4 > opt.budget) {
            res.converged = false;
            break;
        }
    }
    return res;
}

namespace {
/// Carrier {w' = c} meets U in the annulus 1/2 < |w_n| < 1/sqrt(1+|c|^2).
bool carrier_annulus_in_U(const ChartCarrier& cc, double& lo, double& hi) {
    lo = 0.5;
    hi = std::min(1.0, 1.0 / std::sqrt(1.0 + forms::abs2(cc.w_prime)));
    return hi > lo;
}

QuadratureResult carrier_line_integral(const ChartCarrier& cc, double lo, double hi,
                                       const std::function<Complex(Complex)>& f, const Options& opt) {
    quadrature::Density dens;
    dens.dim = 1;
    const Form w = cc.weight;
    dens.eval = [f](std::span<const Complex> wn) { return f(wn[0]); };
    for (const auto& s : w.singular_points()) dens.singular.push_back(s);
    return quadrature::integrate(dens, quadrature::Annulus{Point{Complex(0.0)}, lo, hi}, opt);
}
} // namespace

QuadratureResult coefficient_mass(const ChartCurrent& C, const MultiIndex& I, const MultiIndex& J,
                                  const Options& opt) {
    int n = C.dim();
    QuadratureResult total;
    total.converged = true;
    MultiIndex conormal = full_prime_index(n);
    for (const auto& comp : C.components()) {
        if (std::holds_alternative<ChartSmooth>(comp)) {
            const Form& F = std::get<ChartSmooth>(comp).coefficient;
            ScalarField f = [&F, I, J](std::span<const Complex> w) -> Complex {
                return std::abs(F.expansion_coefficient(I, J, w));
            };
            auto r = chart_region_integral(n, f, opt);
            total.value += r.value;
            total.error += r.error;
            total.evaluations += r.evaluations;
            total.converged = total.converged && r.converged;
        } else {
            const auto& cc = std::get<ChartCarrier>(comp);
            if (!(I == conormal && J == conormal)) continue; // carrier measure lives in one slot
            double lo, hi;
            if (!carrier_annulus_in_U(cc, lo, hi)) continue;
            const Form w = cc.weight;
            auto r = carrier_line_integral(
                cc, lo, hi,
                [w](Complex wn) -> Complex {
                    Point u{wn};
                    return std::abs(w.raw_coefficient(MultiIndex{}, MultiIndex{}, u));
                },
                opt);
            total.value += r.value;
            total.error += r.error;
            total.evaluations += r.evaluations;
            total.converged = total.converged && r.converged;
        }
    }
    return total;
}

QuadratureResult coefficient_pairing(const ChartCurrent& C, const MultiIndex& I, const MultiIndex& J,
                                     const ScalarField& phi, const Options& opt) {
    int n = C.dim();
    QuadratureResult total;
    total.converged = true;
    MultiIndex conormal = full_prime_index(n);
    for (const auto& comp : C.components()) {
        if (std::holds_alternative<ChartSmooth>(comp)) {
            const Form& F = std::get<ChartSmooth>(comp).coefficient;
            ScalarField f = [&F, &phi, I, J](std::span<const Complex> w) -> Complex {
                return F.expansion_coefficient(I, J, w) * phi(w);
            };
            auto r = chart_region_integral(n, f, opt);
            total.value += r.value;
            total.error += r.error;
            total.evaluations += r.evaluations;
            total.converged = total.converged && r.converged;
        } else {
            const auto& cc = std::get<ChartCarrier>(comp);
            if (!(I == conormal && J == conormal)) continue;
            double lo, hi;
            if (!carrier_annulus_in_U(cc, lo, hi)) continue;
            const Form w = cc.weight;
            Point wp = cc.w_prime;
            auto r = carrier_line_integral(
                cc, lo, hi,
                [w, wp, &phi](Complex wn) -> Complex {
                    Point u{wn};
                    Point full = wp;
                    full.push_back(wn);
                    return w.raw_coefficient(MultiIndex{}, MultiIndex{}, u) * phi(full);
                },
                opt);
            total.value += r.value;
            total.error += r.error;
            total.evaluations += r.evaluations;
            total.converged = total.converged && r.converged;
        }
    }
    return total;
}

QuadratureResult pair_in_chart(const ChartCurrent& C, const TestForm& phi, const Options& opt) {
    int n = C.dim();
    Form phi_w = phi.effective().pulled_back(projective_chart_map(n));
    double center_norm = std::sqrt(forms::abs2(phi.center));
    double zn_center = std::abs(phi.center[size_t(n - 1)]);
    if (zn_center - phi.bump.a3 <= 0.05)
        throw std::invalid_argument("pair_in_chart: test form support too close to {z_n = 0}");

    QuadratureResult total;
    total.converged = true;
    for (const auto& comp : C.components()) {
        if (std::holds_alternative<ChartSmooth>(comp)) {
            const Form& F = std::get<ChartSmooth>(comp).coefficient;
            Form top = F.wedge(phi_w);
            // bounding product region in w containing the support preimage:
            // |w'| = |z'|/|z_n| <= (|center'| + a3) / wn_lo on the support
            double wn_lo = zn_center - phi.bump.a3, wn_hi = zn_center + phi.bump.a3;
            double cprime = std::sqrt(std::max(center_norm * center_norm - zn_center * zn_center, 0.0));
            double rho = (cprime + phi.bump.a3) / wn_lo;
            ScalarField f = [top](std::span<const Complex> w) -> Complex {
                return top.top_density(w);
            };
            // reuse the chart-region integrator shape with a custom annulus:
            // integrate over {wn_lo < |w_n| < wn_hi} x {|w'| < rho}
            const int K = 8, R = 8;
            int dprime = n - 1;
            int qdim = 2 + 2 * dprime;
            std::vector<double> u(static_cast<size_t>(qdim));
            Point w(static_cast<size_t>(n));
            std::int64_t used = 0;
            QuadratureResult res;
            for (int level = 0;; ++level) {
                int per_replicate = 128 << (2 * level);
                KahanSumComplex tot;
                KahanSum err2;
                std::int64_t level_evals = 0;
                for (int shell = 0; shell < K; ++shell) {
                    double t_lo = wn_lo + (wn_hi - wn_lo) * shell / K;
                    double t_hi = wn_lo + (wn_hi - wn_lo) * (shell + 1) / K;
                    double s_lo = t_lo * t_lo, s_hi = t_hi * t_hi;
                    double shell_area = kPi * (s_hi - s_lo);
                    double vol_prime = ball_coeff(dprime) * std::pow(rho, 2 * dprime);
                    double reps_re[8], reps_im[8];
                    for (int rep = 0; rep < R; ++rep) {
                        HaltonSequence seq(qdim,
                                           numerics::hash_combine(opt.seed, std::uint64_t(shell) * 8 + rep + 0x9a1));
                        KahanSumComplex acc;
                        for (int i = 0; i < per_replicate; ++i) {
                            seq.next(u);
                            double t = std::sqrt(s_lo + u[0] * (s_hi - s_lo));
                            double th = 2.0 * kPi * u[1];
                            w[size_t(n - 1)] = t * Complex(std::cos(th), std::sin(th));
                            if (dprime == 1) {
                                double tp = rho * std::sqrt(u[2]);
                                double ap = 2.0 * kPi * u[3];
                                w[0] = tp * Complex(std::cos(ap), std::sin(ap));
                            } else {
                                double tp = rho * std::pow(std::max(u[2], 1e-12), 0.25);
                                double s2a = u[3];
                                double th1 = 2.0 * kPi * u[4], th2 = 2.0 * kPi * u[5];
                                w[0] = tp * std::sqrt(1.0 - s2a) * Complex(std::cos(th1), std::sin(th1));
                                w[1] = tp * std::sqrt(s2a) * Complex(std::cos(th2), std::sin(th2));
                            }
                            acc.add(f(w));
                        }
                        level_evals += per_replicate;
                        Complex mean = acc.get() / double(per_replicate);
                        reps_re[rep] = mean.real() * shell_area * vol_prime;
                        reps_im[rep] = mean.imag() * shell_area * vol_prime;
                    }
                    double mr = 0.0, mi = 0.0;
                    for (int r = 0; r < R; ++r) {
                        mr += reps_re[r];
                        mi += reps_im[r];
                    }
                    mr /= R;
                    mi /= R;
                    double var = 0.0;
                    for (int r = 0; r < R; ++r)
                        var += (reps_re[r] - mr) * (reps_re[r] - mr) + (reps_im[r] - mi) * (reps_im[r] - mi);
                    var /= (R * (R - 1));
                    tot.add(Complex(mr, mi));
                    err2.add(var * 2.6 * 2.6);
                }
                used += level_evals;
                res.value = tot.get();
                res.error = std::sqrt(err2.get());
                res.evaluations = used;
                res.converged = true;
                if (res.error <= std::max(opt.rel_tol * std::abs(res.value), opt.abs_tol)) break;
                if (used + level_evals * 4 > opt.budget) {
                    res.converged = false;
                    break;
                }
            }
            total.value += res.value;
            total.error += res.error;
            total.evaluations += res.evaluations;
            total.converged = total.converged && res.converged;
        } else {
            const auto& cc = std::get<ChartCarrier>(comp);
            // embed the line u -> (c, u) and pull the test form through it
            forms::HolomorphicMap line;
            line.from_dim = 1;
            line.to_dim = n;
            Point c = cc.w_prime;
            line.apply = [c, n](std::span<const Complex> u, std::span<Complex> w) {
                for (int j = 0; j + 1 < n; ++j) w[size_t(j)] = c[size_t(j)];
                w[size_t(n - 1)] = u[0];
            };
            line.jacobian = [n](std::span<const Complex>, int j, int) {
                return j == n ? Complex(1.0) : Complex(0.0);
            };
            Form phi_line = phi_w.pulled_back(line);
            Form top = cc.weight.wedge(phi_line);
            double sq = std::sqrt(1.0 + forms::abs2(cc.w_prime));
            double lo = std::max(0.0, (center_norm - phi.bump.a3)) / sq;
            double hi = (center_norm + phi.bump.a3) / sq;
            quadrature::Density dens;
            dens.dim = 1;
            dens.eval = [top](std::span<const Complex> u) { return top.top_density(u); };
            dens.singular = top.singular_points();
            auto r = quadrature::integrate(dens, quadrature::Annulus{Point{Complex(0.0)}, lo, hi}, opt);
            total.value += r.value;
            total.error += r.error;
            total.evaluations += r.evaluations;
            total.converged = total.converged && r.converged;
        }
    }
    return total;
}

ScalarField chart_test_field(int n, std::uint64_t seed) {
    numerics::RadialBump bump_n{0.55, 0.62, 0.85, 0.92};
    numerics::RadialBump bump_p{-1.0, -0.5, 0.28, 0.38};
    numerics::SplitMix64 g(seed);
    double c0 = 0.5 + 0.5 * g.next_double();
    return [bump_n, bump_p, c0, n](std::span<const Complex> w) -> Complex {
        double tn = std::abs(w[size_t(n - 1)]);
        double tp = 0.0;
        for (int j = 0; j + 1 < n; ++j) tp += std::norm(w[size_t(j)]);
        tp = std::sqrt(tp);
        return c0 * bump_n(tn) * bump_p(tp);
    };
}

} // namespace plurilab::currents
