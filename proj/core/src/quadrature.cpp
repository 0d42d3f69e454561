#include "plurilab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "plurilab/numerics.hpp"

namespace plurilab::quadrature {

using numerics::HaltonSequence;
using numerics::KahanSum;
using numerics::KahanSumComplex;
using numerics::SplitMix64;

namespace {

constexpr double kPi = std::numbers::pi;

// Vol(B_{2d}(r)) = ball_coeff(d) * r^{2d}
double ball_coeff(int d) {
    double c = 1.0;
    for (int i = 1; i <= d; ++i) c *= kPi / i;
    return c;
}

// Gauss-Legendre on [-1,1]
constexpr double kGL8X[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
constexpr double kGL8W[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
constexpr double kGL16X[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
                              0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr double kGL16W[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
                              0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

void gl_nodes(int order, double lo, double hi, std::vector<double>& x, std::vector<double>& w) {
    x.clear();
    w.clear();
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    const double* gx = order == 8 ? kGL8X : kGL16X;
    const double* gw = order == 8 ? kGL8W : kGL16W;
    int m = order / 2;
    for (int i = m - 1; i >= 0; --i) {
        x.push_back(mid - half * gx[i]);
        w.push_back(half * gw[i]);
    }
    for (int i = 0; i < m; ++i) {
        x.push_back(mid + half * gx[i]);
        w.push_back(half * gw[i]);
    }
}

/// Uniform direction on the unit sphere of C^d from 2d-1 coordinates in [0,1).
/// Componentwise |omega_j|^2 are uniform on the simplex, phases independent.
void unit_direction(int d, std::span<const double> u, std::span<Complex> out) {
    if (d == 1) {
        double th = 2.0 * kPi * u[0];
        out[0] = Complex(std::cos(th), std::sin(th));
        return;
    }
    double s2[3];
    if (d == 2) {
        s2[0] = 1.0 - u[0];
        s2[1] = u[0];
    } else { // d == 3: spacings of two sorted uniforms
        double a = std::min(u[0], u[1]), b = std::max(u[0], u[1]);
        s2[0] = a;
        s2[1] = b - a;
        s2[2] = 1.0 - b;
    }
    for (int j = 0; j < d; ++j) {
        double th = 2.0 * kPi * u[size_t(d - 1 + j)];
        out[size_t(j)] = std::sqrt(std::max(s2[j], 0.0)) * Complex(std::cos(th), std::sin(th));
    }
}

struct EvalContext {
    const Density* density;
    Point center;
    // carve-out balls around interior singular points; samples inside are
    // rerouted to dedicated sub-integrals
    std::vector<Point> carve_centers;
    std::vector<double> carve_radii;

    Complex eval(std::span<const Complex> z) const {
        for (size_t i = 0; i < carve_centers.size(); ++i)
            if (forms::abs2_diff(z, carve_centers[i]) < carve_radii[i] * carve_radii[i]) return {0.0, 0.0};
        return density->eval(z);
    }
};

struct ShellEstimate {
    Complex value{0.0, 0.0};
    double error = 0.0;
    std::int64_t evals = 0;
};

/// Deterministic rule for one annular shell in C^1: Gauss-Legendre in |z|^2
/// crossed with midpoint angles; the error is the coarse/fine difference.
ShellEstimate shell_d1(const EvalContext& ctx, double a, double b, int mtheta) {
    ShellEstimate est;
    Point z(1);
    auto pass = [&](int order, int m) -> Complex {
        std::vector<double> xs, ws;
        gl_nodes(order, a * a, b * b, xs, ws);
        KahanSumComplex acc;
        for (size_t i = 0; i < xs.size(); ++i) {
            double t = std::sqrt(std::max(xs[i], 1e-300));
            KahanSumComplex ring;
            for (int j = 0; j < m; ++j) {
                double th = 2.0 * kPi * (j + 0.5) / m;
                z[0] = ctx.center[0] + t * Complex(std::cos(th), std::sin(th));
                ring.add(ctx.eval(z));
            }
            est.evals += m;
            acc.add(ws[i] * (kPi / m) * ring.get());
        }
        return acc.get();
    };
    Complex coarse = pass(8, mtheta);
    Complex fine = pass(16, 2 * mtheta);
    est.value = fine;
    est.error = std::abs(fine - coarse) + 1e-16 * std::abs(fine);
    return est;
}

/// Quasi-random rule for one shell in C^d (d = 2 or 3). The radius is drawn
/// by inverting the CDF of t^power; matching power to 2d minus the declared
/// singularity order removes the radial variance of |z|^{-order} densities.
/// Directions are uniform on the sphere; replicated random shifts give the
/// error estimate.
ShellEstimate shell_qmc(const EvalContext& ctx, int d, double a, double b, double power,
                        int per_replicate, std::uint64_t seed, std::uint64_t shell_key) {
    ShellEstimate est;
    const int R = 8;
    double s_lo = std::pow(a, power), s_hi = std::pow(b, power);
    // shell mass = C_d (2d/power) int_{a^power}^{b^power} E[f t^{2d-power}] ds
    double jac = ball_coeff(d) * (2.0 * d / power) * (s_hi - s_lo);
    std::vector<double> u(static_cast<size_t>(2 * d));
    std::vector<Complex> omega(static_cast<size_t>(d));
    Point z(static_cast<size_t>(d));
    double reps[R];
    double reps_im[R];
    for (int rep = 0; rep < R; ++rep) {
        HaltonSequence seq(2 * d, numerics::hash_combine(seed, shell_key * 8 + std::uint64_t(rep)));
        KahanSumComplex acc;
        for (int i = 0; i < per_replicate; ++i) {
            seq.next(u);
            double ur = (a == 0.0) ? std::max(u[0], 1e-12) : u[0];
            double t = std::pow(s_lo + ur * (s_hi - s_lo), 1.0 / power);
            unit_direction(d, std::span<const double>(u).subspan(1), omega);
            for (int j = 0; j < d; ++j) z[size_t(j)] = ctx.center[size_t(j)] + t * omega[size_t(j)];
            acc.add(ctx.eval(z) * std::pow(t, 2.0 * d - power));
        }
        est.evals += per_replicate;
        Complex mean = acc.get() / double(per_replicate);
        reps[rep] = mean.real() * jac;
        reps_im[rep] = mean.imag() * jac;
    }
    double mr = 0.0, mi = 0.0;
    for (int r = 0; r < R; ++r) {
        mr += reps[r];
        mi += reps_im[r];
    }
    mr /= R;
    mi /= R;
    double var = 0.0;
    for (int r = 0; r < R; ++r)
        var += (reps[r] - mr) * (reps[r] - mr) + (reps_im[r] - mi) * (reps_im[r] - mi);
    var /= (R * (R - 1));
    est.value = Complex(mr, mi);
    est.error = 2.6 * std::sqrt(var) + 1e-16 * std::abs(est.value);
    return est;
}

ShellEstimate shell_estimate(const EvalContext& ctx, int d, double a, double b, double power,
                             int level, std::uint64_t seed, std::uint64_t shell_key) {
    if (d == 1) return shell_d1(ctx, a, b, 16 << level);
    return shell_qmc(ctx, d, a, b, power, 64 << (2 * level), seed, shell_key);
}

/// Radial sampling exponent: 2d for smooth densities, reduced by the total
/// declared order of the singular points sitting at the center.
double radial_power(const Density& density, const Point& center, int d, double scale) {
    double order = 0.0;
    for (const auto& s : density.singular)
        if (std::sqrt(forms::abs2_diff(s.where, center)) <= 1e-12 * std::max(scale, 1.0)) order += s.order;
    return std::clamp(2.0 * d - order, 0.3, 2.0 * d);
}

/// Extrapolated mass of [0, r_lo] from the two innermost shell means,
/// assuming a local power law. Returns (tail, tail_error, integrable).
struct TailEstimate {
    double value = 0.0;
    double error = 0.0;
    bool integrable = true;
};

TailEstimate power_tail(double m1, double t1, double m2, double t2, double r_lo, int d) {
    TailEstimate tail;
    double a1 = std::abs(m1), a2 = std::abs(m2);
    if (a1 < 1e-300 || a2 < 1e-300) return tail; // no mass near the point
    double e = std::log(a1 / a2) / std::log(t1 / t2);
    if (e <= -2.0 * d + 0.05) {
        tail.integrable = false;
        return tail;
    }
    double c = a1 / std::pow(t1, e);
    double mass = c * ball_coeff(d) * (2.0 * d) * std::pow(r_lo, 2.0 * d + e) / (2.0 * d + e);
    tail.value = (m1 < 0 ? -mass : mass);
    tail.error = std::abs(mass);
    return tail;
}

std::vector<double> geometric_bounds(double lo, double hi, int k) {
    std::vector<double> b(static_cast<size_t>(k) + 1);
    double q = std::pow(hi / lo, 1.0 / k);
    b[0] = lo;
    for (int i = 1; i < k; ++i) b[size_t(i)] = b[size_t(i - 1)] * q;
    b[size_t(k)] = hi;
    return b;
}

struct AnnulusPlan {
    std::vector<double> bounds; // shell boundaries, increasing
    bool tail = false;          // extrapolate [0, bounds.front()]
};

AnnulusPlan plan_annulus(double r1, double r2, bool singular_center) {
    AnnulusPlan plan;
    if (singular_center && r1 <= 1e-9 * r2) {
        plan.tail = true;
        plan.bounds = geometric_bounds(1e-6 * r2, r2, 48);
    } else if (r1 <= 1e-9 * r2) {
        // smooth through the center: a few inner shells, then linear
        plan.bounds.push_back(0.0);
        for (int i = 1; i <= 24; ++i) plan.bounds.push_back(r2 * i / 24.0);
    } else if (r2 / r1 > 8.0) {
        plan.bounds = geometric_bounds(r1, r2, 32);
    } else {
        plan.bounds.resize(25);
        for (int i = 0; i <= 24; ++i) plan.bounds[size_t(i)] = r1 + (r2 - r1) * i / 24.0;
    }
    return plan;
}

void split_off_singularities(const Density& density, const Point& center, double r1, double r2,
                             EvalContext& ctx, std::vector<std::pair<Point, double>>& carves,
                             bool& singular_center) {
    singular_center = false;
    for (const auto& s : density.singular) {
        double dist = std::sqrt(forms::abs2_diff(s.where, center));
        if (dist <= 1e-12 * std::max(r2, 1.0)) {
            singular_center = true;
        } else if (dist > r1 * (1.0 + 1e-9) && dist < r2 * (1.0 - 1e-9)) {
            double delta = 0.5 * std::min({dist - r1, r2 - dist, 0.25 * (r2 - r1) + 1e-300});
            if (delta > 0.0) {
                carves.emplace_back(s.where, delta);
                ctx.carve_centers.push_back(s.where);
                ctx.carve_radii.push_back(delta);
            }
        }
    }
}

QuadratureResult integrate_annulus(const Density& density, const Point& center, double r1, double r2,
                                   const Options& opt, int depth = 0);

QuadratureResult integrate_annulus(const Density& density, const Point& center, double r1, double r2,
                                   const Options& opt, int depth) {
    QuadratureResult res;
    if (r1 > r2 + 1e-15) throw std::invalid_argument("integrate: annulus with r1 > r2");
    if (r2 <= 0.0 || r2 - r1 <= 1e-15 * std::max(1.0, r2)) return res; // empty region
    int d = density.dim;
    if (int(center.size()) != d) throw std::invalid_argument("integrate: center dimension mismatch");
    if (d < 1 || d > 3) throw std::invalid_argument("integrate: only C^1..C^3 regions supported");

    EvalContext ctx{&density, center, {}, {}};
    std::vector<std::pair<Point, double>> carves;
    bool singular_center = false;
    if (depth < 2) split_off_singularities(density, center, r1, r2, ctx, carves, singular_center);
    else {
        for (const auto& s : density.singular)
            if (std::sqrt(forms::abs2_diff(s.where, center)) <= 1e-12 * std::max(r2, 1.0)) singular_center = true;
    }

    AnnulusPlan plan = plan_annulus(r1, r2, singular_center);
    int n_shells = int(plan.bounds.size()) - 1;
    double power = radial_power(density, center, d, r2);

    std::int64_t used = 0;
    for (int level = 0;; ++level) {
        KahanSumComplex total;
        KahanSum err2;
        double inner_mean[2] = {0.0, 0.0}, inner_tmid[2] = {1.0, 1.0};
        std::int64_t level_evals = 0;
        for (int i = 0; i < n_shells; ++i) {
            double a = plan.bounds[size_t(i)], b = plan.bounds[size_t(i) + 1];
            ShellEstimate est = shell_estimate(ctx, d, a, b, power, level, opt.seed, std::uint64_t(i));
            total.add(est.value);
            err2.add(est.error * est.error);
            level_evals += est.evals;
            if (i < 2) {
                double vol = ball_coeff(d) * (std::pow(b, 2 * d) - std::pow(a, 2 * d));
                inner_mean[i] = est.value.real() / vol;
                inner_tmid[i] = std::sqrt(a * b);
            }
        }
        used += level_evals;
        res.value = total.get();
        res.error = std::sqrt(err2.get());
        res.evaluations = used;
        res.converged = true;
        if (plan.tail) {
            TailEstimate tail = power_tail(inner_mean[0], inner_tmid[0], inner_mean[1], inner_tmid[1],
                                           plan.bounds.front(), d);
            res.value += tail.value;
            res.error += tail.error;
            if (!tail.integrable) res.converged = false;
        }
        bool tol_met = res.error <= std::max(opt.rel_tol * std::abs(res.value), opt.abs_tol);
        if (tol_met && res.converged) break;
        std::int64_t next_cost = level_evals * (d == 1 ? 2 : 4);
        if (used + next_cost > opt.budget) {
            if (!tol_met) res.converged = false;
            break;
        }
    }

    // carved singular neighborhoods, integrated around their own centers
    for (const auto& [p, delta] : carves) {
        Density sub = density;
        QuadratureResult inner = integrate_annulus(sub, p, 0.0, delta, opt, depth + 1);
        res.value += inner.value;
        res.error += inner.error;
        res.evaluations += inner.evaluations;
        res.converged = res.converged && inner.converged;
    }
    return res;
}

QuadratureResult integrate_slab(const Density& density, const PolydiscSlab& slab, const Options& opt) {
    QuadratureResult res;
    int n = slab.n;
    if (density.dim != n) throw std::invalid_argument("integrate: slab dimension mismatch");
    if (slab.k < 1 || slab.k > n) throw std::invalid_argument("integrate: slab coordinate out of range");
    if (slab.r <= 0.0) return res;
    double r = std::min(slab.r, 1.0);
    int K = 40;
    auto bounds = geometric_bounds(1e-6 * r, r, K);
    double disc_factor = std::pow(kPi, n - 1); // area of the unit discs in the other coordinates
    const int R = 8;
    int kc = slab.k - 1;

    std::int64_t used = 0;
    for (int level = 0;; ++level) {
        int per_replicate = 64 << (2 * level);
        KahanSumComplex total;
        KahanSum err2;
        std::int64_t level_evals = 0;
        double inner_mean[2] = {0.0, 0.0}, inner_tmid[2] = {1.0, 1.0};
        std::vector<double> u(static_cast<size_t>(2 * n));
        Point z(static_cast<size_t>(n));
        for (int i = 0; i < K; ++i) {
            double a = bounds[size_t(i)], b = bounds[size_t(i) + 1];
            double s_lo = a * a, s_hi = b * b;
            double vol = kPi * (s_hi - s_lo) * disc_factor;
            double reps_re[R], reps_im[R];
            for (int rep = 0; rep < R; ++rep) {
                HaltonSequence seq(2 * n, numerics::hash_combine(opt.seed, std::uint64_t(i) * 8 + rep + 0x51ab));
                KahanSumComplex acc;
                for (int m = 0; m < per_replicate; ++m) {
                    seq.next(u);
                    double t = std::sqrt(s_lo + std::max(u[0], 1e-12) * (s_hi - s_lo));
                    double th = 2.0 * kPi * u[1];
                    z[size_t(kc)] = t * Complex(std::cos(th), std::sin(th));
                    int slot = 2;
                    for (int j = 0; j < n; ++j) {
                        if (j == kc) continue;
                        double tj = std::sqrt(u[size_t(slot)]);
                        double aj = 2.0 * kPi * u[size_t(slot) + 1];
                        z[size_t(j)] = tj * Complex(std::cos(aj), std::sin(aj));
                        slot += 2;
                    }
                    acc.add(density.eval(z));
                }
                level_evals += per_replicate;
                Complex mean = acc.get() / double(per_replicate);
                reps_re[rep] = mean.real() * vol;
                reps_im[rep] = mean.imag() * vol;
            }
            double mr = 0.0, mi = 0.0;
            for (int rep = 0; rep < R; ++rep) {
                mr += reps_re[rep];
                mi += reps_im[rep];
            }
            mr /= R;
            mi /= R;
            double var = 0.0;
            for (int rep = 0; rep < R; ++rep)
                var += (reps_re[rep] - mr) * (reps_re[rep] - mr) + (reps_im[rep] - mi) * (reps_im[rep] - mi);
            var /= (R * (R - 1));
            total.add(Complex(mr, mi));
            err2.add(var * 2.6 * 2.6);
            if (i < 2) {
                inner_mean[i] = mr / vol;
                inner_tmid[i] = std::sqrt(a * b);
            }
        }
        used += level_evals;
        res.value = total.get();
        res.error = std::sqrt(err2.get());
        res.evaluations = used;
        res.converged = true;
        // tail in the |z_k| coordinate: effective complex dimension 1, times
        // the unit-disc factor already contained in the shell means
        TailEstimate tail = power_tail(inner_mean[0] * disc_factor, inner_tmid[0],
                                       inner_mean[1] * disc_factor, inner_tmid[1], bounds.front(), 1);
        res.value += tail.value;
        res.error += tail.error;
        if (!tail.integrable) res.converged = false;
        bool tol_met = res.error <= std::max(opt.rel_tol * std::abs(res.value), opt.abs_tol);
        if (tol_met && res.converged) break;
        if (used + level_evals * 4 > opt.budget) {
            if (!tol_met) res.converged = false;
            break;
        }
    }
    return res;
}

} // namespace

QuadratureResult integrate(const Density& density, const Region& region, const Options& opt) {
    return std::visit(
        [&](const auto& reg) -> QuadratureResult {
            using T = std::decay_t<decltype(reg)>;
            if constexpr (std::is_same_v<T, Ball>) {
                if (reg.radius < 0.0) throw std::invalid_argument("integrate: negative radius");
                return integrate_annulus(density, reg.center, 0.0, reg.radius, opt);
            } else if constexpr (std::is_same_v<T, Annulus>) {
                return integrate_annulus(density, reg.center, reg.r1, reg.r2, opt);
            } else if constexpr (std::is_same_v<T, SubspaceDisc>) {
                return integrate_annulus(density, reg.center, reg.r1, reg.r2, opt);
            } else {
                return integrate_slab(density, reg, opt);
            }
        },
        region);
}

ProfileResult radial_profile(const Density& density, const Point& center,
                             std::span<const double> radii, const Options& opt) {
    ProfileResult out;
    if (radii.empty()) return out;
    for (size_t i = 0; i < radii.size(); ++i) {
        if (radii[i] <= 0.0) throw std::invalid_argument("radial_profile: radii must be positive");
        if (i > 0 && radii[i] <= radii[i - 1])
            throw std::invalid_argument("radial_profile: radii must be strictly increasing");
    }
    int d = density.dim;
    double r_max = radii.back();
    bool singular_center = false;
    for (const auto& s : density.singular)
        if (std::sqrt(forms::abs2_diff(s.where, center)) <= 1e-12 * std::max(r_max, 1.0)) singular_center = true;

    // shell boundaries: requested radii plus refinement below and between
    std::vector<double> bounds;
    bool tail = false;
    if (singular_center) {
        tail = true;
        double lo = 1e-6 * r_max;
        if (lo >= radii[0]) lo = 0.3 * radii[0];
        auto head = geometric_bounds(lo, radii[0], 12);
        bounds = head;
    } else {
        bounds.push_back(0.0);
        for (int i = 1; i <= 4; ++i) bounds.push_back(radii[0] * i / 4.0);
    }
    std::vector<size_t> radius_slot(radii.size());
    radius_slot[0] = bounds.size() - 1;
    for (size_t i = 1; i < radii.size(); ++i) {
        double a = radii[i - 1], b = radii[i];
        int m = std::clamp(int(std::ceil(std::log(b / a) / std::log(1.25))), 1, 10);
        for (int j = 1; j <= m; ++j) bounds.push_back(a * std::pow(b / a, double(j) / m));
        bounds.back() = b;
        radius_slot[i] = bounds.size() - 1;
    }

    EvalContext ctx{&density, center, {}, {}};
    int n_shells = int(bounds.size()) - 1;
    double power = radial_power(density, center, d, r_max);
    out.radii.assign(radii.begin(), radii.end());
    out.values.assign(radii.size(), 0.0);
    out.errors.assign(radii.size(), 0.0);

    std::int64_t used = 0;
    for (int level = 0;; ++level) {
        std::vector<Complex> shell_val(static_cast<size_t>(n_shells));
        std::vector<double> shell_err(static_cast<size_t>(n_shells));
        std::int64_t level_evals = 0;
        double inner_mean[2] = {0.0, 0.0}, inner_tmid[2] = {1.0, 1.0};
        for (int i = 0; i < n_shells; ++i) {
            double a = bounds[size_t(i)], b = bounds[size_t(i) + 1];
            ShellEstimate est = shell_estimate(ctx, d, a, b, power, level, opt.seed, std::uint64_t(i));
            shell_val[size_t(i)] = est.value;
            shell_err[size_t(i)] = est.error;
            level_evals += est.evals;
            if (i < 2) {
                double vol = ball_coeff(d) * (std::pow(b, 2 * d) - std::pow(a, 2 * d));
                inner_mean[i] = est.value.real() / vol;
                inner_tmid[i] = std::sqrt(a * b);
            }
        }
        used += level_evals;
        TailEstimate tailest;
        if (tail)
            tailest = power_tail(inner_mean[0], inner_tmid[0], inner_mean[1], inner_tmid[1], bounds.front(), d);
        out.converged = tailest.integrable;

        KahanSumComplex cum;
        KahanSum cum_err2;
        size_t next = 0;
        for (int i = 0; i < n_shells && next < radii.size(); ++i) {
            cum.add(shell_val[size_t(i)]);
            cum_err2.add(shell_err[size_t(i)] * shell_err[size_t(i)]);
            if (size_t(i + 1) == radius_slot[next]) {
                Complex v = cum.get();
                out.values[next] = v.real() + tailest.value;
                out.errors[next] = std::sqrt(cum_err2.get()) + tailest.error + std::abs(v.imag());
                ++next;
            }
        }
        out.evaluations = used;
        bool tol_met = true;
        for (size_t i = 0; i < radii.size(); ++i)
            if (out.errors[i] > std::max(opt.rel_tol * std::abs(out.values[i]), opt.abs_tol)) tol_met = false;
        if (tol_met && out.converged) break;
        std::int64_t next_cost = level_evals * (d == 1 ? 2 : 4);
        if (used + next_cost > opt.budget) {
            if (!tol_met) out.converged = false;
            break;
        }
    }
    return out;
}

} // namespace plurilab::quadrature
