#pragma once

// Test-side integration oracles. These stay independent of the quadrature
// module: plain Simpson radial reduction plus a pseudorandom mean-value
// integrator, enough to confirm every closed-form constant asserted below.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace oracles {

using Complex = std::complex<double>;

/// Surface area of the sphere |z| = t in C^d (R^{2d}).
inline double sphere_area(int d, double t) {
    // A_{2d}(t) = 2 pi^d t^{2d-1} / (d-1)!
    double c = 2.0;
    for (int i = 1; i <= d; ++i) c *= std::numbers::pi;
    for (int i = 1; i < d; ++i) c /= i;
    return c * std::pow(t, 2 * d - 1);
}

/// Simpson integral over the shell t in [lo, hi] of a density that is
/// radial about the origin: the density is probed on one ray.
inline double radial_shell_integral(int d, const std::function<double(double)>& radial_density,
                                    double lo, double hi, int nodes = 4001) {
    if (nodes % 2 == 0) ++nodes;
    double h = (hi - lo) / (nodes - 1);
    double acc = 0.0;
    for (int i = 0; i < nodes; ++i) {
        double t = lo + h * i;
        double w = (i == 0 || i == nodes - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * radial_density(t) * sphere_area(d, t);
    }
    return acc * h / 3.0;
}

/// Mean-value Monte Carlo over a ball for non-radial integrands; returns the
/// estimate and a standard error. Deliberately naive.
struct McResult {
    double value;
    double stderr_;
};

inline McResult mc_ball_integral(int d, const std::function<double(std::span<const Complex>)>& f,
                                 double radius, int samples, unsigned long long seed) {
    // xorshift-style generator, independent of the library's RNG
    auto next = [&seed]() {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        return double(seed >> 11) * 0x1.0p-53;
    };
    std::vector<Complex> z(static_cast<size_t>(d));
    double sum = 0.0, sum2 = 0.0;
    int kept = 0;
    double cube_vol = std::pow(2.0 * radius, 2 * d);
    for (int i = 0; i < samples; ++i) {
        double r2 = 0.0;
        for (int j = 0; j < d; ++j) {
            double x = radius * (2.0 * next() - 1.0);
            double y = radius * (2.0 * next() - 1.0);
            z[static_cast<size_t>(j)] = Complex(x, y);
            r2 += x * x + y * y;
        }
        double v = (r2 < radius * radius) ? f(z) : 0.0;
        sum += v;
        sum2 += v * v;
        ++kept;
    }
    double mean = sum / kept;
    double var = std::max(sum2 / kept - mean * mean, 0.0);
    return {mean * cube_vol, cube_vol * std::sqrt(var / kept)};
}

} // namespace oracles
