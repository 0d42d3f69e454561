#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "plurilab/form.hpp"

namespace plurilab::quadrature {

using Complex = std::complex<double>;
using Point = std::vector<Complex>;

struct QuadratureResult {
    Complex value{0.0, 0.0};
    double error = 0.0;
    std::int64_t evaluations = 0;
    bool converged = true;

    double real_value() const { return value.real(); }
};

struct Options {
    double rel_tol = 1e-3;
    double abs_tol = 1e-12;
    std::int64_t budget = 1'000'000;
    std::uint64_t seed = 1;
};

/// Euclidean ball B(center, radius) in C^d, d = center.size().
struct Ball {
    Point center;
    double radius = 0.0;
};

/// B(center, r1, r2) = { r1 <= |z - center| < r2 }.
struct Annulus {
    Point center;
    double r1 = 0.0, r2 = 0.0;
};

/// { z in the unit polydisc of C^n : 0 < |z_k| < r }, k in 1..n.
struct PolydiscSlab {
    int n = 0;
    int k = 1;
    double r = 1.0;
};

/// Disc/annulus in the intrinsic coordinates of a carrier subspace.
struct SubspaceDisc {
    Point center;
    double r1 = 0.0, r2 = 0.0;
};

using Region = std::variant<Ball, Annulus, PolydiscSlab, SubspaceDisc>;

/// Integrable density on C^d. Point singularities carry a declared growth
/// order; evaluation near them is stratified by the integrator.
struct Density {
    int dim = 0;
    std::function<Complex(std::span<const Complex>)> eval;
    std::vector<forms::SingularPoint> singular;
};

QuadratureResult integrate(const Density& density, const Region& region, const Options& opt);

struct ProfileResult {
    std::vector<double> radii;
    std::vector<double> values;
    std::vector<double> errors;
    std::int64_t evaluations = 0;
    bool converged = true;
};

/// Nested ball masses r -> integral over B(center, r), evaluated in one
/// shared sampling pass so the profile is exactly nondecreasing for
/// nonnegative densities. `radii` must be strictly increasing and positive.
ProfileResult radial_profile(const Density& density, const Point& center,
                             std::span<const double> radii, const Options& opt);

} // namespace plurilab::quadrature
