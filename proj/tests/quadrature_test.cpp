#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "plurilab/quadrature.hpp"

using namespace plurilab;
using quadrature::Annulus;
using quadrature::Ball;
using quadrature::Density;
using quadrature::Options;
using quadrature::PolydiscSlab;
using Complex = std::complex<double>;
using Point = std::vector<Complex>;

namespace {
const double kPi = std::numbers::pi;

Density power_density(int d, double a, double order_hint) {
    Density dens;
    dens.dim = d;
    dens.eval = [a](std::span<const Complex> z) {
        double r2 = 0.0;
        for (const auto& c : z) r2 += std::norm(c);
        return Complex(std::pow(r2, 0.5 * a));
    };
    if (a < 0.0) dens.singular.push_back({Point(static_cast<size_t>(d), Complex(0.0)), order_hint});
    return dens;
}

double power_ball_truth(int d, double a, double r) {
    // closed form of the |z|^a ball integral
    double area1 = oracles::sphere_area(d, 1.0);
    return area1 * std::pow(r, 2 * d + a) / (2 * d + a);
}
} // namespace

TEST_CASE("closed-form powers of |z| over balls") {
    Options opt;
    opt.seed = 3;
    for (int d : {1, 2, 3}) {
        for (double a : {0.0, 2.0, -1.0, -2.0}) {
            if (2 * d + a <= 0.2) continue;
            Density dens = power_density(d, a, -a);
            for (double r : {0.5, 1.25}) {
                double want = power_ball_truth(d, a, r);
                auto got = quadrature::integrate(dens, Ball{Point(static_cast<size_t>(d), Complex(0.0)), r}, opt);
                CHECK(got.converged);
                CHECK(std::abs(got.value.real() - want) <= std::max(3.0 * got.error, 1e-3 * want));
            }
        }
    }
}

TEST_CASE("error honesty on the closed-form suite") {
    int honest = 0, total = 0;
    for (int d : {1, 2}) {
        for (double a : {0.0, 2.0, 3.0, -1.0, -2.0}) {
            if (2 * d + a <= 0.2) continue;
            for (std::uint64_t seed = 1; seed <= 12; ++seed) {
                Options opt;
                opt.seed = seed;
                Density dens = power_density(d, a, -a);
                double r = 1.0;
                double want = power_ball_truth(d, a, r);
                auto got = quadrature::integrate(dens, Ball{Point(static_cast<size_t>(d), Complex(0.0)), r}, opt);
                double observed = std::abs(got.value.real() - want);
                if (observed <= std::max(got.error, 1e-13 * std::abs(want))) ++honest;
                ++total;
            }
        }
    }
    CHECK(honest >= (total * 95) / 100);
}

TEST_CASE("empty annulus integrates to zero") {
    Options opt;
    auto got = quadrature::integrate(power_density(2, 0.0, 0.0),
                                     Annulus{Point(2, Complex(0.0)), 0.7, 0.7}, opt);
    CHECK(got.value.real() == 0.0);
    CHECK(got.error == 0.0);
    CHECK(got.converged);
}

TEST_CASE("additivity: ball difference equals the annulus") {
    Options opt;
    opt.seed = 9;
    for (double a : {0.0, -2.0}) {
        Density dens = power_density(2, a, -a);
        Point c(2, Complex(0.0));
        auto b1 = quadrature::integrate(dens, Ball{c, 0.6}, opt);
        auto b2 = quadrature::integrate(dens, Ball{c, 1.1}, opt);
        auto ann = quadrature::integrate(dens, Annulus{c, 0.6, 1.1}, opt);
        double lhs = b2.value.real() - b1.value.real();
        CHECK(std::abs(lhs - ann.value.real()) <=
              b1.error + b2.error + ann.error + 1e-10 * std::abs(lhs));
    }
}

TEST_CASE("determinism: identical inputs give bit-identical results") {
    for (int d : {1, 2}) {
        Density dens;
        dens.dim = d;
        dens.eval = [](std::span<const Complex> z) {
            return Complex(std::exp(-std::norm(z[0])) + z[0].real());
        };
        Options opt;
        opt.seed = 4242;
        auto r1 = quadrature::integrate(dens, Ball{Point(static_cast<size_t>(d), Complex(0.0)), 1.0}, opt);
        auto r2 = quadrature::integrate(dens, Ball{Point(static_cast<size_t>(d), Complex(0.0)), 1.0}, opt);
        CHECK(r1.value.real() == r2.value.real());
        CHECK(r1.value.imag() == r2.value.imag());
        CHECK(r1.error == r2.error);
        CHECK(r1.evaluations == r2.evaluations);
    }
}

TEST_CASE("radial profile: shared samples, exact nesting") {
    Options opt;
    opt.seed = 21;
    Density dens = power_density(2, -2.0, 2.0); // the trace shape of the energy fixture
    std::vector<double> radii{0.1, 0.2, 0.35, 0.5, 0.8, 1.0};
    auto prof = quadrature::radial_profile(dens, Point(2, Complex(0.0)), radii, opt);
    REQUIRE(prof.values.size() == radii.size());
    for (size_t i = 1; i < radii.size(); ++i) CHECK(prof.values[i] >= prof.values[i - 1]); // exact
    for (size_t i = 0; i < radii.size(); ++i) {
        double want = power_ball_truth(2, -2.0, radii[i]);
        CHECK(std::abs(prof.values[i] - want) <= std::max(3.0 * prof.errors[i], 2e-3 * want));
    }

    SUBCASE("profile values agree with one-off integrals within 2x error") {
        for (size_t i = 0; i < radii.size(); i += 2) {
            auto one = quadrature::integrate(dens, Ball{Point(2, Complex(0.0)), radii[i]}, opt);
            CHECK(std::abs(prof.values[i] - one.value.real()) <=
                  2.0 * (prof.errors[i] + one.error) + 1e-12);
        }
    }
}

TEST_CASE("off-center singular points are carved out") {
    // |z - p|^{-2} integrated over a ball around the origin containing p
    Point p{Complex(0.4, 0.0), Complex(0.0, 0.0)};
    Density dens;
    dens.dim = 2;
    dens.singular.push_back({p, 2.0});
    dens.eval = [p](std::span<const Complex> z) {
        double r2 = 0.0;
        for (size_t i = 0; i < z.size(); ++i) r2 += std::norm(z[i] - p[i]);
        return Complex(1.0 / r2);
    };
    Options opt;
    opt.seed = 5;
    opt.rel_tol = 5e-3;
    auto got = quadrature::integrate(dens, Ball{Point(2, Complex(0.0)), 1.0}, opt);
    // oracle: tight Monte Carlo reference
    auto ref = oracles::mc_ball_integral(
        2,
        [&p](std::span<const Complex> z) {
            double r2 = 0.0;
            for (size_t i = 0; i < z.size(); ++i) r2 += std::norm(z[i] - p[i]);
            return 1.0 / r2;
        },
        1.0, 4'000'000, 987654321ULL);
    CHECK(std::abs(got.value.real() - ref.value) <= 3.0 * (got.error + ref.stderr_) + 5e-3 * ref.value);
}

TEST_CASE("polydisc slab masses") {
    Options opt;
    opt.seed = 15;
    SUBCASE("constant density: slab area in C^1") {
        Density one;
        one.dim = 1;
        one.eval = [](std::span<const Complex>) { return Complex(1.0); };
        auto got = quadrature::integrate(one, PolydiscSlab{1, 1, 0.5}, opt);
        CHECK(got.value.real() == doctest::Approx(kPi * 0.25).epsilon(1e-3));
    }
    SUBCASE("log integrand against the closed form in C^2") {
        // integral of -log|z_1| over {|z_1| < 1} x {|z_2| < 1}
        Density dens;
        dens.dim = 2;
        dens.eval = [](std::span<const Complex> z) {
            double t = std::abs(z[0]);
            return Complex(t > 0 ? -std::log(t) : 0.0);
        };
        auto got = quadrature::integrate(dens, PolydiscSlab{2, 1, 1.0}, opt);
        double want = kPi * 0.5 * kPi; // (pi/2) from the disc integral, pi from the free disc
        CHECK(std::abs(got.value.real() - want) <= std::max(3.0 * got.error, 2e-3 * want));
    }
}

TEST_CASE("non-integrable declared order flags non-convergence") {
    Density dens = power_density(2, -4.0, 4.0); // |z|^{-4} is not integrable at 0 in R^4
    Options opt;
    opt.budget = 50'000;
    auto got = quadrature::integrate(dens, Ball{Point(2, Complex(0.0)), 1.0}, opt);
    CHECK_FALSE(got.converged);
}

TEST_CASE("region invariants are enforced") {
    Options opt;
    Density dens = power_density(2, 0.0, 0.0);
    CHECK_THROWS_AS((void)quadrature::integrate(dens, Annulus{Point(2, Complex(0.0)), 1.0, 0.5}, opt),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)quadrature::integrate(dens, Ball{Point(2, Complex(0.0)), -1.0}, opt),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)quadrature::integrate(dens, PolydiscSlab{2, 3, 0.5}, opt),
                    std::invalid_argument);
    Density wrong = power_density(3, 0.0, 0.0);
    CHECK_THROWS_AS((void)quadrature::integrate(wrong, Ball{Point(2, Complex(0.0)), 1.0}, opt),
                    std::invalid_argument);
}

TEST_CASE("subspace-disc regions integrate like annuli") {
    Options opt;
    opt.seed = 2;
    Density dens = power_density(1, 2.0, 0.0);
    Point c{Complex(0.0)};
    auto a = quadrature::integrate(dens, quadrature::SubspaceDisc{c, 0.25, 0.75}, opt);
    auto b = quadrature::integrate(dens, Annulus{c, 0.25, 0.75}, opt);
    CHECK(a.value.real() == b.value.real());
}
