#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "plurilab/demailly.hpp"
#include "plurilab/form.hpp"
#include "plurilab/quadrature.hpp"
#include "plurilab/reference_forms.hpp"

using namespace plurilab;
using forms::Complex;
using forms::Form;
using forms::MultiIndex;
using forms::Point;

namespace {
const double kPi = std::numbers::pi;

Point pt2(double a, double b, double c, double d) { return {Complex(a, b), Complex(c, d)}; }

quadrature::QuadratureResult ball_mass(const Form& top, double r, std::uint64_t seed = 11) {
    quadrature::Density d;
    d.dim = top.dim();
    d.singular = top.singular_points();
    d.eval = [top](std::span<const Complex> z) { return top.top_density(z); };
    quadrature::Options opt;
    opt.seed = seed;
    return quadrature::integrate(d, quadrature::Ball{Point(static_cast<size_t>(top.dim()), Complex(0.0)), r},
                                 opt);
}
} // namespace

TEST_CASE("multi-index ordering and permutation signs") {
    std::vector<int> v{3, 1, 2};
    auto [I, sign] = MultiIndex::from_unsorted(v);
    CHECK(sign == 1); // (3,1,2) -> (1,2,3) is an even permutation
    CHECK(I.size() == 3);
    CHECK(I[0] == 1);
    CHECK(I[2] == 3);

    std::vector<int> w{2, 1};
    auto [J, s2] = MultiIndex::from_unsorted(w);
    CHECK(s2 == -1);
    CHECK(J[0] == 1);

    std::vector<int> dup{1, 1};
    CHECK(MultiIndex::from_unsorted(dup).second == 0);

    CHECK(MultiIndex::all(3, 2).size() == 3);
    CHECK(MultiIndex::all(4, 0).size() == 1);

    std::vector<int> a{1, 3};
    std::vector<int> b{2};
    auto [M, sm] = MultiIndex(a).merge(MultiIndex(b));
    CHECK(M.size() == 3);
    CHECK(sm == -1); // inserting 2 past 3
}

TEST_CASE("beta ball-mass normalization") {
    // oracle: the density of beta^n is constant; the radial reduction gives
    // the exact ball mass to Simpson accuracy
    for (int n = 1; n <= 3; ++n) {
        Form bn = forms::beta_power(n, n);
        double dens = bn.top_density(Point(static_cast<size_t>(n), Complex(0.2, 0.1))).real();
        for (double r : {0.5, 1.0, 2.0}) {
            double oracle = oracles::radial_shell_integral(n, [dens](double) { return dens; }, 0.0, r);
            double want = std::pow(r, 2.0 * n);
            CHECK(oracle == doctest::Approx(want).epsilon(1e-8));
            auto got = ball_mass(bn, r);
            CHECK(std::abs(got.value.real() - want) <= std::max(got.error, 1e-12 * want));
        }
    }
}

TEST_CASE("beta is translation invariant") {
    Form b0 = forms::beta(2);
    Form bz = forms::beta(forms::ReferencePoint{pt2(0.3, -0.2, 1.0, 0.5)}, 2);
    std::vector<int> one{1}, two{2};
    MultiIndex I(one), J(two);
    Point z = pt2(0.7, 0.1, -0.4, 0.9);
    CHECK(b0.raw_coefficient(I, I, z) == bz.raw_coefficient(I, I, z));
    CHECK(b0.raw_coefficient(I, J, z) == bz.raw_coefficient(I, J, z));
}

TEST_CASE("alpha coefficient structure") {
    Form a = forms::alpha(2);
    std::vector<int> one{1}, two{2};
    MultiIndex I1(one), I2(two);

    SUBCASE("on the z1 axis only the (2,2) slot survives") {
        Point z = pt2(0.8, 0.0, 0.0, 0.0);
        CHECK(std::abs(a.raw_coefficient(I1, I1, z)) < 1e-15);
        CHECK(std::abs(a.raw_coefficient(I1, I2, z)) < 1e-15);
        CHECK(std::abs(a.raw_coefficient(I2, I1, z)) < 1e-15);
        Complex c22 = a.raw_coefficient(I2, I2, z);
        // value proportional to 1/|z1|^2 under the normalization constant
        CHECK(std::abs(c22 - Complex(0.0, 1.0) / (2.0 * kPi) / 0.64) < 1e-12);
    }

    SUBCASE("alpha wedge alpha vanishes away from 0 in C^2") {
        Form aa = a.wedge(forms::alpha(2));
        for (auto z : {pt2(0.5, 0.1, -0.3, 0.2), pt2(1.0, 0.0, 0.0, 1.0), pt2(-0.2, 0.4, 0.6, -0.1)})
            CHECK(std::abs(aa.top_density(z)) < 1e-13);
    }

    SUBCASE("alpha annihilates the radial direction") {
        for (auto z : {pt2(0.5, 0.1, -0.3, 0.2), pt2(0.1, 0.0, 0.7, -0.5)}) {
            Complex pairing = 0.0;
            std::vector<MultiIndex> idx = MultiIndex::all(2, 1);
            for (const auto& I : idx)
                for (const auto& J : idx)
                    pairing += a.raw_coefficient(I, J, z) * z[static_cast<size_t>(I[0] - 1)] *
                               std::conj(z[static_cast<size_t>(J[0] - 1)]);
            CHECK(std::abs(pairing) < 1e-14);
        }
    }

    SUBCASE("evaluation at the singular point throws") {
        Point z0 = pt2(0, 0, 0, 0);
        std::vector<int> one_{1};
        MultiIndex I(one_);
        CHECK_THROWS_AS((void)a.raw_coefficient(I, I, z0), std::domain_error);
    }

    SUBCASE("alpha vanishes identically in one variable") {
        Form a1 = forms::alpha(1);
        std::vector<int> one_{1};
        MultiIndex I(one_);
        for (double x : {0.3, 1.5, -0.7})
            CHECK(std::abs(a1.raw_coefficient(I, I, Point{Complex(x, 0.2)})) < 1e-15);
    }
}

TEST_CASE("wedge: graded commutativity on sampled points") {
    numerics::SplitMix64 g(321);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 3;
        Form F = forms::random_hermitian_form(n, 1, g.next()); // degree 2
        Form G(n, 1, 0);
        std::vector<int> j{1 + int(g.next() % 3)};
        G.set_constant(MultiIndex(j), MultiIndex{}, Complex(g.next_normal(), g.next_normal())); // degree 1
        Form FG = F.wedge(G);
        Form GF = G.wedge(F);
        double sign = (F.degree() * G.degree()) % 2 ? -1.0 : 1.0;
        Point z{Complex(g.next_normal(), 0.1), Complex(0.4, g.next_normal()), Complex(-0.3, 0.2)};
        for (const auto& [ij, fn] : FG.coefficients()) {
            Complex lhs = fn(z);
            Complex rhs = sign * GF.raw_coefficient(ij.first, ij.second, z);
            CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(lhs)));
        }
    }
}

TEST_CASE("wedge: degree overflow is rejected") {
    Form b2 = forms::beta_power(2, 2);
    CHECK_THROWS_AS((void)b2.wedge(forms::beta(2)), std::invalid_argument);
}

TEST_CASE("hermitian symmetry survives wedging") {
    numerics::SplitMix64 g(77);
    for (int trial = 0; trial < 8; ++trial) {
        Form F = forms::random_hermitian_form(3, 1, g.next());
        Form G = forms::random_hermitian_form(3, 1, g.next());
        Form W = F.wedge(G);
        Point z{Complex(0.5, g.next_normal()), Complex(g.next_normal(), -0.2), Complex(0.1, 0.3)};
        CHECK(W.hermitian_at(z, 1e-9));
    }
}

TEST_CASE("top density of the energy form t0 = du ^ d^c u") {
    // raw assembly of du ^ d^c u, u = log|z|^2, against the trace closed form
    Form t0(2, 1, 1);
    const Complex kI(0.0, 1.0);
    for (int j = 1; j <= 2; ++j)
        for (int k = 1; k <= 2; ++k) {
            std::vector<int> vj{j}, vk{k};
            t0.set_coefficient(MultiIndex(vj), MultiIndex(vk), [j, k, kI](std::span<const Complex> z) {
                double r2 = forms::abs2(z);
                return (kI / (2.0 * kPi)) * std::conj(z[static_cast<size_t>(j - 1)]) *
                       z[static_cast<size_t>(k - 1)] / (r2 * r2);
            });
        }
    SUBCASE("trace density is 1/(pi^2 |z|^2)") {
        for (auto z : {pt2(0.4, 0.1, -0.2, 0.3), pt2(1.0, 0.0, 0.5, -0.5)}) {
            double want = 1.0 / (kPi * kPi * forms::abs2(z));
            CHECK(t0.wedge(forms::beta(2)).top_density(z).real() == doctest::Approx(want).epsilon(1e-12));
        }
    }
    SUBCASE("density of t0 ^ alpha is 1/(pi^2 |z|^4)") {
        Form ta = t0.wedge(forms::alpha(2));
        for (auto z : {pt2(0.4, 0.1, -0.2, 0.3), pt2(0.9, -0.3, 0.2, 0.6)}) {
            double r2 = forms::abs2(z);
            double want = 1.0 / (kPi * kPi * r2 * r2);
            CHECK(ta.top_density(z).real() == doctest::Approx(want).epsilon(1e-11));
        }
    }
}

TEST_CASE("ddc of coefficient fields by finite differences") {
    SUBCASE("ddc |z|^2 = beta") {
        Form f(2, 0, 0);
        f.set_coefficient(MultiIndex{}, MultiIndex{},
                          [](std::span<const Complex> z) { return Complex(forms::abs2(z)); });
        Form d = f.ddc_numeric();
        Form b = forms::beta(2);
        Point z = pt2(0.3, -0.1, 0.8, 0.2);
        for (const auto& [ij, fn] : b.coefficients())
            CHECK(std::abs(d.raw_coefficient(ij.first, ij.second, z) - fn(z)) < 1e-8);
    }
    SUBCASE("ddc |z|^4 matches the analytic Hessian") {
        Form f(2, 0, 0);
        f.set_coefficient(MultiIndex{}, MultiIndex{}, [](std::span<const Complex> z) {
            double r2 = forms::abs2(z);
            return Complex(r2 * r2);
        });
        Form d = f.ddc_numeric({1e-4, true});
        const Complex kI(0.0, 1.0);
        Point z = pt2(0.5, 0.2, -0.3, 0.4);
        double r2 = forms::abs2(z);
        for (int j = 1; j <= 2; ++j)
            for (int k = 1; k <= 2; ++k) {
                std::vector<int> vj{j}, vk{k};
                Complex want = (kI / (2.0 * kPi)) *
                               (2.0 * std::conj(z[static_cast<size_t>(j - 1)]) * z[static_cast<size_t>(k - 1)] +
                                (j == k ? 2.0 * r2 : 0.0));
                CHECK(std::abs(d.raw_coefficient(MultiIndex(vj), MultiIndex(vk), z) - want) < 1e-7);
            }
    }
}

TEST_CASE("demailly bound") {
    SUBCASE("diagonal forms pass for any weights") {
        Form b = forms::beta_power(2, 1);
        std::vector<double> lam{3.0, 0.25};
        auto rep = forms::demailly_check(b, lam, pt2(0.1, 0.2, 0.3, 0.4));
        CHECK(rep.ok);
        for (const auto& e : rep.entries)
            if (!(e.I == e.J)) CHECK(e.lhs == doctest::Approx(0.0));
    }
    SUBCASE("energy form off-diagonal bound at unit weights") {
        Form t0(2, 1, 1);
        const Complex kI(0.0, 1.0);
        for (int j = 1; j <= 2; ++j)
            for (int k = 1; k <= 2; ++k) {
                std::vector<int> vj{j}, vk{k};
                t0.set_coefficient(MultiIndex(vj), MultiIndex(vk), [j, k, kI](std::span<const Complex> z) {
                    double r2 = forms::abs2(z);
                    return (kI / (2.0 * kPi)) * std::conj(z[static_cast<size_t>(j - 1)]) *
                           z[static_cast<size_t>(k - 1)] / (r2 * r2);
                });
            }
        std::vector<double> lam{1.0, 1.0};
        for (auto z : {pt2(0.4, 0.1, -0.2, 0.3), pt2(0.6, -0.5, 0.1, 0.9)}) {
            auto rep = forms::demailly_check(t0, lam, z);
            CHECK(rep.ok);
        }
    }
    SUBCASE("positive combinations of simple forms never violate the bound") {
        numerics::SplitMix64 g(1234);
        int violations = 0;
        for (int i = 0; i < 1000; ++i) {
            int n = 2 + (i % 2), q = 1 + (i % 2);
            Form S = forms::random_positive_form(n, q, 1 + int(g.next() % 4), g.next());
            std::vector<double> lam(static_cast<size_t>(n));
            for (auto& l : lam) l = 0.1 + 4.0 * g.next_double();
            Point z(static_cast<size_t>(n));
            for (auto& c : z) c = Complex(g.next_normal(), g.next_normal());
            if (!forms::demailly_check(S, lam, z).ok) ++violations;
        }
        CHECK(violations == 0);
    }
    SUBCASE("non-Hermitian input is rejected") {
        Form bad(2, 1, 1);
        std::vector<int> one{1}, two{2};
        bad.set_constant(MultiIndex(one), MultiIndex(two), Complex(1.0, 0.0));
        std::vector<double> lam{1.0, 1.0};
        CHECK_THROWS_AS((void)forms::demailly_check(bad, lam, pt2(0.1, 0, 0.2, 0)), std::invalid_argument);
    }
}

TEST_CASE("positivity probe") {
    Point z = pt2(0.3, 0.2, -0.4, 0.1);
    CHECK(forms::positivity_probe(forms::beta_power(2, 1), z, 32));
    Point z3{Complex(0.2), Complex(0.1, 0.4), Complex(-0.3)};
    CHECK(forms::positivity_probe(forms::beta_power(3, 2), z3, 32));
    CHECK_FALSE(forms::positivity_probe(forms::beta(2).scaled(-1.0), z, 8));
}
