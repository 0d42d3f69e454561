#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "plurilab/demailly.hpp"
#include "plurilab/fixtures.hpp"
#include "plurilab/lelong.hpp"
#include "plurilab/reference_forms.hpp"

using namespace plurilab;
using currents::Current;
using currents::TestForm;
using forms::Complex;
using forms::Point;

namespace {
const double kPi = std::numbers::pi;

quadrature::Options opts(std::uint64_t seed = 17) {
    quadrature::Options o;
    o.seed = seed;
    return o;
}

Point origin(int n) { return Point(static_cast<size_t>(n), Complex(0.0)); }
} // namespace

TEST_CASE("fixture registry") {
    CHECK(currents::fixture_exists("T0"));
    CHECK_FALSE(currents::fixture_exists("bogus"));
    CHECK(currents::fixture_catalog().size() >= 10);
    CHECK_THROWS_AS((void)currents::make_fixture("bogus"), std::invalid_argument);

    for (const auto& info : currents::fixture_catalog()) {
        Current T = currents::make_fixture(info.id);
        CHECK(T.dim() == info.n);
        CHECK(T.bidim() == info.p);
        CHECK(T.sign_class() == info.sign_class);
    }
}

TEST_CASE("fixture positivity at sampled points") {
    numerics::SplitMix64 g(5150);
    for (const auto& info : currents::fixture_catalog()) {
        Current T = currents::make_fixture(info.id);
        for (const auto& comp : T.components()) {
            if (!std::holds_alternative<currents::SmoothComponent>(comp)) continue;
            const auto& F = std::get<currents::SmoothComponent>(comp).coefficient;
            for (int trial = 0; trial < 20; ++trial) {
                Point z(static_cast<size_t>(T.dim()));
                for (auto& c : z) c = 0.2 + Complex(g.next_normal(), g.next_normal());
                CHECK(forms::positivity_probe(F, z, 16, g.next()));
            }
        }
    }
}

TEST_CASE("carrier weights are nonnegative on the working domain") {
    numerics::SplitMix64 g(999);
    for (const auto& info : currents::fixture_catalog()) {
        Current T = currents::make_fixture(info.id);
        for (const auto& comp : T.components()) {
            if (!std::holds_alternative<currents::CarrierComponent>(comp)) continue;
            const auto& cc = std::get<currents::CarrierComponent>(comp);
            if (cc.weight.deg_holo() != 0) continue;
            for (int trial = 0; trial < 50; ++trial) {
                double t = 1e-3 + (info.domain_radius - 2e-3) * g.next_double();
                double th = 2 * kPi * g.next_double();
                Point u{t * Complex(std::cos(th), std::sin(th))};
                CHECK(cc.weight.raw_coefficient(forms::MultiIndex{}, forms::MultiIndex{}, u).real() >= -1e-12);
            }
        }
    }
}

TEST_CASE("trace densities") {
    SUBCASE("carrier of [z2 = 0] has unit density on the carrier") {
        Current H = currents::make_fixture("H");
        Point z{Complex(0.4, 0.3), Complex(0.0)};
        CHECK(currents::trace_density(H, z) == doctest::Approx(1.0));
        Point off{Complex(0.4, 0.3), Complex(0.5)};
        CHECK(currents::trace_density(H, off) == doctest::Approx(0.0));
    }
    SUBCASE("energy fixture density is 1/(pi^2 |z|^2)") {
        Current T0 = currents::make_fixture("T0");
        Point z{Complex(0.5, 0.1), Complex(-0.2, 0.4)};
        CHECK(currents::trace_density(T0, z) ==
              doctest::Approx(1.0 / (kPi * kPi * forms::abs2(z))).epsilon(1e-10));
        CHECK_THROWS_AS((void)currents::trace_density(T0, origin(2)), std::domain_error);
    }
    SUBCASE("zero current") {
        Current Z = currents::make_fixture("zero");
        Point z{Complex(0.4, 0.3), Complex(0.1)};
        CHECK(currents::trace_density(Z, z) == 0.0);
    }
}

TEST_CASE("ddc of fixtures") {
    auto opt = opts();
    SUBCASE("declared atomic ddc of the energy fixture") {
        Current D = currents::ddc(currents::make_fixture("T0"));
        std::vector<double> grid{0.1, 0.5, 1.0};
        auto prof = lelong::nu_profile(D, origin(2), grid, opt);
        for (double v : prof.values) CHECK(v == doctest::Approx(-1.0));
    }
    SUBCASE("finite differences reproduce the declared carrier ddc") {
        std::vector<double> grid{0.25, 0.5, 1.0};
        for (const char* id : {"T2", "W"}) {
            Current fd = currents::make_fixture(id).without_declared_ddc();
            auto prof = lelong::nu_ddc_profile(fd, origin(2), grid, opt);
            for (size_t i = 0; i < grid.size(); ++i)
                CHECK(prof.values[i] == doctest::Approx(grid[i] * grid[i]).epsilon(1e-6));
        }
    }
    SUBCASE("finite differences on the smooth radial fixture") {
        Current fd = currents::make_fixture("S_rad").without_declared_ddc();
        std::vector<double> grid{0.25, 0.5, 1.0};
        auto prof = lelong::nu_ddc_profile(fd, origin(2), grid, opt);
        for (size_t i = 0; i < grid.size(); ++i)
            CHECK(prof.values[i] == doctest::Approx(std::pow(grid[i], 4)).epsilon(1e-6));
    }
    SUBCASE("closed fixtures have vanishing ddc") {
        std::vector<double> grid{0.5, 1.0};
        auto prof = lelong::nu_ddc_profile(currents::make_fixture("H"), origin(2), grid, opt);
        for (double v : prof.values) CHECK(v == 0.0);
    }
    SUBCASE("singular weight without declaration is rejected") {
        Current T1 = currents::make_fixture("T1").without_declared_ddc();
        CHECK_THROWS_AS((void)currents::ddc(T1), std::invalid_argument);
    }
}

TEST_CASE("ddc sign classes hold on the grid") {
    auto opt = opts();
    std::vector<double> grid{0.1, 0.25, 0.5, 0.9};
    for (const auto& info : currents::fixture_catalog()) {
        Current T = currents::make_fixture(info.id);
        auto prof = lelong::nu_ddc_profile(T, origin(T.dim()), grid, opt);
        for (size_t i = 0; i < grid.size(); ++i) {
            double tol = 3.0 * prof.errors[i] + 1e-9;
            if (info.sign_class == currents::SignClass::plurisubharmonic)
                CHECK(prof.values[i] >= -tol);
            else if (info.sign_class == currents::SignClass::plurisuperharmonic)
                CHECK(prof.values[i] <= tol);
            else if (info.sign_class == currents::SignClass::closed)
                CHECK(std::abs(prof.values[i]) <= tol);
        }
    }
}

TEST_CASE("dilatation pullback") {
    auto opt = opts();
    SUBCASE("the energy fixture is dilatation invariant") {
        Current T0 = currents::make_fixture("T0");
        for (Complex a : {Complex(0.5, 0.0), Complex(0.3, 0.4), Complex(2.0, 0.0)}) {
            Current Ta = currents::dilate_pullback(T0, a);
            auto n0 = lelong::nu(T0, origin(2), 0.7, opt);
            auto na = lelong::nu(Ta, origin(2), 0.7, opt);
            CHECK(std::abs(na.value - n0.value) <= 2.0 * (na.error + n0.error) + 1e-10);
        }
    }
    SUBCASE("hyperplane carriers are invariant") {
        Current H = currents::make_fixture("H");
        Current Ha = currents::dilate_pullback(H, Complex(0.1, 0.2));
        auto v = lelong::nu(Ha, origin(2), 1.0, opt);
        CHECK(v.value == doctest::Approx(1.0));
    }
    SUBCASE("nu scaling identity across the registry") {
        std::vector<double> grid{0.3, 0.6, 1.0};
        for (const auto& info : currents::fixture_catalog()) {
            Current T = currents::make_fixture(info.id);
            for (Complex a : {Complex(0.5, 0.0), Complex(0.42426406871192851, 0.42426406871192851)}) {
                Current Ta = currents::dilate_pullback(T, a);
                auto left = lelong::nu_profile(Ta, origin(T.dim()), grid, opt);
                std::vector<double> scaled;
                for (double r : grid) scaled.push_back(std::abs(a) * r);
                auto right = lelong::nu_profile(T, origin(T.dim()), scaled, opt);
                for (size_t i = 0; i < grid.size(); ++i)
                    CHECK(std::abs(left.values[i] - right.values[i]) <=
                          2.0 * (left.errors[i] + right.errors[i]) + 1e-9 * std::max(1.0, right.values[i]));
            }
        }
    }
    SUBCASE("nu(h_a T2, 1) = |a|^2/2") {
        Current Ta = currents::dilate_pullback(currents::make_fixture("T2"), Complex(0.6, 0.8));
        auto v = lelong::nu(Ta, origin(2), 1.0, opt);
        CHECK(v.value == doctest::Approx(0.5).epsilon(1e-9));
    }
    CHECK_THROWS_AS((void)currents::dilate_pullback(currents::make_fixture("H"), Complex(0.0)),
                    std::invalid_argument);
}

TEST_CASE("weak pairings") {
    auto opt = opts();
    auto bank = currents::test_form_bank(2, 1, 0.25, 1.0, 5, 99);
    REQUIRE(bank.size() == 5);

    SUBCASE("pairing of the hyperplane against a cut-off beta slice") {
        // weight 1: the pairing is the carrier integral of the cutoff
        Current H = currents::make_fixture("H");
        TestForm phi = bank[0]; // bump times beta
        auto got = currents::pair(H, phi, opt);
        double want = oracles::radial_shell_integral(
            1, [&phi](double t) { return phi.bump(t) / kPi; }, phi.bump.a0, phi.bump.a3);
        CHECK(std::abs(got.value.real() - want) <= std::max(3.0 * got.error, 1e-6 * want));
    }

    SUBCASE("linearity in the test form") {
        Current T2 = currents::make_fixture("T2");
        TestForm sum = bank[1];
        sum.base = bank[1].base.plus(bank[2].base);
        auto p12 = currents::pair(T2, sum, opt);
        auto p1 = currents::pair(T2, bank[1], opt);
        auto p2 = currents::pair(T2, bank[2], opt);
        CHECK(std::abs(p12.value - p1.value - p2.value) <=
              p12.error + p1.error + p2.error + 1e-12);
    }

    SUBCASE("pairings of the energy fixture are real for real forms") {
        Current T0 = currents::make_fixture("T0");
        for (const auto& phi : bank) {
            auto v = currents::pair(T0, phi, opt);
            CHECK(std::abs(v.value.imag()) <= v.error + 1e-10 * std::abs(v.value.real()));
        }
    }

    SUBCASE("change of variables: <h_a T, phi> = <T, h_{1/a} phi>") {
        for (const char* id : {"T2", "S_rad", "H"}) {
            Current T = currents::make_fixture(id);
            Complex a(0.5, 0.25);
            Current Ta = currents::dilate_pullback(T, a);
            TestForm phi = bank[1];
            TestForm phi_back = phi.dilate_pullback(1.0 / a);
            auto lhs = currents::pair(Ta, phi, opt);
            auto rhs = currents::pair(T, phi_back, opt);
            CHECK(std::abs(lhs.value - rhs.value) <=
                  3.0 * (lhs.error + rhs.error) + 1e-8 * std::abs(lhs.value));
        }
    }
}

TEST_CASE("sigma profiles handle off-carrier base points") {
    auto opt = opts();
    Current H = currents::make_fixture("H");
    // base point at distance 0.5 from the carrier
    Point z0{Complex(0.0), Complex(0.5)};
    std::vector<double> grid{0.3, 0.5, 0.7, 1.0};
    auto prof = currents::sigma_profile(H, z0, grid, opt);
    for (size_t i = 0; i < grid.size(); ++i) {
        double want = grid[i] > 0.5 ? grid[i] * grid[i] - 0.25 : 0.0;
        CHECK(prof.values[i] == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("atoms pair only with scalar test data") {
    Current D(2, 0);
    D.add_atom(origin(2), -1.0);
    auto opt = opts();
    auto mass = currents::sigma_mass(D, quadrature::Ball{origin(2), 0.5}, opt);
    CHECK(mass.value.real() == doctest::Approx(-1.0));
    auto outside = currents::sigma_mass(D, quadrature::Annulus{origin(2), 0.25, 0.5}, opt);
    CHECK(outside.value.real() == 0.0);
}

TEST_CASE("current construction guards") {
    CHECK_THROWS_AS(Current(2, 2), std::invalid_argument); // p < n required
    Current T(2, 1);
    CHECK_THROWS_AS(T.add_atom(origin(2), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(T.add_smooth(forms::beta_power(2, 2)), std::invalid_argument);
    Current D(2, 0);
    CHECK_THROWS_AS(D.declare_ddc(Current(2, 0)), std::invalid_argument);
}
