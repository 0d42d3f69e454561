#include "doctest.h"

#include <cmath>
#include <numbers>

#include "plurilab/analysis.hpp"
#include "plurilab/chart.hpp"
#include "plurilab/fixtures.hpp"
#include "plurilab/reference_forms.hpp"

using namespace plurilab;
using currents::ChartCurrent;
using currents::Current;
using forms::Complex;
using forms::Form;
using forms::MultiIndex;
using forms::Point;

namespace {
const double kPi = std::numbers::pi;

quadrature::Options opts(std::uint64_t seed = 23) {
    quadrature::Options o;
    o.seed = seed;
    return o;
}

MultiIndex mi(std::initializer_list<int> v) {
    std::vector<int> vv(v);
    return MultiIndex(vv);
}

currents::TestForm chart_phi(int n) {
    currents::TestForm phi;
    phi.center.assign(static_cast<size_t>(n), Complex(0.0));
    phi.center[static_cast<size_t>(n - 1)] = Complex(0.75, 0.0);
    phi.bump = numerics::RadialBump{0.0, 0.05, 0.12, 0.2};
    phi.base = forms::beta(n);
    phi.id = "chart_phi";
    return phi;
}
} // namespace

TEST_CASE("chart map and its Jacobian") {
    auto map = currents::projective_chart_map(2);
    Point w{Complex(0.3, 0.1), Complex(0.8, -0.2)};
    Point z(2);
    map.apply(w, z);
    CHECK(z[0] == w[0] * w[1]);
    CHECK(z[1] == w[1]);
    CHECK(map.jacobian(w, 1, 1) == w[1]);
    CHECK(map.jacobian(w, 1, 2) == w[0]);
    CHECK(map.jacobian(w, 2, 1) == Complex(0.0));
    CHECK(map.jacobian(w, 2, 2) == Complex(1.0));
}

TEST_CASE("the four-factor dilatation rule for chart coefficients") {
    // a smooth current with four distinguishable constant coefficients
    Form F(2, 1, 1);
    F.set_constant(mi({1}), mi({1}), Complex(1.0, 0.0));
    F.set_constant(mi({1}), mi({2}), Complex(0.0, 2.0));
    F.set_constant(mi({2}), mi({1}), Complex(0.0, -2.0));
    F.set_constant(mi({2}), mi({2}), Complex(3.0, 0.0));
    ChartCurrent C(2, 1);
    C.add(currents::ChartSmooth{F});
    Complex a(0.6, 0.3);
    ChartCurrent Ca = currents::chart_dilate(C, a);
    const Form& Fa = std::get<currents::ChartSmooth>(Ca.components()[0]).coefficient;
    Point w{Complex(0.4, -0.1), Complex(0.7, 0.2)};
    Point wa = w;
    wa[1] *= a; // coefficients are evaluated at (w', a w_n)
    CHECK(std::abs(Fa.raw_coefficient(mi({1}), mi({1}), w) - F.raw_coefficient(mi({1}), mi({1}), wa)) < 1e-14);
    CHECK(std::abs(Fa.raw_coefficient(mi({1}), mi({2}), w) -
                   std::conj(a) * F.raw_coefficient(mi({1}), mi({2}), wa)) < 1e-14);
    CHECK(std::abs(Fa.raw_coefficient(mi({2}), mi({1}), w) -
                   a * F.raw_coefficient(mi({2}), mi({1}), wa)) < 1e-14);
    CHECK(std::abs(Fa.raw_coefficient(mi({2}), mi({2}), w) -
                   std::norm(a) * F.raw_coefficient(mi({2}), mi({2}), wa)) < 1e-14);
}

TEST_CASE("chart representation of line carriers") {
    SUBCASE("a carrier inside {z_n = 0} is chart-invisible") {
        CHECK_THROWS_AS((void)currents::to_chart(currents::make_fixture("H")), std::invalid_argument);
    }
    SUBCASE("the vertical line becomes {w_1 = 0} with unchanged weight") {
        ChartCurrent C = currents::to_chart(currents::make_fixture("T2p"));
        REQUIRE(C.components().size() == 1);
        const auto& cc = std::get<currents::ChartCarrier>(C.components()[0]);
        CHECK(std::abs(cc.w_prime[0]) < 1e-15);
        Point u{Complex(0.5, 0.25)};
        CHECK(cc.weight.raw_coefficient(MultiIndex{}, MultiIndex{}, u).real() ==
              doctest::Approx(std::norm(u[0])));
    }
}

TEST_CASE("coefficient masses over the chart region") {
    auto opt = opts();
    SUBCASE("closed conic carrier: only the plain class carries mass") {
        ChartCurrent C = currents::to_chart(currents::make_fixture("Hp"));
        for (Complex a : {Complex(1.0, 0.0), Complex(0.25, 0.0), Complex(0.1, 0.05)}) {
            ChartCurrent Ca = currents::chart_dilate(C, a);
            auto m11 = currents::coefficient_mass(Ca, mi({1}), mi({1}), opt);
            CHECK(m11.value.real() == doctest::Approx(0.75 * kPi).epsilon(1e-6)); // annulus area over pi
            for (auto [I, J] : {std::pair{mi({2}), mi({2})}, {mi({1}), mi({2})}, {mi({2}), mi({1})}}) {
                auto m = currents::coefficient_mass(Ca, I, J, opt);
                CHECK(std::abs(m.value.real()) < 1e-12);
            }
        }
    }
    SUBCASE("pairings against a chart test field are radially symmetric in a") {
        auto phi = currents::chart_test_field(2);
        Current S = currents::make_fixture("S_rad");
        double mod = 0.35;
        Complex a1(mod, 0.0), a2(mod * std::cos(1.1), mod * std::sin(1.1));
        auto f1 = analysis::chart_coefficient_pairing(S, mi({1}), mi({1}), a1, phi, opt);
        auto f2 = analysis::chart_coefficient_pairing(S, mi({1}), mi({1}), a2, phi, opt);
        CHECK(std::abs(f1.value - f2.value) <= 3.0 * (f1.error + f2.error) + 1e-6 * std::abs(f1.value));
    }
}

TEST_CASE("chart_pullback composes the chart map with the dilatation") {
    auto opt = opts();
    Complex a(0.3, 0.1);
    ChartCurrent lhs = currents::chart_pullback(currents::make_fixture("T2p"), a);
    ChartCurrent rhs = currents::chart_dilate(currents::to_chart(currents::make_fixture("T2p")), a);
    auto m1 = currents::coefficient_mass(lhs, mi({1}), mi({1}), opt);
    auto m2 = currents::coefficient_mass(rhs, mi({1}), mi({1}), opt);
    CHECK(m1.value.real() == m2.value.real());
}

TEST_CASE("chart and standard pairings agree") {
    auto opt = opts();
    auto phi = chart_phi(2);
    for (const char* id : {"Hp", "T2p", "S_rad"}) {
        Current T = currents::make_fixture(id);
        ChartCurrent C = currents::to_chart(T);
        for (Complex a : {Complex(1.0, 0.0), Complex(0.4, 0.2)}) {
            auto std_side = currents::pair(currents::dilate_pullback(T, a), phi, opt);
            auto chart_side = currents::pair_in_chart(currents::chart_dilate(C, a), phi, opt);
            CHECK(std::abs(std_side.value - chart_side.value) <=
                  2.0 * (std_side.error + chart_side.error) + 1e-10);
        }
    }
    SUBCASE("three-variable chart") {
        auto phi3 = chart_phi(3);
        phi3.base = forms::beta_power(3, 2);
        Current T = currents::make_fixture("S_rad3");
        ChartCurrent C = currents::to_chart(T);
        auto std_side = currents::pair(T, phi3, opt);
        auto chart_side = currents::pair_in_chart(C, phi3, opt);
        CHECK(std::abs(std_side.value - chart_side.value) <=
              3.0 * (std_side.error + chart_side.error) + 1e-4 * std::abs(std_side.value));
    }
}
