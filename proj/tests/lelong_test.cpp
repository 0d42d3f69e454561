#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "plurilab/fixtures.hpp"
#include "plurilab/lelong.hpp"

using namespace plurilab;
using currents::Current;
using forms::Complex;
using forms::Point;
using lelong::ConditionVerdict;
using lelong::LelongNumberResult;

namespace {
quadrature::Options opts(std::uint64_t seed = 31) {
    quadrature::Options o;
    o.seed = seed;
    return o;
}

Point origin(int n) { return Point(static_cast<size_t>(n), Complex(0.0)); }
} // namespace

TEST_CASE("nu closed forms") {
    auto opt = opts();
    SUBCASE("hyperplane: nu = 1") {
        Current H = currents::make_fixture("H");
        for (double r : {0.1, 0.5, 1.0, 2.0}) CHECK(lelong::nu(H, origin(2), r, opt).value == doctest::Approx(1.0));
    }
    SUBCASE("weighted carrier: nu = r^2/2") {
        Current T2 = currents::make_fixture("T2");
        for (double r : {0.25, 0.5, 1.0})
            CHECK(lelong::nu(T2, origin(2), r, opt).value == doctest::Approx(0.5 * r * r).epsilon(1e-10));
    }
    SUBCASE("log-weighted carrier: nu = 1 - 2 log r; the oracle confirms") {
        Current T1 = currents::make_fixture("T1");
        for (double r : {0.1, 0.3, 1.0}) {
            double oracle = oracles::radial_shell_integral(
                                1, [](double t) { return t > 0 ? -2.0 * std::log(t) / 3.14159265358979324 : 0.0; },
                                1e-9, r) /
                            (r * r);
            auto got = lelong::nu(T1, origin(2), r, opt);
            CHECK(got.value == doctest::Approx(1.0 - 2.0 * std::log(r)).epsilon(2e-6));
            CHECK(got.value == doctest::Approx(oracle).epsilon(2e-4));
        }
    }
    SUBCASE("energy fixture: nu constant, equal to 1 under this normalization") {
        Current T0 = currents::make_fixture("T0");
        std::vector<double> grid{0.25, 0.5, 1.0};
        auto prof = lelong::nu_profile(T0, origin(2), grid, opt);
        for (size_t i = 0; i < grid.size(); ++i)
            CHECK(std::abs(prof.values[i] - 1.0) <= 3.0 * prof.errors[i] + 5e-4);
        CHECK(std::abs(prof.values[2] - prof.values[0]) < 1e-3);
    }
    SUBCASE("working-domain guard") {
        Current T1 = currents::make_fixture("T1");
        CHECK_THROWS_AS((void)lelong::nu(T1, origin(2), 2.0, opt), std::domain_error);
    }
    SUBCASE("off-origin base point with the singularity inside the ball") {
        Current T0 = currents::make_fixture("T0");
        Point z0{Complex(0.3, 0.0), Complex(0.0)};
        double r = 0.6;
        auto got = lelong::nu(T0, z0, r, opt);
        auto ref = oracles::mc_ball_integral(
            2,
            [&z0](std::span<const Complex> w) {
                double r2 = std::norm(z0[0] + w[0]) + std::norm(z0[1] + w[1]);
                return 1.0 / (9.869604401089358 * r2); // pi^2
            },
            r, 2'000'000, 424242ULL);
        double want = ref.value / (r * r);
        CHECK(std::abs(got.value - want) <= 3.0 * (got.error + ref.stderr_ / (r * r)) + 3e-3 * want);
    }
}

TEST_CASE("nu monotonicity for plurisubharmonic fixtures") {
    auto opt = opts();
    auto grid = lelong::log_grid(5e-2, 1.0, 9);
    for (const char* id : {"T2", "S_rad", "W", "S_rad3", "H"}) {
        Current T = currents::make_fixture(id);
        auto prof = lelong::nu_profile(T, origin(T.dim()), grid, opt);
        for (size_t i = 1; i < grid.size(); ++i)
            CHECK(prof.values[i] >= prof.values[i - 1] - 2.0 * (prof.errors[i] + prof.errors[i - 1]) - 1e-12);
    }
}

TEST_CASE("lelong numbers") {
    auto opt = opts();
    auto grid = lelong::log_grid(1e-3, 0.5, 17);
    SUBCASE("hyperplane: 1") {
        auto res = lelong::lelong_number(currents::make_fixture("H"), origin(2), grid, opt);
        REQUIRE(res.kind == LelongNumberResult::Kind::value);
        CHECK(res.value == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("vanishing density: 0") {
        auto res = lelong::lelong_number(currents::make_fixture("T2"), origin(2), grid, opt);
        REQUIRE(res.kind == LelongNumberResult::Kind::value);
        CHECK(std::abs(res.value) < 1e-8);
    }
    SUBCASE("log blow-up: does not exist with slope -2") {
        auto res = lelong::lelong_number(currents::make_fixture("T1"), origin(2), grid, opt);
        REQUIRE(res.kind == LelongNumberResult::Kind::does_not_exist);
        CHECK(res.fitted_log_slope == doctest::Approx(-2.0).epsilon(1e-4));
    }
    SUBCASE("grid must reach 1e-3") {
        std::vector<double> bad{0.1, 0.5};
        CHECK_THROWS_AS((void)lelong::lelong_number(currents::make_fixture("H"), origin(2), bad, opt),
                        std::invalid_argument);
    }
}

TEST_CASE("condition integrals") {
    auto opt = opts();
    SUBCASE("dd^c condition for the quadratic carrier: 1/2") {
        auto rep = lelong::condition_C(currents::make_fixture("T2"), origin(2), 1.0, opt);
        REQUIRE(rep.finite());
        CHECK(rep.verdict.value == doctest::Approx(0.5).epsilon(2e-3));
        CHECK(std::abs(rep.verdict.value - 0.5) < 1e-3);
    }
    SUBCASE("closed currents have a vanishing condition integral") {
        auto rep = lelong::condition_C(currents::make_fixture("H"), origin(2), 1.0, opt);
        REQUIRE(rep.finite());
        CHECK(std::abs(rep.verdict.value) < 1e-12);
    }
    SUBCASE("atomic negative ddc diverges to -inf") {
        auto rep = lelong::condition_C(currents::make_fixture("T0"), origin(2), 1.0, opt);
        REQUIRE(rep.divergent());
        CHECK(rep.verdict.divergence_sign == -1);
        CHECK(rep.fitted_exponent == doctest::Approx(-1.0).epsilon(1e-6));
    }
    SUBCASE("dini for the quadratic carrier: 1/4") {
        auto rep = lelong::dini(currents::make_fixture("T2"), 1.0, opt);
        REQUIRE(rep.finite());
        CHECK(std::abs(rep.verdict.value - 0.25) < 1e-3);
    }
    SUBCASE("dini vanishes for the hyperplane") {
        auto rep = lelong::dini(currents::make_fixture("H"), 1.0, opt);
        REQUIRE(rep.finite());
        CHECK(std::abs(rep.verdict.value) < 1e-6);
    }
    SUBCASE("dini diverges when the Lelong number does not exist") {
        auto rep = lelong::dini(currents::make_fixture("T1"), 1.0, opt);
        CHECK(rep.divergent());
    }
}

TEST_CASE("gamma functions") {
    auto opt = opts();
    SUBCASE("hyperplane: both vanish") {
        auto [gt, gd] = lelong::gammas(currents::make_fixture("H"), 1.0, opt);
        CHECK(std::abs(gt.value) < 1e-12);
        CHECK(std::abs(gd.value) < 1e-12);
    }
    SUBCASE("quadratic carrier: (3r^2/8, 3r^2/4)") {
        for (double r : {0.5, 1.0}) {
            auto [gt, gd] = lelong::gammas(currents::make_fixture("T2"), r, opt);
            CHECK(gt.value == doctest::Approx(0.375 * r * r).epsilon(1e-9));
            CHECK(gd.value == doctest::Approx(0.75 * r * r).epsilon(1e-9));
        }
    }
    SUBCASE("energy fixture: both vanish") {
        auto [gt, gd] = lelong::gammas(currents::make_fixture("T0"), 1.0, opt);
        CHECK(std::abs(gt.value) <= 3.0 * gt.error + 1e-6);
        CHECK(std::abs(gd.value) < 1e-12);
    }
}

TEST_CASE("lambda with the calibrated correction") {
    auto opt = opts();
    const double kappa = 2.0;
    SUBCASE("closed current: lambda equals nu") {
        Current H = currents::make_fixture("H");
        auto lam = lelong::lambda(H, origin(2), 0.8, kappa, opt);
        auto nu = lelong::nu(H, origin(2), 0.8, opt);
        CHECK(lam.value == doctest::Approx(nu.value).epsilon(1e-10));
    }
    SUBCASE("capped carrier: lambda is constant 1") {
        Current S = currents::make_fixture("S_cap");
        std::vector<double> grid{0.2, 0.4, 0.6, 0.9};
        auto prof = lelong::lambda_profile(S, origin(2), grid, kappa, opt);
        for (size_t i = 0; i < grid.size(); ++i)
            CHECK(std::abs(prof.values[i] - 1.0) <= 3.0 * prof.errors[i] + 2e-4);
        SUBCASE("monotone within errors") {
            for (size_t i = 1; i < grid.size(); ++i)
                CHECK(prof.values[i] >= prof.values[i - 1] - 2.0 * (prof.errors[i] + prof.errors[i - 1]) - 1e-9);
        }
        SUBCASE("lambda - nu vanishes toward 0") {
            auto nus = lelong::nu_profile(S, origin(2), grid, opt);
            double tail0 = std::abs(prof.values[0] - nus.values[0]);
            double tail3 = std::abs(prof.values[3] - nus.values[3]);
            CHECK(tail0 < tail3); // the correction dies out as r -> 0
            CHECK(tail0 == doctest::Approx(kappa * grid[0] * grid[0] / 4.0).epsilon(1e-2));
        }
    }
    SUBCASE("divergent inner integral is an error") {
        CHECK_THROWS_AS((void)lelong::lambda(currents::make_fixture("T0"), origin(2), 0.5, kappa, opt),
                        std::domain_error);
    }
}

TEST_CASE("psi criterion") {
    auto opt = opts();
    SUBCASE("quadratic carrier: finite") {
        auto rep = lelong::psi_criterion(currents::make_fixture("T2"), 1.0, opt);
        CHECK(rep.main.finite());
        CHECK(rep.gamma_log.finite());
        CHECK(rep.dini_part.finite());
        CHECK(rep.condition_part.finite());
    }
    SUBCASE("hyperplane: zero") {
        auto rep = lelong::psi_criterion(currents::make_fixture("H"), 1.0, opt);
        REQUIRE(rep.main.finite());
        CHECK(std::abs(rep.main.verdict.value) < 1e-9);
    }
    SUBCASE("log carrier: divergent") {
        auto rep = lelong::psi_criterion(currents::make_fixture("T1"), 1.0, opt);
        CHECK(rep.main.divergent());
        CHECK(rep.dini_part.divergent());
    }
}

TEST_CASE("profile CSV layout") {
    auto opt = opts();
    std::vector<double> grid{0.5, 1.0};
    auto prof = lelong::nu_profile(currents::make_fixture("H"), origin(2), grid, opt);
    std::string csv = prof.to_csv();
    CHECK(csv.rfind("r,value,error\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
