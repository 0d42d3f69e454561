#include "plurilab/fixtures.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "plurilab/reference_forms.hpp"

namespace plurilab::currents {

namespace {
using forms::Form;
using forms::MultiIndex;

const Complex kI(0.0, 1.0);
const double kTwoPi = 2.0 * std::numbers::pi;

Form scalar_weight(std::function<Complex(Complex)> w, std::vector<forms::SingularPoint> sing = {}) {
    Form f(1, 0, 0);
    f.set_coefficient(MultiIndex{}, MultiIndex{},
                      [w = std::move(w)](std::span<const Complex> u) { return w(u[0]); });
    for (auto& s : sing) f.declare_singular(std::move(s));
    return f;
}

/// du ^ d^c u with u = log|z|^2 on C^2: coefficients conj(z_j) z_k / |z|^4
/// up to the normalization constant, singular at the origin.
Form energy_log_form() {
    Form f(2, 1, 1);
    for (int j = 1; j <= 2; ++j)
        for (int k = 1; k <= 2; ++k) {
            std::vector<int> vj{j}, vk{k};
            f.set_coefficient(MultiIndex(vj), MultiIndex(vk), [j, k](std::span<const Complex> z) -> Complex {
                double r2 = forms::abs2(z);
                if (r2 == 0.0) throw std::domain_error("T0: evaluation at the singular point");
                return (kI / kTwoPi) * std::conj(z[size_t(j - 1)]) * z[size_t(k - 1)] / (r2 * r2);
            });
        }
    f.declare_singular({Point{Complex(0.0), Complex(0.0)}, 2.0});
    return f;
}

Form radial_beta_form(int n) {
    Form beta = forms::beta(n);
    Form f(n, 1, 1);
    for (const auto& [ij, coeff] : beta.coefficients()) {
        forms::CoefficientFn fn = coeff;
        f.set_coefficient(ij.first, ij.second, [fn](std::span<const Complex> z) {
            return forms::abs2(z) * fn(z);
        });
    }
    return f;
}

Current zero_ddc(int n) {
    Current z(n, 0, "zero");
    z.set_sign_class(SignClass::closed);
    return z;
}

Current carrier_beta_ddc(int n, int axis, double scale) {
    Current d(n, 0);
    d.add_carrier(AffineSubspace::coordinate_axis(n, axis), forms::beta(1).scaled(scale));
    d.set_sign_class(SignClass::closed);
    return d;
}

Current atom_ddc(int n, double mass) {
    Current d(n, 0);
    d.add_atom(Point(size_t(n), Complex(0.0)), mass);
    d.set_sign_class(SignClass::closed);
    return d;
}
} // namespace

const std::vector<FixtureInfo>& fixture_catalog() {
    static const std::vector<FixtureInfo> catalog = {
        {"zero", 2, 1, SignClass::closed, 8.0, "zero current on C^2",
         {"all masses vanish"}},
        {"T0", 2, 1, SignClass::plurisuperharmonic, 8.0,
         "du ^ d^c u with u = log|z|^2 on C^2",
         {"conic: h_a-pullback invariant", "nu constant in r (value 1 under the ball-mass normalization)",
          "ddc = -delta_0, so nu_ddc = -1", "trace density 1/(pi^2 |z|^2)",
          "the dd^c integrability condition at 0 fails"}},
        {"T1", 2, 1, SignClass::plurisuperharmonic, 1.0,
         "-log|z_1|^2 [z_2 = 0] on C^2",
         {"nu(r) = 1 - 2 log r, blows up at 0: no Lelong number",
          "ddc = -delta_0", "Dini integral divergent"}},
        {"T2", 2, 1, SignClass::plurisubharmonic, 8.0,
         "|z_1|^2 [z_2 = 0] on C^2",
         {"nu(r) = r^2/2, Lelong number 0", "nu_ddc(t) = t^2",
          "Dini integral over (0,1] equals 1/4", "tangent cone is the zero current"}},
        {"H", 2, 1, SignClass::closed, 8.0, "[z_2 = 0] on C^2",
         {"nu = 1", "conic pluriharmonic", "restriction identity sides equal 1/2 for k=1"}},
        {"Hp", 2, 1, SignClass::closed, 8.0, "[z_1 = 0] on C^2",
         {"nu = 1", "conic pluriharmonic", "visible in the z_2 projective chart"}},
        {"T2p", 2, 1, SignClass::plurisubharmonic, 8.0, "|z_2|^2 [z_1 = 0] on C^2",
         {"nu(r) = r^2/2", "chart-visible analogue of T2"}},
        {"S_rad", 2, 1, SignClass::plurisubharmonic, 8.0, "|z|^2 beta on C^2",
         {"nu(r) = 2 r^4 / 3", "nu_ddc(t) = t^4", "smooth, non-closed"}},
        {"W", 2, 1, SignClass::plurisubharmonic, 8.0, "(1 + |z_1|^2) [z_2 = 0] on C^2",
         {"tangent cone is [z_2 = 0]", "nu(r) = 1 + r^2/2"}},
        {"S_cap", 2, 1, SignClass::plurisuperharmonic, 1.0, "(1 - |z_1|^2) [z_2 = 0] on C^2",
         {"plurisuperharmonic with finite dd^c condition integral",
          "nu(r) = 1 - r^2/2; the corrected Lambda function is constant 1"}},
        {"S_rad3", 3, 2, SignClass::plurisubharmonic, 8.0, "|z|^2 beta on C^3",
         {"bidimension (2,2) calibration fixture", "nu(r) = 3 r^4 / 4", "nu_ddc(t) = t^4"}},
    };
    return catalog;
}

bool fixture_exists(const std::string& id) {
    for (const auto& f : fixture_catalog())
        if (f.id == id) return true;
    return false;
}

FixtureInfo fixture_info(const std::string& id) {
    for (const auto& f : fixture_catalog())
        if (f.id == id) return f;
    throw std::invalid_argument("unknown fixture: " + id);
}

Current make_fixture(const std::string& id) {
    FixtureInfo info = fixture_info(id);
    Current T(info.n, info.p, info.id);
    T.set_sign_class(info.sign_class);
    T.set_domain_radius(info.domain_radius);

    if (id == "zero") {
        T.declare_ddc(zero_ddc(2));
    } else if (id == "T0") {
        T.add_smooth(energy_log_form());
        T.declare_ddc(atom_ddc(2, -1.0));
    } else if (id == "T1") {
        T.add_carrier(AffineSubspace::coordinate_axis(2, 1),
                      scalar_weight(
                          [](Complex u) -> Complex {
                              double r2 = std::norm(u);
                              if (r2 == 0.0) throw std::domain_error("T1: singular weight at 0");
                              return -std::log(r2);
                          },
                          {{Point{Complex(0.0)}, 0.5}}));
        T.declare_ddc(atom_ddc(2, -1.0));
    } else if (id == "T2") {
        T.add_carrier(AffineSubspace::coordinate_axis(2, 1),
                      scalar_weight([](Complex u) { return Complex(std::norm(u)); }));
        T.declare_ddc(carrier_beta_ddc(2, 1, 1.0));
    } else if (id == "H") {
        T.add_carrier(AffineSubspace::coordinate_axis(2, 1),
                      scalar_weight([](Complex) { return Complex(1.0); }));
        T.declare_ddc(zero_ddc(2));
    } else if (id == "Hp") {
        T.add_carrier(AffineSubspace::coordinate_axis(2, 2),
                      scalar_weight([](Complex) { return Complex(1.0); }));
        T.declare_ddc(zero_ddc(2));
    } else if (id == "T2p") {
        T.add_carrier(AffineSubspace::coordinate_axis(2, 2),
                      scalar_weight([](Complex u) { return Complex(std::norm(u)); }));
        T.declare_ddc(carrier_beta_ddc(2, 2, 1.0));
    } else if (id == "S_rad") {
        T.add_smooth(radial_beta_form(2));
        Current d(2, 0);
        d.add_smooth(forms::beta_power(2, 2));
        d.set_sign_class(SignClass::closed);
        T.declare_ddc(std::move(d));
    } else if (id == "W") {
        T.add_carrier(AffineSubspace::coordinate_axis(2, 1),
                      scalar_weight([](Complex u) { return Complex(1.0 + std::norm(u)); }));
        T.declare_ddc(carrier_beta_ddc(2, 1, 1.0));
    } else if (id == "S_cap") {
        T.add_carrier(AffineSubspace::coordinate_axis(2, 1),
                      scalar_weight([](Complex u) { return Complex(1.0 - std::norm(u)); }));
        T.declare_ddc(carrier_beta_ddc(2, 1, -1.0));
    } else if (id == "S_rad3") {
        T.add_smooth(radial_beta_form(3));
        Current d(3, 1);
        d.add_smooth(forms::beta_power(3, 2));
        d.set_sign_class(SignClass::closed);
        T.declare_ddc(std::move(d));
    }
    return T;
}

} // namespace plurilab::currents
