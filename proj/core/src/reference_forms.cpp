#include "plurilab/reference_forms.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace plurilab::forms {

namespace {
const Complex kI(0.0, 1.0);
const double kTwoPi = 2.0 * std::numbers::pi;

Complex ipow(int k) {
    k %= 4;
    if (k < 0) k += 4;
    switch (k) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}
} // namespace

Form beta(const ReferencePoint&, int n) { return beta(n); }

Form beta(int n) {
    // ddc|z-z0|^2 has constant coefficients: the shift does not survive ddc.
    Form b(n, 1, 1);
    for (int j = 1; j <= n; ++j) {
        std::vector<int> v{j};
        MultiIndex I(v);
        b.set_constant(I, I, kI / kTwoPi);
    }
    return b;
}

Form beta_power(int n, int k) {
    if (k == 0) return unit_form(n);
    Form out = beta(n);
    for (int i = 1; i < k; ++i) out = out.wedge(beta(n));
    return out;
}

Form alpha(const ReferencePoint& z0, int n) {
    Form a(n, 1, 1);
    const Point c = z0.z0;
    if (int(c.size()) != n) throw std::invalid_argument("alpha: reference point dimension mismatch");
    for (int j = 1; j <= n; ++j) {
        for (int k = 1; k <= n; ++k) {
            std::vector<int> vj{j}, vk{k};
            a.set_coefficient(MultiIndex(vj), MultiIndex(vk),
                              [c, j, k](std::span<const Complex> z) -> Complex {
                                  double r2 = abs2_diff(z, c);
                                  if (r2 == 0.0) throw std::domain_error("alpha: evaluation at the singular point");
                                  Complex zj = z[size_t(j - 1)] - c[size_t(j - 1)];
                                  Complex zk = z[size_t(k - 1)] - c[size_t(k - 1)];
                                  Complex num = (j == k) ? Complex(r2) : Complex(0.0);
                                  num -= std::conj(zj) * zk;
                                  return (kI / kTwoPi) * num / (r2 * r2);
                              });
        }
    }
    a.declare_singular({c, 2.0});
    return a;
}

Form alpha(int n) { return alpha(ReferencePoint::origin(n), n); }

Form unit_form(int n) {
    Form one(n, 0, 0);
    one.set_constant(MultiIndex{}, MultiIndex{}, 1.0);
    return one;
}

Form simple_positive(int n, const std::vector<std::vector<Complex>>& covectors, double c) {
    Form out = unit_form(n).scaled(c);
    for (const auto& xi : covectors) {
        if (int(xi.size()) != n) throw std::invalid_argument("simple_positive: covector length mismatch");
        Form factor(n, 1, 1);
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k) {
                Complex v = kI * xi[size_t(j - 1)] * std::conj(xi[size_t(k - 1)]);
                if (v != Complex(0.0)) {
                    std::vector<int> vj{j}, vk{k};
                    factor.set_constant(MultiIndex(vj), MultiIndex(vk), v);
                }
            }
        out = out.wedge(factor);
    }
    return out;
}

Form random_positive_form(int n, int q, int terms, std::uint64_t seed) {
    numerics::SplitMix64 g(seed);
    Form out(n, q, q);
    bool first = true;
    for (int t = 0; t < terms; ++t) {
        std::vector<std::vector<Complex>> xi(static_cast<size_t>(q), std::vector<Complex>(static_cast<size_t>(n)));
        for (int l = 0; l < q; ++l)
            for (int j = 0; j < n; ++j) xi[size_t(l)][size_t(j)] = Complex(g.next_normal(), g.next_normal());
        double c = 0.05 + g.next_double();
        Form term = simple_positive(n, xi, c);
        out = first ? term : out.plus(term);
        first = false;
    }
    return out;
}

Form random_hermitian_form(int n, int q, std::uint64_t seed) {
    numerics::SplitMix64 g(seed);
    Form out(n, q, q);
    auto idx = MultiIndex::all(n, q);
    // fill the expansion-convention upper triangle, mirror by conjugation
    Complex pref = std::pow(2.0, -q) * ipow(q * q); // expansion -> raw prefactor
    for (size_t a = 0; a < idx.size(); ++a) {
        for (size_t b = a; b < idx.size(); ++b) {
            Complex s = (a == b) ? Complex(g.next_normal(), 0.0)
                                 : Complex(g.next_normal(), g.next_normal());
            out.set_constant(idx[a], idx[b], pref * s);
            if (a != b) out.set_constant(idx[b], idx[a], pref * std::conj(s));
        }
    }
    return out;
}

} // namespace plurilab::forms
