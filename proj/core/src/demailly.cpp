#include "plurilab/demailly.hpp"

#include <cmath>
#include <stdexcept>

#include "plurilab/numerics.hpp"
#include "plurilab/reference_forms.hpp"

namespace plurilab::forms {

namespace {
double lambda_product(const MultiIndex& I, std::span<const double> lambda) {
    double p = 1.0;
    for (int i = 0; i < I.size(); ++i) p *= lambda[size_t(I[i] - 1)];
    return p;
}

/// All M with |M| = q and (I cap J) subset M subset (I cup J).
std::vector<MultiIndex> admissible_middle(const MultiIndex& I, const MultiIndex& J, int n) {
    std::vector<MultiIndex> out;
    for (const auto& M : MultiIndex::all(n, I.size())) {
        bool ok = true;
        for (int i = 0; i < M.size() && ok; ++i)
            if (!I.contains(M[i]) && !J.contains(M[i])) ok = false;
        for (int i = 0; i < I.size() && ok; ++i)
            if (J.contains(I[i]) && !M.contains(I[i])) ok = false;
        if (ok) out.push_back(M);
    }
    return out;
}
} // namespace

DemaillyReport demailly_check(const Form& S, std::span<const double> lambda,
                              std::span<const Complex> z, double rel_tol) {
    if (!S.is_qq()) throw std::invalid_argument("demailly_check: form must be (q,q)");
    int n = S.dim(), q = S.deg_holo();
    if (int(lambda.size()) != n) throw std::invalid_argument("demailly_check: weight vector length mismatch");
    for (double l : lambda)
        if (!(l > 0.0)) throw std::invalid_argument("demailly_check: weights must be positive");
    if (!S.hermitian_at(z, 1e-7)) throw std::invalid_argument("demailly_check: non-Hermitian coefficients");

    auto idx = MultiIndex::all(n, q);
    std::map<MultiIndex, double> diag;
    double scale = 0.0;
    for (const auto& M : idx) {
        double d = S.expansion_coefficient(M, M, z).real();
        diag[M] = d;
        scale = std::max(scale, std::abs(d));
    }

    DemaillyReport rep;
    double pow2q = std::pow(2.0, q);
    for (const auto& I : idx) {
        for (const auto& J : idx) {
            DemaillyEntry e;
            e.I = I;
            e.J = J;
            e.lhs = lambda_product(I, lambda) * lambda_product(J, lambda) *
                    std::abs(S.expansion_coefficient(I, J, z));
            numerics::KahanSum rhs;
            for (const auto& M : admissible_middle(I, J, n)) {
                double lm = lambda_product(M, lambda);
                rhs.add(lm * lm * diag.at(M));
            }
            e.rhs = pow2q * rhs.get();
            e.ok = e.lhs <= e.rhs + rel_tol * std::max(scale, 1.0) * std::max(e.rhs, 1.0);
            rep.worst_margin = std::max(rep.worst_margin, e.lhs - e.rhs);
            rep.ok = rep.ok && e.ok;
            rep.entries.push_back(std::move(e));
        }
    }
    return rep;
}

bool positivity_probe(const Form& S, std::span<const Complex> z, int trials,
                      std::uint64_t seed, double rel_tol) {
    if (!S.is_qq()) throw std::invalid_argument("positivity_probe: form must be (q,q)");
    int n = S.dim(), p = n - S.deg_holo();
    numerics::SplitMix64 g(seed);
    // magnitude reference: pairing against beta^p
    double scale = std::abs((S.wedge(beta_power(n, p))).top_density(z));
    for (int t = 0; t < trials; ++t) {
        std::vector<std::vector<Complex>> xi(static_cast<size_t>(p), std::vector<Complex>(static_cast<size_t>(n)));
        double norm2 = 0.0;
        for (int l = 0; l < p; ++l)
            for (int j = 0; j < n; ++j) {
                xi[size_t(l)][size_t(j)] = Complex(g.next_normal(), g.next_normal());
                norm2 += std::norm(xi[size_t(l)][size_t(j)]);
            }
        Form gamma = simple_positive(n, xi);
        Complex d = S.wedge(gamma).top_density(z);
        double floor = rel_tol * std::max({scale * std::pow(norm2, p), std::abs(d), 1e-300});
        if (d.real() < -floor) return false;
    }
    return true;
}

} // namespace plurilab::forms
