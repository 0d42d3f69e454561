#pragma once

#include <complex>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "plurilab/multi_index.hpp"

namespace plurilab::forms {

using Complex = std::complex<double>;
using Point = std::vector<Complex>;
using CoefficientFn = std::function<Complex(std::span<const Complex>)>;

/// Declared singular point of a coefficient field. `order` bounds the local
/// growth: |f(z)| <~ |z - where|^{-order}. Singular loci are declared at
/// construction, never detected.
struct SingularPoint {
    Point where;
    double order = 0.0;
};

/// Reference point z0; the forms beta and alpha are centered here.
struct ReferencePoint {
    Point z0;
    static ReferencePoint origin(int n) { return ReferencePoint{Point(size_t(n), Complex(0.0))}; }
};

/// Holomorphic map C^m -> C^n together with its Jacobian, used to pull
/// forms back to carriers and chart coordinates.
struct HolomorphicMap {
    int from_dim = 0; // m
    int to_dim = 0;   // n
    std::function<void(std::span<const Complex>, std::span<Complex>)> apply;
    /// dz_j / dw_k, with j in 1..n and k in 1..m
    std::function<Complex(std::span<const Complex>, int, int)> jacobian;
};

struct DdcOptions {
    double rel_step = 1e-4;   // h = rel_step * max(|z|, 0.01)
    bool richardson = false;  // h and h/2 extrapolation
};

/// An (s,t)-form on an open set of C^n:
///     F = sum_{|I|=s,|J|=t} f_{I,J}(z) dz_I ^ dzbar_J
/// with the raw coefficients f_{I,J} stored as evaluable fields. For (q,q)
/// forms, expansion_coefficient() returns the coefficients S_{I,J} of
///     F = 2^{-q} i^{q^2} sum S_{I,J} dz_I ^ dzbar_J,
/// the convention under which Hermitian symmetry and the Demailly bound
/// are stated.
class Form {
public:
    Form() = default;
    Form(int n, int s, int t) : n_(n), s_(s), t_(t) {}

    int dim() const { return n_; }
    int deg_holo() const { return s_; }
    int deg_anti() const { return t_; }
    int degree() const { return s_ + t_; }
    bool is_qq() const { return s_ == t_; }

    void set_coefficient(const MultiIndex& I, const MultiIndex& J, CoefficientFn f);
    void add_coefficient(const MultiIndex& I, const MultiIndex& J, CoefficientFn f, Complex scale = 1.0);
    /// Constant-coefficient convenience.
    void set_constant(const MultiIndex& I, const MultiIndex& J, Complex c);

    const std::map<IndexPair, CoefficientFn>& coefficients() const { return coeffs_; }

    Complex raw_coefficient(const MultiIndex& I, const MultiIndex& J, std::span<const Complex> z) const;
    /// Coefficient in the 2^{-q} i^{q^2} expansion convention; (q,q) forms only.
    Complex expansion_coefficient(const MultiIndex& I, const MultiIndex& J, std::span<const Complex> z) const;

    /// Hermitian symmetry of the expansion-convention coefficients at a point.
    bool hermitian_at(std::span<const Complex> z, double rel_tol = 1e-9) const;

    Form wedge(const Form& other) const;
    Form scaled(Complex c) const;
    Form plus(const Form& other) const;

    /// Density of a top-degree (n,n) form against Lebesgue volume on R^{2n}.
    Complex top_density(std::span<const Complex> z) const;
    static Complex top_factor(int n);

    /// Pull back through a holomorphic map; singular points must be supplied
    /// by the caller in the source coordinates.
    Form pulled_back(const HolomorphicMap& phi, std::vector<SingularPoint> singular = {}) const;

    /// (i/2pi) ddbar of this form, coefficients differentiated by central
    /// finite differences.
    Form ddc_numeric(const DdcOptions& opt = {}) const;

    void declare_singular(SingularPoint s) { singular_.push_back(std::move(s)); }
    const std::vector<SingularPoint>& singular_points() const { return singular_; }
    /// Distance from z to the nearest declared singular point (inf if none).
    double singular_distance(std::span<const Complex> z) const;

private:
    int n_ = 0, s_ = 0, t_ = 0;
    std::map<IndexPair, CoefficientFn> coeffs_;
    std::vector<SingularPoint> singular_;
};

double abs2(std::span<const Complex> z);
double abs2_diff(std::span<const Complex> z, std::span<const Complex> w);

} // namespace plurilab::forms
