#include "plurilab/current.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plurilab/reference_forms.hpp"

namespace plurilab::currents {

using quadrature::Annulus;
using quadrature::Ball;
using quadrature::Density;
using quadrature::PolydiscSlab;
using quadrature::SubspaceDisc;

std::string to_string(SignClass s) {
    switch (s) {
        case SignClass::plurisubharmonic: return "plurisubharmonic";
        case SignClass::plurisuperharmonic: return "plurisuperharmonic";
        case SignClass::closed: return "closed";
        default: return "unknown";
    }
}

AffineSubspace AffineSubspace::coordinate_axis(int n, int axis) {
    AffineSubspace s;
    s.ambient = n;
    s.dim = 1;
    s.anchor.assign(size_t(n), Complex(0.0));
    Point b(size_t(n), Complex(0.0));
    b[size_t(axis - 1)] = 1.0;
    s.basis.push_back(std::move(b));
    return s;
}

AffineSubspace AffineSubspace::line_through_origin(const Point& direction) {
    AffineSubspace s;
    s.ambient = int(direction.size());
    s.dim = 1;
    s.anchor.assign(direction.size(), Complex(0.0));
    double norm = std::sqrt(forms::abs2(direction));
    if (norm == 0.0) throw std::invalid_argument("line_through_origin: zero direction");
    Point b = direction;
    for (auto& c : b) c /= norm;
    s.basis.push_back(std::move(b));
    return s;
}

Point AffineSubspace::to_ambient(std::span<const Complex> u) const {
    Point z = anchor;
    for (int k = 0; k < dim; ++k)
        for (int j = 0; j < ambient; ++j) z[size_t(j)] += basis[size_t(k)][size_t(j)] * u[size_t(k)];
    return z;
}

Point AffineSubspace::project(std::span<const Complex> z) const {
    Point u(size_t(dim), Complex(0.0));
    for (int k = 0; k < dim; ++k)
        for (int j = 0; j < ambient; ++j)
            u[size_t(k)] += std::conj(basis[size_t(k)][size_t(j)]) * (z[size_t(j)] - anchor[size_t(j)]);
    return u;
}

double AffineSubspace::distance(std::span<const Complex> z) const {
    Point u = project(z);
    Point back = to_ambient(u);
    return std::sqrt(forms::abs2_diff(z, back));
}

forms::HolomorphicMap AffineSubspace::embedding() const {
    forms::HolomorphicMap phi;
    phi.from_dim = dim;
    phi.to_dim = ambient;
    AffineSubspace self = *this;
    phi.apply = [self](std::span<const Complex> u, std::span<Complex> z) {
        Point p = self.to_ambient(u);
        std::copy(p.begin(), p.end(), z.begin());
    };
    phi.jacobian = [self](std::span<const Complex>, int j, int k) {
        return self.basis[size_t(k - 1)][size_t(j - 1)];
    };
    return phi;
}

Current::Current(int n, int p, std::string name) : n_(n), p_(p), name_(std::move(name)) {
    if (n < 1 || p < 0 || p >= n) throw std::invalid_argument("Current: need 0 <= p < n");
}

void Current::add_smooth(Form coefficient) {
    int q = n_ - p_;
    if (coefficient.dim() != n_ || coefficient.deg_holo() != q || coefficient.deg_anti() != q)
        throw std::invalid_argument("Current: smooth component must be a (q,q)-form, q = n-p");
    components_.push_back(SmoothComponent{std::move(coefficient)});
}

void Current::add_carrier(AffineSubspace carrier, Form weight) {
    if (carrier.ambient != n_) throw std::invalid_argument("Current: carrier ambient dimension mismatch");
    if (weight.dim() != carrier.dim || weight.deg_holo() != weight.deg_anti())
        throw std::invalid_argument("Current: weight must be a (j,j)-form in carrier coordinates");
    if (carrier.dim - weight.deg_holo() != p_)
        throw std::invalid_argument("Current: carrier bidimension mismatch");
    components_.push_back(CarrierComponent{std::move(carrier), std::move(weight)});
}

void Current::add_atom(Point where, double mass) {
    if (p_ != 0) throw std::invalid_argument("Current: atoms only in bidimension (0,0)");
    if (int(where.size()) != n_) throw std::invalid_argument("Current: atom dimension mismatch");
    components_.push_back(AtomicComponent{std::move(where), mass});
}

void Current::declare_ddc(Current d) {
    if (d.dim() != n_ || d.bidim() != p_ - 1)
        throw std::invalid_argument("Current: declared ddc must have bidimension (p-1,p-1)");
    ddc_ = std::make_shared<const Current>(std::move(d));
}

const Current& Current::declared_ddc() const {
    if (!ddc_) throw std::logic_error("Current: no declared ddc");
    return *ddc_;
}

Current Current::without_declared_ddc() const {
    Current c = *this;
    c.ddc_.reset();
    return c;
}

Current ddc(const Current& T, const forms::DdcOptions& opt) {
    if (T.has_declared_ddc()) return T.declared_ddc();
    if (T.bidim() < 1) throw std::invalid_argument("ddc: bidimension (0,0) current without declaration");
    Current out(T.dim(), T.bidim() - 1, T.name().empty() ? "" : "ddc(" + T.name() + ")");
    for (const auto& comp : T.components()) {
        if (std::holds_alternative<SmoothComponent>(comp)) {
            const auto& sc = std::get<SmoothComponent>(comp);
            if (!sc.coefficient.singular_points().empty())
                throw std::invalid_argument("ddc: singular coefficient field without declared ddc");
            out.add_smooth(sc.coefficient.ddc_numeric(opt));
        } else if (std::holds_alternative<CarrierComponent>(comp)) {
            const auto& cc = std::get<CarrierComponent>(comp);
            if (!cc.weight.singular_points().empty())
                throw std::invalid_argument("ddc: non-differentiable weight without declared ddc");
            out.add_carrier(cc.carrier, cc.weight.ddc_numeric(opt));
        } else {
            throw std::invalid_argument("ddc: atomic component");
        }
    }
    out.set_sign_class(SignClass::closed);
    out.set_domain_radius(T.domain_radius());
    return out;
}

namespace {
forms::HolomorphicMap scaling_map(int n, Complex a) {
    forms::HolomorphicMap phi;
    phi.from_dim = n;
    phi.to_dim = n;
    phi.apply = [a, n](std::span<const Complex> w, std::span<Complex> z) {
        for (int j = 0; j < n; ++j) z[size_t(j)] = a * w[size_t(j)];
    };
    phi.jacobian = [a](std::span<const Complex>, int j, int k) {
        return j == k ? a : Complex(0.0);
    };
    return phi;
}

Form scale_pullback_form(const Form& F, Complex a) {
    std::vector<forms::SingularPoint> sing;
    for (const auto& s : F.singular_points()) {
        forms::SingularPoint t = s;
        for (auto& c : t.where) c /= a;
        sing.push_back(std::move(t));
    }
    return F.pulled_back(scaling_map(F.dim(), a), std::move(sing));
}
} // namespace

Current dilate_pullback(const Current& T, Complex a) {
    if (a == Complex(0.0)) throw std::invalid_argument("dilate_pullback: a = 0");
    Current out(T.dim(), T.bidim(), T.name());
    for (const auto& comp : T.components()) {
        if (std::holds_alternative<SmoothComponent>(comp)) {
            out.add_smooth(scale_pullback_form(std::get<SmoothComponent>(comp).coefficient, a));
        } else if (std::holds_alternative<CarrierComponent>(comp)) {
            const auto& cc = std::get<CarrierComponent>(comp);
            AffineSubspace carrier = cc.carrier;
            for (auto& c : carrier.anchor) c /= a;
            out.add_carrier(std::move(carrier), scale_pullback_form(cc.weight, a));
        } else {
            const auto& ac = std::get<AtomicComponent>(comp);
            Point where = ac.where;
            for (auto& c : where) c /= a;
            out.add_atom(std::move(where), ac.mass);
        }
    }
    if (T.has_declared_ddc()) out.declare_ddc(dilate_pullback(T.declared_ddc(), a));
    out.set_sign_class(T.sign_class());
    out.set_domain_radius(T.domain_radius() / std::abs(a));
    return out;
}

double trace_density(const Current& T, std::span<const Complex> z) {
    int p = T.bidim();
    double density = 0.0;
    for (const auto& comp : T.components()) {
        if (std::holds_alternative<SmoothComponent>(comp)) {
            const Form& F = std::get<SmoothComponent>(comp).coefficient;
            if (F.singular_distance(z) < 1e-12) throw std::domain_error("trace_density: singular point");
            Form top = F.wedge(forms::beta_power(T.dim(), p));
            density += top.top_density(z).real();
        } else if (std::holds_alternative<CarrierComponent>(comp)) {
            const auto& cc = std::get<CarrierComponent>(comp);
            if (cc.carrier.distance(z) < 1e-9) {
                Point u = cc.carrier.project(z);
                if (cc.weight.singular_distance(u) < 1e-12)
                    throw std::domain_error("trace_density: singular point");
                int m = cc.carrier.dim, j = cc.weight.deg_holo();
                // density against the carrier's intrinsic beta^p volume
                Form top = cc.weight.wedge(forms::beta_power(m, m - j));
                double beta_top = forms::beta_power(m, m).top_density(Point(size_t(m), Complex(0.0))).real();
                density += top.top_density(u).real() / beta_top;
            }
        } else {
            const auto& ac = std::get<AtomicComponent>(comp);
            if (forms::abs2_diff(z, ac.where) < 1e-24) throw std::domain_error("trace_density: atomic point");
        }
    }
    return density;
}

Form TestForm::effective() const {
    Form out(base.dim(), base.deg_holo(), base.deg_anti());
    for (const auto& [ij, f] : base.coefficients()) {
        numerics::RadialBump b = bump;
        Point c = center;
        forms::CoefficientFn fn = f;
        out.set_coefficient(ij.first, ij.second, [fn, b, c](std::span<const Complex> z) -> Complex {
            double t = std::sqrt(forms::abs2_diff(z, c));
            double w = b(t);
            if (w == 0.0) return {0.0, 0.0};
            return w * fn(z);
        });
    }
    return out;
}

Region TestForm::support_region() const {
    if (bump.a0 > 0.0) return Annulus{center, bump.a0, bump.a3};
    return Ball{center, bump.a3};
}

TestForm TestForm::dilate_pullback(Complex c) const {
    if (c == Complex(0.0)) throw std::invalid_argument("TestForm::dilate_pullback: c = 0");
    TestForm out;
    double ac = std::abs(c);
    out.center = center;
    for (auto& x : out.center) x /= c;
    out.bump = numerics::RadialBump{bump.a0 / ac, bump.a1 / ac, bump.a2 / ac, bump.a3 / ac};
    out.base = scale_pullback_form(base, c);
    out.id = id;
    return out;
}

DilatationFamily DilatationFamily::geometric(double ratio, int count, Complex phase) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("DilatationFamily: ratio must be in (0,1)");
    DilatationFamily fam;
    Complex a = phase / std::abs(phase);
    for (int k = 0; k < count; ++k) {
        fam.scales.push_back(a);
        a *= ratio;
    }
    return fam;
}

namespace {

struct CarrierRegion {
    bool empty = true;
    bool in_plane = false; // carrier sits inside {z_k = 0} of a slab region
    SubspaceDisc disc;
};

CarrierRegion pull_region(const AffineSubspace& Y, const Region& region) {
    CarrierRegion out;
    if (std::holds_alternative<Ball>(region) || std::holds_alternative<Annulus>(region)) {
        Point z0;
        double r1 = 0.0, r2 = 0.0;
        if (std::holds_alternative<Ball>(region)) {
            const auto& b = std::get<Ball>(region);
            z0 = b.center;
            r2 = b.radius;
        } else {
            const auto& a = std::get<Annulus>(region);
            z0 = a.center;
            r1 = a.r1;
            r2 = a.r2;
        }
        double d = Y.distance(z0);
        if (d >= r2) return out;
        double hi = std::sqrt(r2 * r2 - d * d);
        double lo = (r1 > d) ? std::sqrt(r1 * r1 - d * d) : 0.0;
        out.empty = false;
        out.disc = SubspaceDisc{Y.project(z0), lo, hi};
        return out;
    }
    if (std::holds_alternative<SubspaceDisc>(region)) {
        out.empty = false;
        out.disc = std::get<SubspaceDisc>(region);
        return out;
    }
    const auto& slab = std::get<PolydiscSlab>(region);
    if (Y.dim != 1 || forms::abs2(Y.anchor) > 0.0)
        throw std::invalid_argument("polydisc slab: only linear 1-dimensional carriers supported");
    const Point& b = Y.basis[0];
    double bk = std::abs(b[size_t(slab.k - 1)]);
    if (bk < 1e-14) {
        out.in_plane = true;
        return out; // carrier inside {z_k = 0}: slab mass 0 under the z_k != 0 convention
    }
    double hi = slab.r / bk;
    for (int j = 0; j < slab.n; ++j) {
        double bj = std::abs(b[size_t(j)]);
        if (bj > 1e-14) hi = std::min(hi, 1.0 / bj);
    }
    out.empty = false;
    out.disc = SubspaceDisc{Point{Complex(0.0)}, 0.0, hi};
    return out;
}

bool point_in_region(const Point& z, const Region& region) {
    if (std::holds_alternative<Ball>(region)) {
        const auto& b = std::get<Ball>(region);
        return forms::abs2_diff(z, b.center) < b.radius * b.radius;
    }
    if (std::holds_alternative<Annulus>(region)) {
        const auto& a = std::get<Annulus>(region);
        double d2 = forms::abs2_diff(z, a.center);
        return d2 >= a.r1 * a.r1 && d2 < a.r2 * a.r2;
    }
    if (std::holds_alternative<SubspaceDisc>(region)) {
        const auto& s = std::get<SubspaceDisc>(region);
        double d2 = forms::abs2_diff(z, s.center);
        return d2 >= s.r1 * s.r1 && d2 < s.r2 * s.r2;
    }
    const auto& slab = std::get<PolydiscSlab>(region);
    double zk = std::abs(z[size_t(slab.k - 1)]);
    if (zk <= 0.0 || zk >= slab.r) return false;
    for (const auto& c : z)
        if (std::abs(c) >= 1.0) return false;
    return true;
}

Density smooth_density(const Form& F, const Form& G, int n) {
    Form top = F.wedge(G);
    Density dens;
    dens.dim = n;
    dens.singular = top.singular_points();
    dens.eval = [top](std::span<const Complex> z) { return top.top_density(z); };
    return dens;
}

Density carrier_density(const CarrierComponent& cc, const Form& G) {
    int m = cc.carrier.dim;
    std::vector<forms::SingularPoint> sing;
    for (const auto& s : G.singular_points()) {
        if (cc.carrier.distance(s.where) < 1e-9) sing.push_back({cc.carrier.project(s.where), s.order});
    }
    Form Gu = G.pulled_back(cc.carrier.embedding(), sing);
    Form top = cc.weight.wedge(Gu);
    Density dens;
    dens.dim = m;
    dens.singular = top.singular_points();
    dens.eval = [top](std::span<const Complex> u) { return top.top_density(u); };
    return dens;
}

} // namespace

QuadratureResult wedge_mass(const Current& T, const Form& G, const Region& region, const Options& opt) {
    int n = T.dim(), p = T.bidim();
    if (G.dim() != n) throw std::invalid_argument("wedge_mass: form dimension mismatch");
    if (G.deg_holo() != p || G.deg_anti() != p)
        throw std::invalid_argument("wedge_mass: form bidegree must equal the bidimension");
    QuadratureResult total;
    total.converged = true;
    for (const auto& comp : T.components()) {
        if (std::holds_alternative<SmoothComponent>(comp)) {
            const auto& sc = std::get<SmoothComponent>(comp);
            QuadratureResult r = quadrature::integrate(smooth_density(sc.coefficient, G, n), region, opt);
            total.value += r.value;
            total.error += r.error;
            total.evaluations += r.evaluations;
            total.converged = total.converged && r.converged;
        } else if (std::holds_alternative<CarrierComponent>(comp)) {
            const auto& cc = std::get<CarrierComponent>(comp);
            CarrierRegion reg = pull_region(cc.carrier, region);
            if (reg.empty || reg.in_plane) continue;
            if (G.deg_holo() > cc.carrier.dim) continue; // pullback vanishes identically
            QuadratureResult r = quadrature::integrate(carrier_density(cc, G), Region{reg.disc}, opt);
            total.value += r.value;
            total.error += r.error;
            total.evaluations += r.evaluations;
            total.converged = total.converged && r.converged;
        } else {
            const auto& ac = std::get<AtomicComponent>(comp);
            if (G.deg_holo() != 0)
                throw std::invalid_argument("wedge_mass: atomic component against a positive-degree form");
            if (point_in_region(ac.where, region))
                total.value += ac.mass * G.raw_coefficient(forms::MultiIndex{}, forms::MultiIndex{}, ac.where);
        }
    }
    return total;
}

QuadratureResult sigma_mass(const Current& T, const Region& region, const Options& opt) {
    return wedge_mass(T, forms::beta_power(T.dim(), T.bidim()), region, opt);
}

QuadratureResult alpha_beta_mass(const Current& T, const Point& z0, int alpha_power,
                                 const Region& region, const Options& opt) {
    int p = T.bidim();
    if (alpha_power < 0 || alpha_power > p) throw std::invalid_argument("alpha_beta_mass: bad alpha power");
    Form G = forms::beta_power(T.dim(), p - alpha_power);
    if (alpha_power > 0) {
        Form a = forms::alpha(forms::ReferencePoint{z0}, T.dim());
        for (int i = 0; i < alpha_power; ++i) G = G.wedge(a);
    }
    return wedge_mass(T, G, region, opt);
}

QuadratureResult pair(const Current& T, const TestForm& phi, const Options& opt) {
    return wedge_mass(T, phi.effective(), phi.support_region(), opt);
}

quadrature::ProfileResult sigma_profile(const Current& T, const Point& z0,
                                        std::span<const double> radii, const Options& opt) {
    int n = T.dim(), p = T.bidim();
    quadrature::ProfileResult out;
    out.radii.assign(radii.begin(), radii.end());
    out.values.assign(radii.size(), 0.0);
    out.errors.assign(radii.size(), 0.0);
    out.converged = true;
    Form betap = forms::beta_power(n, p);
    for (const auto& comp : T.components()) {
        if (std::holds_alternative<SmoothComponent>(comp)) {
            const auto& sc = std::get<SmoothComponent>(comp);
            auto prof = quadrature::radial_profile(smooth_density(sc.coefficient, betap, n), z0, radii, opt);
            for (size_t i = 0; i < radii.size(); ++i) {
                out.values[i] += prof.values[i];
                out.errors[i] += prof.errors[i];
            }
            out.evaluations += prof.evaluations;
            out.converged = out.converged && prof.converged;
        } else if (std::holds_alternative<CarrierComponent>(comp)) {
            const auto& cc = std::get<CarrierComponent>(comp);
            double d = cc.carrier.distance(z0);
            Point u0 = cc.carrier.project(z0);
            std::vector<double> sub;
            std::vector<size_t> idx;
            for (size_t i = 0; i < radii.size(); ++i) {
                if (radii[i] > d * (1.0 + 1e-14)) {
                    sub.push_back(std::sqrt(radii[i] * radii[i] - d * d));
                    idx.push_back(i);
                }
            }
            if (sub.empty()) continue;
            auto prof = quadrature::radial_profile(carrier_density(cc, betap), u0, sub, opt);
            for (size_t k = 0; k < idx.size(); ++k) {
                out.values[idx[k]] += prof.values[k];
                out.errors[idx[k]] += prof.errors[k];
            }
            out.evaluations += prof.evaluations;
            out.converged = out.converged && prof.converged;
        } else {
            const auto& ac = std::get<AtomicComponent>(comp);
            double d = std::sqrt(forms::abs2_diff(ac.where, z0));
            for (size_t i = 0; i < radii.size(); ++i)
                if (d < radii[i]) out.values[i] += ac.mass;
        }
    }
    return out;
}

std::vector<TestForm> test_form_bank(int n, int p, double inner, double outer, int count,
                                     std::uint64_t seed) {
    std::vector<TestForm> bank;
    numerics::SplitMix64 g(seed);
    double rise = inner + 0.3 * (outer - inner);
    double fall = inner + 0.75 * (outer - inner);
    numerics::RadialBump bump{inner, rise, fall, outer};
    for (int i = 0; i < count; ++i) {
        TestForm phi;
        phi.center.assign(size_t(n), Complex(0.0));
        phi.bump = bump;
        phi.id = "phi" + std::to_string(i);
        if (i == 0) {
            phi.base = forms::beta_power(n, p);
        } else {
            std::vector<std::vector<Complex>> xi(static_cast<size_t>(p), std::vector<Complex>(static_cast<size_t>(n)));
            for (int l = 0; l < p; ++l)
                for (int j = 0; j < n; ++j) xi[size_t(l)][size_t(j)] = Complex(g.next_normal(), g.next_normal());
            phi.base = forms::simple_positive(n, xi, 0.25 + g.next_double());
        }
        bank.push_back(std::move(phi));
    }
    return bank;
}

bool carrier_inside_plane(const Current& T, int k) {
    for (const auto& comp : T.components()) {
        if (!std::holds_alternative<CarrierComponent>(comp)) continue;
        const auto& cc = std::get<CarrierComponent>(comp);
        bool inside = std::abs(cc.carrier.anchor[size_t(k - 1)]) < 1e-14;
        for (const auto& b : cc.carrier.basis)
            if (std::abs(b[size_t(k - 1)]) > 1e-14) inside = false;
        if (inside) return true;
    }
    return false;
}

} // namespace plurilab::currents
