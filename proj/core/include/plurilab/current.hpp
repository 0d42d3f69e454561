#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "plurilab/form.hpp"
#include "plurilab/numerics.hpp"
#include "plurilab/quadrature.hpp"

namespace plurilab::currents {

using forms::Complex;
using forms::Form;
using forms::Point;
using quadrature::Options;
using quadrature::QuadratureResult;
using quadrature::Region;

/// Complex affine subspace of dimension m in C^n, given by an anchor and an
/// orthonormal complex basis. Carrier of integration components.
struct AffineSubspace {
    int ambient = 0;
    int dim = 0;
    Point anchor;
    std::vector<Point> basis; // dim columns of length ambient

    static AffineSubspace coordinate_axis(int n, int axis); // span{e_axis} through 0
    static AffineSubspace line_through_origin(const Point& direction);

    Point to_ambient(std::span<const Complex> u) const;
    Point project(std::span<const Complex> z) const; // B^*(z - anchor)
    double distance(std::span<const Complex> z) const;
    forms::HolomorphicMap embedding() const;
};

/// Ambient piece: a (q,q)-form with locally integrable coefficient fields.
struct SmoothComponent {
    Form coefficient;
};

/// Integration over a carrier subspace against a weight form W of bidegree
/// (j,j) in the carrier coordinates; scalar weights are (0,0)-forms. The
/// component has bidimension (dim - j, dim - j).
struct CarrierComponent {
    AffineSubspace carrier;
    Form weight;
};

/// Point mass; only for bidimension (0,0) currents. The mass is real.
struct AtomicComponent {
    Point where;
    double mass = 0.0;
};

using CurrentComponent = std::variant<SmoothComponent, CarrierComponent, AtomicComponent>;

enum class SignClass { plurisubharmonic, plurisuperharmonic, closed, unknown };

std::string to_string(SignClass s);

/// A positive (p,p)-current on a ball around the origin of C^n, represented
/// as a sum of components. dd^c may be declared analytically; this is how
/// atomic distributional parts (invisible to finite differences) enter.
class Current {
public:
    Current(int n, int p, std::string name = "");

    void add_smooth(Form coefficient);
    void add_carrier(AffineSubspace carrier, Form weight);
    void add_atom(Point where, double mass);

    void declare_ddc(Current ddc);
    void set_sign_class(SignClass s) { sign_ = s; }
    void set_domain_radius(double r) { domain_radius_ = r; }

    int dim() const { return n_; }
    int bidim() const { return p_; }
    SignClass sign_class() const { return sign_; }
    double domain_radius() const { return domain_radius_; }
    const std::string& name() const { return name_; }
    void set_name(std::string s) { name_ = std::move(s); }

    const std::vector<CurrentComponent>& components() const { return components_; }
    bool has_declared_ddc() const { return ddc_ != nullptr; }
    const Current& declared_ddc() const;
    Current without_declared_ddc() const;

private:
    int n_, p_;
    std::string name_;
    std::vector<CurrentComponent> components_;
    std::shared_ptr<const Current> ddc_;
    SignClass sign_ = SignClass::unknown;
    double domain_radius_ = 8.0;
};

/// dd^c of a current: the declared value when present, otherwise central
/// finite differences on every coefficient/weight field.
Current ddc(const Current& T, const forms::DdcOptions& opt = {});

/// Pullback under the dilatation h_a(z) = a z, a != 0. Carriers through the
/// origin map to themselves with rescaled weights; ddc declarations follow.
Current dilate_pullback(const Current& T, Complex a);

/// Density of the trace measure at z: Lebesgue density for ambient pieces,
/// weight against the carrier's intrinsic volume for carrier pieces.
double trace_density(const Current& T, std::span<const Complex> z);

/// Compactly supported radial-bump test form: bump(|z - center|) times a
/// (p,p) coefficient form.
struct TestForm {
    Form base;
    numerics::RadialBump bump;
    Point center;
    std::string id;

    Form effective() const;
    Region support_region() const;
    TestForm dilate_pullback(Complex c) const; // h_c^* of the test form
};

/// Scale sequence a_k for dilatation-limit experiments; |a_k| decreasing.
struct DilatationFamily {
    std::vector<Complex> scales;
    static DilatationFamily geometric(double ratio, int count, Complex phase = {1.0, 0.0});
};

/// Integral of T wedge G over a region, summed over components. G must have
/// bidegree (g,g) with g equal to the bidimension for mass integrals.
QuadratureResult wedge_mass(const Current& T, const Form& G, const Region& region, const Options& opt);

/// Trace-measure mass over a region: T wedge beta^p.
QuadratureResult sigma_mass(const Current& T, const Region& region, const Options& opt);

/// Mass of T wedge alpha_{z0}^j wedge beta^{p-j} over a region.
QuadratureResult alpha_beta_mass(const Current& T, const Point& z0, int alpha_power,
                                 const Region& region, const Options& opt);

/// Weak pairing <T, phi>.
QuadratureResult pair(const Current& T, const TestForm& phi, const Options& opt);

/// Shared-sample trace masses over nested balls B(z0, r_i).
quadrature::ProfileResult sigma_profile(const Current& T, const Point& z0,
                                        std::span<const double> radii, const Options& opt);

/// Bank of radial-bump test forms of bidimension-matching bidegree (p,p),
/// supported in the annulus [inner..outer] around 0.
std::vector<TestForm> test_form_bank(int n, int p, double inner, double outer, int count,
                                     std::uint64_t seed);

/// True when the carrier of some component lies inside {z_k = 0}.
bool carrier_inside_plane(const Current& T, int k);

} // namespace plurilab::currents
