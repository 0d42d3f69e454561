#pragma once

#include "plurilab/current.hpp"

namespace plurilab::currents {

using forms::MultiIndex;
using ScalarField = std::function<Complex(std::span<const Complex>)>;

/// The projective chart w' = z'/z_n, w_n = z_n on {z_n != 0}, as the map
/// w -> z = (w' w_n, w_n) with its Jacobian.
forms::HolomorphicMap projective_chart_map(int n);

/// Ambient piece of a chart current: a (q,q)-form in w-coordinates.
struct ChartSmooth {
    forms::Form coefficient;
};

/// Line {w' = const} parametrized by w_n, with a scalar weight field.
/// This is the chart image of a line through the origin not contained in
/// {z_n = 0}.
struct ChartCarrier {
    Point w_prime;
    forms::Form weight; // (0,0)-form on C^1 in the w_n variable
};

using ChartComponent = std::variant<ChartSmooth, ChartCarrier>;

/// A current expressed in the projective chart.
class ChartCurrent {
public:
    ChartCurrent(int n, int p) : n_(n), p_(p) {}
    int dim() const { return n_; }
    int bidim() const { return p_; }
    void add(ChartComponent c) { comps_.push_back(std::move(c)); }
    const std::vector<ChartComponent>& components() const { return comps_; }

private:
    int n_, p_;
    std::vector<ChartComponent> comps_;
};

/// Chart representation of a current. Throws when a carrier lies inside
/// {z_n = 0} (chart-invisible); atoms at the origin are outside the chart
/// and are dropped.
ChartCurrent to_chart(const Current& T);

/// h_a in the chart acts as (w', w_n) -> (w', a w_n); coefficients pick up
/// the factor 1, a, conj(a) or |a|^2 according to membership of n in (I, J).
ChartCurrent chart_dilate(const ChartCurrent& C, Complex a);

/// Chart representation of h_a^* T: to_chart followed by the chart
/// dilatation transform.
ChartCurrent chart_pullback(const Current& T, Complex a);

/// Integral over U = {|z| < 1, 1/2 < |z_n| < 1} of a scalar density given in
/// w-coordinates, against Lebesgue measure d tau(w).
QuadratureResult chart_region_integral(int n, const ScalarField& f, const Options& opt);

/// Total variation |T_{I,J}|(U) of a chart coefficient measure.
QuadratureResult coefficient_mass(const ChartCurrent& C, const MultiIndex& I, const MultiIndex& J,
                                  const Options& opt);

/// f_{I,J} = int_U T_{I,J} phi d tau for a scalar test field on U.
QuadratureResult coefficient_pairing(const ChartCurrent& C, const MultiIndex& I, const MultiIndex& J,
                                     const ScalarField& phi, const Options& opt);

/// Pairing of a chart current with a test form given in standard
/// coordinates and supported in the chart region. Exists so z-space and
/// w-space pairings can be compared as a coordinate-change check.
QuadratureResult pair_in_chart(const ChartCurrent& C, const TestForm& phi, const Options& opt);

/// A smooth compactly supported scalar field inside U.
ScalarField chart_test_field(int n, std::uint64_t seed = 7);

} // namespace plurilab::currents
