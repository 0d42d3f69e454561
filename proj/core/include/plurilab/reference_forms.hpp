#pragma once

#include "plurilab/form.hpp"
#include "plurilab/numerics.hpp"

namespace plurilab::forms {

/// beta_{z0} = ddc |z-z0|^2, normalized so that the ball mass of beta^n over
/// B(z0,r) is r^{2n}. Constant coefficients; translation invariant.
Form beta(const ReferencePoint& z0, int n);
Form beta(int n);

/// beta^k, built by repeated wedging (k >= 0; beta^0 is the constant 1).
Form beta_power(int n, int k);

/// alpha_{z0} = ddc log|z-z0|^2, with the singular point z0 declared.
/// Coefficients (delta_jk |z-z0|^2 - conj(z_j-z0_j)(z_k-z0_k)) / |z-z0|^4
/// up to the normalization constant. Evaluation at z0 throws.
Form alpha(const ReferencePoint& z0, int n);
Form alpha(int n);

/// The constant function 1 as a (0,0)-form.
Form unit_form(int n);

/// Simple positive (p,p)-form: c * prod_l (i xi_l ^ conj(xi_l)) for covectors
/// xi_l given by rows of `covectors` (each of length n).
Form simple_positive(int n, const std::vector<std::vector<Complex>>& covectors, double c = 1.0);

/// Random positive (q,q)-form: a positive combination of `terms` simple
/// positive forms with Gaussian covectors. Deterministic in the seed.
Form random_positive_form(int n, int q, int terms, std::uint64_t seed);

/// A random Hermitian-symmetric (q,q)-form (not necessarily positive).
Form random_hermitian_form(int n, int q, std::uint64_t seed);

} // namespace plurilab::forms
