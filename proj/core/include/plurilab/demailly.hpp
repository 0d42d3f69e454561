#pragma once

#include "plurilab/form.hpp"

namespace plurilab::forms {

/// One off-diagonal bound lambda_I lambda_J |S_{I,J}| <= 2^q sum_M lambda_M^2 S_{M,M}
/// evaluated at a point, with M running over {M : |M|=q, I&J subset M subset I|J}.
struct DemaillyEntry {
    MultiIndex I, J;
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = true;
};

struct DemaillyReport {
    std::vector<DemaillyEntry> entries;
    double worst_margin = 0.0; // max(lhs - rhs) over entries, <= 0 when all pass
    bool ok = true;
};

/// Checks the weighted off-diagonal coefficient bound for a positive (q,q)
/// form at a point. Rejects non-Hermitian input. The weights enter the
/// right-hand side squared, which is the scaling that survives the
/// diagonal case I = J for arbitrary positive weights.
DemaillyReport demailly_check(const Form& S, std::span<const double> lambda,
                              std::span<const Complex> z, double rel_tol = 1e-9);

/// Pairs S with `trials` random simple positive (p,p)-forms at z; true iff
/// every pairing has nonnegative real part within tolerance.
bool positivity_probe(const Form& S, std::span<const Complex> z, int trials,
                      std::uint64_t seed = 2024, double rel_tol = 1e-9);

} // namespace plurilab::forms
