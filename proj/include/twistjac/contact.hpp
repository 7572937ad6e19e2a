#ifndef TWISTJAC_CONTACT_HPP
#define TWISTJAC_CONTACT_HPP

#include "twistjac/jacobi.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace twistjac {

/// (θ, ω) on a chart of dimension 2n+1.
struct TwistedContact {
    ChartPtr chart;
    Form theta;
    Form omega;
};

class NotContact : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Throws NotContact on an even-dimensional chart or mismatched degrees.
[[nodiscard]] TwistedContact make_contact(const ChartPtr& chart, Form theta, Form omega);

/// Coefficient of θ∧(dθ+ω)^n on the coordinate volume.
[[nodiscard]] Expr contact_volume(const TwistedContact& C);

/// θ∧(dθ+ω)^n evaluated at the sample points; fails if |value| <= threshold anywhere.
[[nodiscard]] Report check_contact(const TwistedContact& C, const SampleConfig& cfg = {}, double threshold = 1e-6);

/// Reeb field and bivector from one bordered elimination.
struct ContactSolution {
    MultiVector E;
    MultiVector Lambda;
    std::vector<std::string> assumptions;   // pivot nonvanishing
};

/// Solves [[Ω^T, θ], [θ^T, 0]] with the Reeb and basis-covector right-hand sides.
/// Throws NotContact when the system is singular.
[[nodiscard]] ContactSolution solve_contact(const TwistedContact& C);
[[nodiscard]] MultiVector reeb(const TwistedContact& C);
[[nodiscard]] MultiVector contact_bivector(const TwistedContact& C);

/// i(E)θ = 1, i(E)(dθ+ω) = 0, Λ^#θ = 0, i(Λ^#ζ)(dθ+ω) = −(ζ − ⟨ζ,E⟩θ) on basis ζ, rank checks.
[[nodiscard]] Report check_contact_identities(const TwistedContact& C, const MultiVector& E,
                                              const MultiVector& Lambda, const SampleConfig& cfg = {});

struct ContactJacobi {
    TwistedJacobi J;
    Report report;   // identities, then the two Jacobi residuals
};

[[nodiscard]] ContactJacobi jacobi_from_contact(const TwistedContact& C, const SampleConfig& cfg = {});

/// Sign σ with i(Π^#ζ)Ω = σζ, detected on the Poissonized line (e^s ds∧dz, i.e. dp∧dx).
[[nodiscard]] int detect_inverse_convention();

/// Λ̃ from poissonize against Ω̃ = d(e^sθ) + e^sω on chart×(s).
[[nodiscard]] Report contact_poissonization_check(const TwistedContact& C, const SampleConfig& cfg = {});

/// Ω̃ = d(e^sθ) + e^sω on the chart produced by poissonize.
[[nodiscard]] Form poissonized_form(const TwistedContact& C, const ChartPtr& big);

}  // namespace twistjac

#endif  // TWISTJAC_CONTACT_HPP
