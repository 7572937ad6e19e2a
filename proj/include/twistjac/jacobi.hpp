#ifndef TWISTJAC_JACOBI_HPP
#define TWISTJAC_JACOBI_HPP

#include "twistjac/tensor.hpp"
#include "twistjac/verify.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace twistjac {

/// (Λ, E, ω). `verified` is set only by a passing check_twisted_jacobi.
struct TwistedJacobi {
    ChartPtr chart;
    MultiVector Lambda;
    MultiVector E;
    Form omega;
    bool verified = false;
};

/// Bivector with a closed 3-form: ½[Λ,Λ] = Λ^#(φ).
struct TwistedPoisson {
    ChartPtr chart;
    MultiVector Lambda;
    std::optional<Form> phi;   // absent when the chart has fewer than 3 coordinates
};

/// (Λ, dω) exact twisted Poisson with homothety field Z.
struct HomTwistedPoisson {
    ChartPtr chart;
    MultiVector Lambda;
    Form omega;
    MultiVector Z;
};

/// Section (ζ, f) of T*M×R.
using PairSection = std::pair<Form, Expr>;

class NonStraightenedField : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ZeroWitness : public std::runtime_error {
public:
    ZeroWitness(std::string what, Point point) : std::runtime_error(std::move(what)), point_(std::move(point)) {}
    [[nodiscard]] const Point& point() const noexcept { return point_; }

private:
    Point point_;
};

[[nodiscard]] TwistedJacobi make_jacobi(const ChartPtr& chart, MultiVector Lambda, MultiVector E, Form omega);
/// Zero structure (0, 0, 0).
[[nodiscard]] TwistedJacobi zero_jacobi(const ChartPtr& chart);

// --- defining identities -----------------------------------------------------

/// ½[Λ,Λ] + E∧Λ − Λ^#(dω) − Λ^#(ω)∧E; empty when n < 3 (no 3-vectors).
[[nodiscard]] std::optional<MultiVector> jacobi_residual_primary(const TwistedJacobi& J);
/// [E,Λ] − (Λ^#⊗1)(dω)(E) + ((Λ^#⊗1)(ω)(E))∧E.
[[nodiscard]] MultiVector jacobi_residual_secondary(const TwistedJacobi& J);

/// Zero-tests both residuals componentwise.
[[nodiscard]] Report check_twisted_jacobi(const TwistedJacobi& J, const SampleConfig& cfg = {});

// --- functions ---------------------------------------------------------------

/// {f,g} = Λ(df,dg) + ⟨f dg − g df, E⟩.
[[nodiscard]] Expr bracket(const TwistedJacobi& J, const Expr& f, const Expr& g);

struct Anomaly {
    Expr lhs;   // {f,{g,h}} + c.p.
    Expr rhs;   // (Λ,E)^#(dω,ω)((df,f),(dg,g),(dh,h))
    [[nodiscard]] Expr residual() const { return lhs - rhs; }
};
[[nodiscard]] Anomaly jacobi_anomaly(const TwistedJacobi& J, const Expr& f, const Expr& g, const Expr& h);

/// X_f = Λ^#(df) + fE.
[[nodiscard]] MultiVector hamiltonian(const TwistedJacobi& J, const Expr& f);

// --- the algebroid T*M×R ------------------------------------------------------

/// π∘(Λ,E)^#(ζ,f) = Λ^#ζ + fE.
[[nodiscard]] MultiVector algebroid_anchor(const TwistedJacobi& J, const PairSection& a);
/// Untwisted bracket on T*M×R determined by (Λ,E).
[[nodiscard]] PairSection base_bracket(const TwistedJacobi& J, const PairSection& a, const PairSection& b);
/// (dω,ω)((Λ,E)^#a, (Λ,E)^#b, ·) as a section of T*M×R.
[[nodiscard]] PairSection twist_term(const TwistedJacobi& J, const PairSection& a, const PairSection& b);
/// {a,b}^ω = base_bracket + twist_term.
[[nodiscard]] PairSection algebroid_bracket(const TwistedJacobi& J, const PairSection& a, const PairSection& b);
/// ⟨(ζ,f),(X,g)⟩ = ζ(X) + fg.
[[nodiscard]] Expr pair_pairing(const PairSection& a, const MultiVector& X, const Expr& g);
[[nodiscard]] PairSection exact_pair(const ChartPtr& chart, const Expr& f);

/// Sign resolution of the algebroid bracket, as printed in report headers.
[[nodiscard]] const char* algebroid_bracket_convention() noexcept;

/// Antisymmetry, Jacobi, anchor homomorphism, Leibniz, (−E,0) cocycle, exact-pair relation.
[[nodiscard]] Report check_algebroid(const TwistedJacobi& J, const std::vector<PairSection>& sections,
                                     const SampleConfig& cfg = {});

// --- conformal change and Poissonization --------------------------------------

/// (aΛ, Λ^#(da)+aE, ω/a); throws ZeroWitness if a vanishes at a sample point.
[[nodiscard]] TwistedJacobi conformal(const TwistedJacobi& J, const Expr& a, const SampleConfig& cfg = {});

/// {f,g}^a − (1/a){af,ag}.
[[nodiscard]] Expr conformal_bracket_residual(const TwistedJacobi& J, const Expr& a, const Expr& f, const Expr& g);

/// (e^{−s}(Λ+∂s∧E), e^sω, ∂s) on chart×(s).
[[nodiscard]] HomTwistedPoisson poissonize(const TwistedJacobi& J);

[[nodiscard]] Report check_homogeneous(const HomTwistedPoisson& H, const SampleConfig& cfg = {});

struct HomogeneousProjection {
    TwistedJacobi J;
    Report report;
};

/// Quotient by a straightened homothety field Z = ∂c, cut at c = value, with conformal factor a.
[[nodiscard]] HomogeneousProjection project_homogeneous(const HomTwistedPoisson& H, const std::string& coord,
                                                        const Rational& value, const Expr& a,
                                                        const SampleConfig& cfg = {});

struct EProjection {
    TwistedPoisson P;
    MultiVector Z0;
    bool homogeneous = false;
    Report report;
};

/// Quotient along a straightened Reeb-type field E = ∂c.
[[nodiscard]] EProjection project_along_E(const TwistedJacobi& J, const std::string& coord, const Rational& value,
                                          const SampleConfig& cfg = {});

struct CotangentStructure {
    ChartPtr chart;   // (x_1..x_n, p_1..p_n)
    Form theta;
    Form omega;
    MultiVector Z;
    Report report;
};

/// Π with i(Π^#ζ)Ω = −ζ for every covector ζ; pivot assumptions are appended.
[[nodiscard]] MultiVector inverse_bivector(const Form& Omega, std::vector<std::string>* assumptions = nullptr);

[[nodiscard]] CotangentStructure cotangent_twisted_symplectic(const TwistedPoisson& P, const SampleConfig& cfg = {});

// --- projection helpers shared with the groupoid module --------------------------

/// Chart without `coord`; the projection dropping it and its slice section at `value`.
struct SliceMaps {
    ChartPtr slice;
    SmoothMap projection;   // chart -> slice, with section = embedding at coord = value
    SmoothMap embedding;    // slice -> chart
    int coord = -1;
};
[[nodiscard]] SliceMaps slice_maps(const ChartPtr& chart, const std::string& coord, const Rational& value);

/// ω restricted to the slice, after checking ω is the pullback of that restriction.
[[nodiscard]] Form descend_form(const SliceMaps& maps, const Form& omega);

}  // namespace twistjac

#endif  // TWISTJAC_JACOBI_HPP
