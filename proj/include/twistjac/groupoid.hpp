#ifndef TWISTJAC_GROUPOID_HPP
#define TWISTJAC_GROUPOID_HPP

#include "twistjac/contact.hpp"

#include <optional>
#include <string>
#include <vector>

namespace twistjac {

/// Where the two copies of Γ₀ and the r-coordinate sit inside a product chart Γ₀×Γ₀×R.
struct PairBlocks {
    int beta_offset = 0;    // coordinates of β(g)
    int alpha_offset = 0;   // coordinates of α(g)
    int r_coord = 0;        // r = this coordinate
};

/// Explicit Lie groupoid Γ ⇉ Γ₀ on charts, with twisted contact data (θ, ω, r).
/// Optional maps witness the axioms; absent ones are skipped with a note.
struct GroupoidModel {
    std::string name;
    ChartPtr base;      // Γ₀
    ChartPtr total;     // Γ
    ChartPtr pairs;     // Γ₂, composable pairs
    ChartPtr triples;   // Γ₃, may be null

    SmoothMap alpha, beta;   // Γ -> Γ₀, each with ε as section
    SmoothMap iota;          // Γ -> Γ
    SmoothMap eps;           // Γ₀ -> Γ
    SmoothMap m, pr1, pr2;   // Γ₂ -> Γ

    std::optional<SmoothMap> unit_left, unit_right;   // g ↦ (ε(β g), g), (g, ε(α g))
    std::optional<SmoothMap> inv_left, inv_right;     // g ↦ (ι g, g), (g, ι g)
    std::optional<SmoothMap> t12, t23;                // (g,h,k) ↦ (g,h), (h,k)
    std::optional<SmoothMap> assoc_left, assoc_right; // (g,h,k) ↦ (gh,k), (g,hk)

    Expr r;
    Form theta;
    Form omega;
    Form omega0;

    std::optional<TwistedContact> base_contact;   // set for pair models
    std::optional<PairBlocks> blocks;
};

/// Γ₀×Γ₀×R with α = p₂, β = p₁, r = p₃, θ = α*θ₀ − e^{−r}β*θ₀, ω = α*ω₀ − e^{−r}β*ω₀.
/// Throws NotContact when C₀ does not pass check_contact.
[[nodiscard]] GroupoidModel build_pair_groupoid(const TwistedContact& C0, const SampleConfig& cfg = {});

/// Same groupoid with r replaced; θ and ω are rebuilt from the base data when available.
[[nodiscard]] GroupoidModel with_r(GroupoidModel G, const Expr& r);

/// Unit, inverse, compatibility and associativity laws as substitution identities.
[[nodiscard]] Report check_groupoid_axioms(const GroupoidModel& G);

/// m*θ = pr₂*(e^{−r})·pr₁*θ + pr₂*θ, r(gh) = r(g) + r(h), ω_{gh} = e^{−r(h)}ω_g + ω_h.
[[nodiscard]] Report check_multiplicativity(const GroupoidModel& G, const SampleConfig& cfg = {});

/// θ∧(dθ+ω)^N at samples; for pair models also the factorization through the base volumes.
[[nodiscard]] Report check_volume(const GroupoidModel& G, const SampleConfig& cfg = {}, double threshold = 1e-6);

/// (Λ_Γ, E_Γ, ω) from the contact module, with the invariant-field models where known.
struct GroupoidJacobi {
    TwistedJacobi J;
    std::optional<MultiVector> E_left;    // 0 + E₀ + 0
    std::optional<MultiVector> E_right;   // −ι_*E^l
    Report report;
};

[[nodiscard]] GroupoidJacobi groupoid_jacobi(const GroupoidModel& G, const SampleConfig& cfg = {});

/// Places a base multivector on the copy of Γ₀ read by `proj`, starting at coordinate `offset`.
[[nodiscard]] MultiVector lift_block(const MultiVector& V0, const SmoothMap& proj, int offset);

/// Block models of the pair groupoid, compared with the derived (Λ_Γ, E_Γ).
/// The literal bivector block −e^rΛ₀ + Λ₀ + 0 is reported as its own check; the completed
/// block adds ∂r∧(e^rE₀ + E₀).
[[nodiscard]] Report check_block_formulas(const GroupoidModel& G, const GroupoidJacobi& GJ,
                                          const SampleConfig& cfg = {});

/// Properties i–viii of twisted contact groupoids (vii is not machine-checkable and is noted).
[[nodiscard]] Report check_properties(const GroupoidModel& G, const GroupoidJacobi& GJ, const SampleConfig& cfg = {});

struct InducedBase {
    TwistedJacobi J;
    Report report;
};

/// Λ₀ = α_*Λ_Γ, E₀ = α_*E_Γ, ω₀ from the model; throws ProjectabilityFailure.
[[nodiscard]] InducedBase induced_base_structure(const GroupoidModel& G, const GroupoidJacobi& GJ,
                                                 const SampleConfig& cfg = {});

/// 𝔍(ζ₀,f₀) = Λ_Γ^#(α*ζ₀) + α*f₀·E_Γ: bracket and anchor compatibility, injectivity at samples.
[[nodiscard]] Report check_algebroid_isomorphism(const GroupoidModel& G, const GroupoidJacobi& GJ,
                                                 const TwistedJacobi& J0, const std::vector<PairSection>& sections,
                                                 const SampleConfig& cfg = {});

/// Action groupoid Γ×R ⇉ Γ₀×R with Ω̃ = d(e^sθ) + e^sω, ω̃₀ = e^sω₀ and homothety pair (∂s, ∂s).
struct SuspendedModel {
    ChartPtr total;   // Γ×(s)
    ChartPtr base;    // Γ₀×(s)
    ChartPtr pairs;   // Γ₂×(s), s the coordinate of the second factor
    SmoothMap alpha, beta, iota, eps, m, pr1, pr2;
    Form Omega;
    Form omega0;
    MultiVector Z;    // ∂s on Γ×R
    MultiVector Z0;   // ∂s on Γ₀×R
};

struct Suspension {
    SuspendedModel S;
    Report report;
};

[[nodiscard]] Suspension suspend(const GroupoidModel& G, const SampleConfig& cfg = {});

/// Nondegeneracy, dΩ̃ = α̃*dω̃₀ − β̃*dω̃₀, multiplicativity, homogeneity and compatibility of the homothety
/// pair; the last coordinate of each chart is s.
[[nodiscard]] Report check_suspended(const SuspendedModel& S, const SampleConfig& cfg = {});

/// Recovers (θ, ω, r, ω₀) from a suspended model: θ = e^{−s}i(∂s)Ω̃, ω = e^{−s}Ω̃ − ds∧θ − dθ,
/// r = s − β̃^s, ω₀ = e^{−s}ω̃₀; the result reuses G's structural maps.
[[nodiscard]] GroupoidModel strip(const SuspendedModel& S, const GroupoidModel& G);

/// poissonize(induced base) against α̃_* of the inverse of Ω̃.
[[nodiscard]] Report base_coincidence_check(const GroupoidModel& G, const SampleConfig& cfg = {});

}  // namespace twistjac

#endif  // TWISTJAC_GROUPOID_HPP
