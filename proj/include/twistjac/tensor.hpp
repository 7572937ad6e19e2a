#ifndef TWISTJAC_TENSOR_HPP
#define TWISTJAC_TENSOR_HPP

#include "twistjac/expr.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace twistjac {

/// Strictly increasing multi-index as a bit set; bit i is coordinate i.
using Mask = std::uint32_t;

inline constexpr int kMaxDim = 24;

[[nodiscard]] int degree_of(Mask m) noexcept;
/// All k-subsets of {0..n-1}, in the storage order of alternating tensors.
[[nodiscard]] const std::vector<Mask>& subsets(int n, int k);
[[nodiscard]] std::size_t slot_of(Mask m);
[[nodiscard]] std::vector<int> indices_of(Mask m);
/// Sign of e_a ∧ e_b relative to e_{a|b}; 0 when a and b overlap.
[[nodiscard]] int merge_sign(Mask a, Mask b) noexcept;

struct FormTag {};
struct VectorTag {};

/// Antisymmetric tensor field with one Expr per increasing multi-index.
template <class Tag>
class AltTensor {
public:
    AltTensor() = default;
    AltTensor(ChartPtr chart, int degree);

    [[nodiscard]] static AltTensor scalar(ChartPtr chart, Expr value);
    /// Components indexed by coordinate i (degree 1).
    [[nodiscard]] static AltTensor from_components(ChartPtr chart, std::vector<Expr> comps);
    /// Basis element dx^{i1}∧…∧dx^{ik} (or ∂ analogue) in the given, possibly unsorted, order.
    [[nodiscard]] static AltTensor basis(ChartPtr chart, const std::vector<int>& indices);

    [[nodiscard]] const ChartPtr& chart() const noexcept { return chart_; }
    [[nodiscard]] int degree() const noexcept { return degree_; }
    [[nodiscard]] int dim() const noexcept { return chart_ ? chart_->dim() : 0; }
    [[nodiscard]] std::size_t size() const noexcept { return comps_.size(); }
    [[nodiscard]] Mask mask(std::size_t slot) const { return subsets(dim(), degree_)[slot]; }
    [[nodiscard]] const Expr& comp(std::size_t slot) const { return comps_[slot]; }
    [[nodiscard]] Expr& comp(std::size_t slot) { return comps_[slot]; }
    [[nodiscard]] const Expr& operator[](Mask m) const { return comps_[slot_of(m)]; }
    [[nodiscard]] Expr& operator[](Mask m) { return comps_[slot_of(m)]; }
    /// Component for an arbitrary index sequence, with the permutation sign applied.
    [[nodiscard]] Expr at(const std::vector<int>& indices) const;
    /// Degree-0 value.
    [[nodiscard]] const Expr& value() const;

    [[nodiscard]] bool is_zero() const;
    [[nodiscard]] bool equals(const AltTensor& other) const;

    AltTensor& operator+=(const AltTensor& other);
    AltTensor& operator-=(const AltTensor& other);
    [[nodiscard]] AltTensor operator+(const AltTensor& other) const;
    [[nodiscard]] AltTensor operator-(const AltTensor& other) const;
    [[nodiscard]] AltTensor operator-() const;
    /// Multiplication by a scalar function.
    [[nodiscard]] AltTensor operator*(const Expr& f) const;
    [[nodiscard]] AltTensor map(const std::function<Expr(const Expr&)>& fn) const;

    void require_same_chart(const AltTensor& other, const char* op) const;

private:
    ChartPtr chart_;
    int degree_ = 0;
    std::vector<Expr> comps_;
};

using Form = AltTensor<FormTag>;
using MultiVector = AltTensor<VectorTag>;

template <class Tag>
[[nodiscard]] AltTensor<Tag> operator*(const Expr& f, const AltTensor<Tag>& t)
{
    return t * f;
}

/// Multi-index key "dx^dy" / "d/dx^d/dy"; degree 0 is "1".
[[nodiscard]] std::string form_key(Mask m, const Chart& chart);
[[nodiscard]] std::string vector_key(Mask m, const Chart& chart);
/// Inverse of the key functions; returns the sorted mask and the reordering sign.
struct ParsedKey {
    Mask mask = 0;
    int sign = 1;
    int degree = 0;
};
[[nodiscard]] ParsedKey parse_form_key(std::string_view key, const Chart& chart);
[[nodiscard]] ParsedKey parse_vector_key(std::string_view key, const Chart& chart);

using KeyedComponents = std::vector<std::pair<std::string, std::string>>;
/// Builds a tensor from {"dx^dy", "expr"} entries; unsorted keys carry their permutation sign,
/// repeated keys accumulate.
[[nodiscard]] Form parse_form(const ChartPtr& chart, int degree, const KeyedComponents& comps);
[[nodiscard]] MultiVector parse_multivector(const ChartPtr& chart, int degree, const KeyedComponents& comps);

/// "dx^dy: expr, ..." listing of nonzero components.
[[nodiscard]] std::string to_string(const Form& f);
[[nodiscard]] std::string to_string(const MultiVector& v);

/// Same function on a chart with extra trailing coordinates.
[[nodiscard]] Expr widen(const Expr& e, int nvars);
/// Re-expresses t on a chart whose leading coordinates are those of t's chart.
[[nodiscard]] Form widen(const Form& t, const ChartPtr& wider);
[[nodiscard]] MultiVector widen(const MultiVector& t, const ChartPtr& wider);

// --- exterior algebra -------------------------------------------------------

[[nodiscard]] Form wedge(const Form& a, const Form& b);
[[nodiscard]] MultiVector wedge(const MultiVector& a, const MultiVector& b);
[[nodiscard]] Form ext_d(const Form& a);
[[nodiscard]] Form ext_d(const ChartPtr& chart, const Expr& f);
/// i(X)a: contraction in the first slot.
[[nodiscard]] Form interior(const MultiVector& X, const Form& a);
/// Full pairing Σ_J P^J a_J of equal degrees; P(α1,…,αk) = pairing(P, α1∧…∧αk).
[[nodiscard]] Expr pairing(const MultiVector& P, const Form& a);
/// ζ(X1,…,Xk) for vector fields.
[[nodiscard]] Expr evaluate(const Form& zeta, const std::vector<MultiVector>& vectors);
/// P(α1,…,αk) for 1-forms.
[[nodiscard]] Expr evaluate(const MultiVector& P, const std::vector<Form>& covectors);
/// X(f).
[[nodiscard]] Expr apply(const MultiVector& X, const Expr& f);

[[nodiscard]] Form lie(const MultiVector& X, const Form& a);
[[nodiscard]] MultiVector lie(const MultiVector& X, const MultiVector& P);
[[nodiscard]] MultiVector schouten(const MultiVector& P, const MultiVector& Q);

/// Λ^# on 1-forms, extended as an algebra homomorphism; degree 0 maps f to f.
[[nodiscard]] MultiVector sharp(const MultiVector& Lambda, const Form& zeta);
/// (Λ^#⊗1)(ζ)(·,…,·,X) as a (k−1)-vector.
[[nodiscard]] MultiVector sharp_tensor(const MultiVector& Lambda, const Form& zeta, const MultiVector& X);

// --- pair objects on T*M×R and TM×R -----------------------------------------

/// (ζ, ζ′) of degrees (k, k−1); for k = 0 the secondary part is the zero (−1)-form and ignored.
struct PairForm {
    Form primary;
    Form secondary;
    [[nodiscard]] int degree() const noexcept { return primary.degree(); }
    [[nodiscard]] bool is_zero() const;
    [[nodiscard]] bool equals(const PairForm& o) const;
};

/// (P, Q) of degrees (k, k−1), identified with P + e∧Q.
struct PairVector {
    MultiVector primary;
    MultiVector secondary;
    [[nodiscard]] int degree() const noexcept { return primary.degree(); }
    [[nodiscard]] bool is_zero() const;
    [[nodiscard]] bool equals(const PairVector& o) const;
};

[[nodiscard]] PairForm make_pair_form(Form primary, Form secondary);
[[nodiscard]] PairVector make_pair_vector(MultiVector primary, MultiVector secondary);

/// (ζ,ζ′)((X1,f1),…,(Xk,fk)) = ζ(X1,…,Xk) + Σ (−1)^{i+1} f_i ζ′(X1,…,X̂i,…,Xk).
[[nodiscard]] Expr evaluate(const PairForm& z, const std::vector<std::pair<MultiVector, Expr>>& args);
/// (P,Q)((α1,g1),…,(αk,gk)) = P(α1,…,αk) + Σ (−1)^{i+1} g_i Q(α1,…,α̂i,…,αk).
[[nodiscard]] Expr evaluate(const PairVector& v, const std::vector<std::pair<Form, Expr>>& args);
/// (Λ,E)^#(α,f) = (Λ^#α + fE, −⟨α,E⟩) on pair 1-forms.
[[nodiscard]] std::pair<MultiVector, Expr> pair_sharp1(const MultiVector& Lambda, const MultiVector& E,
                                                      const Form& alpha, const Expr& f);
/// Degree-k extension, assembled from evaluations on basis arguments.
[[nodiscard]] PairVector pair_sharp(const MultiVector& Lambda, const MultiVector& E, const PairForm& z);

// --- maps --------------------------------------------------------------------

class ProjectabilityFailure : public std::runtime_error {
public:
    ProjectabilityFailure(std::string component, std::string detail);
    [[nodiscard]] const std::string& component() const noexcept { return component_; }

private:
    std::string component_;
};

/// Map given by target coordinates as functions of source coordinates.
struct SmoothMap {
    std::string name;
    ChartPtr source;
    ChartPtr target;
    std::vector<Expr> components;        // on source, one per target coordinate
    std::vector<Expr> section;           // optional, on target, one per source coordinate

    [[nodiscard]] bool has_section() const noexcept { return !section.empty(); }
    /// Scalar function on the target pulled back to the source.
    [[nodiscard]] Expr pull(const Expr& f) const;
    /// Target-chart differential dφ^j as a 1-form on the source.
    [[nodiscard]] Form differential(int j) const;
};

[[nodiscard]] SmoothMap make_map(std::string name, ChartPtr source, ChartPtr target,
                                 const std::vector<std::string>& components);
[[nodiscard]] SmoothMap identity_map(const ChartPtr& chart);
/// (f ∘ g)(x) = f(g(x)).
[[nodiscard]] SmoothMap compose(const SmoothMap& f, const SmoothMap& g);
/// f ∘ section == id on the target, symbolically.
[[nodiscard]] bool section_is_valid(const SmoothMap& f);

[[nodiscard]] Form pullback(const SmoothMap& phi, const Form& a);
/// Pushes P forward along φ using the declared section to descend the components;
/// throws ProjectabilityFailure when a component is not constant along the fibres.
[[nodiscard]] MultiVector pushforward(const SmoothMap& phi, const MultiVector& P);

}  // namespace twistjac

#endif  // TWISTJAC_TENSOR_HPP
