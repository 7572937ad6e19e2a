#ifndef TWISTJAC_EXPR_HPP
#define TWISTJAC_EXPR_HPP

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace twistjac {

using Rational = mpq_class;
using Exponents = std::vector<int>;

[[nodiscard]] std::string to_string(const Rational& q);

/// A local coordinate system. Coordinate names are unique within a chart.
class Chart {
public:
    Chart(std::string name, std::vector<std::string> coords);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const std::vector<std::string>& coords() const noexcept { return coords_; }
    [[nodiscard]] int dim() const noexcept { return static_cast<int>(coords_.size()); }
    [[nodiscard]] std::optional<int> index_of(std::string_view coord) const;
    [[nodiscard]] int require_index(std::string_view coord) const;

    bool operator==(const Chart& other) const { return coords_ == other.coords_; }

private:
    std::string name_;
    std::vector<std::string> coords_;
};

using ChartPtr = std::shared_ptr<const Chart>;

[[nodiscard]] ChartPtr make_chart(std::string name, std::vector<std::string> coords);

/// Concatenates coordinate lists. Clashing names get a numeric suffix.
[[nodiscard]] ChartPtr product_chart(std::string name, std::span<const ChartPtr> factors,
                                     std::span<const std::string> suffixes);

/// Appends one coordinate, renamed with trailing underscores if the name is taken.
[[nodiscard]] ChartPtr extend_chart(const ChartPtr& chart, std::string name, std::string coord);

/// Plain polynomial over Q. Appears as the argument of exp(...).
class Poly {
public:
    std::map<Exponents, Rational> terms;

    [[nodiscard]] bool is_zero() const noexcept { return terms.empty(); }
    void add_term(const Exponents& mono, const Rational& c);
    Poly& operator+=(const Poly& other);
    Poly& operator-=(const Poly& other);
    [[nodiscard]] Poly operator-() const;
    [[nodiscard]] Poly scaled(const Rational& c) const;
    [[nodiscard]] Poly diff(int var) const;
    [[nodiscard]] double eval(std::span<const double> point) const;

    /// Total order compatible with addition: sign of the leading coefficient
    /// (lexicographically largest monomial) of the difference.
    [[nodiscard]] std::strong_ordering compare(const Poly& other) const;
    bool operator==(const Poly& other) const { return terms == other.terms; }
};

/// Monomial times exp(polynomial). Key of an exp-polynomial term.
struct TermKey {
    Exponents mono;
    Poly arg;

    [[nodiscard]] std::strong_ordering compare(const TermKey& other) const;
    bool operator<(const TermKey& other) const { return compare(other) < 0; }
    bool operator==(const TermKey& other) const { return mono == other.mono && arg == other.arg; }
};

/// Finite sum of c * x^m * exp(p(x)) with c rational and p a polynomial.
/// Canonical: zero coefficients are never stored.
class ExpPoly {
public:
    using TermMap = std::map<TermKey, Rational>;

    ExpPoly() = default;
    explicit ExpPoly(int nvars) : nvars_(nvars) {}

    [[nodiscard]] static ExpPoly constant(int nvars, const Rational& c);
    [[nodiscard]] static ExpPoly variable(int nvars, int var);
    [[nodiscard]] static ExpPoly exp_of(int nvars, const Poly& arg);

    [[nodiscard]] int nvars() const noexcept { return nvars_; }
    [[nodiscard]] const TermMap& terms() const noexcept { return terms_; }
    [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }
    [[nodiscard]] bool is_one() const;
    [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }
    /// Single term with trivial monomial: c * exp(p), never zero.
    [[nodiscard]] bool is_unit() const;
    [[nodiscard]] std::optional<Rational> as_constant() const;
    /// Polynomial without exp factors, returned as a Poly.
    [[nodiscard]] std::optional<Poly> as_plain_poly() const;

    void add_term(const TermKey& key, const Rational& c);

    ExpPoly& operator+=(const ExpPoly& other);
    ExpPoly& operator-=(const ExpPoly& other);
    [[nodiscard]] ExpPoly operator+(const ExpPoly& other) const;
    [[nodiscard]] ExpPoly operator-(const ExpPoly& other) const;
    [[nodiscard]] ExpPoly operator-() const;
    [[nodiscard]] ExpPoly operator*(const ExpPoly& other) const;
    [[nodiscard]] ExpPoly scaled(const Rational& c) const;
    [[nodiscard]] ExpPoly times_term(const TermKey& key, const Rational& c) const;
    [[nodiscard]] ExpPoly pow(int k) const;

    /// Exact quotient if `divisor` divides this element, else nullopt.
    [[nodiscard]] std::optional<ExpPoly> divide_exact(const ExpPoly& divisor) const;

    [[nodiscard]] ExpPoly diff(int var) const;
    [[nodiscard]] double eval(std::span<const double> point, double* max_abs_term = nullptr) const;
    [[nodiscard]] std::string to_string(std::span<const std::string> names) const;

    [[nodiscard]] std::strong_ordering compare(const ExpPoly& other) const;
    bool operator==(const ExpPoly& other) const { return terms_ == other.terms_; }

    [[nodiscard]] const std::pair<const TermKey, Rational>& leading() const { return *terms_.rbegin(); }
    [[nodiscard]] const std::pair<const TermKey, Rational>& trailing() const { return *terms_.begin(); }

private:
    int nvars_ = 0;
    TermMap terms_;
};

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t position);
    [[nodiscard]] std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Exact scalar on a chart: exp-polynomial numerator over a product of
/// normalized exp-polynomial factors. The value is zero iff the numerator is.
class Expr {
public:
    struct Factor {
        ExpPoly poly;
        int mult = 1;
        bool operator==(const Factor& o) const { return mult == o.mult && poly == o.poly; }
    };

    Expr() = default;
    explicit Expr(int nvars) : num_(nvars), nvars_(nvars) {}
    explicit Expr(ExpPoly num);

    [[nodiscard]] static Expr constant(int nvars, const Rational& c);
    [[nodiscard]] static Expr constant(int nvars, long c) { return constant(nvars, Rational(c)); }
    [[nodiscard]] static Expr variable(int nvars, int var);
    [[nodiscard]] static Expr exp(const Expr& arg);

    [[nodiscard]] int nvars() const noexcept { return nvars_; }
    [[nodiscard]] const ExpPoly& numerator() const noexcept { return num_; }
    [[nodiscard]] const std::vector<Factor>& denominator() const noexcept { return den_; }
    [[nodiscard]] bool is_zero() const noexcept { return num_.is_zero(); }
    [[nodiscard]] bool is_one() const;
    [[nodiscard]] bool has_denominator() const noexcept { return !den_.empty(); }
    [[nodiscard]] std::optional<Rational> as_constant() const;
    [[nodiscard]] std::optional<Poly> as_plain_poly() const;

    Expr& operator+=(const Expr& other);
    Expr& operator-=(const Expr& other);
    Expr& operator*=(const Expr& other);
    Expr& operator/=(const Expr& other);
    [[nodiscard]] Expr operator-() const;
    [[nodiscard]] Expr pow(int k) const;

    [[nodiscard]] Expr diff(int var) const;
    /// Replace coordinate i by values[i]; all values share one target chart.
    [[nodiscard]] Expr substitute(std::span<const Expr> values) const;

    [[nodiscard]] double eval(std::span<const double> point) const;
    [[nodiscard]] std::optional<double> try_eval(std::span<const double> point) const;
    /// Value together with the largest absolute term, for relative tolerances.
    [[nodiscard]] double eval_scaled(std::span<const double> point, double& max_abs_term) const;

    [[nodiscard]] std::string to_string(std::span<const std::string> names) const;
    [[nodiscard]] std::string to_string(const Chart& chart) const { return to_string(chart.coords()); }

    /// Exact equality of values (difference has zero numerator).
    [[nodiscard]] bool equals(const Expr& other) const;

private:
    void divide_by(const ExpPoly& q, int k);
    void cancel();
    void check_compatible(const Expr& other) const;

    ExpPoly num_;
    std::vector<Factor> den_;
    int nvars_ = 0;
};

[[nodiscard]] Expr operator+(Expr a, const Expr& b);
[[nodiscard]] Expr operator-(Expr a, const Expr& b);
[[nodiscard]] Expr operator*(Expr a, const Expr& b);
[[nodiscard]] Expr operator/(Expr a, const Expr& b);

[[nodiscard]] Expr parse_expr(std::string_view text, const Chart& chart);
[[nodiscard]] Rational parse_rational(std::string_view text);

}  // namespace twistjac

#endif  // TWISTJAC_EXPR_HPP
