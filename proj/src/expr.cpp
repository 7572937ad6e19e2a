#include "twistjac/expr.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace twistjac {

std::string to_string(const Rational& q)
{
    return q.get_str();
}

// ---------------------------------------------------------------------------
// Chart

namespace {

bool is_identifier(std::string_view s)
{
    if (s.empty()) return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(s.front())) return false;
    return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || digit(c); });
}

}  // namespace

Chart::Chart(std::string name, std::vector<std::string> coords) : name_(std::move(name)), coords_(std::move(coords))
{
    if (coords_.empty()) throw std::invalid_argument("chart '" + name_ + "' has no coordinates");
    std::set<std::string> seen;
    for (const auto& c : coords_) {
        if (!is_identifier(c) || c == "exp")
            throw std::invalid_argument("invalid coordinate name '" + c + "' in chart '" + name_ + "'");
        if (!seen.insert(c).second)
            throw std::invalid_argument("duplicate coordinate '" + c + "' in chart '" + name_ + "'");
    }
}

std::optional<int> Chart::index_of(std::string_view coord) const
{
    for (std::size_t i = 0; i < coords_.size(); ++i)
        if (coords_[i] == coord) return static_cast<int>(i);
    return std::nullopt;
}

int Chart::require_index(std::string_view coord) const
{
    auto i = index_of(coord);
    if (!i) throw std::invalid_argument("coordinate '" + std::string(coord) + "' not in chart '" + name_ + "'");
    return *i;
}

ChartPtr make_chart(std::string name, std::vector<std::string> coords)
{
    return std::make_shared<const Chart>(std::move(name), std::move(coords));
}

namespace {

std::string fresh_name(std::string base, const std::set<std::string>& taken)
{
    while (taken.count(base)) base += "_";
    return base;
}

}  // namespace

ChartPtr product_chart(std::string name, std::span<const ChartPtr> factors, std::span<const std::string> suffixes)
{
    if (factors.size() != suffixes.size()) throw std::invalid_argument("product_chart: suffix count mismatch");
    std::vector<std::string> coords;
    std::set<std::string> taken;
    for (std::size_t f = 0; f < factors.size(); ++f) {
        for (const auto& c : factors[f]->coords()) {
            auto n = fresh_name(c + suffixes[f], taken);
            taken.insert(n);
            coords.push_back(std::move(n));
        }
    }
    return make_chart(std::move(name), std::move(coords));
}

ChartPtr extend_chart(const ChartPtr& chart, std::string name, std::string coord)
{
    std::set<std::string> taken(chart->coords().begin(), chart->coords().end());
    auto coords = chart->coords();
    coords.push_back(fresh_name(std::move(coord), taken));
    return make_chart(std::move(name), std::move(coords));
}

// ---------------------------------------------------------------------------
// Poly

void Poly::add_term(const Exponents& mono, const Rational& c)
{
    if (c == 0) return;
    auto [it, inserted] = terms.try_emplace(mono, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms.erase(it);
    }
}

Poly& Poly::operator+=(const Poly& other)
{
    for (const auto& [m, c] : other.terms) add_term(m, c);
    return *this;
}

Poly& Poly::operator-=(const Poly& other)
{
    for (const auto& [m, c] : other.terms) add_term(m, -c);
    return *this;
}

Poly Poly::operator-() const
{
    Poly r = *this;
    for (auto& [m, c] : r.terms) c = -c;
    return r;
}

Poly Poly::scaled(const Rational& k) const
{
    if (k == 0) return {};
    Poly r = *this;
    for (auto& [m, c] : r.terms) c *= k;
    return r;
}

Poly Poly::diff(int var) const
{
    Poly r;
    for (const auto& [m, c] : terms) {
        if (m[var] == 0) continue;
        Exponents dm = m;
        dm[var] -= 1;
        r.add_term(dm, c * m[var]);
    }
    return r;
}

namespace {

double mono_value(const Exponents& m, std::span<const double> point)
{
    double v = 1.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (int e = 0; e < m[i]; ++e) v *= point[i];
    return v;
}

std::strong_ordering sign_of(const Rational& q)
{
    int s = sgn(q);
    return s > 0 ? std::strong_ordering::greater : (s < 0 ? std::strong_ordering::less : std::strong_ordering::equal);
}

}  // namespace

double Poly::eval(std::span<const double> point) const
{
    double v = 0.0;
    for (const auto& [m, c] : terms) v += c.get_d() * mono_value(m, point);
    return v;
}

std::strong_ordering Poly::compare(const Poly& other) const
{
    auto a = terms.rbegin();
    auto b = other.terms.rbegin();
    while (true) {
        const bool aend = a == terms.rend();
        const bool bend = b == other.terms.rend();
        if (aend && bend) return std::strong_ordering::equal;
        if (aend) return sign_of(-b->second);
        if (bend) return sign_of(a->second);
        if (a->first > b->first) return sign_of(a->second);
        if (b->first > a->first) return sign_of(-b->second);
        if (a->second != b->second) return a->second > b->second ? std::strong_ordering::greater : std::strong_ordering::less;
        ++a;
        ++b;
    }
}

// ---------------------------------------------------------------------------
// TermKey

std::strong_ordering TermKey::compare(const TermKey& other) const
{
    if (auto c = mono <=> other.mono; c != 0) return c;
    return arg.compare(other.arg);
}

namespace {

TermKey key_product(const TermKey& a, const TermKey& b)
{
    TermKey k{a.mono, a.arg};
    for (std::size_t i = 0; i < k.mono.size(); ++i) k.mono[i] += b.mono[i];
    k.arg += b.arg;
    return k;
}

// a / b in the ordered group Z^n x Poly; mono entries may go negative.
TermKey key_quotient(const TermKey& a, const TermKey& b)
{
    TermKey k{a.mono, a.arg};
    for (std::size_t i = 0; i < k.mono.size(); ++i) k.mono[i] -= b.mono[i];
    k.arg -= b.arg;
    return k;
}

bool mono_nonnegative(const Exponents& m)
{
    return std::all_of(m.begin(), m.end(), [](int e) { return e >= 0; });
}

std::string mono_string(const Exponents& m, std::span<const std::string> names)
{
    std::string s;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] == 0) continue;
        if (!s.empty()) s += "*";
        s += names[i];
        if (m[i] != 1) s += "^" + std::to_string(m[i]);
    }
    return s;
}

void append_term(std::string& out, const Rational& c, const std::string& body)
{
    const bool neg = sgn(c) < 0;
    Rational a = abs(c);
    if (out.empty()) {
        if (neg) out += "-";
    } else {
        out += neg ? "-" : "+";
    }
    if (body.empty()) {
        out += to_string(a);
    } else if (a == 1) {
        out += body;
    } else {
        out += to_string(a) + "*" + body;
    }
}

std::string poly_string(const Poly& p, std::span<const std::string> names)
{
    if (p.is_zero()) return "0";
    std::string out;
    for (auto it = p.terms.rbegin(); it != p.terms.rend(); ++it) append_term(out, it->second, mono_string(it->first, names));
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// ExpPoly

ExpPoly ExpPoly::constant(int nvars, const Rational& c)
{
    ExpPoly p(nvars);
    p.add_term(TermKey{Exponents(nvars, 0), {}}, c);
    return p;
}

ExpPoly ExpPoly::variable(int nvars, int var)
{
    ExpPoly p(nvars);
    Exponents m(nvars, 0);
    m.at(var) = 1;
    p.add_term(TermKey{m, {}}, 1);
    return p;
}

ExpPoly ExpPoly::exp_of(int nvars, const Poly& arg)
{
    ExpPoly p(nvars);
    p.add_term(TermKey{Exponents(nvars, 0), arg}, 1);
    return p;
}

bool ExpPoly::is_one() const
{
    auto c = as_constant();
    return c && *c == 1;
}

bool ExpPoly::is_unit() const
{
    if (terms_.size() != 1) return false;
    const auto& m = terms_.begin()->first.mono;
    return std::all_of(m.begin(), m.end(), [](int e) { return e == 0; });
}

std::optional<Rational> ExpPoly::as_constant() const
{
    if (terms_.empty()) return Rational(0);
    if (terms_.size() != 1) return std::nullopt;
    const auto& [k, c] = *terms_.begin();
    if (!k.arg.is_zero()) return std::nullopt;
    if (!std::all_of(k.mono.begin(), k.mono.end(), [](int e) { return e == 0; })) return std::nullopt;
    return c;
}

std::optional<Poly> ExpPoly::as_plain_poly() const
{
    Poly p;
    for (const auto& [k, c] : terms_) {
        if (!k.arg.is_zero()) return std::nullopt;
        p.add_term(k.mono, c);
    }
    return p;
}

void ExpPoly::add_term(const TermKey& key, const Rational& c)
{
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(key, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

ExpPoly& ExpPoly::operator+=(const ExpPoly& other)
{
    if (nvars_ == 0) nvars_ = other.nvars_;
    for (const auto& [k, c] : other.terms_) add_term(k, c);
    return *this;
}

ExpPoly& ExpPoly::operator-=(const ExpPoly& other)
{
    if (nvars_ == 0) nvars_ = other.nvars_;
    for (const auto& [k, c] : other.terms_) add_term(k, -c);
    return *this;
}

ExpPoly ExpPoly::operator+(const ExpPoly& other) const
{
    ExpPoly r = *this;
    r += other;
    return r;
}

ExpPoly ExpPoly::operator-(const ExpPoly& other) const
{
    ExpPoly r = *this;
    r -= other;
    return r;
}

ExpPoly ExpPoly::operator-() const
{
    ExpPoly r = *this;
    for (auto& [k, c] : r.terms_) c = -c;
    return r;
}

ExpPoly ExpPoly::operator*(const ExpPoly& other) const
{
    ExpPoly r(std::max(nvars_, other.nvars_));
    for (const auto& [ka, ca] : terms_)
        for (const auto& [kb, cb] : other.terms_) r.add_term(key_product(ka, kb), ca * cb);
    return r;
}

ExpPoly ExpPoly::scaled(const Rational& k) const
{
    if (k == 0) return ExpPoly(nvars_);
    ExpPoly r = *this;
    for (auto& [key, c] : r.terms_) c *= k;
    return r;
}

ExpPoly ExpPoly::times_term(const TermKey& key, const Rational& c) const
{
    ExpPoly r(nvars_);
    if (c == 0) return r;
    for (const auto& [k, v] : terms_) r.terms_.emplace_hint(r.terms_.end(), key_product(k, key), v * c);
    return r;
}

ExpPoly ExpPoly::pow(int k) const
{
    if (k < 0) throw std::invalid_argument("ExpPoly::pow: negative exponent");
    ExpPoly result = constant(nvars_, 1);
    ExpPoly base = *this;
    while (k > 0) {
        if (k & 1) result = result * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return result;
}

std::optional<ExpPoly> ExpPoly::divide_exact(const ExpPoly& divisor) const
{
    if (divisor.is_zero()) throw std::domain_error("division by zero exp-polynomial");
    if (is_zero()) return ExpPoly(nvars_);

    const auto& [lb_key, lb_c] = divisor.leading();
    if (divisor.size() == 1) {
        ExpPoly q(nvars_);
        for (const auto& [k, c] : terms_) {
            TermKey qk = key_quotient(k, lb_key);
            if (!mono_nonnegative(qk.mono)) return std::nullopt;
            q.add_term(qk, c / lb_c);
        }
        return q;
    }

    const TermKey lower = key_quotient(trailing().first, divisor.trailing().first);
    if (!mono_nonnegative(lower.mono)) return std::nullopt;

    ExpPoly q(nvars_);
    ExpPoly r = *this;
    constexpr int kMaxSteps = 200000;
    for (int step = 0; !r.is_zero(); ++step) {
        if (step > kMaxSteps) return std::nullopt;
        const auto& [lr_key, lr_c] = r.leading();
        TermKey qk = key_quotient(lr_key, lb_key);
        if (!mono_nonnegative(qk.mono)) return std::nullopt;
        if (qk.compare(lower) < 0) return std::nullopt;
        Rational qc = lr_c / lb_c;
        r -= divisor.times_term(qk, qc);
        q.add_term(qk, qc);
    }
    return q;
}

ExpPoly ExpPoly::diff(int var) const
{
    ExpPoly r(nvars_);
    for (const auto& [k, c] : terms_) {
        if (k.mono[var] > 0) {
            TermKey dk = k;
            dk.mono[var] -= 1;
            r.add_term(dk, c * k.mono[var]);
        }
        Poly da = k.arg.diff(var);
        for (const auto& [m, ac] : da.terms) {
            TermKey dk = k;
            for (std::size_t i = 0; i < m.size(); ++i) dk.mono[i] += m[i];
            r.add_term(dk, c * ac);
        }
    }
    return r;
}

double ExpPoly::eval(std::span<const double> point, double* max_abs_term) const
{
    double v = 0.0;
    double mx = 0.0;
    for (const auto& [k, c] : terms_) {
        double t = c.get_d() * mono_value(k.mono, point);
        if (!k.arg.is_zero()) t *= std::exp(k.arg.eval(point));
        v += t;
        mx = std::max(mx, std::abs(t));
    }
    if (max_abs_term) *max_abs_term = mx;
    return v;
}

std::string ExpPoly::to_string(std::span<const std::string> names) const
{
    if (terms_.empty()) return "0";
    std::string out;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        std::string body = mono_string(it->first.mono, names);
        if (!it->first.arg.is_zero()) {
            if (!body.empty()) body += "*";
            body += "exp(" + poly_string(it->first.arg, names) + ")";
        }
        append_term(out, it->second, body);
    }
    return out;
}

std::strong_ordering ExpPoly::compare(const ExpPoly& other) const
{
    if (auto c = terms_.size() <=> other.terms_.size(); c != 0) return c;
    for (auto a = terms_.begin(), b = other.terms_.begin(); a != terms_.end(); ++a, ++b) {
        if (auto c = a->first.compare(b->first); c != 0) return c;
        if (a->second != b->second) return a->second < b->second ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// Expr

ParseError::ParseError(const std::string& msg, std::size_t position)
    : std::runtime_error(msg + " at position " + std::to_string(position)), position_(position)
{
}

Expr::Expr(ExpPoly num) : num_(std::move(num)), nvars_(num_.nvars()) {}

Expr Expr::constant(int nvars, const Rational& c)
{
    return Expr(ExpPoly::constant(nvars, c));
}

Expr Expr::variable(int nvars, int var)
{
    return Expr(ExpPoly::variable(nvars, var));
}

Expr Expr::exp(const Expr& arg)
{
    auto p = arg.as_plain_poly();
    if (!p) throw std::domain_error("exp argument must be a polynomial without exp factors or denominators");
    return Expr(ExpPoly::exp_of(arg.nvars(), *p));
}

bool Expr::is_one() const
{
    return den_.empty() && num_.is_one();
}

std::optional<Rational> Expr::as_constant() const
{
    if (!den_.empty()) return std::nullopt;
    return num_.as_constant();
}

std::optional<Poly> Expr::as_plain_poly() const
{
    if (!den_.empty()) return std::nullopt;
    return num_.as_plain_poly();
}

void Expr::check_compatible(const Expr& other) const
{
    if (nvars_ != other.nvars_)
        throw std::invalid_argument("expressions live on charts of different dimension (" + std::to_string(nvars_) +
                                    " vs " + std::to_string(other.nvars_) + ")");
}

void Expr::cancel()
{
    if (num_.is_zero()) {
        den_.clear();
        return;
    }
    for (auto& f : den_) {
        while (f.mult > 0) {
            auto q = num_.divide_exact(f.poly);
            if (!q) break;
            num_ = std::move(*q);
            --f.mult;
        }
    }
    std::erase_if(den_, [](const Factor& f) { return f.mult == 0; });
}

namespace {

void insert_factor(std::vector<Expr::Factor>& den, ExpPoly p, int k)
{
    for (auto& f : den) {
        if (f.poly == p) {
            f.mult += k;
            return;
        }
    }
    auto pos = std::find_if(den.begin(), den.end(), [&](const Expr::Factor& f) { return p.compare(f.poly) < 0; });
    den.insert(pos, Expr::Factor{std::move(p), k});
}

}  // namespace

void Expr::divide_by(const ExpPoly& q, int k)
{
    if (q.is_zero()) throw EvalError("division by zero");
    const int n = nvars_;
    const auto& [lkey, lc] = q.leading();

    // Content monomial: componentwise minimum exponent.
    Exponents content = lkey.mono;
    for (const auto& [key, c] : q.terms())
        for (int i = 0; i < n; ++i) content[i] = std::min(content[i], key.mono[i]);

    // Unit part c * exp(p) of the leading term moves to the numerator.
    TermKey unit_inv{Exponents(n, 0), lkey.arg.scaled(-k)};
    Rational lc_inv = 1 / lc;
    Rational unit_coef = 1;
    for (int i = 0; i < k; ++i) unit_coef *= lc_inv;
    num_ = num_.times_term(unit_inv, unit_coef);

    Exponents neg_content(n);
    for (int i = 0; i < n; ++i) neg_content[i] = -content[i];
    ExpPoly normalized = q.times_term(TermKey{neg_content, -lkey.arg}, lc_inv);

    for (int i = 0; i < n; ++i)
        if (content[i] > 0) insert_factor(den_, ExpPoly::variable(n, i), k * content[i]);
    if (!normalized.is_one()) insert_factor(den_, std::move(normalized), k);
    cancel();
}

Expr& Expr::operator+=(const Expr& other)
{
    check_compatible(other);
    if (den_.empty() && other.den_.empty()) {
        num_ += other.num_;
        return *this;
    }
    if (other.is_zero()) return *this;
    if (is_zero()) return *this = other;
    if (den_ == other.den_) {
        num_ += other.num_;
        cancel();
        return *this;
    }
    // Common denominator: factorwise maximum multiplicity.
    std::vector<Factor> lcm = den_;
    for (const auto& f : other.den_) {
        auto it = std::find_if(lcm.begin(), lcm.end(), [&](const Factor& g) { return g.poly == f.poly; });
        if (it == lcm.end())
            insert_factor(lcm, f.poly, f.mult);
        else
            it->mult = std::max(it->mult, f.mult);
    }
    auto lift = [&](const ExpPoly& num, const std::vector<Factor>& den) {
        ExpPoly r = num;
        for (const auto& g : lcm) {
            auto it = std::find_if(den.begin(), den.end(), [&](const Factor& f) { return f.poly == g.poly; });
            int have = it == den.end() ? 0 : it->mult;
            if (g.mult > have) r = r * g.poly.pow(g.mult - have);
        }
        return r;
    };
    num_ = lift(num_, den_) + lift(other.num_, other.den_);
    den_ = std::move(lcm);
    cancel();
    return *this;
}

Expr& Expr::operator-=(const Expr& other)
{
    return *this += -other;
}

Expr& Expr::operator*=(const Expr& other)
{
    check_compatible(other);
    if (is_zero()) return *this;
    if (other.is_zero()) return *this = Expr(nvars_);
    num_ = num_ * other.num_;
    if (other.den_.empty()) {
        if (!den_.empty()) cancel();
        return *this;
    }
    for (const auto& f : other.den_) insert_factor(den_, f.poly, f.mult);
    cancel();
    return *this;
}

Expr& Expr::operator/=(const Expr& other)
{
    check_compatible(other);
    if (other.is_zero()) throw EvalError("division by zero");
    if (auto c = other.as_constant()) {
        num_ = num_.scaled(1 / *c);
        return *this;
    }
    for (const auto& f : other.den_) num_ = num_ * f.poly.pow(f.mult);
    divide_by(other.num_, 1);
    return *this;
}

Expr Expr::operator-() const
{
    Expr r = *this;
    r.num_ = -r.num_;
    return r;
}

Expr Expr::pow(int k) const
{
    if (k < 0) return constant(nvars_, 1) / pow(-k);
    Expr r = *this;
    r.num_ = num_.pow(k);
    for (auto& f : r.den_) f.mult *= k;
    if (k == 0) r.den_.clear();
    return r;
}

Expr Expr::diff(int var) const
{
    if (var < 0 || var >= nvars_) throw std::out_of_range("diff: coordinate index out of range");
    Expr result(num_.diff(var));
    result.den_ = den_;
    result.cancel();
    for (const auto& f : den_) {
        ExpPoly fd = f.poly.diff(var);
        if (fd.is_zero()) continue;
        Expr t(num_ * fd.scaled(-f.mult));
        t.den_ = den_;
        insert_factor(t.den_, f.poly, 1);
        t.cancel();
        result += t;
    }
    return result;
}

Expr Expr::substitute(std::span<const Expr> values) const
{
    if (static_cast<int>(values.size()) != nvars_)
        throw std::invalid_argument("substitute: expected " + std::to_string(nvars_) + " values");
    const int m = values.empty() ? 0 : values.front().nvars();
    for (const auto& v : values)
        if (v.nvars() != m) throw std::invalid_argument("substitute: values live on different charts");

    std::vector<std::vector<Expr>> powers(nvars_);
    auto power = [&](int i, int e) -> const Expr& {
        auto& cache = powers[i];
        if (cache.empty()) cache.push_back(constant(m, 1));
        while (static_cast<int>(cache.size()) <= e) cache.push_back(cache.back() * values[i]);
        return cache[e];
    };
    auto mono_value = [&](const Exponents& mono) {
        Expr v = constant(m, 1);
        for (int i = 0; i < nvars_; ++i)
            if (mono[i] > 0) v *= power(i, mono[i]);
        return v;
    };
    auto sub_poly = [&](const ExpPoly& p) {
        Expr acc(m);
        for (const auto& [k, c] : p.terms()) {
            Expr t = mono_value(k.mono);
            if (!k.arg.is_zero()) {
                Expr a(m);
                for (const auto& [am, ac] : k.arg.terms) a += mono_value(am) * constant(m, ac);
                t *= Expr::exp(a);
            }
            acc += t * constant(m, c);
        }
        return acc;
    };

    Expr result = sub_poly(num_);
    for (const auto& f : den_) result /= sub_poly(f.poly).pow(f.mult);
    return result;
}

double Expr::eval_scaled(std::span<const double> point, double& max_abs_term) const
{
    if (static_cast<int>(point.size()) != nvars_)
        throw std::invalid_argument("eval: point has " + std::to_string(point.size()) + " coordinates, chart has " +
                                    std::to_string(nvars_));
    double mx = 0.0;
    double v = num_.eval(point, &mx);
    double d = 1.0;
    for (const auto& f : den_) {
        double fv = f.poly.eval(point);
        if (fv == 0.0 || !std::isfinite(fv)) throw EvalError("denominator vanishes at evaluation point");
        d *= std::pow(fv, f.mult);
    }
    if (d == 0.0 || !std::isfinite(d)) throw EvalError("denominator vanishes at evaluation point");
    v /= d;
    mx /= std::abs(d);
    if (!std::isfinite(v)) throw EvalError("overflow in evaluation");
    max_abs_term = mx;
    return v;
}

double Expr::eval(std::span<const double> point) const
{
    double mx = 0.0;
    return eval_scaled(point, mx);
}

std::optional<double> Expr::try_eval(std::span<const double> point) const
{
    try {
        return eval(point);
    } catch (const EvalError&) {
        return std::nullopt;
    }
}

std::string Expr::to_string(std::span<const std::string> names) const
{
    if (den_.empty()) return num_.to_string(names);
    std::string out = num_.to_string(names);
    if (num_.size() > 1) out = "(" + out + ")";
    for (const auto& f : den_) {
        std::string fs = f.poly.to_string(names);
        const bool bare = f.poly.size() == 1 && f.poly.leading().second == 1 && f.poly.leading().first.arg.is_zero() &&
                          fs.find('*') == std::string::npos && fs.find('^') == std::string::npos;
        if (!bare) fs = "(" + fs + ")";
        for (int i = 0; i < f.mult; ++i) out += "/" + fs;
    }
    return out;
}

bool Expr::equals(const Expr& other) const
{
    return (*this - other).is_zero();
}

Expr operator+(Expr a, const Expr& b)
{
    a += b;
    return a;
}

Expr operator-(Expr a, const Expr& b)
{
    a -= b;
    return a;
}

Expr operator*(Expr a, const Expr& b)
{
    a *= b;
    return a;
}

Expr operator/(Expr a, const Expr& b)
{
    a /= b;
    return a;
}

}  // namespace twistjac
