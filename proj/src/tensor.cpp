#include "twistjac/tensor.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <map>
#include <mutex>
#include <unordered_map>

namespace twistjac {

// ---------------------------------------------------------------------------
// multi-index bookkeeping

namespace {

using Binomials = std::array<std::array<std::size_t, kMaxDim + 2>, kMaxDim + 2>;

const Binomials& binomials()
{
    static const Binomials table = [] {
        Binomials t{};
        for (int n = 0; n <= kMaxDim + 1; ++n) {
            t[n][0] = 1;
            for (int k = 1; k <= n; ++k) t[n][k] = t[n - 1][k - 1] + (k <= n - 1 ? t[n - 1][k] : 0);
        }
        return t;
    }();
    return table;
}

Mask bit(int i) { return Mask{1} << i; }

int bits_below(Mask m, int i) { return std::popcount(m & (bit(i) - 1)); }

}  // namespace

int degree_of(Mask m) noexcept
{
    return std::popcount(m);
}

const std::vector<Mask>& subsets(int n, int k)
{
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::vector<Mask>> cache;
    if (n < 0 || n > kMaxDim) throw std::out_of_range("chart dimension exceeds the supported maximum");
    if (k < 0) throw std::out_of_range("negative tensor degree");
    static const std::vector<Mask> none;
    if (k > n) return none;   // above the top degree the space is zero
    std::lock_guard lock(mu);
    auto [it, inserted] = cache.try_emplace({n, k});
    if (inserted) {
        auto& out = it->second;
        out.reserve(binomials()[n][k]);
        if (k == 0) {
            out.push_back(0);
        } else {
            // Gosper's hack: successive masks with k bits in increasing numeric order.
            Mask m = bit(k) - 1;
            const Mask limit = bit(n);
            while (m < limit) {
                out.push_back(m);
                Mask c = m & (~m + 1);
                Mask r = m + c;
                m = (((r ^ m) >> 2) / c) | r;
            }
        }
    }
    return it->second;
}

std::size_t slot_of(Mask m)
{
    std::size_t rank = 0;
    int j = 0;
    while (m) {
        int b = std::countr_zero(m);
        rank += binomials()[b][j + 1];
        ++j;
        m &= m - 1;
    }
    return rank;
}

std::vector<int> indices_of(Mask m)
{
    std::vector<int> out;
    while (m) {
        out.push_back(std::countr_zero(m));
        m &= m - 1;
    }
    return out;
}

int merge_sign(Mask a, Mask b) noexcept
{
    if (a & b) return 0;
    int inversions = 0;
    while (a) {
        int i = std::countr_zero(a);
        inversions += bits_below(b, i);
        a &= a - 1;
    }
    return inversions % 2 ? -1 : 1;
}

namespace {

/// Sorts an index sequence; returns (mask, sign) or sign 0 on repetition.
std::pair<Mask, int> sort_indices(const std::vector<int>& idx)
{
    Mask m = 0;
    int sign = 1;
    for (int i : idx) {
        if (m & bit(i)) return {0, 0};
        // appending i after m: move it past the larger ones already present
        if (std::popcount(m & ~(bit(i + 1) - 1)) % 2) sign = -sign;
        m |= bit(i);
    }
    return {m, sign};
}

}  // namespace

// ---------------------------------------------------------------------------
// AltTensor

template <class Tag>
AltTensor<Tag>::AltTensor(ChartPtr chart, int degree) : chart_(std::move(chart)), degree_(degree)
{
    if (!chart_) throw std::invalid_argument("tensor without chart");
    comps_.assign(subsets(chart_->dim(), degree).size(), Expr(chart_->dim()));
}

template <class Tag>
AltTensor<Tag> AltTensor<Tag>::scalar(ChartPtr chart, Expr value)
{
    AltTensor t(std::move(chart), 0);
    if (value.nvars() != t.dim()) throw std::invalid_argument("scalar lives on a different chart");
    t.comps_[0] = std::move(value);
    return t;
}

template <class Tag>
AltTensor<Tag> AltTensor<Tag>::from_components(ChartPtr chart, std::vector<Expr> comps)
{
    AltTensor t(std::move(chart), 1);
    if (static_cast<int>(comps.size()) != t.dim()) throw std::invalid_argument("component count mismatch");
    for (int i = 0; i < t.dim(); ++i) {
        if (comps[i].nvars() != t.dim()) throw std::invalid_argument("component lives on a different chart");
        t.comps_[slot_of(bit(i))] = std::move(comps[i]);
    }
    return t;
}

template <class Tag>
AltTensor<Tag> AltTensor<Tag>::basis(ChartPtr chart, const std::vector<int>& indices)
{
    AltTensor t(std::move(chart), static_cast<int>(indices.size()));
    for (int i : indices)
        if (i < 0 || i >= t.dim()) throw std::out_of_range("basis index out of range");
    auto [m, s] = sort_indices(indices);
    if (s != 0) t[m] = Expr::constant(t.dim(), s);
    return t;
}

template <class Tag>
Expr AltTensor<Tag>::at(const std::vector<int>& indices) const
{
    if (static_cast<int>(indices.size()) != degree_) throw std::invalid_argument("index count differs from degree");
    auto [m, s] = sort_indices(indices);
    if (s == 0) return Expr(dim());
    return s > 0 ? (*this)[m] : -(*this)[m];
}

template <class Tag>
const Expr& AltTensor<Tag>::value() const
{
    if (degree_ != 0) throw std::logic_error("value() on a tensor of positive degree");
    return comps_[0];
}

template <class Tag>
bool AltTensor<Tag>::is_zero() const
{
    return std::all_of(comps_.begin(), comps_.end(), [](const Expr& e) { return e.is_zero(); });
}

template <class Tag>
bool AltTensor<Tag>::equals(const AltTensor& other) const
{
    if (degree_ != other.degree_ || !chart_ || !other.chart_ || !(*chart_ == *other.chart_)) return false;
    for (std::size_t i = 0; i < comps_.size(); ++i)
        if (!comps_[i].equals(other.comps_[i])) return false;
    return true;
}

template <class Tag>
void AltTensor<Tag>::require_same_chart(const AltTensor& other, const char* op) const
{
    if (!chart_ || !other.chart_ || !(*chart_ == *other.chart_))
        throw std::invalid_argument(std::string(op) + ": operands live on different charts");
}

template <class Tag>
AltTensor<Tag>& AltTensor<Tag>::operator+=(const AltTensor& other)
{
    require_same_chart(other, "+");
    if (degree_ != other.degree_) throw std::invalid_argument("+: degree mismatch");
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] += other.comps_[i];
    return *this;
}

template <class Tag>
AltTensor<Tag>& AltTensor<Tag>::operator-=(const AltTensor& other)
{
    require_same_chart(other, "-");
    if (degree_ != other.degree_) throw std::invalid_argument("-: degree mismatch");
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] -= other.comps_[i];
    return *this;
}

template <class Tag>
AltTensor<Tag> AltTensor<Tag>::operator+(const AltTensor& other) const
{
    AltTensor r = *this;
    r += other;
    return r;
}

template <class Tag>
AltTensor<Tag> AltTensor<Tag>::operator-(const AltTensor& other) const
{
    AltTensor r = *this;
    r -= other;
    return r;
}

template <class Tag>
AltTensor<Tag> AltTensor<Tag>::operator-() const
{
    AltTensor r = *this;
    for (auto& c : r.comps_) c = -c;
    return r;
}

template <class Tag>
AltTensor<Tag> AltTensor<Tag>::operator*(const Expr& f) const
{
    AltTensor r = *this;
    for (auto& c : r.comps_)
        if (!c.is_zero()) c *= f;
    return r;
}

template <class Tag>
AltTensor<Tag> AltTensor<Tag>::map(const std::function<Expr(const Expr&)>& fn) const
{
    AltTensor r = *this;
    for (auto& c : r.comps_) c = fn(c);
    return r;
}

template class AltTensor<FormTag>;
template class AltTensor<VectorTag>;

// ---------------------------------------------------------------------------
// keys and printing

std::string form_key(Mask m, const Chart& chart)
{
    if (m == 0) return "1";
    std::string s;
    for (int i : indices_of(m)) {
        if (!s.empty()) s += "^";
        s += "d" + chart.coords()[i];
    }
    return s;
}

std::string vector_key(Mask m, const Chart& chart)
{
    if (m == 0) return "1";
    std::string s;
    for (int i : indices_of(m)) {
        if (!s.empty()) s += "^";
        s += "d/d" + chart.coords()[i];
    }
    return s;
}

namespace {

std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    if (b == std::string_view::npos) return {};
    return std::string(s.substr(b, e - b + 1));
}

ParsedKey parse_key(std::string_view key, const Chart& chart, std::string_view prefix)
{
    std::string k = trim(key);
    if (k == "1" || k.empty()) return {};
    std::vector<int> idx;
    std::size_t start = 0;
    while (true) {
        std::size_t hat = k.find('^', start);
        std::string part = trim(std::string_view(k).substr(start, hat == std::string::npos ? std::string::npos : hat - start));
        if (part.rfind(prefix, 0) != 0)
            throw std::invalid_argument("malformed multi-index key '" + k + "' (expected '" + std::string(prefix) +
                                        "<coord>' factors)");
        auto i = chart.index_of(part.substr(prefix.size()));
        if (!i) throw std::invalid_argument("key '" + k + "' names a coordinate outside chart '" + chart.name() + "'");
        idx.push_back(*i);
        if (hat == std::string::npos) break;
        start = hat + 1;
    }
    auto [m, s] = sort_indices(idx);
    if (s == 0) throw std::invalid_argument("key '" + k + "' repeats a coordinate");
    return ParsedKey{m, s, static_cast<int>(idx.size())};
}

template <class Tag>
std::string listing(const AltTensor<Tag>& t, std::string (*key)(Mask, const Chart&))
{
    std::string out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t.comp(i).is_zero()) continue;
        if (!out.empty()) out += ", ";
        out += key(t.mask(i), *t.chart()) + ": " + t.comp(i).to_string(*t.chart());
    }
    return out.empty() ? "0" : out;
}

}  // namespace

ParsedKey parse_form_key(std::string_view key, const Chart& chart)
{
    return parse_key(key, chart, "d");
}

ParsedKey parse_vector_key(std::string_view key, const Chart& chart)
{
    return parse_key(key, chart, "d/d");
}

namespace {

template <class Tag>
AltTensor<Tag> parse_tensor(const ChartPtr& chart, int degree, const KeyedComponents& comps,
                            ParsedKey (*parse)(std::string_view, const Chart&))
{
    AltTensor<Tag> t(chart, degree);
    for (const auto& [key, text] : comps) {
        ParsedKey k = parse(key, *chart);
        if (k.degree != degree)
            throw std::invalid_argument("key '" + key + "' has degree " + std::to_string(k.degree) + ", expected " +
                                        std::to_string(degree));
        Expr e = parse_expr(text, *chart);
        if (k.sign > 0)
            t[k.mask] += e;
        else
            t[k.mask] -= e;
    }
    return t;
}

}  // namespace

Form parse_form(const ChartPtr& chart, int degree, const KeyedComponents& comps)
{
    return parse_tensor<FormTag>(chart, degree, comps, parse_form_key);
}

MultiVector parse_multivector(const ChartPtr& chart, int degree, const KeyedComponents& comps)
{
    return parse_tensor<VectorTag>(chart, degree, comps, parse_vector_key);
}

std::string to_string(const Form& f)
{
    return listing(f, form_key);
}

std::string to_string(const MultiVector& v)
{
    return listing(v, vector_key);
}

// ---------------------------------------------------------------------------
// exterior algebra

namespace {

template <class Tag>
AltTensor<Tag> wedge_impl(const AltTensor<Tag>& a, const AltTensor<Tag>& b)
{
    a.require_same_chart(b, "wedge");
    const int k = a.degree() + b.degree();
    AltTensor<Tag> r(a.chart(), k);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.comp(i).is_zero()) continue;
        const Mask ma = a.mask(i);
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (b.comp(j).is_zero()) continue;
            const Mask mb = b.mask(j);
            int s = merge_sign(ma, mb);
            if (s == 0) continue;
            Expr p = a.comp(i) * b.comp(j);
            if (s > 0)
                r[ma | mb] += p;
            else
                r[ma | mb] -= p;
        }
    }
    return r;
}

/// Memoized wedge products of a family of degree-1 tensors indexed by coordinate.
template <class Tag>
class WedgeCache {
public:
    WedgeCache(ChartPtr chart, std::vector<AltTensor<Tag>> ones) : chart_(std::move(chart)), ones_(std::move(ones)) {}

    const AltTensor<Tag>& get(Mask m)
    {
        if (auto it = memo_.find(m); it != memo_.end()) return it->second;
        AltTensor<Tag> value;
        if (m == 0) {
            value = AltTensor<Tag>::scalar(chart_, Expr::constant(chart_->dim(), 1));
        } else {
            int hi = 31 - std::countl_zero(m);
            value = wedge_impl(get(m & ~bit(hi)), ones_[hi]);
        }
        return memo_.emplace(m, std::move(value)).first->second;
    }

private:
    ChartPtr chart_;
    std::vector<AltTensor<Tag>> ones_;
    std::unordered_map<Mask, AltTensor<Tag>> memo_;
};

}  // namespace

Form wedge(const Form& a, const Form& b)
{
    return wedge_impl(a, b);
}

MultiVector wedge(const MultiVector& a, const MultiVector& b)
{
    return wedge_impl(a, b);
}

Form ext_d(const Form& a)
{
    const int n = a.dim();
    Form r(a.chart(), a.degree() + 1);
    for (std::size_t s = 0; s < a.size(); ++s) {
        if (a.comp(s).is_zero()) continue;
        const Mask m = a.mask(s);
        for (int i = 0; i < n; ++i) {
            if (m & bit(i)) continue;
            Expr d = a.comp(s).diff(i);
            if (d.is_zero()) continue;
            if (bits_below(m, i) % 2)
                r[m | bit(i)] -= d;
            else
                r[m | bit(i)] += d;
        }
    }
    return r;
}

Form ext_d(const ChartPtr& chart, const Expr& f)
{
    return ext_d(Form::scalar(chart, f));
}

Form interior(const MultiVector& X, const Form& a)
{
    if (X.degree() != 1) throw std::invalid_argument("interior: expected a vector field");
    if (a.degree() < 1) throw std::invalid_argument("interior: cannot contract a function");
    if (!(*X.chart() == *a.chart())) throw std::invalid_argument("interior: operands live on different charts");
    const int n = a.dim();
    Form r(a.chart(), a.degree() - 1);
    for (std::size_t s = 0; s < r.size(); ++s) {
        const Mask m = r.mask(s);
        Expr acc(n);
        for (int i = 0; i < n; ++i) {
            if (m & bit(i)) continue;
            const Expr& xi = X[bit(i)];
            const Expr& ai = a[m | bit(i)];
            if (xi.is_zero() || ai.is_zero()) continue;
            if (bits_below(m, i) % 2)
                acc -= xi * ai;
            else
                acc += xi * ai;
        }
        r.comp(s) = std::move(acc);
    }
    return r;
}

Expr pairing(const MultiVector& P, const Form& a)
{
    if (P.degree() != a.degree()) throw std::invalid_argument("pairing: degree mismatch");
    if (!(*P.chart() == *a.chart())) throw std::invalid_argument("pairing: operands live on different charts");
    Expr acc(P.dim());
    for (std::size_t s = 0; s < P.size(); ++s)
        if (!P.comp(s).is_zero() && !a.comp(s).is_zero()) acc += P.comp(s) * a.comp(s);
    return acc;
}

Expr evaluate(const Form& zeta, const std::vector<MultiVector>& vectors)
{
    if (static_cast<int>(vectors.size()) != zeta.degree()) throw std::invalid_argument("evaluate: argument count");
    MultiVector w = MultiVector::scalar(zeta.chart(), Expr::constant(zeta.dim(), 1));
    for (const auto& v : vectors) w = wedge(w, v);
    return pairing(w, zeta);
}

Expr evaluate(const MultiVector& P, const std::vector<Form>& covectors)
{
    if (static_cast<int>(covectors.size()) != P.degree()) throw std::invalid_argument("evaluate: argument count");
    Form w = Form::scalar(P.chart(), Expr::constant(P.dim(), 1));
    for (const auto& a : covectors) w = wedge(w, a);
    return pairing(P, w);
}

Expr apply(const MultiVector& X, const Expr& f)
{
    if (X.degree() != 1) throw std::invalid_argument("apply: expected a vector field");
    Expr acc(X.dim());
    for (int i = 0; i < X.dim(); ++i) {
        const Expr& xi = X[bit(i)];
        if (xi.is_zero()) continue;
        Expr d = f.diff(i);
        if (!d.is_zero()) acc += xi * d;
    }
    return acc;
}

Form lie(const MultiVector& X, const Form& a)
{
    if (a.degree() == 0) return Form::scalar(a.chart(), apply(X, a.value()));
    Form r = ext_d(interior(X, a));
    if (a.degree() < a.dim()) r += interior(X, ext_d(a));
    return r;
}

MultiVector lie(const MultiVector& X, const MultiVector& P)
{
    if (X.degree() != 1) throw std::invalid_argument("lie: expected a vector field");
    return schouten(X, P);
}

namespace {

/// ∂_r P / ∂θ_i in the superfunction picture of multivectors.
MultiVector right_derivative(const MultiVector& P, int i)
{
    MultiVector r(P.chart(), P.degree() - 1);
    const int p = P.degree();
    for (std::size_t s = 0; s < P.size(); ++s) {
        const Mask m = P.mask(s);
        if (!(m & bit(i)) || P.comp(s).is_zero()) continue;
        const int pos = bits_below(m, i);
        if ((p - 1 - pos) % 2)
            r[m & ~bit(i)] -= P.comp(s);
        else
            r[m & ~bit(i)] += P.comp(s);
    }
    return r;
}

}  // namespace

MultiVector schouten(const MultiVector& P, const MultiVector& Q)
{
    P.require_same_chart(Q, "schouten");
    const int p = P.degree();
    const int q = Q.degree();
    const int n = P.dim();
    if (p + q - 1 > n) return MultiVector(P.chart(), p + q - 1);
    if (p + q == 0) return MultiVector(P.chart(), 0);  // functions commute; degree −1 is empty
    MultiVector first(P.chart(), p + q - 1);
    MultiVector second(P.chart(), p + q - 1);
    auto diff_all = [](const MultiVector& T, int i) { return T.map([i](const Expr& e) { return e.diff(i); }); };
    for (int i = 0; i < n; ++i) {
        if (p > 0) {
            MultiVector dP = right_derivative(P, i);
            if (!dP.is_zero()) {
                MultiVector dQ = diff_all(Q, i);
                if (!dQ.is_zero()) first += wedge(dP, dQ);
            }
        }
        if (q > 0) {
            MultiVector dQ = right_derivative(Q, i);
            if (!dQ.is_zero()) {
                MultiVector dP = diff_all(P, i);
                if (!dP.is_zero()) second += wedge(dQ, dP);
            }
        }
    }
    return ((p - 1) * (q - 1)) % 2 ? first + second : first - second;
}

MultiVector sharp(const MultiVector& Lambda, const Form& zeta)
{
    if (Lambda.degree() != 2) throw std::invalid_argument("sharp: expected a bivector");
    if (!(*Lambda.chart() == *zeta.chart())) throw std::invalid_argument("sharp: operands live on different charts");
    const int n = zeta.dim();
    if (zeta.degree() == 0) return MultiVector::scalar(zeta.chart(), zeta.value());
    std::vector<MultiVector> images;
    images.reserve(n);
    for (int i = 0; i < n; ++i) {
        MultiVector v(zeta.chart(), 1);
        for (int j = 0; j < n; ++j)
            if (j != i) v[bit(j)] = Lambda.at({i, j});
        images.push_back(std::move(v));
    }
    WedgeCache<VectorTag> cache(zeta.chart(), std::move(images));
    MultiVector r(zeta.chart(), zeta.degree());
    for (std::size_t s = 0; s < zeta.size(); ++s)
        if (!zeta.comp(s).is_zero()) r += cache.get(zeta.mask(s)) * zeta.comp(s);
    return r;
}

MultiVector sharp_tensor(const MultiVector& Lambda, const Form& zeta, const MultiVector& X)
{
    if (zeta.degree() < 1) throw std::invalid_argument("sharp_tensor: form degree must be positive");
    MultiVector r = sharp(Lambda, interior(X, zeta));
    return zeta.degree() % 2 ? -r : r;
}

Expr widen(const Expr& e, int nvars)
{
    if (nvars < e.nvars()) throw std::invalid_argument("widen: target chart is smaller");
    if (nvars == e.nvars()) return e;
    std::vector<Expr> vars;
    for (int i = 0; i < e.nvars(); ++i) vars.push_back(Expr::variable(nvars, i));
    if (vars.empty()) return Expr::constant(nvars, e.as_constant().value_or(Rational(0)));
    return e.substitute(vars);
}

namespace {

template <class Tag>
AltTensor<Tag> widen_impl(const AltTensor<Tag>& t, const ChartPtr& wider)
{
    const auto& a = t.chart()->coords();
    const auto& b = wider->coords();
    if (b.size() < a.size() || !std::equal(a.begin(), a.end(), b.begin()))
        throw std::invalid_argument("widen: chart " + wider->name() + " does not extend " + t.chart()->name());
    AltTensor<Tag> r(wider, t.degree());
    for (std::size_t s = 0; s < t.size(); ++s)
        if (!t.comp(s).is_zero()) r[t.mask(s)] = widen(t.comp(s), wider->dim());
    return r;
}

}  // namespace

Form widen(const Form& t, const ChartPtr& wider)
{
    return widen_impl(t, wider);
}

MultiVector widen(const MultiVector& t, const ChartPtr& wider)
{
    return widen_impl(t, wider);
}

// ---------------------------------------------------------------------------
// pair objects

bool PairForm::is_zero() const
{
    return primary.is_zero() && (degree() == 0 || secondary.is_zero());
}

bool PairForm::equals(const PairForm& o) const
{
    if (!primary.equals(o.primary)) return false;
    return degree() == 0 || secondary.equals(o.secondary);
}

bool PairVector::is_zero() const
{
    return primary.is_zero() && (degree() == 0 || secondary.is_zero());
}

bool PairVector::equals(const PairVector& o) const
{
    if (!primary.equals(o.primary)) return false;
    return degree() == 0 || secondary.equals(o.secondary);
}

PairForm make_pair_form(Form primary, Form secondary)
{
    if (primary.degree() > 0) {
        primary.require_same_chart(secondary, "pair form");
        if (secondary.degree() != primary.degree() - 1) throw std::invalid_argument("pair form: degrees must be (k, k-1)");
    }
    return PairForm{std::move(primary), std::move(secondary)};
}

PairVector make_pair_vector(MultiVector primary, MultiVector secondary)
{
    if (primary.degree() > 0) {
        primary.require_same_chart(secondary, "pair vector");
        if (secondary.degree() != primary.degree() - 1)
            throw std::invalid_argument("pair vector: degrees must be (k, k-1)");
    }
    return PairVector{std::move(primary), std::move(secondary)};
}

Expr evaluate(const PairForm& z, const std::vector<std::pair<MultiVector, Expr>>& args)
{
    const int k = z.degree();
    if (static_cast<int>(args.size()) != k) throw std::invalid_argument("pair evaluate: argument count");
    std::vector<MultiVector> xs;
    for (const auto& a : args) xs.push_back(a.first);
    Expr acc = evaluate(z.primary, xs);
    for (int i = 0; i < k; ++i) {
        if (args[i].second.is_zero()) continue;
        std::vector<MultiVector> rest;
        for (int j = 0; j < k; ++j)
            if (j != i) rest.push_back(xs[j]);
        Expr t = args[i].second * evaluate(z.secondary, rest);
        if (i % 2)
            acc -= t;
        else
            acc += t;
    }
    return acc;
}

Expr evaluate(const PairVector& v, const std::vector<std::pair<Form, Expr>>& args)
{
    const int k = v.degree();
    if (static_cast<int>(args.size()) != k) throw std::invalid_argument("pair evaluate: argument count");
    std::vector<Form> as;
    for (const auto& a : args) as.push_back(a.first);
    Expr acc = evaluate(v.primary, as);
    for (int i = 0; i < k; ++i) {
        if (args[i].second.is_zero()) continue;
        std::vector<Form> rest;
        for (int j = 0; j < k; ++j)
            if (j != i) rest.push_back(as[j]);
        Expr t = args[i].second * evaluate(v.secondary, rest);
        if (i % 2)
            acc -= t;
        else
            acc += t;
    }
    return acc;
}

std::pair<MultiVector, Expr> pair_sharp1(const MultiVector& Lambda, const MultiVector& E, const Form& alpha,
                                        const Expr& f)
{
    if (alpha.degree() != 1 || E.degree() != 1) throw std::invalid_argument("pair_sharp1: expected (1-form, vector)");
    MultiVector x = sharp(Lambda, alpha);
    if (!f.is_zero()) x += E * f;
    return {std::move(x), -pairing(E, alpha)};
}

PairVector pair_sharp(const MultiVector& Lambda, const MultiVector& E, const PairForm& z)
{
    const ChartPtr& chart = z.primary.chart();
    const int k = z.degree();
    const int n = chart->dim();
    if (k == 0) return PairVector{MultiVector::scalar(chart, z.primary.value()), MultiVector()};

    std::vector<std::pair<MultiVector, Expr>> basis;
    basis.reserve(n);
    for (int j = 0; j < n; ++j) basis.push_back(pair_sharp1(Lambda, E, Form::basis(chart, {j}), Expr(n)));
    const std::pair<MultiVector, Expr> unit{E, Expr(n)};  // (Λ,E)^#(0,1)

    const bool odd = k % 2;
    PairVector r{MultiVector(chart, k), MultiVector(chart, k - 1)};
    for (std::size_t s = 0; s < r.primary.size(); ++s) {
        std::vector<std::pair<MultiVector, Expr>> args;
        for (int j : indices_of(r.primary.mask(s))) args.push_back(basis[j]);
        Expr v = evaluate(z, args);
        r.primary.comp(s) = odd ? -v : v;
    }
    for (std::size_t s = 0; s < r.secondary.size(); ++s) {
        std::vector<std::pair<MultiVector, Expr>> args{unit};
        for (int j : indices_of(r.secondary.mask(s))) args.push_back(basis[j]);
        Expr v = evaluate(z, args);
        r.secondary.comp(s) = odd ? -v : v;
    }
    return r;
}

// ---------------------------------------------------------------------------
// maps

ProjectabilityFailure::ProjectabilityFailure(std::string component, std::string detail)
    : std::runtime_error("not projectable: component " + component + ": " + detail), component_(std::move(component))
{
}

Expr SmoothMap::pull(const Expr& f) const
{
    return f.substitute(components);
}

Form SmoothMap::differential(int j) const
{
    return ext_d(source, components.at(j));
}

SmoothMap make_map(std::string name, ChartPtr source, ChartPtr target, const std::vector<std::string>& components)
{
    if (static_cast<int>(components.size()) != target->dim())
        throw std::invalid_argument("map '" + name + "': expected " + std::to_string(target->dim()) + " components");
    SmoothMap m{std::move(name), source, target, {}, {}};
    for (const auto& c : components) m.components.push_back(parse_expr(c, *source));
    return m;
}

SmoothMap identity_map(const ChartPtr& chart)
{
    SmoothMap m{"id", chart, chart, {}, {}};
    for (int i = 0; i < chart->dim(); ++i) m.components.push_back(Expr::variable(chart->dim(), i));
    m.section = m.components;
    return m;
}

SmoothMap compose(const SmoothMap& f, const SmoothMap& g)
{
    if (!(*g.target == *f.source)) throw std::invalid_argument("compose: chart mismatch");
    SmoothMap r{f.name + "∘" + g.name, g.source, f.target, {}, {}};
    for (const auto& c : f.components) r.components.push_back(c.substitute(g.components));
    if (f.has_section() && g.has_section())
        for (const auto& c : g.section) r.section.push_back(c.substitute(f.section));
    return r;
}

bool section_is_valid(const SmoothMap& f)
{
    if (!f.has_section()) return false;
    for (int j = 0; j < f.target->dim(); ++j)
        if (!f.components[j].substitute(f.section).equals(Expr::variable(f.target->dim(), j))) return false;
    return true;
}

Form pullback(const SmoothMap& phi, const Form& a)
{
    if (!(*a.chart() == *phi.target)) throw std::invalid_argument("pullback: form does not live on the map's target");
    std::vector<Form> ones;
    for (int j = 0; j < phi.target->dim(); ++j) ones.push_back(phi.differential(j));
    WedgeCache<FormTag> cache(phi.source, std::move(ones));
    Form r(phi.source, a.degree());
    for (std::size_t s = 0; s < a.size(); ++s) {
        if (a.comp(s).is_zero()) continue;
        const Form& w = cache.get(a.mask(s));
        if (w.is_zero()) continue;
        r += w * phi.pull(a.comp(s));
    }
    return r;
}

MultiVector pushforward(const SmoothMap& phi, const MultiVector& P)
{
    if (!(*P.chart() == *phi.source)) throw std::invalid_argument("pushforward: tensor does not live on the map's source");
    if (!phi.has_section()) throw std::invalid_argument("pushforward: map '" + phi.name + "' declares no section");
    std::vector<Form> ones;
    for (int j = 0; j < phi.target->dim(); ++j) ones.push_back(phi.differential(j));
    WedgeCache<FormTag> cache(phi.source, std::move(ones));
    MultiVector r(phi.target, P.degree());
    for (std::size_t s = 0; s < r.size(); ++s) {
        Expr c = pairing(P, cache.get(r.mask(s)));
        if (c.is_zero()) continue;
        Expr down = c.substitute(phi.section);
        if (!phi.pull(down).equals(c))
            throw ProjectabilityFailure(vector_key(r.mask(s), *phi.target),
                                        c.to_string(*phi.source) + " is not constant along the fibres of " + phi.name);
        r.comp(s) = std::move(down);
    }
    return r;
}

}  // namespace twistjac
