#include "twistjac/apath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace twistjac {

namespace {

ChartPtr time_chart() { return make_chart("time", {"t"}); }

double at(const Expr& e, double t)
{
    const double p[1] = {t};
    return e.eval(p);
}

Fiber scaled(Fiber v, double s)
{
    for (auto& z : v.zeta) z *= s;
    v.f *= s;
    return v;
}

void validate(const APath& c, double box)
{
    const int n = c.J.chart->dim();
    if (c.N < kMinPathIntervals || c.N % 2 != 0)
        throw InvalidPath("A-paths need an even number of intervals >= " + std::to_string(kMinPathIntervals) +
                          ", got " + std::to_string(c.N));
    if (static_cast<int>(c.gamma.size()) != c.N + 1 || static_cast<int>(c.fiber.size()) != c.N + 1)
        throw InvalidPath("sample count does not match N + 1");
    for (int i = 0; i <= c.N; ++i) {
        if (static_cast<int>(c.gamma[i].size()) != n || static_cast<int>(c.fiber[i].zeta.size()) != n)
            throw InvalidPath("sample " + std::to_string(i) + " has the wrong dimension");
        for (double x : c.gamma[i])
            if (!std::isfinite(x) || std::abs(x) > box + 1e-12)
                throw InvalidPath("base point at t=" + std::to_string(c.time(i)) + " leaves the sample box: " +
                                  format_point(*c.J.chart, c.gamma[i]));
    }
    for (int b : c.breaks)
        if (b <= 0 || b >= c.N || b % 2 != 0) throw InvalidPath("break indices must be even and interior");
}

// fiber at node i seen from the piece that starts at i
const Fiber& fiber_from_right(const APath& c, int i)
{
    auto it = std::lower_bound(c.breaks.begin(), c.breaks.end(), i);
    if (it != c.breaks.end() && *it == i) return c.right[static_cast<std::size_t>(it - c.breaks.begin())];
    return c.fiber[i];
}

// numeric anchor columns: Λ^#dx^k for each k, then E
struct AnchorColumns {
    std::vector<MultiVector> cols;
    MultiVector E;

    explicit AnchorColumns(const TwistedJacobi& J) : E(J.E)
    {
        const int n = J.chart->dim();
        for (int k = 0; k < n; ++k) cols.push_back(algebroid_anchor(J, {Form::basis(J.chart, {k}), Expr(n)}));
    }

    std::vector<double> operator()(const Point& p, const Fiber& v) const
    {
        const int n = static_cast<int>(cols.size());
        std::vector<double> out(n, 0.0);
        for (int j = 0; j < n; ++j) {
            double s = v.f * E.at({j}).eval(p);
            for (int k = 0; k < n; ++k)
                if (v.zeta[k] != 0.0) s += v.zeta[k] * cols[k].at({j}).eval(p);
            out[j] = s;
        }
        return out;
    }
};

double integrand(const APath& c, const Point& p, const Fiber& v)
{
    double s = 0.0;
    for (int k = 0; k < c.J.chart->dim(); ++k)
        if (v.zeta[k] != 0.0) s += v.zeta[k] * c.J.E.at({k}).eval(p);
    return -s;
}

}  // namespace

PathFormula parse_path(const TwistedJacobi& J, const std::vector<std::string>& gamma,
                       const std::vector<std::pair<std::string, std::string>>& zeta, const std::string& f)
{
    const int n = J.chart->dim();
    if (static_cast<int>(gamma.size()) != n)
        throw InvalidPath("base path needs " + std::to_string(n) + " components, got " + std::to_string(gamma.size()));
    PathFormula P;
    P.time = time_chart();
    for (const auto& g : gamma) P.gamma.push_back(parse_expr(g, *P.time));
    P.zeta.assign(n, Expr(1));
    for (const auto& [key, val] : zeta) {
        const auto& coords = J.chart->coords();
        auto it = key.size() > 1 && key[0] == 'd' ? std::find(coords.begin(), coords.end(), key.substr(1)) : coords.end();
        if (it == coords.end()) throw InvalidPath("unknown covector key '" + key + "' on " + J.chart->name());
        P.zeta[static_cast<std::size_t>(it - coords.begin())] += parse_expr(val, *P.time);
    }
    P.f = f.empty() ? Expr(1) : parse_expr(f, *P.time);
    return P;
}

APath sample_path(const TwistedJacobi& J, const PathFormula& P, int N, double box)
{
    APath c;
    c.J = J;
    c.N = N;
    if (N < kMinPathIntervals || N % 2 != 0)
        throw InvalidPath("A-paths need an even number of intervals >= " + std::to_string(kMinPathIntervals) +
                          ", got " + std::to_string(N));
    for (int i = 0; i <= N; ++i) {
        const double t = c.time(i);
        Point g;
        Fiber v;
        for (const auto& e : P.gamma) g.push_back(at(e, t));
        for (const auto& e : P.zeta) v.zeta.push_back(at(e, t));
        v.f = at(P.f, t);
        c.gamma.push_back(std::move(g));
        c.fiber.push_back(std::move(v));
    }
    c.formula = P;
    validate(c, box);
    return c;
}

APath make_path(const TwistedJacobi& J, std::vector<Point> gamma, std::vector<Fiber> fiber, double box)
{
    APath c;
    c.J = J;
    c.N = static_cast<int>(gamma.size()) - 1;
    c.gamma = std::move(gamma);
    c.fiber = std::move(fiber);
    validate(c, box);
    return c;
}

double anchor_residual(const APath& c)
{
    const AnchorColumns rho(c.J);
    const double h = 1.0 / c.N;
    double worst = 0.0;
    for (int i = 1; i < c.N; ++i) {
        if (std::binary_search(c.breaks.begin(), c.breaks.end(), i)) continue;
        const auto a = rho(c.gamma[i], c.fiber[i]);
        for (std::size_t j = 0; j < a.size(); ++j) {
            const double d = (c.gamma[i + 1][j] - c.gamma[i - 1][j]) / (2 * h);
            worst = std::max(worst, std::abs(a[j] - d));
        }
    }
    return worst;
}

double cocycle_integral(const APath& c)
{
    // panel by panel, so a jump at an even break index is integrated from both sides
    const double h = 1.0 / c.N;
    double sum = 0.0;
    for (int i = 0; i < c.N; i += 2) {
        const double g0 = integrand(c, c.gamma[i], fiber_from_right(c, i));
        const double g1 = integrand(c, c.gamma[i + 1], c.fiber[i + 1]);
        const double g2 = integrand(c, c.gamma[i + 2], c.fiber[i + 2]);
        sum += g0 + 4 * g1 + g2;
    }
    return sum * h / 3;
}

std::pair<Point, Fiber> path_at(const APath& c, double t)
{
    if (t < -1e-12 || t > 1 + 1e-12) throw InvalidPath("time " + std::to_string(t) + " outside [0,1]");
    t = std::clamp(t, 0.0, 1.0);
    if (c.formula) {
        Point g;
        Fiber v;
        for (const auto& e : c.formula->gamma) g.push_back(at(e, t));
        for (const auto& e : c.formula->zeta) v.zeta.push_back(at(e, t));
        v.f = at(c.formula->f, t);
        return {g, v};
    }
    // smooth piece [a, b] containing t
    int a = 0, b = c.N;
    for (int k : c.breaks) {
        if (t <= c.time(k)) {
            b = k;
            break;
        }
        a = k;
    }
    const int i0 = std::clamp(static_cast<int>(std::floor(t * c.N)) - 1, a, b - 3);
    const int n = c.J.chart->dim();
    Point g(n, 0.0);
    Fiber v{std::vector<double>(n, 0.0), 0.0};
    for (int j = i0; j < i0 + 4; ++j) {
        double w = 1.0;
        for (int m = i0; m < i0 + 4; ++m)
            if (m != j) w *= (t - c.time(m)) / (c.time(j) - c.time(m));
        const Fiber& fj = j == a ? fiber_from_right(c, j) : c.fiber[j];
        for (int k = 0; k < n; ++k) {
            g[k] += w * c.gamma[j][k];
            v.zeta[k] += w * fj.zeta[k];
        }
        v.f += w * fj.f;
    }
    return {g, v};
}

APath resample(const APath& c, int M)
{
    if (M == c.N) return c;
    if (c.formula) return sample_path(c.J, *c.formula, M, std::numeric_limits<double>::infinity());
    std::vector<Point> g;
    std::vector<Fiber> v;
    for (int i = 0; i <= M; ++i) {
        auto [p, f] = path_at(c, static_cast<double>(i) / M);
        g.push_back(std::move(p));
        v.push_back(std::move(f));
    }
    return make_path(c.J, std::move(g), std::move(v), std::numeric_limits<double>::infinity());
}

APath concatenate(const APath& c0, const APath& c1, double tol)
{
    if (!(*c0.J.chart == *c1.J.chart)) throw InvalidPath("paths live on different charts");
    double gap = 0.0;
    for (std::size_t k = 0; k < c0.end().size(); ++k) gap = std::max(gap, std::abs(c0.end()[k] - c1.start()[k]));
    if (gap > tol) {
        std::ostringstream os;
        os << "paths are not composable: end " << format_point(*c0.J.chart, c0.end()) << " vs start "
           << format_point(*c1.J.chart, c1.start()) << " (gap " << gap << ")";
        throw InvalidPath(os.str());
    }
    const int M = std::max(c0.N, c1.N);
    const APath a = resample(c0, M), b = resample(c1, M);

    APath out;
    out.J = c0.J;
    out.N = 2 * M;
    for (int i = 0; i <= M; ++i) {
        out.gamma.push_back(a.gamma[i]);
        out.fiber.push_back(scaled(a.fiber[i], 2.0));
    }
    for (int i = 1; i <= M; ++i) {
        out.gamma.push_back(b.gamma[i]);
        out.fiber.push_back(scaled(b.fiber[i], 2.0));
    }
    auto shift = [](const APath& p, int by, APath& into) {
        for (std::size_t k = 0; k < p.breaks.size(); ++k) {
            into.breaks.push_back(p.breaks[k] + by);
            into.right.push_back(scaled(p.right[k], 2.0));
        }
    };
    shift(a, 0, out);
    out.breaks.push_back(M);
    out.right.push_back(scaled(b.fiber[0], 2.0));
    shift(b, M, out);
    return out;
}

APath reparameterize(const APath& c, const Expr& tau)
{
    if (tau.nvars() != 1) throw InvalidPath("cutoff must be an expression in t alone");
    const Expr dtau = tau.diff(0);
    if (std::abs(at(tau, 0.0)) > 1e-12 || std::abs(at(tau, 1.0) - 1.0) > 1e-12)
        throw InvalidPath("cutoff must satisfy tau(0) = 0 and tau(1) = 1");
    for (int i = 0; i <= c.N; ++i)
        if (at(dtau, c.time(i)) < -1e-12)
            throw InvalidPath("cutoff is not monotone: tau'(" + std::to_string(c.time(i)) + ") < 0");

    if (c.formula) {
        const PathFormula& P = *c.formula;
        PathFormula Q;
        Q.time = P.time;
        const std::vector<Expr> sub{tau};
        for (const auto& e : P.gamma) Q.gamma.push_back(e.substitute(sub));
        for (const auto& e : P.zeta) Q.zeta.push_back(e.substitute(sub) * dtau);
        Q.f = P.f.substitute(sub) * dtau;
        return sample_path(c.J, Q, c.N, std::numeric_limits<double>::infinity());
    }
    std::vector<Point> g;
    std::vector<Fiber> v;
    for (int i = 0; i <= c.N; ++i) {
        auto [p, f] = path_at(c, at(tau, c.time(i)));
        g.push_back(std::move(p));
        v.push_back(scaled(std::move(f), at(dtau, c.time(i))));
    }
    return make_path(c.J, std::move(g), std::move(v), std::numeric_limits<double>::infinity());
}

APath reverse(const APath& c)
{
    APath out;
    out.J = c.J;
    out.N = c.N;
    for (int i = c.N; i >= 0; --i) {
        out.gamma.push_back(c.gamma[i]);
        out.fiber.push_back(scaled(fiber_from_right(c, i), -1.0));
    }
    // left limits of c become right limits of the reversed path
    for (auto k = c.breaks.size(); k-- > 0;) {
        const int b = c.breaks[k];
        out.breaks.push_back(c.N - b);
        out.right.push_back(scaled(c.fiber[b], -1.0));
    }
    if (c.formula) {
        const PathFormula& P = *c.formula;
        PathFormula Q;
        Q.time = P.time;
        const std::vector<Expr> sub{Expr::constant(1, 1) - Expr::variable(1, 0)};
        for (const auto& e : P.gamma) Q.gamma.push_back(e.substitute(sub));
        for (const auto& e : P.zeta) Q.zeta.push_back(-e.substitute(sub));
        Q.f = -P.f.substitute(sub);
        out.formula = Q;
    }
    return out;
}

}  // namespace twistjac
