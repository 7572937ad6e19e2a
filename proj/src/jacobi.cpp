#include "twistjac/jacobi.hpp"

#include "detail.hpp"
#include "twistjac/linsolve.hpp"

#include <cmath>
#include <sstream>

namespace twistjac {

using detail::add_components;
using detail::d_opt;
using detail::one;

TwistedJacobi make_jacobi(const ChartPtr& chart, MultiVector Lambda, MultiVector E, Form omega)
{
    if (Lambda.degree() != 2 || E.degree() != 1 || omega.degree() != 2)
        throw std::invalid_argument("twisted Jacobi: expected (bivector, vector field, 2-form)");
    if (!(*Lambda.chart() == *chart) || !(*E.chart() == *chart) || !(*omega.chart() == *chart))
        throw std::invalid_argument("twisted Jacobi: components live on different charts");
    return TwistedJacobi{chart, std::move(Lambda), std::move(E), std::move(omega), false};
}

TwistedJacobi zero_jacobi(const ChartPtr& chart)
{
    return TwistedJacobi{chart, MultiVector(chart, 2), MultiVector(chart, 1), Form(chart, 2), false};
}

// ---------------------------------------------------------------------------
// defining identities

std::optional<MultiVector> jacobi_residual_primary(const TwistedJacobi& J)
{
    if (J.chart->dim() < 3) return std::nullopt;
    const Rational half(1, 2);
    MultiVector r = schouten(J.Lambda, J.Lambda) * Expr::constant(J.chart->dim(), half);
    r += wedge(J.E, J.Lambda);
    r -= sharp(J.Lambda, ext_d(J.omega));
    r -= wedge(sharp(J.Lambda, J.omega), J.E);
    return r;
}

MultiVector jacobi_residual_secondary(const TwistedJacobi& J)
{
    MultiVector r = schouten(J.E, J.Lambda);
    if (auto dw = d_opt(J.omega)) r -= sharp_tensor(J.Lambda, *dw, J.E);
    r += wedge(sharp_tensor(J.Lambda, J.omega, J.E), J.E);
    return r;
}

Report check_twisted_jacobi(const TwistedJacobi& J, const SampleConfig& cfg)
{
    Report rep("twisted Jacobi");
    const auto pts = detail::samples_for(J.chart, cfg);
    {
        ResidualAccumulator acc("1/2[L,L] + E^L = L#(dw) + L#(w)^E", *J.chart, pts, cfg.tol, cfg.guard);
        if (auto r = jacobi_residual_primary(J)) add_components(acc, *r);
        detail::assume_denominators(acc, J.Lambda);
        detail::assume_denominators(acc, J.E);
        detail::assume_denominators(acc, J.omega);
        rep.add(acc.result());
    }
    {
        ResidualAccumulator acc("[E,L] = (L#x1)(dw)(E) - (L#x1)(w)(E)^E", *J.chart, pts, cfg.tol, cfg.guard);
        add_components(acc, jacobi_residual_secondary(J));
        rep.add(acc.result());
    }
    return rep;
}

// ---------------------------------------------------------------------------
// functions

Expr bracket(const TwistedJacobi& J, const Expr& f, const Expr& g)
{
    Expr r = evaluate(J.Lambda, {ext_d(J.chart, f), ext_d(J.chart, g)});
    r += f * apply(J.E, g);
    r -= g * apply(J.E, f);
    return r;
}

namespace {

// Same value as the pair_sharp route, written out directly; used when n < 3.
Expr anomaly_rhs_direct(const TwistedJacobi& J, const std::vector<Expr>& fs)
{
    const int n = J.chart->dim();
    std::vector<std::pair<MultiVector, Expr>> xs;
    for (const auto& f : fs) xs.push_back(pair_sharp1(J.Lambda, J.E, ext_d(J.chart, f), f));
    Expr acc(n);
    if (auto dw = d_opt(J.omega)) acc += evaluate(*dw, {xs[0].first, xs[1].first, xs[2].first});
    for (int i = 0; i < 3; ++i) {
        std::vector<MultiVector> rest;
        for (int j = 0; j < 3; ++j)
            if (j != i) rest.push_back(xs[j].first);
        Expr t = xs[i].second * evaluate(J.omega, rest);
        if (i % 2)
            acc -= t;
        else
            acc += t;
    }
    return -acc;
}

}  // namespace

Anomaly jacobi_anomaly(const TwistedJacobi& J, const Expr& f, const Expr& g, const Expr& h)
{
    Anomaly a;
    a.lhs = bracket(J, f, bracket(J, g, h)) + bracket(J, g, bracket(J, h, f)) + bracket(J, h, bracket(J, f, g));
    if (J.chart->dim() < 3) {
        a.rhs = anomaly_rhs_direct(J, {f, g, h});
        return a;
    }
    PairVector pv = pair_sharp(J.Lambda, J.E, make_pair_form(ext_d(J.omega), J.omega));
    a.rhs = evaluate(pv, {{ext_d(J.chart, f), f}, {ext_d(J.chart, g), g}, {ext_d(J.chart, h), h}});
    return a;
}

MultiVector hamiltonian(const TwistedJacobi& J, const Expr& f)
{
    return sharp(J.Lambda, ext_d(J.chart, f)) + J.E * f;
}

// ---------------------------------------------------------------------------
// algebroid

MultiVector algebroid_anchor(const TwistedJacobi& J, const PairSection& a)
{
    MultiVector x = sharp(J.Lambda, a.first);
    if (!a.second.is_zero()) x += J.E * a.second;
    return x;
}

PairSection base_bracket(const TwistedJacobi& J, const PairSection& a, const PairSection& b)
{
    const auto& [zeta, f] = a;
    const auto& [eta, g] = b;
    const MultiVector xa = sharp(J.Lambda, zeta);
    const MultiVector xb = sharp(J.Lambda, eta);
    const Expr lam = evaluate(J.Lambda, {zeta, eta});

    Form first = lie(xa, eta) - lie(xb, zeta) - ext_d(J.chart, lam);
    if (!f.is_zero()) first += lie(J.E, eta) * f;
    if (!g.is_zero()) first -= lie(J.E, zeta) * g;
    if (J.chart->dim() >= 2) first -= interior(J.E, wedge(zeta, eta));

    Expr second = -lam + apply(xa, g) - apply(xb, f) + f * apply(J.E, g) - g * apply(J.E, f);
    return {std::move(first), std::move(second)};
}

PairSection twist_term(const TwistedJacobi& J, const PairSection& a, const PairSection& b)
{
    const int n = J.chart->dim();
    const MultiVector x1 = algebroid_anchor(J, a);
    const MultiVector x2 = algebroid_anchor(J, b);
    const Expr f1 = -pairing(J.E, a.first);
    const Expr f2 = -pairing(J.E, b.first);
    Form first(J.chart, 1);
    Expr second(n);
    if (n < 2) return {first, second};
    if (auto dw = d_opt(J.omega)) first += interior(x2, interior(x1, *dw));
    if (!f1.is_zero()) first += interior(x2, J.omega) * f1;
    if (!f2.is_zero()) first -= interior(x1, J.omega) * f2;
    second = evaluate(J.omega, {x1, x2});
    return {std::move(first), std::move(second)};
}

PairSection algebroid_bracket(const TwistedJacobi& J, const PairSection& a, const PairSection& b)
{
    PairSection r = base_bracket(J, a, b);
    PairSection t = twist_term(J, a, b);
    r.first += t.first;
    r.second += t.second;
    return r;
}

Expr pair_pairing(const PairSection& a, const MultiVector& X, const Expr& g)
{
    return pairing(X, a.first) + a.second * g;
}

PairSection exact_pair(const ChartPtr& chart, const Expr& f)
{
    return {ext_d(chart, f), f};
}

const char* algebroid_bracket_convention() noexcept
{
    return "{(z,f),(h,g)} = (L_{L#z}h - L_{L#h}z - dL(z,h) + f L_E h - g L_E z - i(E)(z^h), "
           "-L(z,h) + (L#z)(g) - (L#h)(f) + f E(g) - g E(f)); twist (dw,w)((L,E)#a,(L,E)#b,.) "
           "with (L,E)#(z,f) = (L#z + fE, -<z,E>)";
}

namespace {

PairSection operator+(PairSection a, const PairSection& b)
{
    a.first += b.first;
    a.second += b.second;
    return a;
}

PairSection operator-(PairSection a, const PairSection& b)
{
    a.first -= b.first;
    a.second -= b.second;
    return a;
}

PairSection scale(const PairSection& a, const Expr& h)
{
    return {a.first * h, a.second * h};
}

void add_pair(ResidualAccumulator& acc, const PairSection& r, const std::string& label)
{
    add_components(acc, r.first, label + ":");
    acc.add(r.second, label + ":1");
}

std::string pair_label(std::size_t i, std::size_t j)
{
    return "s" + std::to_string(i) + ",s" + std::to_string(j);
}

}  // namespace

Report check_algebroid(const TwistedJacobi& J, const std::vector<PairSection>& sections, const SampleConfig& cfg)
{
    Report rep("algebroid T*M x R");
    rep.note(std::string("bracket: ") + algebroid_bracket_convention());
    const auto pts = detail::samples_for(J.chart, cfg);
    const Chart& chart = *J.chart;
    const std::size_t m = sections.size();
    const int n = J.chart->dim();

    std::vector<std::vector<PairSection>> br(m, std::vector<PairSection>(m));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) br[i][j] = algebroid_bracket(J, sections[i], sections[j]);

    {
        ResidualAccumulator acc("antisymmetry", chart, pts, cfg.tol, cfg.guard);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j) add_pair(acc, br[i][j] + br[j][i], pair_label(i, j));
        rep.add(acc.result());
    }
    {
        ResidualAccumulator acc("Jacobi identity", chart, pts, cfg.tol, cfg.guard);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j)
                for (std::size_t k = j + 1; k < m; ++k) {
                    PairSection r = algebroid_bracket(J, sections[i], br[j][k]) +
                                    algebroid_bracket(J, sections[j], br[k][i]) +
                                    algebroid_bracket(J, sections[k], br[i][j]);
                    add_pair(acc, r, pair_label(i, j) + ",s" + std::to_string(k));
                }
        rep.add(acc.result());
    }
    {
        ResidualAccumulator acc("anchor homomorphism", chart, pts, cfg.tol, cfg.guard);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                MultiVector lhs = algebroid_anchor(J, br[i][j]);
                MultiVector rhs = schouten(algebroid_anchor(J, sections[i]), algebroid_anchor(J, sections[j]));
                add_components(acc, lhs - rhs, pair_label(i, j) + ":");
            }
        rep.add(acc.result());
    }
    {
        // test functions: a coordinate and a mixed quadratic
        const Expr h1 = detail::coord(J.chart, 0);
        const Expr h2 = detail::coord(J.chart, n - 1) * detail::coord(J.chart, n - 1) +
                        detail::coord(J.chart, 0) * detail::coord(J.chart, n - 1);
        ResidualAccumulator acc("Leibniz rule", chart, pts, cfg.tol, cfg.guard);
        for (const Expr& h : {h1, h2})
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j) {
                    PairSection lhs = algebroid_bracket(J, sections[i], scale(sections[j], h));
                    PairSection rhs = scale(br[i][j], h) +
                                      scale(sections[j], apply(algebroid_anchor(J, sections[i]), h));
                    add_pair(acc, lhs - rhs, pair_label(i, j));
                }
        rep.add(acc.result());
    }
    {
        ResidualAccumulator acc("(-E,0) cocycle", chart, pts, cfg.tol, cfg.guard);
        const MultiVector minus_e = -J.E;
        const Expr zero(n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                Expr lhs = pair_pairing(br[i][j], minus_e, zero);
                Expr rhs = apply(algebroid_anchor(J, sections[i]), pair_pairing(sections[j], minus_e, zero)) -
                           apply(algebroid_anchor(J, sections[j]), pair_pairing(sections[i], minus_e, zero));
                acc.add(lhs - rhs, pair_label(i, j));
            }
        rep.add(acc.result());
    }
    {
        ResidualAccumulator acc("exact-pair relation", chart, pts, cfg.tol, cfg.guard);
        std::vector<Expr> fs;
        for (int i = 0; i < n; ++i) fs.push_back(detail::coord(J.chart, i));
        fs.push_back(detail::coord(J.chart, 0) * detail::coord(J.chart, n - 1));
        for (std::size_t i = 0; i < fs.size(); ++i)
            for (std::size_t j = i + 1; j < fs.size(); ++j) {
                const PairSection a = exact_pair(J.chart, fs[i]);
                const PairSection b = exact_pair(J.chart, fs[j]);
                const Expr fg = bracket(J, fs[i], fs[j]);
                PairSection rhs = exact_pair(J.chart, fg) + twist_term(J, a, b);
                add_pair(acc, algebroid_bracket(J, a, b) - rhs, "f" + std::to_string(i) + ",f" + std::to_string(j));
            }
        rep.add(acc.result());
    }
    return rep;
}

// ---------------------------------------------------------------------------
// conformal change

TwistedJacobi conformal(const TwistedJacobi& J, const Expr& a, const SampleConfig& cfg)
{
    if (a.is_zero()) throw ZeroWitness("conformal factor is identically zero", {});
    for (const auto& p : detail::samples_for(J.chart, cfg)) {
        auto v = a.try_eval(p);
        if (!v || std::abs(*v) < 1e-12)
            throw ZeroWitness("conformal factor " + a.to_string(*J.chart) + " vanishes at " +
                                  format_point(*J.chart, p),
                              p);
    }
    TwistedJacobi r = J;
    r.verified = false;
    r.Lambda = J.Lambda * a;
    r.E = sharp(J.Lambda, ext_d(J.chart, a)) + J.E * a;
    r.omega = J.omega * (one(J.chart) / a);
    return r;
}

Expr conformal_bracket_residual(const TwistedJacobi& J, const Expr& a, const Expr& f, const Expr& g)
{
    TwistedJacobi c = conformal(J, a);
    return bracket(c, f, g) - bracket(J, a * f, a * g) / a;
}

// ---------------------------------------------------------------------------
// Poissonization and homogeneous structures

HomTwistedPoisson poissonize(const TwistedJacobi& J)
{
    ChartPtr big = extend_chart(J.chart, J.chart->name() + "xR", "s");
    const int n = J.chart->dim();
    const int N = big->dim();
    const Expr s = Expr::variable(N, n);
    const MultiVector ds = MultiVector::basis(big, {n});
    const MultiVector E = widen(J.E, big);
    HomTwistedPoisson H;
    H.chart = big;
    H.Lambda = (widen(J.Lambda, big) + wedge(ds, E)) * Expr::exp(-s);
    H.omega = widen(J.omega, big) * Expr::exp(s);
    H.Z = ds;
    return H;
}

Report check_homogeneous(const HomTwistedPoisson& H, const SampleConfig& cfg)
{
    Report rep("homogeneous twisted Poisson");
    const auto pts = detail::samples_for(H.chart, cfg);
    const Chart& chart = *H.chart;
    const auto dw = d_opt(H.omega);
    {
        ResidualAccumulator acc("1/2[L,L] = L#(dw)", chart, pts, cfg.tol, cfg.guard);
        if (H.chart->dim() >= 3) {
            MultiVector r = schouten(H.Lambda, H.Lambda) * Expr::constant(H.chart->dim(), Rational(1, 2));
            if (dw) r -= sharp(H.Lambda, *dw);
            add_components(acc, r);
        }
        rep.add(acc.result());
    }
    {
        ResidualAccumulator acc("L_Z L = -L", chart, pts, cfg.tol, cfg.guard);
        add_components(acc, lie(H.Z, H.Lambda) + H.Lambda);
        rep.add(acc.result());
    }
    {
        ResidualAccumulator acc("i(Z)dw = w", chart, pts, cfg.tol, cfg.guard);
        Form r = -H.omega;
        if (dw) r += interior(H.Z, *dw);
        add_components(acc, r);
        rep.add(acc.result());
    }
    {
        ResidualAccumulator acc("L_Z w = w", chart, pts, cfg.tol, cfg.guard);
        add_components(acc, lie(H.Z, H.omega) - H.omega);
        rep.add(acc.result());
    }
    {
        ResidualAccumulator acc("i(Z)w = 0", chart, pts, cfg.tol, cfg.guard);
        add_components(acc, interior(H.Z, H.omega));
        rep.add(acc.result());
    }
    return rep;
}

SliceMaps slice_maps(const ChartPtr& chart, const std::string& coord, const Rational& value)
{
    const int c = chart->require_index(coord);
    const int n = chart->dim();
    if (n < 2) throw std::invalid_argument("slice: chart " + chart->name() + " has no room for a quotient");
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i)
        if (i != c) names.push_back(chart->coords()[i]);
    ChartPtr slice = make_chart(chart->name() + "/" + coord, names);

    SliceMaps m;
    m.slice = slice;
    m.coord = c;
    m.projection = SmoothMap{"pi_" + coord, chart, slice, {}, {}};
    m.embedding = SmoothMap{"slice_" + coord, slice, chart, {}, {}};
    for (int i = 0, k = 0; i < n; ++i) {
        if (i == c) {
            m.embedding.components.push_back(Expr::constant(n - 1, value));
        } else {
            m.projection.components.push_back(Expr::variable(n, i));
            m.embedding.components.push_back(Expr::variable(n - 1, k++));
        }
    }
    m.projection.section = m.embedding.components;
    m.embedding.section = m.projection.components;
    return m;
}

Form descend_form(const SliceMaps& maps, const Form& omega)
{
    Form down = pullback(maps.embedding, omega);
    Form back = pullback(maps.projection, down);
    for (std::size_t s = 0; s < omega.size(); ++s)
        if (!back.comp(s).equals(omega.comp(s)))
            throw ProjectabilityFailure(form_key(omega.mask(s), *omega.chart()),
                                        omega.comp(s).to_string(*omega.chart()) + " is not a pullback from " +
                                            maps.slice->name());
    return down;
}

namespace {

void require_coordinate_field(const MultiVector& Z, int c, const char* what)
{
    MultiVector want = MultiVector::basis(Z.chart(), {c});
    if (!Z.equals(want))
        throw NonStraightenedField(std::string(what) + " is not the coordinate field d/d" + Z.chart()->coords()[c]);
}

}  // namespace

HomogeneousProjection project_homogeneous(const HomTwistedPoisson& H, const std::string& coord, const Rational& value,
                                          const Expr& a, const SampleConfig& cfg)
{
    const SliceMaps maps = slice_maps(H.chart, coord, value);
    require_coordinate_field(H.Z, maps.coord, "Z");
    if (!a.substitute(maps.projection.section).substitute(maps.embedding.section).equals(one(H.chart)) ||
        !apply(H.Z, a).equals(a))
        throw std::invalid_argument("conformal factor must equal 1 on the slice and satisfy Z(a) = a");

    HomogeneousProjection out;
    out.report = Report("homogeneous projection");
    const MultiVector lam0 = pushforward(maps.projection, H.Lambda * a);
    const MultiVector e0 = pushforward(maps.projection, sharp(H.Lambda, ext_d(H.chart, a)));
    const Form w0 = descend_form(maps, H.omega * (one(H.chart) / a));
    out.J = make_jacobi(maps.slice, lam0, e0, w0);
    Report jr = check_twisted_jacobi(out.J, cfg);
    out.J.verified = jr.passed();
    out.report.append(jr);

    // {f,g} = a ϖ*{f0,g0}0 for homogeneous f = a ϖ*f0
    const auto pts = detail::samples_for(H.chart, cfg);
    ResidualAccumulator acc("a-conformal projection", *H.chart, pts, cfg.tol, cfg.guard);
    const ChartPtr& s = maps.slice;
    std::vector<Expr> fs{one(s)};
    for (int i = 0; i < s->dim(); ++i) fs.push_back(detail::coord(s, i));
    for (std::size_t i = 0; i < fs.size(); ++i)
        for (std::size_t j = i + 1; j < fs.size(); ++j) {
            const Expr f = a * maps.projection.pull(fs[i]);
            const Expr g = a * maps.projection.pull(fs[j]);
            const Expr lhs = evaluate(H.Lambda, {ext_d(H.chart, f), ext_d(H.chart, g)});
            const Expr rhs = a * maps.projection.pull(bracket(out.J, fs[i], fs[j]));
            acc.add(lhs - rhs, "f" + std::to_string(i) + ",f" + std::to_string(j));
        }
    out.report.add(acc.result());
    return out;
}

EProjection project_along_E(const TwistedJacobi& J, const std::string& coord, const Rational& value,
                            const SampleConfig& cfg)
{
    const SliceMaps maps = slice_maps(J.chart, coord, value);
    require_coordinate_field(J.E, maps.coord, "E");
    if (MultiVector c = schouten(J.E, J.Lambda); !c.is_zero())
        throw ProjectabilityFailure("[E,L]", "L is not invariant along E: " + to_string(c));

    EProjection out;
    out.report = Report("projection along E");
    out.report.note("the display L0#(phi0(Z0,.,.)) is read with phi0 = dw0");
    const ChartPtr& s = maps.slice;
    const MultiVector lam0 = pushforward(maps.projection, J.Lambda);
    const Form w0 = descend_form(maps, J.omega);
    out.Z0 = pushforward(maps.projection, sharp(J.Lambda, ext_d(J.chart, detail::coord(J.chart, maps.coord))));
    const auto dw0 = d_opt(w0);
    out.P = TwistedPoisson{s, lam0, dw0};

    const auto pts = detail::samples_for(s, cfg);
    {
        ResidualAccumulator acc("1/2[L0,L0] = L0#(dw0)", *s, pts, cfg.tol, cfg.guard);
        if (s->dim() >= 3) {
            MultiVector r = schouten(lam0, lam0) * Expr::constant(s->dim(), Rational(1, 2));
            if (dw0) r -= sharp(lam0, *dw0);
            add_components(acc, r);
        }
        out.report.add(acc.result());
    }
    Form iz(s, 2);
    if (dw0) iz = interior(out.Z0, *dw0);
    {
        ResidualAccumulator acc("L_Z0 L0 = -L0 - L0#(dw0(Z0,.,.) - w0)", *s, pts, cfg.tol, cfg.guard);
        add_components(acc, lie(out.Z0, lam0) + lam0 + sharp(lam0, iz - w0));
        out.report.add(acc.result());
    }
    out.homogeneous = (iz - w0).is_zero();
    out.report.note(out.homogeneous ? "homogeneous: w0 = dw0(Z0,.,.)" : "not homogeneous: w0 != dw0(Z0,.,.)");
    return out;
}

// ---------------------------------------------------------------------------
// cotangent bundle

MultiVector inverse_bivector(const Form& Omega, std::vector<std::string>* assumptions)
{
    const ChartPtr& chart = Omega.chart();
    const int n = chart->dim();
    ExprMatrix A(n, std::vector<Expr>(n, Expr(n)));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (i != j) A[j][i] = Omega.at({i, j});
    ExprMatrix rhs;
    for (int k = 0; k < n; ++k) {
        std::vector<Expr> col(n, Expr(n));
        col[k] = Expr::constant(n, -1);
        rhs.push_back(std::move(col));
    }
    LinearSolution sol = solve_bareiss(A, rhs, *chart);
    if (assumptions) *assumptions = sol.assumptions;
    MultiVector Pi(chart, 2);
    for (std::size_t s = 0; s < Pi.size(); ++s) {
        auto idx = indices_of(Pi.mask(s));
        Pi.comp(s) = sol.solutions[idx[0]][idx[1]];
    }
    return Pi;
}

CotangentStructure cotangent_twisted_symplectic(const TwistedPoisson& P, const SampleConfig& cfg)
{
    const int n = P.chart->dim();
    ChartPtr chart = P.chart;
    for (int i = 0; i < n; ++i) chart = extend_chart(chart, "T*" + P.chart->name(), "p" + P.chart->coords()[i]);
    const int N = 2 * n;

    CotangentStructure out;
    out.chart = chart;
    out.report = Report("cotangent twisted symplectic");
    out.theta = Form(chart, 1);
    out.Z = MultiVector(chart, 1);
    for (int i = 0; i < n; ++i) {
        out.theta[Mask{1} << i] = Expr::variable(N, n + i);
        out.Z[Mask{1} << (n + i)] = Expr::variable(N, n + i);
    }
    // ω_{kl} = Σ p_i λ^{ij} φ_{jkl}
    out.omega = Form(chart, 2);
    if (P.phi) {
        for (int k = 0; k < n; ++k)
            for (int l = k + 1; l < n; ++l) {
                Expr c(N);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        if (i == j) continue;
                        Expr lam = P.Lambda.at({i, j});
                        Expr phi = P.phi->at({j, k, l});
                        if (lam.is_zero() || phi.is_zero()) continue;
                        c += Expr::variable(N, n + i) * widen(lam * phi, N);
                    }
                out.omega[(Mask{1} << k) | (Mask{1} << l)] = c;
            }
    }

    const Form Omega = ext_d(out.theta) + out.omega;
    const auto pts = detail::samples_for(chart, cfg);
    {
        ResidualAccumulator acc("L_Z(dtheta + w) = dtheta + w", *chart, pts, cfg.tol, cfg.guard);
        add_components(acc, lie(out.Z, Omega) - Omega);
        out.report.add(acc.result());
    }
    const auto dw = d_opt(out.omega);
    {
        ResidualAccumulator acc("i(Z)dw = w", *chart, pts, cfg.tol, cfg.guard);
        Form r = -out.omega;
        if (dw) r += interior(out.Z, *dw);
        add_components(acc, r);
        out.report.add(acc.result());
    }
    {
        CheckResult r;
        r.name = "nondegeneracy of dtheta + w";
        r.verdict = Verdict::Pass;
        for (const auto& p : pts) {
            std::vector<std::vector<double>> M(N, std::vector<double>(N, 0.0));
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j)
                    if (i != j) M[i][j] = Omega.at({i, j}).eval(p);
            if (numeric_rank(M) < N) {
                r.verdict = Verdict::Fail;
                r.witness = "degenerate at " + format_point(*chart, p);
                break;
            }
        }
        out.report.add(r);
    }
    // the inverse Poisson bivector must be homogeneous dw-twisted Poisson for Z
    std::vector<std::string> assumptions;
    const MultiVector Pi = inverse_bivector(Omega, &assumptions);
    {
        ResidualAccumulator acc("inverse: 1/2[P,P] = P#(dw)", *chart, pts, cfg.tol, cfg.guard);
        for (auto& a : assumptions) acc.assume(a);
        MultiVector r = schouten(Pi, Pi) * Expr::constant(N, Rational(1, 2));
        if (dw) r -= sharp(Pi, *dw);
        add_components(acc, r);
        out.report.add(acc.result());
    }
    {
        ResidualAccumulator acc("inverse: L_Z P = -P", *chart, pts, cfg.tol, cfg.guard);
        add_components(acc, lie(out.Z, Pi) + Pi);
        out.report.add(acc.result());
    }
    return out;
}

}  // namespace twistjac
