#include "twistjac/contact.hpp"

#include "detail.hpp"
#include "twistjac/linsolve.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace twistjac {

using detail::add_components;

TwistedContact make_contact(const ChartPtr& chart, Form theta, Form omega)
{
    if (chart->dim() % 2 == 0)
        throw NotContact("contact structures need an odd-dimensional chart; " + chart->name() + " has dimension " +
                         std::to_string(chart->dim()));
    if (theta.degree() != 1 || omega.degree() != 2) throw NotContact("expected a 1-form theta and a 2-form omega");
    if (!(*theta.chart() == *chart) || !(*omega.chart() == *chart))
        throw NotContact("theta and omega must live on " + chart->name());
    return TwistedContact{chart, std::move(theta), std::move(omega)};
}

Expr contact_volume(const TwistedContact& C)
{
    const Form Omega = ext_d(C.theta) + C.omega;
    Form top = C.theta;
    for (int k = 0; k < C.chart->dim() / 2; ++k) top = wedge(top, Omega);
    return top.comp(0);
}

namespace {

std::string shape_note(const Expr& vol, const Chart& chart)
{
    const ExpPoly& num = vol.numerator();
    if (num.is_unit()) return "volume " + vol.to_string(chart) + " is an exponential times a constant: never zero";
    const Poly& arg = num.trailing().first.arg;
    for (const auto& [key, c] : num.terms())
        if (!(key.arg == arg)) return {};
    if (arg.is_zero()) return {};
    return "volume factors as exp(...) times a polynomial; only the polynomial can vanish";
}

}  // namespace

Report check_contact(const TwistedContact& C, const SampleConfig& cfg, double threshold)
{
    Report rep("twisted contact");
    if (C.chart->dim() % 2 == 0) {
        rep.add(CheckResult{"odd dimension", Verdict::Error, 0.0, {}, "", "even-dimensional chart"});
        return rep;
    }
    const Expr vol = contact_volume(C);
    CheckResult r;
    r.name = "theta^(dtheta+w)^n != 0";
    if (vol.is_zero()) {
        r.verdict = Verdict::Fail;
        r.witness = "theta^(dtheta+w)^n vanishes identically";
        rep.add(r);
        return rep;
    }
    if (!vol.numerator().is_unit()) r.assumptions.push_back(vol.to_string(*C.chart) + " != 0");
    for (auto& a : denominator_assumptions(vol, *C.chart)) r.assumptions.push_back(std::move(a));
    if (auto note = shape_note(vol, *C.chart); !note.empty()) rep.note(note);

    double lo = std::numeric_limits<double>::infinity();
    int skipped = 0;
    r.verdict = Verdict::Pass;
    for (const auto& p : sample_points(C.chart->dim(), cfg)) {
        auto v = vol.try_eval(p);
        if (!v) {
            ++skipped;
            continue;
        }
        if (std::abs(*v) < lo) lo = std::abs(*v);
        if (std::abs(*v) <= threshold && r.verdict != Verdict::Fail) {
            r.verdict = Verdict::Fail;
            std::ostringstream os;
            os << vol.to_string(*C.chart) << " = " << *v << " at " << format_point(*C.chart, p);
            r.witness = os.str();
        }
    }
    std::ostringstream os;
    os << "coefficient " << vol.to_string(*C.chart) << "; min |value| = " << lo;
    if (skipped) os << "; " << skipped << " sample(s) skipped";
    r.detail = os.str();
    r.max_residual = lo;
    rep.add(r);
    return rep;
}

ContactSolution solve_contact(const TwistedContact& C)
{
    const int n = C.chart->dim();
    if (n % 2 == 0) throw NotContact("even-dimensional chart " + C.chart->name());
    const Form Omega = ext_d(C.theta) + C.omega;
    // unknowns (X^0..X^{n-1}, μ); rows: Σ_i Ω_ij X^i + μ θ_j, then θ(X)
    ExprMatrix A(n + 1, std::vector<Expr>(n + 1, Expr(n)));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i)
            if (i != j) A[j][i] = Omega.at({i, j});
        A[j][n] = C.theta.at({j});
        A[n][j] = C.theta.at({j});
    }
    // Reeb column (0,…,0,1); for dx^k the column −δ_k: the ⟨ζ,E⟩θ part only shifts μ.
    ExprMatrix rhs;
    std::vector<Expr> reeb_col(n + 1, Expr(n));
    reeb_col[n] = Expr::constant(n, 1);
    rhs.push_back(std::move(reeb_col));
    for (int k = 0; k < n; ++k) {
        std::vector<Expr> col(n + 1, Expr(n));
        col[k] = Expr::constant(n, -1);
        rhs.push_back(std::move(col));
    }
    LinearSolution sol;
    try {
        sol = solve_bareiss(A, rhs, *C.chart);
    } catch (const SingularSystem& e) {
        throw NotContact(std::string("singular Reeb system: ") + e.what());
    }

    ContactSolution out;
    out.assumptions = sol.assumptions;
    out.E = MultiVector(C.chart, 1);
    for (int i = 0; i < n; ++i) out.E[Mask{1} << i] = sol.solutions[0][i];
    out.Lambda = MultiVector(C.chart, 2);
    for (std::size_t s = 0; s < out.Lambda.size(); ++s) {
        auto idx = indices_of(out.Lambda.mask(s));
        out.Lambda.comp(s) = sol.solutions[1 + idx[0]][idx[1]];
    }
    return out;
}

MultiVector reeb(const TwistedContact& C)
{
    return solve_contact(C).E;
}

MultiVector contact_bivector(const TwistedContact& C)
{
    return solve_contact(C).Lambda;
}

Report check_contact_identities(const TwistedContact& C, const MultiVector& E, const MultiVector& Lambda,
                                const SampleConfig& cfg)
{
    Report rep("contact identities");
    const ChartPtr& chart = C.chart;
    const int n = chart->dim();
    const Form Omega = ext_d(C.theta) + C.omega;
    const auto pts = sample_points(n, cfg);
    {
        ResidualAccumulator acc("i(E)theta = 1", *chart, pts, cfg.tol, cfg.guard);
        acc.add(pairing(E, C.theta) - detail::one(chart), "1");
        detail::assume_denominators(acc, E);
        rep.add(acc.result());
    }
    {
        ResidualAccumulator acc("i(E)(dtheta+w) = 0", *chart, pts, cfg.tol, cfg.guard);
        add_components(acc, interior(E, Omega));
        rep.add(acc.result());
    }
    {
        ResidualAccumulator acc("L#(theta) = 0", *chart, pts, cfg.tol, cfg.guard);
        add_components(acc, sharp(Lambda, C.theta));
        detail::assume_denominators(acc, Lambda);
        rep.add(acc.result());
    }
    {
        ResidualAccumulator acc("i(L#z)(dtheta+w) = -(z - <z,E>theta)", *chart, pts, cfg.tol, cfg.guard);
        for (int k = 0; k < n; ++k) {
            const Form z = Form::basis(chart, {k});
            Form r = interior(sharp(Lambda, z), Omega) + z - C.theta * pairing(E, z);
            add_components(acc, r, "d" + chart->coords()[k] + ":");
        }
        rep.add(acc.result());
    }
    {
        CheckResult r;
        r.name = "rank(dtheta+w) = 2n, theta(E) = 1 at samples";
        r.verdict = Verdict::Pass;
        for (const auto& p : pts) {
            auto th = pairing(E, C.theta).try_eval(p);
            if (!th) continue;
            const int rank = numeric_rank(detail::numeric_matrix(Omega, p), 1e-8);
            if (rank != n - 1 || std::abs(*th - 1.0) > 1e-8) {
                r.verdict = Verdict::Fail;
                r.witness = "rank " + std::to_string(rank) + " at " + format_point(*chart, p);
                break;
            }
        }
        rep.add(r);
    }
    return rep;
}

ContactJacobi jacobi_from_contact(const TwistedContact& C, const SampleConfig& cfg)
{
    ContactSolution sol = solve_contact(C);
    ContactJacobi out;
    out.J = make_jacobi(C.chart, sol.Lambda, sol.E, C.omega);
    out.report = Report("jacobi from contact");
    for (const auto& a : sol.assumptions) out.report.note("pivot assumption: " + a);
    out.report.append(check_contact_identities(C, sol.E, sol.Lambda, cfg));
    out.report.append(check_twisted_jacobi(out.J, cfg));
    out.J.verified = out.report.passed();
    return out;
}

Form poissonized_form(const TwistedContact& C, const ChartPtr& big)
{
    const int n = C.chart->dim();
    const Expr es = Expr::exp(Expr::variable(big->dim(), n));
    return ext_d(widen(C.theta, big) * es) + widen(C.omega, big) * es;
}

int detect_inverse_convention()
{
    // The 1-dimensional contact line θ = dz poissonizes to Ω̃ = e^s ds∧dz, the canonical dp∧dx with p = e^s.
    const ChartPtr line = make_chart("line", {"z"});
    const TwistedContact C{line, Form::basis(line, {0}), Form(line, 2)};
    const ContactSolution sol = solve_contact(C);
    const HomTwistedPoisson H = poissonize(make_jacobi(line, sol.Lambda, sol.E, C.omega));
    const Form Omega = poissonized_form(C, H.chart);
    const Form ds = Form::basis(H.chart, {1});
    const Form image = interior(sharp(H.Lambda, ds), Omega);
    if (image.equals(-ds)) return -1;
    if (image.equals(ds)) return 1;
    throw std::logic_error("inverse convention: Poissonized line is not inverse to its symplectic form");
}

Report contact_poissonization_check(const TwistedContact& C, const SampleConfig& cfg)
{
    Report rep("contact Poissonization");
    const ContactSolution sol = solve_contact(C);
    const TwistedJacobi J = make_jacobi(C.chart, sol.Lambda, sol.E, C.omega);
    const HomTwistedPoisson H = poissonize(J);
    const ChartPtr& big = H.chart;
    const Form Omega = poissonized_form(C, big);
    const int sigma = detect_inverse_convention();
    rep.note(std::string("inverse convention i(P#z)W = ") + (sigma < 0 ? "-z" : "+z") +
             ", detected on e^s ds^dz (dp^dx)");
    const auto pts = sample_points(big->dim(), cfg);
    {
        ResidualAccumulator acc("i(L~#z)W~ = sigma z", *big, pts, cfg.tol, cfg.guard);
        for (const auto& a : sol.assumptions) acc.assume(a);
        for (int k = 0; k < big->dim(); ++k) {
            const Form z = Form::basis(big, {k});
            Form r = interior(sharp(H.Lambda, z), Omega) - z * Expr::constant(big->dim(), sigma);
            add_components(acc, r, "d" + big->coords()[k] + ":");
        }
        rep.add(acc.result());
    }
    {
        CheckResult r;
        r.name = "W~ nondegenerate at samples";
        r.verdict = Verdict::Pass;
        for (const auto& p : pts) {
            if (numeric_rank(detail::numeric_matrix(Omega, p), 1e-8) < big->dim()) {
                r.verdict = Verdict::Fail;
                r.witness = "degenerate at " + format_point(*big, p);
                break;
            }
        }
        rep.add(r);
    }
    {
        ResidualAccumulator acc("L_ds L~ = -L~", *big, pts, cfg.tol, cfg.guard);
        add_components(acc, lie(H.Z, H.Lambda) + H.Lambda);
        rep.add(acc.result());
    }
    return rep;
}

}  // namespace twistjac
