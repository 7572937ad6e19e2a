// acceptance: one PASS/FAIL line per criterion, tolerances and time budgets fixed below.
//
// Exit status is 0 iff every criterion passes, except those pinned in kKnownUnattainable,
// and those fail exactly the way the recorded analysis says they must.
#include "twistjac/apath.hpp"
#include "twistjac/contact.hpp"
#include "twistjac/groupoid.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace twistjac;

namespace {

// --- pinned numbers ------------------------------------------------------------

constexpr std::uint64_t kSeed = 20240611;
constexpr int kRandomInputs = 50;        // per calculus identity
constexpr int kRandomTriples = 10;
constexpr double kSampleTol = 1e-9;      // fallback zero test
constexpr double kOracleTol = 1e-10;     // float elimination vs. symbolic solution
constexpr double kVolumeFloor = 1e-6;
constexpr int kVolumeSamples = 25;
constexpr int kPathN = 64;
constexpr double kIntegralTol = 1e-8;
constexpr double kReparamTol = 1e-6;
constexpr double kSimpsonFactor = 8.0;

// criteria that cannot pass as stated; see README "Acceptance"
const std::set<int> kKnownUnattainable = {7};

// --- bookkeeping --------------------------------------------------------------

struct Outcome {
    bool ok = true;
    std::vector<std::string> failures;
    std::string detail;
    bool analysis_holds = false;   // only read for known-unattainable criteria

    void require(bool cond, const std::string& what)
    {
        if (!cond) {
            ok = false;
            failures.push_back(what);
        }
    }
};

struct Criterion {
    int id;
    std::string title;
    double budget_s;
    std::function<Outcome()> run;
};

const ChartPtr R3 = make_chart("R3", {"x", "y", "z"});

Expr var(const ChartPtr& c, int i) { return Expr::variable(c->dim(), i); }

Expr random_poly(std::mt19937_64& rng, int nvars, int terms = 3, int max_deg = 2)
{
    std::uniform_int_distribution<int> coef(-3, 3);
    std::uniform_int_distribution<int> deg(0, max_deg);
    Expr e(nvars);
    for (int t = 0; t < terms; ++t) {
        Expr m = Expr::constant(nvars, coef(rng));
        for (int v = 0; v < nvars; ++v) m *= Expr::variable(nvars, v).pow(deg(rng));
        e += m;
    }
    return e;
}

template <class T>
T random_tensor(std::mt19937_64& rng, const ChartPtr& chart, int degree)
{
    T t(chart, degree);
    for (std::size_t s = 0; s < t.size(); ++s) t.comp(s) = random_poly(rng, chart->dim());
    return t;
}

TwistedContact std_contact() { return make_contact(R3, parse_form(R3, 1, {{"dz", "1"}, {"dx", "-y"}}), Form(R3, 2)); }

TwistedContact twisted_contact()
{
    return make_contact(R3, parse_form(R3, 1, {{"dz", "1"}, {"dx", "-y"}}), parse_form(R3, 2, {{"dx^dy", "x"}}));
}

// symbolic verdicts only, or any passing verdict
void require_checks(Outcome& o, const Report& rep, const std::vector<std::string>& names, bool symbolic,
                    const std::string& where)
{
    for (const auto& n : names) {
        const CheckResult* r = rep.find(n);
        if (!r) {
            o.require(false, where + ": no check '" + n + "'");
            continue;
        }
        const bool good = symbolic ? r->verdict == Verdict::SymbolicZero : passed(r->verdict);
        o.require(good, where + ": '" + n + "' " + to_string(r->verdict) + (r->witness.empty() ? "" : " at " + r->witness));
    }
}

bool fails_with_witness(const Report& rep, const std::string& name = {})
{
    for (const auto& r : rep.checks())
        if ((name.empty() || r.name == name) && r.verdict == Verdict::Fail && !r.witness.empty()) return true;
    return false;
}

// --- 1: calculus core ---------------------------------------------------------

Outcome calculus_core()
{
    Outcome o;
    std::mt19937_64 rng(kSeed);
    int zeros = 0;
    for (int k = 0; k < kRandomInputs; ++k) {
        const Form a = random_tensor<Form>(rng, R3, k % 2);
        zeros += ext_d(ext_d(a)).is_zero();

        const MultiVector X = random_tensor<MultiVector>(rng, R3, 1);
        const Form b = random_tensor<Form>(rng, R3, 1 + k % 2);
        zeros += (lie(X, b) - interior(X, ext_d(b)) - ext_d(interior(X, b))).is_zero();

        const MultiVector Y = random_tensor<MultiVector>(rng, R3, 1);
        const MultiVector P = random_tensor<MultiVector>(rng, R3, 2);
        const MultiVector jac = schouten(X, schouten(Y, P)) + schouten(Y, schouten(P, X)) + schouten(P, schouten(X, Y));
        zeros += jac.is_zero();
    }
    o.require(zeros == 3 * kRandomInputs, std::to_string(3 * kRandomInputs - zeros) + " identities not symbolically zero");
    o.detail = std::to_string(zeros) + "/" + std::to_string(3 * kRandomInputs) + " symbolic zeros (dd, Cartan, Schouten-Jacobi)";
    return o;
}

// --- 2: Reeb field and contact bivector ----------------------------------------

// Gaussian elimination with partial pivoting on doubles
std::vector<double> solve_dense(std::vector<std::vector<double>> A, std::vector<double> b)
{
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(A[i][k]) > std::abs(A[p][k])) p = i;
        std::swap(A[k], A[p]);
        std::swap(b[k], b[p]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = A[i][k] / A[k][k];
            for (std::size_t j = k; j < n; ++j) A[i][j] -= m * A[k][j];
            b[i] -= m * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= A[k][j] * x[j];
        x[k] = s / A[k][k];
    }
    return x;
}

// E: θ(E) = 1, i(E)Ω = 0. Λ^#ζ: θ(Λ^#ζ) = 0, i(Λ^#ζ)Ω = −ζ + ⟨ζ,E⟩θ. Solved per point as bordered systems.
double elimination_gap(const TwistedContact& C, const MultiVector& E, const MultiVector& L)
{
    const Form Om = ext_d(C.theta) + C.omega;
    SampleConfig cfg;
    cfg.samples = 8;
    cfg.box = 0.5;
    double worst = 0.0;
    for (const Point& p : sample_points(3, cfg)) {
        std::vector<std::vector<double>> A(4, std::vector<double>(4, 0.0));
        for (int j = 0; j < 3; ++j) {
            for (int i = 0; i < 3; ++i) A[j][i] = i == j ? 0.0 : Om.at({i, j}).eval(p);
            A[j][3] = C.theta.at({j}).eval(p);
            A[3][j] = A[j][3];
        }
        const auto e = solve_dense(A, {0, 0, 0, 1});
        for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(e[i] - E.at({i}).eval(p)));
        for (int k = 0; k < 3; ++k) {
            std::vector<double> rhs(4, 0.0);
            rhs[k] = -1.0;
            const auto x = solve_dense(A, rhs);
            const MultiVector s = sharp(L, Form::basis(R3, {k}));
            for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(x[i] - s.at({i}).eval(p)));
        }
    }
    return worst;
}

Outcome reeb_and_bivector()
{
    Outcome o;
    const MultiVector dz = parse_multivector(R3, 1, {{"d/dz", "1"}});
    struct Case {
        const char* name;
        TwistedContact C;
        MultiVector L;
    };
    const Case cases[] = {
        {"std", std_contact(), parse_multivector(R3, 2, {{"d/dx^d/dy", "1"}, {"d/dz^d/dy", "y"}})},
        {"twisted", twisted_contact(), parse_multivector(R3, 2, {{"d/dx^d/dy", "1/(1+x)"}, {"d/dz^d/dy", "y/(1+x)"}})},
    };
    double gap = 0.0;
    for (const auto& c : cases) {
        const MultiVector E = reeb(c.C);
        const MultiVector L = contact_bivector(c.C);
        o.require(E.equals(dz), std::string(c.name) + ": Reeb field " + to_string(E));
        o.require(L.equals(c.L), std::string(c.name) + ": bivector " + to_string(L));
        const Report rep = check_twisted_jacobi(make_jacobi(R3, L, E, c.C.omega));
        o.require(rep.overall() == Verdict::SymbolicZero, std::string(c.name) + ": twisted Jacobi " + to_string(rep.overall()));
        gap = std::max(gap, elimination_gap(c.C, E, L));
    }
    o.require(gap < kOracleTol, "float elimination disagrees by " + std::to_string(gap));
    std::ostringstream d;
    d << "E = d/dz, L = (d/dx + y d/dz)^d/dy (/(1+x) twisted), Jacobi symbolic, elimination gap " << gap;
    o.detail = d.str();
    return o;
}

// --- 3: Jacobi anomaly -----------------------------------------------------------

Outcome anomaly()
{
    Outcome o;
    const TwistedJacobi J = jacobi_from_contact(twisted_contact()).J;
    std::mt19937_64 rng(kSeed + 3);
    std::vector<std::array<Expr, 3>> triples = {{var(R3, 0), var(R3, 1), var(R3, 2)}};
    for (int k = 0; k < kRandomTriples; ++k)
        triples.push_back({random_poly(rng, 3), random_poly(rng, 3), random_poly(rng, 3)});
    const auto pts = sample_points(3, SampleConfig{});
    int symbolic = 0, sampled = 0;
    for (const auto& t : triples) {
        const Expr res = jacobi_anomaly(J, t[0], t[1], t[2]).residual();
        if (res.is_zero()) {
            ++symbolic;
            continue;
        }
        const ZeroTest z = zero_test(res, pts, kSampleTol);
        sampled += passed(z.verdict);
        o.require(passed(z.verdict), "triple residual " + std::to_string(z.max_residual));
    }
    o.detail = std::to_string(symbolic) + " symbolic + " + std::to_string(sampled) + " sampled zeros of " +
               std::to_string(triples.size()) + " triples";
    return o;
}

// --- 4: algebroid --------------------------------------------------------------

Outcome algebroid()
{
    Outcome o;
    const Expr zero(3), one = Expr::constant(3, 1);
    const std::vector<PairSection> sections = {
        {Form::basis(R3, {0}), zero}, {Form::basis(R3, {1}), zero}, {Form::basis(R3, {2}), zero},
        {Form(R3, 1), one},           {Form::basis(R3, {1}) * var(R3, 0), zero},
    };
    const std::vector<std::string> names = {"antisymmetry",  "Jacobi identity",  "anchor homomorphism",
                                            "Leibniz rule",  "(-E,0) cocycle",   "exact-pair relation"};
    for (const auto& [name, C] : {std::pair{"std", std_contact()}, std::pair{"twisted", twisted_contact()}}) {
        const Report rep = check_algebroid(jacobi_from_contact(C).J, sections);
        require_checks(o, rep, names, true, name);
    }
    o.detail = "6 axioms symbolic on 5 sections, both structures";
    return o;
}

// --- 5: Poissonization round trip ------------------------------------------------

Outcome poissonization()
{
    Outcome o;
    for (const auto& [name, C] : {std::pair{"std", std_contact()}, std::pair{"twisted", twisted_contact()}}) {
        const TwistedJacobi J = jacobi_from_contact(C).J;
        const HomTwistedPoisson H = poissonize(J);
        const Report rep = check_homogeneous(H);
        o.require(rep.overall() == Verdict::SymbolicZero, std::string(name) + ": homogeneous " + to_string(rep.overall()));
        const HomogeneousProjection p = project_homogeneous(H, "s", 0, Expr::exp(var(H.chart, 3)));
        const bool same = p.J.Lambda.equals(widen(J.Lambda, p.J.chart)) && p.J.E.equals(widen(J.E, p.J.chart)) &&
                          p.J.omega.equals(widen(J.omega, p.J.chart));
        o.require(same, std::string(name) + ": projection does not return (L, E, w)");
    }
    o.detail = "homogeneous symbolically; e^s-projection at s = 0 returns J exactly";
    return o;
}

// --- 6: projection along E ---------------------------------------------------------

Outcome along_E()
{
    Outcome o;
    const EProjection p = project_along_E(jacobi_from_contact(twisted_contact()).J, "z", 0);
    require_checks(o, p.report, {"1/2[L0,L0] = L0#(dw0)", "L_Z0 L0 = -L0 - L0#(dw0(Z0,.,.) - w0)"}, true, "twisted");
    o.detail = "L0 = " + to_string(p.P.Lambda) + ", Z0 = " + to_string(p.Z0);
    return o;
}

// --- 7: pair groupoid ----------------------------------------------------------------

const std::string kLiteralBlock = "L_G = -e^r L0 + L0 + 0";
const std::string kCompletedBlock = "L_G = -e^r L0 + L0 + dr^(e^r E0 + E0)";

Outcome pair_groupoid()
{
    Outcome o;
    SampleConfig vol_cfg;
    vol_cfg.samples = kVolumeSamples;
    bool only_literal = true, gap_exact = true, completed_ok = true;
    for (const auto& [name, C] : {std::pair{"std", std_contact()}, std::pair{"twisted", twisted_contact()}}) {
        const std::string where = std::string(name) + " base";
        const GroupoidModel G = build_pair_groupoid(C);
        const GroupoidJacobi GJ = groupoid_jacobi(G);
        Outcome part;
        require_checks(part, check_multiplicativity(G), {"m*theta = e^{-r2} theta1 + theta2", "r(gh) = r(g) + r(h)"},
                       false, where);
        require_checks(part, check_properties(G, GJ),
                       {"iii: eps*theta = 0", "ii: iota*theta = -e^r theta", "v: L#(dr) = E^l - e^r E^r",
                        "viii: {a*f0, e^{-r} b*g0} = 0"},
                       false, where);
        const Report vol = check_volume(G, vol_cfg, kVolumeFloor);
        require_checks(part, vol, {"twisted contact/theta^(dtheta+w)^n != 0"}, false, where);
        require_checks(part, vol, {"volume = c e^{-(n+1)r} a*(vol0) b*(vol0)"}, true, where);
        const Report blocks = check_block_formulas(G, GJ);
        require_checks(part, blocks, {"E_G = 0 + E0 + 0"}, false, where);

        Outcome literal;
        require_checks(literal, blocks, {kLiteralBlock}, false, where);
        Outcome completed;
        require_checks(completed, blocks, {kCompletedBlock}, true, where);
        completed_ok = completed_ok && completed.ok;
        only_literal = only_literal && part.ok;
        for (auto& f : part.failures) o.require(false, f);
        for (auto& f : literal.failures) o.require(false, f);

        // the literal block misses exactly ∂r∧(e^r E0 + E0)
        const MultiVector E0 = reeb(C);
        const MultiVector dr = MultiVector::basis(G.total, {G.blocks->r_coord});
        const MultiVector lifted = lift_block(E0, G.beta, G.blocks->beta_offset) * Expr::exp(G.r) +
                                   lift_block(E0, G.alpha, G.blocks->alpha_offset);
        const MultiVector L0 = contact_bivector(C);
        const MultiVector literal_L = lift_block(L0, G.beta, G.blocks->beta_offset) * (-Expr::exp(G.r)) +
                                      lift_block(L0, G.alpha, G.blocks->alpha_offset);
        const MultiVector gap = GJ.J.Lambda - literal_L;
        const MultiVector pinned = parse_multivector(G.total, 2, {{"d/dz1^d/dt", "-exp(t)"}, {"d/dz2^d/dt", "-1"}});
        gap_exact = gap_exact && !gap.is_zero() && gap.equals(wedge(dr, lifted)) && gap.equals(pinned);
    }
    o.analysis_holds = only_literal && completed_ok && gap_exact;
    o.detail = std::string("literal L block gap = dr^(e^r E0 + E0) = d/dz1^d/dt: -exp(t), d/dz2^d/dt: -1: ") +
               (gap_exact ? "confirmed" : "NOT confirmed") + "; completed block " + (completed_ok ? "symbolic" : "FAILS") +
               "; other items " + (only_literal ? "pass" : "FAIL");
    return o;
}

// --- 8: suspension -------------------------------------------------------------------

Outcome suspension()
{
    Outcome o;
    SampleConfig cfg;
    cfg.samples = kVolumeSamples;
    for (const auto& [name, C] : {std::pair{"std", std_contact()}, std::pair{"twisted", twisted_contact()}}) {
        const GroupoidModel G = build_pair_groupoid(C);
        const Report rep = suspend(G, cfg).report;
        require_checks(o, rep, {"W~ nondegenerate at samples"}, false, name);
        require_checks(o, rep, {"dW~ = a~*(dw~0) - b~*(dw~0)", "m~*W~ = pr1~*W~ + pr2~*W~", "L_ds W~ = W~"}, true, name);
        const Report base = base_coincidence_check(G, cfg);
        o.require(base.passed(), std::string(name) + ": base coincidence " + to_string(base.overall()));
    }
    o.detail = "nondegenerate at 25 samples, dW~ / multiplicativity / L_ds symbolic, base coincides";
    return o;
}

// --- 9: A-path integrals ---------------------------------------------------------------

Outcome apaths()
{
    Outcome o;
    const TwistedJacobi J = make_jacobi(R3, MultiVector(R3, 2), parse_multivector(R3, 1, {{"d/dz", "1"}}), Form(R3, 2));
    const ChartPtr T = make_chart("time", {"t"});
    auto path = [&](const std::string& z, const std::string& zeta, const std::string& f, int N) {
        return sample_path(J, parse_path(J, {"0", "0", z}, {{"dz", zeta}}, f), N);
    };
    std::ostringstream d;
    d.precision(3);

    const APath c1 = path("t", "1", "1", kPathN);
    const double i1 = cocycle_integral(c1);
    const double i2 = cocycle_integral(path("t", "t", "1", kPathN));
    o.require(std::abs(i1 + 1.0) < kIntegralTol, "int c1 = " + std::to_string(i1));
    o.require(std::abs(i2 + 0.5) < kIntegralTol, "int c2 = " + std::to_string(i2));

    const APath a = path("t/2", "1", "1/2", kPathN);
    const APath b = path("1/2+t/2", "1", "1/2", kPathN);
    const double iab = cocycle_integral(concatenate(a, b));
    o.require(std::abs(iab + 2.0) < kIntegralTol, "int c1.c0 = " + std::to_string(iab));

    const double itau = cocycle_integral(reparameterize(c1, parse_expr("3*t^2-2*t^3", *T)));
    o.require(std::abs(itau + 1.0) < kReparamTol, "int c^tau = " + std::to_string(itau));

    const double exact = -(std::exp(1.0) - 1.0);
    double prev = 0.0, worst = 1e300;
    for (int N : {8, 16, 32, 64}) {
        const double err = std::abs(cocycle_integral(path("t/2", "exp(t)", "0", N)) - exact);
        if (N > 8) worst = std::min(worst, prev / err);
        prev = err;
    }
    o.require(worst >= kSimpsonFactor, "Simpson error ratio " + std::to_string(worst));
    d << "-1, -1/2, -2 (concatenated), " << itau << " (tau = 3t^2-2t^3); min Simpson ratio " << worst;
    o.detail = d.str();
    return o;
}

// --- 10: negative controls --------------------------------------------------------------

Outcome negative_controls()
{
    Outcome o;
    const TwistedContact flat = make_contact(R3, parse_form(R3, 1, {{"dz", "1"}}), Form(R3, 2));
    o.require(fails_with_witness(check_contact(flat)), "theta = dz not rejected with a witness");

    const GroupoidModel G = build_pair_groupoid(twisted_contact());
    const GroupoidModel Q = with_r(G, parse_expr("t^2", *G.total));
    o.require(fails_with_witness(check_multiplicativity(Q), "r(gh) = r(g) + r(h)"), "r = t^2 not rejected with a witness");

    const ChartPtr C4 = make_chart("R3xR", {"x", "y", "z", "s"});
    const HomTwistedPoisson H{C4, MultiVector(C4, 2), parse_form(C4, 2, {{"ds^dx", "1"}}),
                              parse_multivector(C4, 1, {{"d/ds", "1"}})};
    o.require(fails_with_witness(check_homogeneous(H)), "w = ds^dx, Z = d/ds not rejected with a witness");
    o.detail = "all three rejected with witnesses";
    return o;
}

}  // namespace

int main()
{
    const std::vector<Criterion> criteria = {
        {1, "exterior calculus and Schouten identities", 30, calculus_core},
        {2, "Reeb field and contact bivector", 10, reeb_and_bivector},
        {3, "Jacobi anomaly of the twisted structure", 60, anomaly},
        {4, "Lie algebroid axioms", 60, algebroid},
        {5, "Poissonization and homogeneous projection", 60, poissonization},
        {6, "projection along E", 60, along_E},
        {7, "pair groupoid: multiplicativity, properties, volume, blocks", 120, pair_groupoid},
        {8, "suspension and base coincidence", 60, suspension},
        {9, "A-path cocycle integrals", 60, apaths},
        {10, "negative controls", 60, negative_controls},
    };

    bool ok = true;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.require(secs < c.budget_s, "over time budget");

        char timing[64];
        std::snprintf(timing, sizeof timing, "[%.2f s < %.0f s]", secs, c.budget_s);
        std::cout << "AC" << c.id << (c.id < 10 ? "  " : " ") << (out.ok ? "PASS" : "FAIL") << "  " << c.title
                  << "  " << timing << "\n      " << out.detail << "\n";
        for (const auto& f : out.failures) std::cout << "      - " << f << "\n";

        if (kKnownUnattainable.count(c.id)) {
            const bool as_recorded = !out.ok && out.analysis_holds;
            std::cout << "      known unattainable: " << (as_recorded ? "fails exactly as recorded" : "DOES NOT match the record")
                      << "\n";
            ok = ok && as_recorded;
        } else {
            ok = ok && out.ok;
        }
    }
    std::cout << (ok ? "acceptance: all criteria pass or fail as recorded\n" : "acceptance: FAILED\n");
    return ok ? 0 : 1;
}
