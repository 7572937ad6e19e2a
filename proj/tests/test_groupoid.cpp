#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"
#include "twistjac/groupoid.hpp"

#include <string>

using namespace twistjac;

namespace {

const ChartPtr R3 = make_chart("R3", {"x", "y", "z"});

TwistedContact base(bool twisted)
{
    const Form th = parse_form(R3, 1, {{"dz", "1"}, {"dx", "-y"}});
    return make_contact(R3, th, twisted ? parse_form(R3, 2, {{"dx^dy", "x"}}) : Form(R3, 2));
}

bool ok(const Report& r, std::string_view name)
{
    const CheckResult* c = r.find(name);
    return c && passed(c->verdict);
}

bool symbolic(const Report& r)
{
    for (const auto& c : r.checks())
        if (c.verdict != Verdict::SymbolicZero && c.verdict != Verdict::Pass) return false;
    return r.passed();
}

std::vector<PairSection> sections()
{
    return {{parse_form(R3, 1, {{"dx", "1"}}), Expr(3)},
            {parse_form(R3, 1, {{"dy", "1"}}), Expr(3)},
            {parse_form(R3, 1, {{"dz", "1"}}), Expr(3)},
            {Form(R3, 1), Expr::constant(3, 1)},
            {parse_form(R3, 1, {{"dy", "x"}}), Expr(3)}};
}

}  // namespace

TEST_CASE("pair groupoid structure maps and forms")
{
    for (bool tw : {false, true}) {
        const GroupoidModel G = build_pair_groupoid(base(tw));
        CAPTURE(tw);
        REQUIRE(G.total->dim() == 2 * G.base->dim() + 1);
        CHECK(symbolic(check_groupoid_axioms(G)));

        const Report m = check_multiplicativity(G);
        INFO(m.summary());
        CHECK(symbolic(m));

        // θ by hand: α*θ₀ − e^{−t}β*θ₀ in coordinates (x1,y1,z1,x2,y2,z2,t)
        const Form want = parse_form(G.total, 1, {{"dz2", "1"}, {"dx2", "-y2"}, {"dz1", "-exp(-t)"}, {"dx1", "y1*exp(-t)"}});
        CHECK(G.theta.equals(want));
        CHECK(pullback(G.eps, G.theta).is_zero());
        const SmoothMap ii = compose(G.iota, G.iota);
        for (int k = 0; k < G.total->dim(); ++k) CHECK(ii.components[k].equals(Expr::variable(G.total->dim(), k)));
        CHECK(G.r.equals(parse_expr("t", *G.total)));
    }
}

TEST_CASE("volume of the pair groupoid")
{
    for (bool tw : {false, true}) {
        const GroupoidModel G = build_pair_groupoid(base(tw));
        const Report v = check_volume(G);
        INFO(v.summary());
        CHECK(v.passed());

        // oracle: top coefficient computed straight from the forms
        const Form W = ext_d(G.theta) + G.omega;
        Form top = G.theta;
        for (int k = 0; k < 3; ++k) top = wedge(top, W);
        const std::string want = tw ? "-6*exp(-2*t)*(1+x1)*(1+x2)" : "-6*exp(-2*t)";
        CHECK(top.comp(0).equals(parse_expr(want, *G.total)));
    }
}

TEST_CASE("Jacobi structure of the pair groupoid")
{
    for (bool tw : {false, true}) {
        CAPTURE(tw);
        const GroupoidModel G = build_pair_groupoid(base(tw));
        const GroupoidJacobi GJ = groupoid_jacobi(G);
        INFO(GJ.report.summary());
        CHECK(GJ.J.verified);
        REQUIRE(GJ.E_left);
        CHECK(GJ.J.E.equals(*GJ.E_left));

        const Report b = check_block_formulas(G, GJ);
        INFO(b.summary());
        CHECK(ok(b, "E_G = 0 + E0 + 0"));
        CHECK(ok(b, "L_G = -e^r L0 + L0 + dr^(e^r E0 + E0)"));
        // the block without the ∂r terms misses exactly dt∧(e^t E0(x) + E0(y))
        const CheckResult* lit = b.find("L_G = -e^r L0 + L0 + 0");
        REQUIRE(lit);
        CHECK(lit->verdict == Verdict::Fail);
        CHECK_FALSE(lit->witness.empty());
        const MultiVector gap = parse_multivector(G.total, 2, {{"d/dz1^d/dt", "-exp(t)"}, {"d/dz2^d/dt", "-1"}});
        const MultiVector literal = lift_block(contact_bivector(base(tw)), G.beta, 0) * (-Expr::exp(G.r)) +
                                    lift_block(contact_bivector(base(tw)), G.alpha, 3);
        CHECK((GJ.J.Lambda - literal).equals(gap));

        const Report p = check_properties(G, GJ);
        INFO(p.summary());
        CHECK(p.passed());
        for (const char* name : {"i: r o iota = -r", "ii: iota*theta = -e^r theta", "iii: eps*theta = 0",
                                 "iv: E_G = E^l", "v: L#(dr) = E^l - e^r E^r", "vi: iota_*X_{-e^{-r}} = E",
                                 "viii: {a*f0, e^{-r} b*g0} = 0"})
            CHECK_MESSAGE(ok(p, name), name);
    }
}

TEST_CASE("induced base structure and algebroid isomorphism")
{
    for (bool tw : {false, true}) {
        CAPTURE(tw);
        const GroupoidModel G = build_pair_groupoid(base(tw));
        const GroupoidJacobi GJ = groupoid_jacobi(G);
        const InducedBase IB = induced_base_structure(G, GJ);
        INFO(IB.report.summary());
        CHECK(IB.report.passed());
        const ContactJacobi direct = jacobi_from_contact(base(tw));
        CHECK(IB.J.Lambda.equals(direct.J.Lambda));
        CHECK(IB.J.E.equals(direct.J.E));
        CHECK(IB.J.omega.equals(direct.J.omega));

        const Report iso = check_algebroid_isomorphism(G, GJ, IB.J, sections());
        INFO(iso.summary());
        CHECK(iso.passed());
    }
}

TEST_CASE("suspension and its inverse")
{
    for (bool tw : {false, true}) {
        CAPTURE(tw);
        const GroupoidModel G = build_pair_groupoid(base(tw));
        const Suspension S = suspend(G);
        INFO(S.report.summary());
        CHECK(S.report.passed());

        const GroupoidModel H = strip(S.S, G);
        CHECK(H.theta.equals(G.theta));
        CHECK(H.omega.equals(G.omega));
        CHECK(H.r.equals(G.r));
        CHECK(H.omega0.equals(G.omega0));
        CHECK(check_multiplicativity(H).passed());

        const Report c = base_coincidence_check(G);
        INFO(c.summary());
        CHECK(c.passed());
    }
}

TEST_CASE("a non-additive r breaks multiplicativity")
{
    const GroupoidModel P = build_pair_groupoid(base(true));
    const GroupoidModel G = with_r(P, parse_expr("t^2", *P.total));
    const Report m = check_multiplicativity(G);
    CHECK_FALSE(m.passed());
    for (const char* name : {"m*theta = e^{-r2} theta1 + theta2", "r(gh) = r(g) + r(h)", "m*w = e^{-r2} w1 + w2"}) {
        const CheckResult* c = m.find(name);
        REQUIRE(c);
        CHECK(c->verdict == Verdict::Fail);
        CHECK_FALSE(c->witness.empty());
    }
}

TEST_CASE("non-contact base is rejected")
{
    const TwistedContact flat{R3, parse_form(R3, 1, {{"dz", "1"}}), Form(R3, 2)};
    CHECK_THROWS_AS((void)build_pair_groupoid(flat), NotContact);
}
