#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"
#include "twistjac/contact.hpp"

using namespace twistjac;
using namespace testsupport;

namespace {

const ChartPtr R3 = make_chart("R3", {"x", "y", "z"});

MultiVector V(const ChartPtr& c, int k, const KeyedComponents& kc) { return parse_multivector(c, k, kc); }
Form F(const ChartPtr& c, int k, const KeyedComponents& kc) { return parse_form(c, k, kc); }

TwistedContact std_contact()
{
    return make_contact(R3, F(R3, 1, {{"dz", "1"}, {"dx", "-y"}}), Form(R3, 2));
}

TwistedContact twisted_contact()
{
    return make_contact(R3, F(R3, 1, {{"dz", "1"}, {"dx", "-y"}}), F(R3, 2, {{"dx^dy", "x"}}));
}

bool all_symbolic(const Report& r)
{
    for (const auto& c : r.checks())
        if (c.verdict != Verdict::SymbolicZero && c.verdict != Verdict::Pass) return false;
    return r.passed();
}

// θ = dz − Σ y_i dx_i on R^{2n+1}, coordinates (x1..xn, y1..yn, z).
TwistedContact darboux(int n)
{
    std::vector<std::string> names;
    for (int i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
    for (int i = 1; i <= n; ++i) names.push_back("y" + std::to_string(i));
    names.push_back("z");
    ChartPtr c = make_chart("R" + std::to_string(2 * n + 1), names);
    KeyedComponents th{{"dz", "1"}};
    for (int i = 1; i <= n; ++i) th.push_back({"dx" + std::to_string(i), "-y" + std::to_string(i)});
    return make_contact(c, F(c, 1, th), Form(c, 2));
}

}  // namespace

TEST_CASE("contact volume")
{
    const Report a = check_contact(std_contact());
    CHECK(a.passed());
    // θ∧dθ = (dz − y dx)∧dx∧dy = dz∧dx∧dy = dx∧dy∧dz
    CHECK(contact_volume(std_contact()).equals(parse_expr("1", *R3)));

    const TwistedContact flat = make_contact(R3, F(R3, 1, {{"dz", "1"}}), Form(R3, 2));
    const Report b = check_contact(flat);
    CHECK_FALSE(b.passed());
    CHECK_FALSE(b.checks()[0].witness.empty());

    const Report c = check_contact(twisted_contact());
    CHECK(c.passed());
    CHECK(contact_volume(twisted_contact()).equals(parse_expr("1+x", *R3)));
    CHECK(c.assumptions() == std::vector<std::string>{"x+1 != 0"});

    const ChartPtr R2 = make_chart("R2", {"x", "p"});
    CHECK_THROWS_AS((void)make_contact(R2, F(R2, 1, {{"dx", "p"}}), Form(R2, 2)), NotContact);
}

TEST_CASE("Reeb fields and bivectors")
{
    const MultiVector dz = V(R3, 1, {{"d/dz", "1"}});
    CHECK(reeb(std_contact()).equals(dz));
    CHECK(reeb(twisted_contact()).equals(dz));

    const MultiVector L = contact_bivector(std_contact());
    CHECK(L.equals(V(R3, 2, {{"d/dx^d/dy", "1"}, {"d/dz^d/dy", "y"}})));
    CHECK(sharp(L, std_contact().theta).is_zero());

    const MultiVector Lt = contact_bivector(twisted_contact());
    CHECK(Lt.equals(V(R3, 2, {{"d/dx^d/dy", "1/(1+x)"}, {"d/dz^d/dy", "y/(1+x)"}})));

    // image constraint θ(Λ^#ζ) = 0 on the basis
    for (int k = 0; k < 3; ++k) CHECK(pairing(sharp(Lt, Form::basis(R3, {k})), twisted_contact().theta).is_zero());

    const TwistedContact flat = make_contact(R3, F(R3, 1, {{"dz", "1"}}), Form(R3, 2));
    CHECK_THROWS_AS((void)reeb(flat), NotContact);
}

TEST_CASE("classical contact geometry in dimensions 3 and 5")
{
    for (int n : {1, 2}) {
        const TwistedContact C = darboux(n);
        const ChartPtr& c = C.chart;
        const ContactSolution s = solve_contact(C);
        CHECK(s.E.equals(MultiVector::basis(c, {2 * n})));
        MultiVector want(c, 2);
        for (int i = 0; i < n; ++i) {
            MultiVector xi = MultiVector::basis(c, {i});
            xi[Mask{1} << (2 * n)] = Expr::variable(2 * n + 1, n + i);
            want += wedge(xi, MultiVector::basis(c, {n + i}));
        }
        CHECK(s.Lambda.equals(want));
        CHECK(s.assumptions.empty());
        CHECK(jacobi_from_contact(C).J.verified);
    }
}

TEST_CASE("induced twisted Jacobi structures")
{
    ContactJacobi a = jacobi_from_contact(std_contact());
    CHECK(a.J.verified);
    CHECK(all_symbolic(a.report));
    ContactJacobi b = jacobi_from_contact(twisted_contact());
    INFO(b.report.summary());
    CHECK(b.J.verified);
    CHECK(all_symbolic(b.report));

    // almost-cosymplectic (θ, Θ) = (dz, dx∧dy) read as twisted contact with ω = Θ − dθ
    const Form theta = F(R3, 1, {{"dz", "1"}});
    const Form Theta = F(R3, 2, {{"dx^dy", "1"}});
    ContactJacobi c = jacobi_from_contact(make_contact(R3, theta, Theta - ext_d(theta)));
    CHECK(c.J.verified);
    CHECK(c.J.E.equals(V(R3, 1, {{"d/dz", "1"}})));
    CHECK(c.J.Lambda.equals(V(R3, 2, {{"d/dx^d/dy", "1"}})));
    CHECK(c.J.omega.equals(Theta));
}

TEST_CASE("Poissonization of contact structures")
{
    CHECK(detect_inverse_convention() == -1);
    for (const TwistedContact& C : {std_contact(), twisted_contact()}) {
        const Report r = contact_poissonization_check(C);
        INFO(r.summary());
        CHECK(all_symbolic(r));
    }
    const ChartPtr big = extend_chart(R3, "R3xR", "s");
    CHECK(poissonized_form(std_contact(), big)
              .equals(F(big, 2, {{"ds^dz", "exp(s)"}, {"ds^dx", "-y*exp(s)"}, {"dx^dy", "exp(s)"}})));
}
