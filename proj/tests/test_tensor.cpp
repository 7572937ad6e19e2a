#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"
#include "twistjac/tensor.hpp"

using namespace twistjac;
using namespace testsupport;

namespace {

const ChartPtr R3 = make_chart("R3", {"x", "y", "z"});
const ChartPtr R2 = make_chart("R2", {"x", "y"});

Expr E3(const char* s) { return parse_expr(s, *R3); }
Form F(const ChartPtr& c, int k, const KeyedComponents& kc) { return parse_form(c, k, kc); }
MultiVector V(const ChartPtr& c, int k, const KeyedComponents& kc) { return parse_multivector(c, k, kc); }

// Contact bivector of dz - y dx.
MultiVector std_lambda() { return V(R3, 2, {{"d/dx^d/dy", "1"}, {"d/dz^d/dy", "y"}}); }

Expr fbracket(const MultiVector& L, const Expr& f, const Expr& g)
{
    return biv(L, ext_d(L.chart(), f), ext_d(L.chart(), g));
}

}  // namespace

TEST_CASE("multi-index storage")
{
    CHECK(subsets(4, 2).size() == 6);
    CHECK(subsets(12, 3).size() == 220);
    for (int n = 1; n <= 8; ++n)
        for (int k = 0; k <= n; ++k) {
            const auto& ms = subsets(n, k);
            for (std::size_t i = 0; i < ms.size(); ++i) CHECK(slot_of(ms[i]) == i);
        }
    CHECK(merge_sign(0b010, 0b001) == -1);
    CHECK(merge_sign(0b001, 0b110) == 1);
    CHECK(merge_sign(0b100, 0b011) == 1);
    CHECK(merge_sign(0b011, 0b010) == 0);
    auto k = parse_form_key("dz^dx", *R3);
    CHECK(k.mask == 0b101);
    CHECK(k.sign == -1);
    CHECK(parse_vector_key("d/dy^d/dz^d/dx", *R3).sign == 1);
    CHECK_THROWS_AS((void)parse_form_key("dx^dx", *R3), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_form_key("dw", *R3), std::invalid_argument);
    CHECK(form_key(0b011, *R3) == "dx^dy");
    CHECK(vector_key(0b110, *R3) == "d/dy^d/dz");
}

TEST_CASE("wedge examples")
{
    Form dx = Form::basis(R3, {0}), dy = Form::basis(R3, {1}), dz = Form::basis(R3, {2});
    CHECK(wedge(dx, dx).is_zero());
    CHECK(wedge(dx, dy)[0b011].is_one());
    Form theta = F(R3, 1, {{"dz", "1"}, {"dx", "-y"}});
    Form top = wedge(wedge(theta, dx), dy);
    CHECK(top[0b111].is_one());
    CHECK(wedge(dy, dx).equals(-wedge(dx, dy)));
    CHECK_THROWS_AS((void)wedge(dx, Form::basis(R2, {0})), std::invalid_argument);
}

TEST_CASE("exterior derivative examples")
{
    CHECK(ext_d(F(R3, 1, {{"dx", "3"}, {"dz", "-1/2"}})).is_zero());
    Form theta = F(R3, 1, {{"dz", "1"}, {"dx", "-y"}});
    CHECK(ext_d(theta).equals(F(R3, 2, {{"dx^dy", "1"}})));
    // d(e^s ω) = e^s ds∧ω + e^s dω with ω = x dx∧dy + y^2 dy∧dz on (x,y,z,s)
    const ChartPtr C = make_chart("C", {"x", "y", "z", "s"});
    Form omega = F(C, 2, {{"dx^dy", "x"}, {"dy^dz", "y^2*z"}});
    Expr es = parse_expr("exp(s)", *C);
    Form lhs = ext_d(omega * es);
    Form rhs = wedge(ext_d(C, parse_expr("s", *C)), omega) * es + ext_d(omega) * es;
    CHECK(lhs.equals(rhs));
}

TEST_CASE("interior examples")
{
    Form theta = F(R3, 1, {{"dz", "1"}, {"dx", "-y"}});
    MultiVector dz = MultiVector::basis(R3, {2});
    CHECK(interior(dz, theta).value().is_one());
    CHECK(interior(dz, F(R3, 2, {{"dx^dy", "1"}})).is_zero());
    MultiVector X = V(R3, 1, {{"d/dx", "1"}, {"d/dz", "y"}});
    CHECK(interior(X, theta).value().is_zero());
    CHECK_THROWS_AS((void)interior(X, Form::scalar(R3, E3("x"))), std::invalid_argument);
}

TEST_CASE("Lie derivative examples")
{
    const ChartPtr C = make_chart("C", {"x", "y", "s"});
    MultiVector ds = MultiVector::basis(C, {2});
    MultiVector L0 = V(C, 2, {{"d/dx^d/dy", "x+y^2"}});
    Expr ems = parse_expr("exp(-s)", *C);
    CHECK(lie(ds, L0 * ems).equals(-(L0 * ems)));
    Form f = Form::scalar(C, parse_expr("x*s^2", *C));
    MultiVector X = V(C, 1, {{"d/ds", "y"}});
    CHECK(lie(X, f).value().equals(interior(X, ext_d(f)).value()));
    // Liouville form is homogeneous of degree one along Σ p ∂p
    const ChartPtr T = make_chart("T", {"x1", "x2", "p1", "p2"});
    Form lam = F(T, 1, {{"dx1", "p1"}, {"dx2", "p2"}});
    MultiVector Z = V(T, 1, {{"d/dp1", "p1"}, {"d/dp2", "p2"}});
    CHECK(lie(Z, lam).equals(lam));
}

TEST_CASE("Schouten examples")
{
    MultiVector c = V(R3, 2, {{"d/dx^d/dy", "2"}, {"d/dy^d/dz", "-1/3"}});
    CHECK(schouten(c, c).is_zero());
    MultiVector dx = MultiVector::basis(R3, {0});
    MultiVector xdy = V(R3, 1, {{"d/dy", "x"}});
    CHECK(schouten(dx, xdy).equals(MultiVector::basis(R3, {1})));
    // [f, P] = -i(df) P
    MultiVector P = std_lambda();
    Expr f = E3("x*z");
    MultiVector fP = schouten(MultiVector::scalar(R3, f), P);
    // i(df)Λ = Λ(df,·) = Λ^#df
    CHECK(fP.equals(-sharp1(P, ext_d(R3, f))));
}

TEST_CASE("Schouten sign pinned by the Jacobiator")
{
    // ½[Λ,Λ](df,dg,dh) = {f,{g,h}} + c.p.  (E = 0, ω = 0)
    std::mt19937_64 rng(21);
    std::vector<MultiVector> lambdas{std_lambda(), random_multivector(rng, R3, 2), random_multivector(rng, R3, 2)};
    for (const auto& L : lambdas) {
        MultiVector half = schouten(L, L) * Expr::constant(3, Rational(1, 2));
        for (int trial = 0; trial < 3; ++trial) {
            Expr f = trial == 0 ? E3("x") : random_poly(rng, 3, 2, 2);
            Expr g = trial == 0 ? E3("y") : random_poly(rng, 3, 2, 2);
            Expr h = trial == 0 ? E3("z") : random_poly(rng, 3, 2, 2);
            Expr jac = fbracket(L, f, fbracket(L, g, h)) + fbracket(L, g, fbracket(L, h, f)) +
                       fbracket(L, h, fbracket(L, f, g));
            Expr lhs = evaluate(half, {ext_d(R3, f), ext_d(R3, g), ext_d(R3, h)});
            CHECK(lhs.equals(jac));
        }
    }
    // the contact bivector of dz - y dx is not Poisson: its Jacobiator on (x,y,z) is -1
    MultiVector half = schouten(std_lambda(), std_lambda()) * Expr::constant(3, Rational(1, 2));
    CHECK(half[0b111].equals(Expr::constant(3, -1)));
}

TEST_CASE("Schouten properties on random inputs")
{
    std::mt19937_64 rng(22);
    for (int t = 0; t < 10; ++t) {
        MultiVector X = random_multivector(rng, R3, 1), Y = random_multivector(rng, R3, 1);
        MultiVector W = random_multivector(rng, R3, 1), B = random_multivector(rng, R3, 2);
        // Lie bracket of vector fields, checked on a function
        Expr f = random_poly(rng, 3);
        CHECK(apply(schouten(X, Y), f).equals(apply(X, apply(Y, f)) - apply(Y, apply(X, f))));
        // graded antisymmetry
        MultiVector B2 = random_multivector(rng, R3, 2);
        CHECK(schouten(X, B).equals(-schouten(B, X)));
        CHECK(schouten(B, B2).equals(schouten(B2, B)));
        // lie on multivectors is the bracket with X; on degree 0 it is X(f)
        CHECK(schouten(X, MultiVector::scalar(R3, f)).value().equals(apply(X, f)));
        // graded Leibniz: [X, Y∧W] = [X,Y]∧W + Y∧[X,W]
        CHECK(schouten(X, wedge(Y, W)).equals(wedge(schouten(X, Y), W) + wedge(Y, schouten(X, W))));
        // graded Jacobi (1,1,1) and (1,1,2)
        CHECK(schouten(X, schouten(Y, W)).equals(schouten(schouten(X, Y), W) + schouten(Y, schouten(X, W))));
        CHECK(schouten(X, schouten(Y, B)).equals(schouten(schouten(X, Y), B) + schouten(Y, schouten(X, B))));
    }
}

TEST_CASE("sharp examples and brute-force agreement")
{
    MultiVector L = V(R2, 2, {{"d/dx^d/dy", "1"}});
    CHECK(sharp(L, Form::basis(R2, {0})).equals(MultiVector::basis(R2, {1})));
    Expr f = parse_expr("x*y+1", *R2);
    CHECK(sharp(L, Form::scalar(R2, f)).value().equals(f));
    CHECK(sharp(L, F(R2, 2, {{"dx^dy", "1"}})).equals(L));

    std::mt19937_64 rng(23);
    for (int t = 0; t < 5; ++t) {
        MultiVector Lr = random_multivector(rng, R3, 2);
        Form a = random_form(rng, R3, 1), b = random_form(rng, R3, 1);
        // ⟨β, Λ^#α⟩ = Λ(α, β)
        CHECK(pairing(sharp(Lr, a), b).equals(biv(Lr, a, b)));
        // degree 2: component ij = (+1) ζ(Λ^#dx^i, Λ^#dx^j)
        Form z = random_form(rng, R3, 2);
        MultiVector s2 = sharp(Lr, z);
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                Expr brute = eval2(z, sharp1(Lr, Form::basis(R3, {i})), sharp1(Lr, Form::basis(R3, {j})));
                CHECK(s2.at({i, j}).equals(brute));
            }
        // degree 3: (−1)^3 ζ(Λ^#dx, Λ^#dy, Λ^#dz)
        Form w = random_form(rng, R3, 3);
        Expr brute = -eval3(w, sharp1(Lr, Form::basis(R3, {0})), sharp1(Lr, Form::basis(R3, {1})),
                            sharp1(Lr, Form::basis(R3, {2})));
        CHECK(sharp(Lr, w)[0b111].equals(brute));
    }
}

TEST_CASE("sharp_tensor")
{
    MultiVector L = V(R3, 2, {{"d/dx^d/dy", "1"}});
    Form top = F(R3, 3, {{"dx^dy^dz", "1"}});
    MultiVector dz = MultiVector::basis(R3, {2});
    CHECK(sharp_tensor(L, top, dz).equals(-L));
    Form z1 = F(R3, 1, {{"dx", "y"}, {"dz", "2"}});
    MultiVector X = V(R3, 1, {{"d/dx", "1"}, {"d/dz", "x"}});
    CHECK(sharp_tensor(L, z1, X).value().equals(-E3("y+2*x")));
    CHECK(sharp_tensor(L, top, MultiVector(R3, 1)).is_zero());

    // brute force: component ij of a degree-3 input = (−1)^3 ζ(Λ^#dx^i, Λ^#dx^j, X)
    std::mt19937_64 rng(24);
    for (int t = 0; t < 4; ++t) {
        MultiVector Lr = random_multivector(rng, R3, 2);
        Form w = random_form(rng, R3, 3);
        MultiVector Y = random_multivector(rng, R3, 1);
        MultiVector r = sharp_tensor(Lr, w, Y);
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                Expr brute = -eval3(w, sharp1(Lr, Form::basis(R3, {i})), sharp1(Lr, Form::basis(R3, {j})), Y);
                CHECK(r.at({i, j}).equals(brute));
            }
        Form z2 = random_form(rng, R3, 2);
        MultiVector r2 = sharp_tensor(Lr, z2, Y);
        for (int i = 0; i < 3; ++i)
            CHECK(r2.at({i}).equals(eval2(z2, sharp1(Lr, Form::basis(R3, {i})), Y)));
    }
}

TEST_CASE("pair_sharp")
{
    MultiVector L = std_lambda();
    MultiVector E = MultiVector::basis(R3, {2});
    PairForm zero = make_pair_form(Form(R3, 1), Form::scalar(R3, Expr(3)));
    CHECK(pair_sharp(L, E, zero).is_zero());

    Form zeta = F(R3, 1, {{"dx", "y"}, {"dz", "x"}});
    PairVector r = pair_sharp(MultiVector(R3, 2), E, make_pair_form(zeta, Form::scalar(R3, Expr(3))));
    CHECK(r.primary.is_zero());
    CHECK(r.secondary.value().equals(-E3("x")));

    // (Λ,E)^#(dx, x) = (Λ^#dx + x ∂z, −⟨dx,∂z⟩) = (∂y + x∂z, 0)
    PairVector h = pair_sharp(L, E, make_pair_form(Form::basis(R3, {0}), Form::scalar(R3, E3("x"))));
    CHECK(h.primary.equals(V(R3, 1, {{"d/dy", "1"}, {"d/dz", "x"}})));
    CHECK(h.secondary.value().is_zero());

    std::mt19937_64 rng(25);
    for (int t = 0; t < 4; ++t) {
        MultiVector Lr = random_multivector(rng, R3, 2);
        MultiVector Er = random_multivector(rng, R3, 1);
        // reduction to sharp when E = 0 and the secondary part vanishes
        Form z2 = random_form(rng, R3, 2);
        PairVector red = pair_sharp(Lr, MultiVector(R3, 1), make_pair_form(z2, Form(R3, 1)));
        CHECK(red.primary.equals(sharp(Lr, z2)));
        CHECK(red.secondary.is_zero());
        // degree 2 against hand-expanded basis evaluation
        Form s1 = random_form(rng, R3, 1);
        PairForm z = make_pair_form(z2, s1);
        PairVector ps = pair_sharp(Lr, Er, z);
        auto arg = [&](int j) { return std::pair{sharp1(Lr, Form::basis(R3, {j})), -Er.at({j})}; };
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                auto [Xi, fi] = arg(i);
                auto [Xj, fj] = arg(j);
                Expr brute = eval2(z2, Xi, Xj) + fi * pairing(Xj, s1) - fj * pairing(Xi, s1);
                CHECK(ps.primary.at({i, j}).equals(brute));
            }
        for (int j = 0; j < 3; ++j) {
            auto [Xj, fj] = arg(j);
            Expr brute = eval2(z2, Er, Xj) - fj * pairing(Er, s1);  // args ((E,0),(Xj,fj))
            CHECK(ps.secondary.at({j}).equals(brute));
        }
    }
}

TEST_CASE("pullback")
{
    std::mt19937_64 rng(26);
    Form a = random_form(rng, R3, 2);
    CHECK(pullback(identity_map(R3), a).equals(a));
    SmoothMap p = make_map("p", R2, make_chart("X", {"x"}), {"x"});
    Form f = Form::scalar(p.target, parse_expr("x^3+1", *p.target));
    CHECK(pullback(p, f).value().equals(parse_expr("x^3+1", *R2)));

    for (int t = 0; t < 5; ++t) {
        SmoothMap phi{"phi", R2, R3, {}, {}};
        SmoothMap psi{"psi", R2, R2, {}, {}};
        for (int i = 0; i < 3; ++i) phi.components.push_back(random_poly(rng, 2, 3, 2));
        for (int i = 0; i < 2; ++i) psi.components.push_back(random_poly(rng, 2, 2, 2));
        Form w = random_form(rng, R3, 1);
        // commutes with d
        CHECK(pullback(phi, ext_d(w)).equals(ext_d(pullback(phi, w))));
        // functorial
        CHECK(pullback(compose(phi, psi), w).equals(pullback(psi, pullback(phi, w))));
        Form w2 = random_form(rng, R3, 2);
        CHECK(pullback(compose(phi, psi), w2).equals(pullback(psi, pullback(phi, w2))));
    }
}

TEST_CASE("pushforward along projections")
{
    const ChartPtr XS = make_chart("XS", {"x", "s"});
    const ChartPtr X = make_chart("X", {"x"});
    SmoothMap pi = make_map("pi", XS, X, {"x"});
    pi.section = {parse_expr("x", *X), parse_expr("0", *X)};
    CHECK(section_is_valid(pi));
    CHECK(pushforward(pi, MultiVector::basis(XS, {0})).equals(MultiVector::basis(X, {0})));
    CHECK(pushforward(pi, MultiVector::basis(XS, {1})).is_zero());
    CHECK_THROWS_AS((void)pushforward(pi, V(XS, 1, {{"d/dx", "s"}})), ProjectabilityFailure);

    const ChartPtr Ms = make_chart("Ms", {"x", "y", "s"});
    SmoothMap w = make_map("w", Ms, R2, {"x", "y"});
    w.section = {parse_expr("x", *R2), parse_expr("y", *R2), parse_expr("0", *R2)};
    MultiVector L0 = V(Ms, 2, {{"d/dx^d/dy", "1+x*y"}});
    MultiVector twisted = L0 * parse_expr("exp(-s)", *Ms) * parse_expr("exp(s)", *Ms);
    CHECK(pushforward(w, twisted).equals(V(R2, 2, {{"d/dx^d/dy", "1+x*y"}})));
    try {
        (void)pushforward(w, L0 * parse_expr("exp(-s)", *Ms));
        FAIL("expected ProjectabilityFailure");
    } catch (const ProjectabilityFailure& e) {
        CHECK(e.component() == "d/dx^d/dy");
    }
}

TEST_CASE("calculus identities on random inputs")
{
    std::mt19937_64 rng(27);
    for (int t = 0; t < 20; ++t) {
        Form f0 = random_form(rng, R3, 0), f1 = random_form(rng, R3, 1), f2 = random_form(rng, R3, 2);
        CHECK(ext_d(ext_d(f0)).is_zero());
        CHECK(ext_d(ext_d(f1)).is_zero());
        MultiVector X = random_multivector(rng, R3, 1);
        CHECK((lie(X, f1) - interior(X, ext_d(f1)) - ext_d(interior(X, f1))).is_zero());
        CHECK((lie(X, f2) - interior(X, ext_d(f2)) - ext_d(interior(X, f2))).is_zero());
        CHECK(interior(X, interior(X, f2)).is_zero());
        // Leibniz for d
        CHECK(ext_d(wedge(f1, f1 * f0.value())).equals(wedge(ext_d(f1), f1 * f0.value()) -
                                                       wedge(f1, ext_d(f1 * f0.value()))));
        // a∧b = (−1)^{|a||b|} b∧a
        CHECK(wedge(f1, f2).equals(wedge(f2, f1)));
        Form g1 = random_form(rng, R3, 1);
        CHECK(wedge(f1, g1).equals(-wedge(g1, f1)));
    }
}
