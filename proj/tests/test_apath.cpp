#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "twistjac/apath.hpp"

#include <cmath>

using namespace twistjac;

namespace {

const ChartPtr R3 = make_chart("R3", {"x", "y", "z"});

// (Λ, E, ω) = (0, ∂z, 0): the anchor is f·∂z
TwistedJacobi vertical()
{
    return make_jacobi(R3, MultiVector(R3, 2), parse_multivector(R3, 1, {{"d/dz", "1"}}), Form(R3, 2));
}

// twisted structure of the contact form dz − y dx with ω = x dx∧dy
TwistedJacobi twisted()
{
    return make_jacobi(R3, parse_multivector(R3, 2, {{"d/dx^d/dy", "1/(1+x)"}, {"d/dz^d/dy", "y/(1+x)"}}),
                       parse_multivector(R3, 1, {{"d/dz", "1"}}), parse_form(R3, 2, {{"dx^dy", "x"}}));
}

APath line(const TwistedJacobi& J, const std::string& zeta, const std::string& f, int N, const std::string& z0 = "0")
{
    return sample_path(J, parse_path(J, {"0", "0", z0 + "+t/2"}, {{"dz", zeta}}, f), N);
}

}  // namespace

TEST_CASE("anchor residual")
{
    const TwistedJacobi J = vertical();
    const APath still = sample_path(J, parse_path(J, {"1/2", "0", "0"}, {}, "0"), 16);
    CHECK(anchor_residual(still) == 0.0);

    // γ(t) = (0,0,t), f = 1: anchor = ∂z = γ′ exactly
    const APath c = sample_path(J, parse_path(J, {"0", "0", "t"}, {{"dz", "1"}}, "1"), 32);
    CHECK(anchor_residual(c) < 1e-12);
    const APath wrong = sample_path(J, parse_path(J, {"0", "0", "t"}, {{"dz", "1"}}, "2"), 32);
    CHECK(anchor_residual(wrong) == doctest::Approx(1.0));

    // curved base: γ(t) = (0,0,t²/2) with f = t; central differences are exact on quadratics
    const APath q = sample_path(J, parse_path(J, {"0", "0", "t^2/2"}, {}, "t"), 16);
    CHECK(anchor_residual(q) < 1e-12);

    // a violation does not shrink under refinement
    for (int N : {16, 64, 256}) {
        const APath bad = sample_path(J, parse_path(J, {"0", "0", "t^2/2"}, {}, "1"), N);
        CHECK(anchor_residual(bad) > 0.49);
    }
}

TEST_CASE("anchor residual on the twisted structure")
{
    // Λ(ζ,η) = ⟨η, Λ^#ζ⟩ with Λ = (∂x + y∂z)∧∂y/(1+x): Λ^#dx = ∂y/(1+x)
    const TwistedJacobi J = twisted();
    const MultiVector rho = algebroid_anchor(J, {parse_form(R3, 1, {{"dx", "-1/2"}}), parse_expr("1/4", *R3)});
    CHECK(rho.equals(parse_multivector(R3, 1, {{"d/dy", "-1/(2+2*x)"}, {"d/dz", "1/4"}})));

    // on x = 0 the anchor is (0, −1/2, 1/4), the velocity of γ(t) = (0, −t/2, t/4)
    const APath c = sample_path(J, parse_path(J, {"0", "-t/2", "t/4"}, {{"dx", "-1/2"}}, "1/4"), 32);
    CHECK(anchor_residual(c) < 1e-12);
    CHECK(cocycle_integral(c) == doctest::Approx(0.0));
    // off the plane x = 0 the same fiber no longer lifts the straight line
    const APath d = sample_path(J, parse_path(J, {"1/2", "-t/2", "t/4"}, {{"dx", "-1/2"}}, "1/4"), 32);
    CHECK(anchor_residual(d) == doctest::Approx(1.0 / 6).epsilon(1e-9));
}

TEST_CASE("cocycle integral closed forms")
{
    const TwistedJacobi J = vertical();
    CHECK(cocycle_integral(sample_path(J, parse_path(J, {"0", "0", "t"}, {}, "5"), 64)) == 0.0);
    const APath c1 = sample_path(J, parse_path(J, {"0", "0", "t"}, {{"dz", "1"}}, "1"), 64);
    CHECK(std::abs(cocycle_integral(c1) + 1.0) < 1e-8);
    const APath c2 = sample_path(J, parse_path(J, {"0", "0", "t"}, {{"dz", "t"}}, "1"), 64);
    CHECK(std::abs(cocycle_integral(c2) + 0.5) < 1e-10);
    CHECK(cocycle_integral(reverse(c1)) == doctest::Approx(1.0));
}

TEST_CASE("Simpson convergence")
{
    const TwistedJacobi J = vertical();
    const double exact = -(std::exp(1.0) - 1.0);
    double prev = 0.0;
    for (int N : {8, 16, 32, 64}) {
        const double err = std::abs(cocycle_integral(line(J, "exp(t)", "0", N)) - exact);
        if (N > 8) CHECK(prev / err >= 8.0);
        prev = err;
    }
}

TEST_CASE("concatenation")
{
    const TwistedJacobi J = vertical();
    const APath a = sample_path(J, parse_path(J, {"0", "0", "t/2"}, {{"dz", "1"}}, "1/2"), 64);
    const APath b = sample_path(J, parse_path(J, {"0", "0", "1/2+t/2"}, {{"dz", "1"}}, "1/2"), 64);
    const APath ab = concatenate(a, b);
    CHECK(ab.N == 128);
    CHECK(std::abs(cocycle_integral(ab) + 2.0) < 1e-8);
    CHECK(anchor_residual(ab) < 1e-12);

    // zero path at the start changes nothing
    const APath zero = sample_path(J, parse_path(J, {"0", "0", "0"}, {}, "0"), 64);
    CHECK(cocycle_integral(concatenate(zero, a)) == doctest::Approx(cocycle_integral(a)).epsilon(1e-12));

    // a jump in the fiber at the join is integrated from both sides
    const APath c = line(J, "t", "1/2", 32);
    const APath d = line(J, "1-t^2", "1/2", 32, "1/2");
    const APath cd = concatenate(c, d);
    CHECK(cocycle_integral(cd) == doctest::Approx(cocycle_integral(c) + cocycle_integral(d)).epsilon(1e-12));
    CHECK(cocycle_integral(reverse(cd)) == doctest::Approx(-cocycle_integral(cd)).epsilon(1e-12));

    // different resolutions: the coarser half is resampled from its closed form
    const APath e = line(J, "exp(t)", "1/2", 16, "1/2");
    CHECK(concatenate(c, e).N == 64);
    CHECK(std::abs(cocycle_integral(concatenate(c, e)) - cocycle_integral(c) - cocycle_integral(resample(e, 32))) < 1e-12);

    CHECK_THROWS_AS((void)concatenate(b, a), InvalidPath);
}

TEST_CASE("reparameterization")
{
    const TwistedJacobi J = vertical();
    const ChartPtr T = make_chart("time", {"t"});
    const APath c = sample_path(J, parse_path(J, {"0", "0", "t"}, {{"dz", "1"}}, "1"), 64);

    const APath same = reparameterize(c, parse_expr("t", *T));
    for (int i = 0; i <= c.N; ++i) CHECK(same.fiber[i].zeta == c.fiber[i].zeta);
    CHECK(std::abs(cocycle_integral(reparameterize(c, parse_expr("t^2", *T))) + 1.0) < 1e-6);
    const APath s = reparameterize(c, parse_expr("3*t^2-2*t^3", *T));
    CHECK(std::abs(cocycle_integral(s) + 1.0) < 1e-6);
    CHECK(anchor_residual(s) < 1e-2);

    // the sampled-only route (interpolation) agrees
    APath raw = c;
    raw.formula.reset();
    const APath s2 = reparameterize(raw, parse_expr("3*t^2-2*t^3", *T));
    CHECK(std::abs(cocycle_integral(s2) + 1.0) < 1e-6);

    // reparameterized halves glue smoothly: the fiber vanishes at the join
    const APath g = concatenate(s, reparameterize(sample_path(J, parse_path(J, {"0", "0", "1-t/4"}, {{"dz", "2"}}, "-1/4"), 64), parse_expr("3*t^2-2*t^3", *T)));
    CHECK(std::abs(g.fiber[g.N / 2].zeta[2]) < 1e-12);

    CHECK_THROWS_AS((void)reparameterize(c, parse_expr("4*t-9*t^2+6*t^3", *T)), InvalidPath);  // τ(1) = 1, τ′ < 0 on (1/3, 2/3)
    CHECK_THROWS_AS((void)reparameterize(c, parse_expr("t^2/2", *T)), InvalidPath);
}

TEST_CASE("path preconditions")
{
    const TwistedJacobi J = vertical();
    CHECK_THROWS_AS((void)sample_path(J, parse_path(J, {"0", "0", "t"}, {}, "1"), 6), InvalidPath);
    CHECK_THROWS_AS((void)sample_path(J, parse_path(J, {"0", "0", "t"}, {}, "1"), 9), InvalidPath);
    CHECK_THROWS_AS((void)sample_path(J, parse_path(J, {"0", "0", "3*t"}, {}, "1"), 8), InvalidPath);
    CHECK_THROWS_AS((void)parse_path(J, {"0", "0"}, {}, "1"), InvalidPath);
    CHECK_THROWS_AS((void)parse_path(J, {"0", "0", "t"}, {{"dw", "1"}}, "1"), InvalidPath);
}
