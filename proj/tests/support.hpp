// Shared helpers for the test executables: random inputs and small oracles.
#pragma once

#include "twistjac/expr.hpp"

#include <random>
#include <string>
#include <vector>

namespace testsupport {

using twistjac::Expr;
using twistjac::Rational;

inline twistjac::ChartPtr r3() { return twistjac::make_chart("R3", {"x", "y", "z"}); }

/// Random polynomial with small integer coefficients and degree <= max_deg per variable.
inline Expr random_poly(std::mt19937_64& rng, int nvars, int terms = 4, int max_deg = 2)
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

/// Random polynomial optionally times exp of a random linear form.
inline Expr random_exp_poly(std::mt19937_64& rng, int nvars)
{
    std::uniform_int_distribution<int> coef(-2, 2);
    Expr e = random_poly(rng, nvars, 3, 2);
    Expr arg(nvars);
    for (int v = 0; v < nvars; ++v) arg += Expr::constant(nvars, coef(rng)) * Expr::variable(nvars, v);
    return e * Expr::exp(arg) + random_poly(rng, nvars, 2, 1);
}

/// Random rational function: exp-polynomial over (1 + polynomial^2).
inline Expr random_rational(std::mt19937_64& rng, int nvars)
{
    Expr d = random_poly(rng, nvars, 2, 1);
    return random_exp_poly(rng, nvars) / (Expr::constant(nvars, 1) + d * d);
}

}  // namespace testsupport

#include "twistjac/tensor.hpp"

namespace testsupport {

template <class T>
T random_tensor(std::mt19937_64& rng, const twistjac::ChartPtr& chart, int degree, int terms = 3, int max_deg = 2)
{
    T t(chart, degree);
    for (std::size_t s = 0; s < t.size(); ++s) t.comp(s) = random_poly(rng, chart->dim(), terms, max_deg);
    return t;
}

inline twistjac::Form random_form(std::mt19937_64& rng, const twistjac::ChartPtr& chart, int degree)
{
    return random_tensor<twistjac::Form>(rng, chart, degree);
}

inline twistjac::MultiVector random_multivector(std::mt19937_64& rng, const twistjac::ChartPtr& chart, int degree)
{
    return random_tensor<twistjac::MultiVector>(rng, chart, degree);
}

/// Oracle: alternating evaluation of a 2-form on two vectors, written out by hand.
inline Expr eval2(const twistjac::Form& z, const twistjac::MultiVector& X, const twistjac::MultiVector& Y)
{
    const int n = z.dim();
    Expr acc(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            acc += z.at({i, j}) * (X.at({i}) * Y.at({j}) - X.at({j}) * Y.at({i}));
    return acc;
}

/// Oracle: 3-form on three vectors by the 6-term permutation expansion.
inline Expr eval3(const twistjac::Form& z, const twistjac::MultiVector& X, const twistjac::MultiVector& Y,
                  const twistjac::MultiVector& W)
{
    const int n = z.dim();
    Expr acc(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                if (i == j || j == k || i == k) continue;
                Expr c = z.at({i, j, k});
                if (c.is_zero()) continue;
                // each unordered triple appears 6 times with z.at carrying the sign; divide by 6 via ordering
                if (!(i < j && j < k)) continue;
                const int p[6][3] = {{i, j, k}, {j, k, i}, {k, i, j}, {j, i, k}, {i, k, j}, {k, j, i}};
                for (int s = 0; s < 6; ++s) {
                    Expr t = X.at({p[s][0]}) * Y.at({p[s][1]}) * W.at({p[s][2]});
                    if (s < 3)
                        acc += c * t;
                    else
                        acc -= c * t;
                }
            }
    return acc;
}

/// Oracle: Λ(α,β) = Σ Λ^{ij} α_i β_j over all ordered pairs.
inline Expr biv(const twistjac::MultiVector& L, const twistjac::Form& a, const twistjac::Form& b)
{
    const int n = L.dim();
    Expr acc(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) acc += L.at({i, j}) * a.at({i}) * b.at({j});
    return acc;
}

/// Oracle: Λ^#α as the vector with components Σ_i α_i Λ^{ij}.
inline twistjac::MultiVector sharp1(const twistjac::MultiVector& L, const twistjac::Form& a)
{
    const int n = L.dim();
    std::vector<Expr> c(n, Expr(n));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (i != j) c[j] += a.at({i}) * L.at({i, j});
    return twistjac::MultiVector::from_components(L.chart(), c);
}

}  // namespace testsupport
