// Small helpers shared by the structure modules.
#pragma once

#include "twistjac/tensor.hpp"
#include "twistjac/verify.hpp"

#include <optional>

namespace twistjac::detail {

inline bool fits(int degree, const ChartPtr& chart)
{
    return degree <= chart->dim();
}

/// d of a form, or nothing when the result would exceed the chart dimension.
inline std::optional<Form> d_opt(const Form& a)
{
    if (a.degree() >= a.dim()) return std::nullopt;
    return ext_d(a);
}

inline Expr one(const ChartPtr& chart)
{
    return Expr::constant(chart->dim(), 1);
}

inline Expr coord(const ChartPtr& chart, int i)
{
    return Expr::variable(chart->dim(), i);
}

inline MultiVector coordinate_field(const ChartPtr& chart, int i)
{
    return MultiVector::basis(chart, {i});
}

inline void add_components(ResidualAccumulator& acc, const Form& t, std::string_view prefix = {})
{
    for (std::size_t s = 0; s < t.size(); ++s)
        acc.add(t.comp(s), std::string(prefix) + form_key(t.mask(s), *t.chart()));
}

inline void add_components(ResidualAccumulator& acc, const MultiVector& t, std::string_view prefix = {})
{
    for (std::size_t s = 0; s < t.size(); ++s)
        acc.add(t.comp(s), std::string(prefix) + vector_key(t.mask(s), *t.chart()));
}

/// Samples for a chart under the given configuration.
inline std::vector<Point> samples_for(const ChartPtr& chart, const SampleConfig& cfg)
{
    return sample_points(chart->dim(), cfg);
}

}  // namespace twistjac::detail

namespace twistjac::detail {

/// Records "den != 0" for every denominator factor appearing in t.
template <class T>
void assume_denominators(ResidualAccumulator& acc, const T& t)
{
    for (std::size_t s = 0; s < t.size(); ++s)
        for (auto& a : denominator_assumptions(t.comp(s), *t.chart())) acc.assume(std::move(a));
}

}  // namespace twistjac::detail

namespace twistjac::detail {

/// Antisymmetric matrix of a 2-form at a point.
inline std::vector<std::vector<double>> numeric_matrix(const Form& two, const Point& p)
{
    const int n = two.dim();
    std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = two.at({i, j}).eval(p);
            M[i][j] = v;
            M[j][i] = -v;
        }
    return M;
}

}  // namespace twistjac::detail
