#include "twistjac/linsolve.hpp"

#include <cmath>
#include <utility>

namespace twistjac {

namespace {

int nvars_of(const ExprMatrix& A)
{
    for (const auto& row : A)
        for (const auto& e : row) return e.nvars();
    return 0;
}

bool manifestly_nonzero(const Expr& e)
{
    return e.numerator().is_unit();
}

std::size_t weight(const Expr& c)
{
    std::size_t sz = c.numerator().size();
    for (const auto& f : c.denominator()) sz += f.poly.size();
    return sz;
}

// Full pivoting over the trailing block: never-vanishing entries first, then the fewest terms.
std::pair<int, int> choose_pivot(const ExprMatrix& M, int k, int n)
{
    std::pair<int, int> best{-1, -1};
    std::pair<int, std::size_t> best_score{2, 0};
    for (int j = k; j < n; ++j)
        for (int i = k; i < n; ++i) {
            const Expr& c = M[i][j];
            if (c.is_zero()) continue;
            const std::pair<int, std::size_t> score{manifestly_nonzero(c) ? 0 : 1, weight(c)};
            if (best.first < 0 || score < best_score) {
                best = {i, j};
                best_score = score;
            }
        }
    return best;
}

struct Eliminated {
    ExprMatrix M;
    std::vector<Expr> pivots;
    std::vector<int> columns;   // columns[k] = original unknown in position k
    int sign = 1;
};

Eliminated eliminate(ExprMatrix M, int n)
{
    Eliminated out;
    const int nv = nvars_of(M);
    const int width = M.empty() ? 0 : static_cast<int>(M[0].size());
    out.columns.resize(n);
    for (int k = 0; k < n; ++k) out.columns[k] = k;
    Expr prev = Expr::constant(nv, 1);
    for (int k = 0; k < n; ++k) {
        auto [p, q] = choose_pivot(M, k, n);
        if (p < 0) throw SingularSystem("no nonzero pivot in column " + std::to_string(out.columns[k]), out.columns[k]);
        if (p != k) {
            std::swap(M[p], M[k]);
            out.sign = -out.sign;
        }
        if (q != k) {
            for (auto& row : M) std::swap(row[q], row[k]);
            std::swap(out.columns[q], out.columns[k]);
            out.sign = -out.sign;
        }
        const Expr& piv = M[k][k];
        for (int i = k + 1; i < n; ++i) {
            const Expr lead = M[i][k];
            for (int j = k + 1; j < width; ++j) {
                Expr v = piv * M[i][j];
                if (!lead.is_zero()) v -= lead * M[k][j];
                M[i][j] = v / prev;
            }
            M[i][k] = Expr(nv);
        }
        out.pivots.push_back(piv);
        prev = piv;
    }
    out.M = std::move(M);
    return out;
}

}  // namespace

LinearSolution solve_bareiss(const ExprMatrix& A, const ExprMatrix& rhs, const Chart& chart)
{
    const int n = static_cast<int>(A.size());
    const int nv = chart.dim();
    ExprMatrix M = A;
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(M[i].size()) != n) throw std::invalid_argument("solve_bareiss: matrix is not square");
        for (const auto& col : rhs) {
            if (static_cast<int>(col.size()) != n) throw std::invalid_argument("solve_bareiss: rhs length");
            M[i].push_back(col[i]);
        }
    }
    Eliminated el = eliminate(std::move(M), n);

    LinearSolution sol;
    for (const auto& p : el.pivots)
        if (!manifestly_nonzero(p)) sol.assumptions.push_back(p.to_string(chart) + " != 0");
    sol.determinant = n > 0 ? el.pivots.back() : Expr::constant(nv, 1);
    if (el.sign < 0) sol.determinant = -sol.determinant;

    for (std::size_t r = 0; r < rhs.size(); ++r) {
        std::vector<Expr> x(n, Expr(nv));
        for (int i = n - 1; i >= 0; --i) {
            Expr acc = el.M[i][n + r];
            for (int j = i + 1; j < n; ++j)
                if (!el.M[i][j].is_zero() && !x[j].is_zero()) acc -= el.M[i][j] * x[j];
            x[i] = acc / el.M[i][i];
        }
        std::vector<Expr> unknowns(n, Expr(nv));
        for (int k = 0; k < n; ++k) unknowns[el.columns[k]] = std::move(x[k]);
        sol.solutions.push_back(std::move(unknowns));
    }
    return sol;
}

Expr determinant(const ExprMatrix& A)
{
    const int n = static_cast<int>(A.size());
    if (n == 0) return Expr::constant(0, 1);
    try {
        Eliminated el = eliminate(A, n);
        Expr d = el.pivots.back();
        return el.sign < 0 ? -d : d;
    } catch (const SingularSystem&) {
        return Expr(nvars_of(A));
    }
}

int numeric_rank(std::vector<std::vector<double>> M, double tol)
{
    const int rows = static_cast<int>(M.size());
    const int cols = rows ? static_cast<int>(M[0].size()) : 0;
    double scale = 0.0;
    for (const auto& r : M)
        for (double v : r) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0;
    int rank = 0;
    for (int c = 0; c < cols && rank < rows; ++c) {
        int p = rank;
        for (int i = rank + 1; i < rows; ++i)
            if (std::abs(M[i][c]) > std::abs(M[p][c])) p = i;
        if (std::abs(M[p][c]) <= tol * scale) continue;
        std::swap(M[p], M[rank]);
        for (int i = rank + 1; i < rows; ++i) {
            double f = M[i][c] / M[rank][c];
            for (int j = c; j < cols; ++j) M[i][j] -= f * M[rank][j];
        }
        ++rank;
    }
    return rank;
}

}  // namespace twistjac
