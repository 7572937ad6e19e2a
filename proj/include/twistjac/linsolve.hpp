#ifndef TWISTJAC_LINSOLVE_HPP
#define TWISTJAC_LINSOLVE_HPP

#include "twistjac/expr.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace twistjac {

using ExprMatrix = std::vector<std::vector<Expr>>;

class SingularSystem : public std::runtime_error {
public:
    SingularSystem(std::string detail, int column)
        : std::runtime_error(std::move(detail)), column_(column) {}
    [[nodiscard]] int column() const noexcept { return column_; }

private:
    int column_;
};

struct LinearSolution {
    /// solutions[r][i]: unknown i for right-hand side r.
    std::vector<std::vector<Expr>> solutions;
    /// Pivots that are not manifestly nonzero, as "p != 0".
    std::vector<std::string> assumptions;
    /// Product of pivots up to sign (the determinant after Bareiss).
    Expr determinant;
};

/// Fraction-free elimination of A·x = b for every column b of `rhs`.
/// Pivot: the nonzero entry with the fewest numerator terms. Throws SingularSystem
/// when a column has no symbolically nonzero candidate.
[[nodiscard]] LinearSolution solve_bareiss(const ExprMatrix& A, const ExprMatrix& rhs, const Chart& chart);

/// Bareiss determinant; exact.
[[nodiscard]] Expr determinant(const ExprMatrix& A);

/// Numeric rank by partial-pivot elimination with relative threshold.
[[nodiscard]] int numeric_rank(std::vector<std::vector<double>> M, double tol = 1e-8);

}  // namespace twistjac

#endif  // TWISTJAC_LINSOLVE_HPP
