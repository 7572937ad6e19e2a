#ifndef TWISTJAC_APATH_HPP
#define TWISTJAC_APATH_HPP

#include "twistjac/jacobi.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace twistjac {

class InvalidPath : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Closed form of an A-path: every entry is an Expr on the one-coordinate chart `time` = (t).
struct PathFormula {
    ChartPtr time;
    std::vector<Expr> gamma;   // base point, one per coordinate of the structure's chart
    std::vector<Expr> zeta;    // covector components in the dx^k basis
    Expr f;
};

/// Fiber value (ζ, f) of T*M×R at one sample.
struct Fiber {
    std::vector<double> zeta;
    double f = 0.0;
};

/// Discretized A-path of T*M×R on N+1 uniform times t_i = i/N.
/// At a break index the base path may have a corner and the fiber may jump;
/// `fiber` holds the left limit there and `right` the right limit.
struct APath {
    TwistedJacobi J;
    int N = 0;
    std::vector<Point> gamma;
    std::vector<Fiber> fiber;
    std::vector<int> breaks;             // sorted, even, strictly inside (0, N)
    std::vector<Fiber> right;            // right limits, parallel to `breaks`
    std::optional<PathFormula> formula;  // kept when sampled from closed form

    [[nodiscard]] double time(int i) const { return static_cast<double>(i) / N; }
    [[nodiscard]] const Point& start() const { return gamma.front(); }
    [[nodiscard]] const Point& end() const { return gamma.back(); }
};

inline constexpr int kMinPathIntervals = 8;

/// Parses a closed form on the time chart; `zeta` keyed like forms ("dx" -> "t").
[[nodiscard]] PathFormula parse_path(const TwistedJacobi& J, const std::vector<std::string>& gamma,
                                     const std::vector<std::pair<std::string, std::string>>& zeta,
                                     const std::string& f);

/// Samples a closed form at N+1 uniform times. N must be even and >= 8; base points must lie in [-box, box]^n.
[[nodiscard]] APath sample_path(const TwistedJacobi& J, const PathFormula& P, int N, double box = 1.0);

/// Builds a path from raw samples (same preconditions as sample_path).
[[nodiscard]] APath make_path(const TwistedJacobi& J, std::vector<Point> gamma, std::vector<Fiber> fiber,
                              double box = 1.0);

/// Max over interior samples of |Λ^#ζ + fE − γ′| with γ′ by central differences; break indices are skipped.
[[nodiscard]] double anchor_residual(const APath& c);

/// Composite Simpson rule for ∫₀¹ −⟨ζ(t), E(γ(t))⟩ dt, the integral of the cocycle (−E, 0).
[[nodiscard]] double cocycle_integral(const APath& c);

/// Value of the path at any time in [0,1] by 4-point Lagrange interpolation inside one smooth piece
/// (exact evaluation when a closed form is attached).
[[nodiscard]] std::pair<Point, Fiber> path_at(const APath& c, double t);

/// Same path on M+1 uniform times.
[[nodiscard]] APath resample(const APath& c, int M);

/// c₁⊙c₀: 2c₀(2t) on [0,1/2], 2c₁(2t−1) on (1/2,1]. Both halves use max(N₀,N₁) intervals,
/// so the result has 2·max(N₀,N₁) and a break at the midpoint. Throws InvalidPath unless
/// γ₁(0) = γ₀(1) within `tol`.
[[nodiscard]] APath concatenate(const APath& c0, const APath& c1, double tol = 1e-9);

/// c^τ(t) = τ′(t)c(τ(t)) with base γ(τ(t)). τ is an Expr on c's time chart (or on a fresh (t) chart);
/// throws InvalidPath unless τ(0)=0, τ(1)=1 and τ′ ≥ 0 at the samples.
[[nodiscard]] APath reparameterize(const APath& c, const Expr& tau);

/// Opposite path c̄(t) = −c(1−t).
[[nodiscard]] APath reverse(const APath& c);

}  // namespace twistjac

#endif  // TWISTJAC_APATH_HPP
