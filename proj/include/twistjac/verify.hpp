#ifndef TWISTJAC_VERIFY_HPP
#define TWISTJAC_VERIFY_HPP

#include "twistjac/expr.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace twistjac {

using Point = std::vector<double>;

/// Numeric side of every identity check.
struct SampleConfig {
    int samples = 25;
    std::uint64_t seed = 20240611;
    double tol = 1e-9;         // absolute, after dividing by 1 + max|term|
    double box = 1.0;          // points drawn from [-box, box]^n
    double guard = 1e-3;       // skip points this close to a denominator zero
};

enum class Verdict { SymbolicZero, SampledZero, Pass, Fail, Error };

[[nodiscard]] const char* to_string(Verdict v) noexcept;
[[nodiscard]] inline bool passed(Verdict v) noexcept { return v != Verdict::Fail && v != Verdict::Error; }

/// Deterministic points in the sample box.
[[nodiscard]] std::vector<Point> sample_points(int dim, const SampleConfig& cfg);

/// Outcome of a zero test on one scalar.
struct ZeroTest {
    Verdict verdict = Verdict::SymbolicZero;
    double max_residual = 0.0;   // normalized
    Point witness;               // set when verdict == Fail
    double witness_value = 0.0;
    int skipped = 0;             // sample points rejected (denominator guard or evaluation failure)
    std::vector<std::string> notes;
};

[[nodiscard]] ZeroTest zero_test(const Expr& e, const std::vector<Point>& samples, double tol, double guard = 1e-3);

/// Denominator factors of e rendered as "f != 0" assumptions.
[[nodiscard]] std::vector<std::string> denominator_assumptions(const Expr& e, const Chart& chart);

/// One named verdict inside a report.
struct CheckResult {
    std::string name;
    Verdict verdict = Verdict::SymbolicZero;
    double max_residual = 0.0;
    std::vector<std::string> assumptions;
    std::string witness;   // human-readable; empty unless failing
    std::string detail;
};

class Report {
public:
    Report() = default;
    explicit Report(std::string title) : title_(std::move(title)) {}

    void add(CheckResult r) { checks_.push_back(std::move(r)); }
    void append(const Report& other);
    void note(std::string s);

    [[nodiscard]] const std::string& title() const noexcept { return title_; }
    [[nodiscard]] const std::vector<CheckResult>& checks() const noexcept { return checks_; }
    [[nodiscard]] const std::vector<std::string>& notes() const noexcept { return notes_; }
    [[nodiscard]] bool passed() const;
    /// Worst verdict across checks (SymbolicZero < SampledZero < Pass < Fail < Error), SymbolicZero if empty.
    [[nodiscard]] Verdict overall() const;
    [[nodiscard]] double max_residual() const;
    [[nodiscard]] std::vector<std::string> assumptions() const;
    [[nodiscard]] const CheckResult* find(std::string_view name) const;
    [[nodiscard]] std::string summary() const;

private:
    std::string title_;
    std::vector<CheckResult> checks_;
    std::vector<std::string> notes_;
};

/// Folds many scalar zero tests into one named result.
class ResidualAccumulator {
public:
    ResidualAccumulator(std::string name, const Chart& chart, const std::vector<Point>& samples, double tol,
                        double guard = 1e-3);

    /// `label` names the component, e.g. "d/dx^d/dy".
    void add(const Expr& e, std::string_view label);
    void assume(std::string s);
    [[nodiscard]] CheckResult result() const;
    [[nodiscard]] bool passed() const { return ::twistjac::passed(verdict_); }

private:
    std::string name_;
    const Chart& chart_;
    const std::vector<Point>& samples_;
    double tol_;
    double guard_;
    Verdict verdict_ = Verdict::SymbolicZero;
    double max_residual_ = 0.0;
    std::vector<std::string> assumptions_;
    std::string witness_;
    int skipped_ = 0;
};

[[nodiscard]] std::string format_point(const Chart& chart, const Point& p);

}  // namespace twistjac

#endif  // TWISTJAC_VERIFY_HPP
