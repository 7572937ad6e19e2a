#include "twistjac/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace twistjac {

const char* to_string(Verdict v) noexcept
{
    switch (v) {
    case Verdict::SymbolicZero: return "SymbolicZero";
    case Verdict::SampledZero: return "SampledZero";
    case Verdict::Pass: return "Pass";
    case Verdict::Fail: return "Fail";
    case Verdict::Error: return "Error";
    }
    return "?";
}

std::vector<Point> sample_points(int dim, const SampleConfig& cfg)
{
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(-cfg.box, cfg.box);
    std::vector<Point> pts(static_cast<std::size_t>(std::max(cfg.samples, 0)), Point(static_cast<std::size_t>(dim)));
    for (auto& p : pts)
        for (auto& x : p) x = u(rng);
    return pts;
}

namespace {

bool near_pole(const Expr& e, const Point& p, double guard)
{
    for (const auto& f : e.denominator()) {
        double v = f.poly.eval(p);
        if (!std::isfinite(v) || std::abs(v) < guard) return true;
    }
    return false;
}

}  // namespace

ZeroTest zero_test(const Expr& e, const std::vector<Point>& samples, double tol, double guard)
{
    ZeroTest z;
    if (e.is_zero()) return z;
    if (samples.empty()) {
        z.verdict = Verdict::Error;
        z.notes.emplace_back("expression is not symbolically zero and no sample points were given");
        return z;
    }
    int used = 0;
    double worst = -1.0;
    for (const auto& p : samples) {
        if (near_pole(e, p, guard)) {
            ++z.skipped;
            continue;
        }
        double mx = 0.0;
        double v = 0.0;
        try {
            v = e.eval_scaled(p, mx);
        } catch (const EvalError& err) {
            ++z.skipped;
            z.notes.emplace_back(std::string("sample skipped: ") + err.what());
            continue;
        }
        ++used;
        double r = std::abs(v) / (1.0 + mx);
        z.max_residual = std::max(z.max_residual, r);
        if (r > tol && r > worst) {
            worst = r;
            z.witness = p;
            z.witness_value = v;
        }
    }
    if (z.skipped > 0) z.notes.push_back(std::to_string(z.skipped) + " sample point(s) skipped near denominator zeros");
    if (used == 0)
        z.verdict = Verdict::Error;
    else
        z.verdict = worst >= 0.0 ? Verdict::Fail : Verdict::SampledZero;
    return z;
}

std::vector<std::string> denominator_assumptions(const Expr& e, const Chart& chart)
{
    std::vector<std::string> out;
    for (const auto& f : e.denominator()) out.push_back(f.poly.to_string(chart.coords()) + " != 0");
    return out;
}

std::string format_point(const Chart& chart, const Point& p)
{
    std::ostringstream os;
    os.precision(6);
    os << "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) os << ", ";
        os << chart.coords()[i] << "=" << p[i];
    }
    os << ")";
    return os.str();
}

// ---------------------------------------------------------------------------

void Report::append(const Report& other)
{
    for (const auto& c : other.checks_) {
        CheckResult r = c;
        if (!other.title_.empty()) r.name = other.title_ + "/" + r.name;
        checks_.push_back(std::move(r));
    }
    notes_.insert(notes_.end(), other.notes_.begin(), other.notes_.end());
}

void Report::note(std::string s)
{
    if (std::find(notes_.begin(), notes_.end(), s) == notes_.end()) notes_.push_back(std::move(s));
}

bool Report::passed() const
{
    return std::all_of(checks_.begin(), checks_.end(), [](const CheckResult& c) { return twistjac::passed(c.verdict); });
}

Verdict Report::overall() const
{
    Verdict v = Verdict::SymbolicZero;
    for (const auto& c : checks_) v = std::max(v, c.verdict);
    return v;
}

double Report::max_residual() const
{
    double m = 0.0;
    for (const auto& c : checks_) m = std::max(m, c.max_residual);
    return m;
}

std::vector<std::string> Report::assumptions() const
{
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& c : checks_)
        for (const auto& a : c.assumptions)
            if (seen.insert(a).second) out.push_back(a);
    return out;
}

const CheckResult* Report::find(std::string_view name) const
{
    for (const auto& c : checks_)
        if (c.name == name) return &c;
    return nullptr;
}

std::string Report::summary() const
{
    std::ostringstream os;
    if (!title_.empty()) os << "== " << title_ << "\n";
    for (const auto& c : checks_) {
        os << "  " << (twistjac::passed(c.verdict) ? "ok   " : "FAIL ") << c.name << ": " << to_string(c.verdict);
        if (c.max_residual > 0) os << " (residual " << c.max_residual << ")";
        if (!c.witness.empty()) os << " witness " << c.witness;
        if (!c.detail.empty()) os << " -- " << c.detail;
        os << "\n";
    }
    for (const auto& n : notes_) os << "  note: " << n << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------

ResidualAccumulator::ResidualAccumulator(std::string name, const Chart& chart, const std::vector<Point>& samples,
                                         double tol, double guard)
    : name_(std::move(name)), chart_(chart), samples_(samples), tol_(tol), guard_(guard)
{
}

void ResidualAccumulator::assume(std::string s)
{
    if (std::find(assumptions_.begin(), assumptions_.end(), s) == assumptions_.end())
        assumptions_.push_back(std::move(s));
}

void ResidualAccumulator::add(const Expr& e, std::string_view label)
{
    if (e.is_zero()) return;
    ZeroTest z = zero_test(e, samples_, tol_, guard_);
    for (auto& a : denominator_assumptions(e, chart_)) assume(std::move(a));
    skipped_ += z.skipped;
    max_residual_ = std::max(max_residual_, z.max_residual);
    if (z.verdict == Verdict::Fail || z.verdict == Verdict::Error) {
        if (witness_.empty()) {
            std::ostringstream os;
            os << "[" << label << "] ";
            if (z.verdict == Verdict::Fail)
                os << e.to_string(chart_) << " = " << z.witness_value << " at " << format_point(chart_, z.witness);
            else
                os << e.to_string(chart_) << " could not be evaluated at any sample";
            witness_ = os.str();
        }
    }
    verdict_ = std::max(verdict_, z.verdict);
}

CheckResult ResidualAccumulator::result() const
{
    CheckResult r;
    r.name = name_;
    r.verdict = verdict_;
    r.max_residual = max_residual_;
    r.assumptions = assumptions_;
    r.witness = witness_;
    if (skipped_ > 0) r.detail = std::to_string(skipped_) + " sample evaluation(s) skipped near denominator zeros";
    return r;
}

}  // namespace twistjac
