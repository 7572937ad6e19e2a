#ifndef TWISTJAC_SCENARIO_HPP
#define TWISTJAC_SCENARIO_HPP

#include "twistjac/apath.hpp"
#include "twistjac/groupoid.hpp"

#include "json.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace twistjac {

using Json = nlohmann::ordered_json;

/// Malformed scenario; `where` is a JSON pointer or a line/column position.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::string where, const std::string& what)
        : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
    [[nodiscard]] const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

/// Anything a scenario can name.
using ScenarioObject = std::variant<TwistedJacobi, TwistedContact, HomTwistedPoisson, GroupoidModel,
                                    SuspendedModel, APath, MultiVector>;

/// Command-line overrides; per-check values still win.
struct RunOptions {
    std::optional<double> tol;
    std::optional<int> samples;
    std::optional<std::uint64_t> seed;
    bool deterministic = false;   // report ms as 0 so reports are byte-identical across runs
};

struct CheckOutcome {
    std::string name;
    std::string kind;
    Report report;
    double ms = 0.0;
    [[nodiscard]] Verdict verdict() const { return report.overall(); }
    [[nodiscard]] bool passed() const { return ::twistjac::passed(verdict()); }
};

class Scenario {
public:
    /// Parses and validates; expression strings are parsed here, expensive constructions on first use.
    [[nodiscard]] static Scenario parse(const std::string& text);
    [[nodiscard]] static Scenario load(const std::string& path);

    [[nodiscard]] ChartPtr chart(const std::string& name) const;
    /// Builds (once) and returns a named object; throws what the construction throws.
    [[nodiscard]] const ScenarioObject& object(const std::string& name) const;
    [[nodiscard]] const std::vector<std::string>& object_names() const noexcept { return names_; }
    [[nodiscard]] std::size_t check_count() const noexcept { return checks_.size(); }

    /// Runs the checks in declaration order. Failures inside a check become Error verdicts.
    [[nodiscard]] std::vector<CheckOutcome> run(const RunOptions& opts = {}) const;

    /// Scenario document holding `object`, the derived object and checks that re-verify it.
    [[nodiscard]] Json derive(const std::string& object, const std::string& construction) const;

    struct Entry;

private:
    Scenario() = default;

    std::map<std::string, ChartPtr> charts_;
    std::vector<std::string> chart_order_;
    std::vector<std::string> names_;
    std::shared_ptr<std::map<std::string, Entry>> entries_;
    std::vector<std::pair<std::string, Json>> checks_;   // pointer, def
    SampleConfig defaults_;
};

/// Names accepted in "check" fields.
[[nodiscard]] std::vector<std::string> check_kinds();
/// Names accepted by derive.
[[nodiscard]] std::vector<std::string> constructions();

/// One JSON object per line: name, verdict, max_residual, assumptions, ms (and witness when failing).
[[nodiscard]] std::string to_jsonl(const std::vector<CheckOutcome>& outcomes, bool deterministic = false);
/// Human-readable listing; failing checks show their witnesses, all checks their assumptions.
[[nodiscard]] std::string format_outcomes(const std::vector<CheckOutcome>& outcomes, bool deterministic = false);

}  // namespace twistjac

#endif  // TWISTJAC_SCENARIO_HPP
