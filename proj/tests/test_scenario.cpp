#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "twistjac/scenario.hpp"

#include <string>

using namespace twistjac;

namespace {

std::string corpus(const std::string& name) { return std::string(TWISTJAC_SCENARIOS) + "/" + name + ".json"; }

std::string where_of(const std::string& text)
{
    try {
        (void)Scenario::parse(text);
    } catch (const ScenarioError& e) {
        return e.where();
    }
    return "parsed";
}

bool all_pass(const std::vector<CheckOutcome>& v)
{
    for (const auto& o : v)
        if (!o.passed()) return false;
    return true;
}

}  // namespace

TEST_CASE("empty scenario passes")
{
    const Scenario sc = Scenario::parse(R"({"charts": {}, "structures": {}, "checks": []})");
    const auto out = sc.run();
    CHECK(out.empty());
    CHECK(to_jsonl(out).empty());
}

TEST_CASE("schema violations carry their position")
{
    CHECK(where_of("{\"charts\": {\n  \"R3\": [\"x\", }") == "line 2, column 15");
    CHECK(where_of(R"({"charts": {"R3": "xyz"}})") == "/charts/R3");
    CHECK(where_of(R"({"charts": {"R3": ["x","y","z"]},
                      "structures": {"c": {"kind": "contact", "chart": "R4", "theta": {}}}})") == "/structures/c/chart");
    CHECK(where_of(R"({"charts": {"R3": ["x","y","z"]},
                      "structures": {"c": {"kind": "contact", "chart": "R3", "theta": {"dz": "1+"}}}})") ==
          "/structures/c/theta/dz");
    CHECK(where_of(R"({"charts": {"R3": ["x","y","z"]},
                      "structures": {"c": {"kind": "sheaf", "chart": "R3"}}})") == "/structures/c/kind");
    CHECK(where_of(R"({"checks": [{"check": "contact", "object": "nowhere"}]})") == "/checks/0/object");
    CHECK(where_of(R"({"checks": [{"check": "teleport", "object": "x"}]})") == "/checks/0/check");
    CHECK(where_of(R"({"bogus": 1})") == "/bogus");
}

TEST_CASE("precondition failures are reported and the suite continues")
{
    const Scenario sc = Scenario::parse(R"({
      "charts": {"R2": ["x", "p"], "R3": ["x", "y", "z"]},
      "structures": {
        "even": {"kind": "contact", "chart": "R2", "theta": {"dx": "p"}},
        "g": {"kind": "groupoid", "pair_of": "even"},
        "std": {"kind": "contact", "chart": "R3", "theta": {"dz": "1", "dx": "-y"}}
      },
      "checks": [
        {"check": "multiplicativity", "object": "g"},
        {"check": "homogeneous", "object": "std"},
        {"check": "contact", "object": "std", "name": "still runs"}
      ]})");
    const auto out = sc.run();
    REQUIRE(out.size() == 3);
    CHECK(out[0].verdict() == Verdict::Error);
    CHECK(out[0].report.checks()[0].witness.find("odd-dimensional") != std::string::npos);
    CHECK(out[1].passed());   // a contact structure is poissonized on demand
    CHECK(out[2].name == "still runs");
    CHECK(out[2].passed());
}

TEST_CASE("corpus scenarios")
{
    for (const char* name : {"std-contact", "twisted-r3", "std-jacobi"}) {
        CAPTURE(name);
        const auto out = Scenario::load(corpus(name)).run();
        INFO(format_outcomes(out));
        CHECK(all_pass(out));
    }
    const auto neg = Scenario::load(corpus("negative-controls")).run();
    REQUIRE(neg.size() == 4);
    for (const auto& o : neg) {
        CAPTURE(o.name);
        CHECK(o.verdict() == Verdict::Fail);
        bool witnessed = false;
        for (const auto& c : o.report.checks()) witnessed |= c.verdict == Verdict::Fail && !c.witness.empty();
        CHECK(witnessed);
    }
    CHECK(neg[1].report.find("r(gh) = r(g) + r(h)")->verdict == Verdict::Fail);
}

TEST_CASE("machine-readable reports are deterministic")
{
    const Scenario sc = Scenario::load(corpus("twisted-r3"));
    RunOptions opts;
    opts.deterministic = true;
    const std::string a = to_jsonl(sc.run(opts), true);
    const std::string b = to_jsonl(Scenario::load(corpus("twisted-r3")).run(opts), true);
    CHECK(a == b);
    const Json first = Json::parse(a.substr(0, a.find('\n')));
    for (const char* key : {"name", "verdict", "max_residual", "assumptions", "ms"}) CHECK(first.contains(key));

    opts.seed = 7;
    const std::string c = to_jsonl(sc.run(opts), true);
    CHECK(c == to_jsonl(sc.run(opts), true));
}

TEST_CASE("derive renders and round-trips")
{
    const Scenario sc = Scenario::load(corpus("std-contact"));
    const Json reeb = sc.derive("std-contact", "reeb");
    CHECK(reeb["structures"]["std-contact.reeb"]["components"] == Json{{"d/dz", "1"}});

    const Scenario jac = Scenario::load(corpus("std-jacobi"));
    const Json H = jac.derive("std-jacobi", "poissonize");
    const Json& h = H["structures"]["std-jacobi.poissonize"];
    CHECK(H["charts"][h["chart"].get<std::string>()] == Json{"x", "y", "z", "s"});
    CHECK(h["Z"] == Json{{"d/ds", "1"}});
    CHECK(h["Lambda"]["d/dx^d/dy"] == "exp(-s)");

    const Scenario tw = Scenario::load(corpus("twisted-r3"));
    for (const auto& c : constructions()) {
        CAPTURE(c);
        const Json doc = tw.derive("twisted-r3", c);
        const Scenario back = Scenario::parse(doc.dump());
        const auto out = back.run();
        CHECK_FALSE(out.empty());
        CHECK(all_pass(out));
        // printing the re-parsed object gives the same text
        const std::string derived = "twisted-r3." + c;
        if (c == "pair-groupoid") {
            CHECK(back.derive(derived, "suspend")["structures"][derived + ".suspend"] ==
                  tw.derive("pair", "suspend")["structures"]["pair.suspend"]);
        }
    }
    const Json G = tw.derive("twisted-r3", "pair-groupoid");
    const Json& g = G["structures"]["twisted-r3.pair-groupoid"];
    CHECK(G["charts"][g["total"].get<std::string>()].size() == 7);
    CHECK(g["base_contact"] == "twisted-r3");

    CHECK_THROWS((void)tw.derive("twisted-r3", "blow-up"));
    CHECK_THROWS((void)jac.derive("std-jacobi", "reeb"));
}
