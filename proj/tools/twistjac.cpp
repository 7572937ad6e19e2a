// twistjac: run scenario check suites, or derive structures in scenario syntax.
#include "twistjac/scenario.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

using namespace twistjac;

int main(int argc, char** argv)
{
    CLI::App app{"twisted Jacobi / contact / groupoid verification"};
    app.require_subcommand(1);

    std::string scenario_path;
    RunOptions opts;
    double tol = 0;
    int samples = 0;
    std::uint64_t seed = 0;
    std::string jsonl_path;
    bool quiet = false;

    CLI::App* check = app.add_subcommand("check", "run the checks of a scenario");
    check->add_option("scenario", scenario_path, "scenario JSON file")->required()->check(CLI::ExistingFile);
    auto* tol_opt = check->add_option("--tol", tol, "zero-test tolerance")->check(CLI::PositiveNumber);
    auto* samples_opt = check->add_option("--samples", samples, "sample points per check")->check(CLI::PositiveNumber);
    auto* seed_opt = check->add_option("--seed", seed, "sampling seed");
    check->add_option("--json", jsonl_path, "write one JSON line per check to this file ('-' for stdout)");
    check->add_flag("--deterministic", opts.deterministic, "report 0 ms so repeated runs are byte-identical");
    check->add_flag("-q,--quiet", quiet, "no human-readable report");

    std::string object, construction;
    CLI::App* derive = app.add_subcommand("derive", "print a derived structure as a scenario");
    derive->add_option("scenario", scenario_path, "scenario JSON file")->required()->check(CLI::ExistingFile);
    derive->add_option("object", object, "structure name")->required();
    derive->add_option("construction", construction, "reeb | contact-bivector | jacobi | poissonize | pair-groupoid | suspend")
        ->required()
        ->check(CLI::IsMember(constructions()));

    CLI11_PARSE(app, argc, argv);

    try {
        const Scenario sc = Scenario::load(scenario_path);
        if (*derive) {
            std::cout << sc.derive(object, construction).dump(2) << "\n";
            return 0;
        }
        if (*tol_opt) opts.tol = tol;
        if (*samples_opt) opts.samples = samples;
        if (*seed_opt) opts.seed = seed;
        const auto outcomes = sc.run(opts);
        if (!quiet) std::cout << format_outcomes(outcomes, opts.deterministic);
        if (!jsonl_path.empty()) {
            const std::string lines = to_jsonl(outcomes, opts.deterministic);
            if (jsonl_path == "-") {
                std::cout << lines;
            } else {
                std::ofstream out(jsonl_path);
                if (!out) {
                    std::cerr << "cannot write " << jsonl_path << "\n";
                    return 2;
                }
                out << lines;
            }
        }
        for (const auto& o : outcomes)
            if (!o.passed()) return 1;
        return 0;
    } catch (const ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
