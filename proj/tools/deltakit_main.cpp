// deltakit — exact certification of local delta-invariant lower bounds.
//
// Exit codes: 0 success; 2 expected-value or check mismatch (with --check);
// 3 invalid scenario; 4 internal invariant violation.

#include "CLI11.hpp"
#include "deltakit/report.hpp"
#include "deltakit/scenario.hpp"

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"deltakit: exact delta-invariant lower-bound engine"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "run a scenario file and print a report");
    std::string file;
    std::vector<std::string> tasks;
    std::string format = "json";
    bool check = false, oracle = false;
    run_cmd->add_option("file", file, "scenario JSON file")->required();
    run_cmd->add_option("--task", tasks, "run only the named tasks (repeatable)");
    run_cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "md", "csv"}));
    run_cmd->add_flag("--check", check, "run cross-checks and expected-value regression");
    run_cmd->add_flag("--oracle", oracle, "audit sweeps against the exhaustive Zariski oracle");

    CLI11_PARSE(app, argc, argv);

    try {
        dk::Scenario sc = dk::load_scenario(file);
        dk::RunOptions opt;
        opt.tasks = tasks;
        opt.check = check;
        opt.oracle = oracle;
        dk::Report rep = dk::run(sc, opt);

        if (format == "json")
            std::cout << dk::report_json(rep);
        else if (format == "md")
            std::cout << dk::report_markdown(rep);
        else
            std::cout << dk::report_csv(rep);

        if (rep.any_error) return 3;
        if (check && rep.any_mismatch) return 2;
        return 0;
    } catch (const dk::InvalidScenario& e) {
        std::cerr << "invalid scenario: " << e.what() << "\n";
        return 3;
    } catch (const std::logic_error& e) {
        std::cerr << "internal invariant violation: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
