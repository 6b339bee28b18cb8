#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "translab/batch.hpp"
#include "translab/errors.hpp"
#include "translab/fixtures.hpp"
#include "translab/rational.hpp"

namespace {

std::vector<translab::Mode> parse_modes(const std::string& mode) {
    using translab::Mode;
    if (mode == "deterministic") return {Mode::DETERMINISTIC};
    if (mode == "agentic") return {Mode::AGENTIC};
    return {Mode::DETERMINISTIC, Mode::AGENTIC};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"COBOL-to-Python translation runner and evaluation harness"};
    app.require_subcommand(1);

    translab::TranslateSpec tr;
    std::string tr_mode = "both";
    auto* translate = app.add_subcommand("translate", "Run the translation matrix");
    translate->add_option("--suite", tr.suite_manifest, "Suite manifest (manifest.json)")
        ->required();
    translate->add_option("--config", tr.config_path, "Run config JSON")->required();
    translate->add_option("--mode", tr_mode, "deterministic | agentic | both")
        ->check(CLI::IsMember({"deterministic", "agentic", "both"}));
    translate->add_option("--repeats", tr.repeats, "Runs per (mode, program)")
        ->check(CLI::PositiveNumber);
    translate->add_option("--seed-base", tr.seed_base, "Seed for repeat 0; repeat k adds k");
    translate->add_option("--parallel", tr.parallelism, "Worker threads (0 = auto)");
    translate->add_option("--out", tr.out_dir, "Output directory")->required();

    translab::ReportSpec rp;
    std::string alpha_text;
    auto* report = app.add_subcommand("report", "Aggregate run logs into metrics tables");
    report->add_option("--runs", rp.run_logs, "Run log JSONL (repeatable)")->required();
    report->add_option("--suite", rp.suite_manifest,
                       "Suite manifest for deleted/inspect annotations");
    report->add_option("--prices", rp.prices_path, "Price table JSON");
    report->add_option("--alpha", alpha_text, "CVaR tail mass, e.g. 0.1 or 1/10");
    report->add_option("--out", rp.out_dir, "Output directory")->required();

    translab::CompareSpec cmp;
    auto* compare = app.add_subcommand("compare-traces", "Check trace agreement across repeats");
    compare->add_option("--runs", cmp.run_logs, "Run log JSONL (repeatable)")->required();

    std::string fixtures_out;
    auto* init = app.add_subcommand("init-fixtures", "Materialize the bundled example suite");
    init->add_option("--out", fixtures_out, "Directory to create the suite in")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (translate->parsed()) {
            tr.modes = parse_modes(tr_mode);
            return translab::run_translate(tr, std::cerr);
        }
        if (report->parsed()) {
            if (!alpha_text.empty()) rp.metrics.alpha = translab::Rational::from_string(alpha_text);
            return translab::run_report(rp, std::cerr);
        }
        if (compare->parsed()) {
            return translab::run_compare_traces(cmp, std::cout, std::cerr);
        }
        if (init->parsed()) {
            translab::init_fixtures(fixtures_out);
            std::cout << "suite written to " << fixtures_out << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
