#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "translab/domain.hpp"
#include "translab/rational.hpp"
#include "translab/record.hpp"

namespace translab {

// Everything observable about one program execution on one test input.
struct ExecutionOutcome {
    int exit_code = -1;
    std::string stdout_bytes;
    std::string stderr_bytes;
    std::map<std::string, std::string> produced_files;  // relative to output dir
    bool timed_out = false;

    bool operator==(const ExecutionOutcome& o) const = default;
};

// Textual tolerance applied before comparison. Defaults follow the usual
// differential-harness convention; set all flags false for bit-exact mode.
struct NormalizationPolicy {
    bool normalize_newlines = true;        // CRLF -> LF
    bool strip_trailing_ws = true;         // per line
    bool strip_trailing_blank_lines = true;
    bool compare_stderr = false;
};

std::string normalize_text(const std::string& bytes, const NormalizationPolicy& policy);

// Runs the program once with the test's stdin/argv, cwd = workdir.
// Files that appear (or change) under workdir/output_dir are captured.
// Missing entry file throws HarnessError: that is a harness setup bug,
// not a program failure.
ExecutionOutcome execute_program(const ExecSpec& spec, const TestCase& test,
                                 const std::filesystem::path& workdir, double timeout_s);

// A timed-out outcome is never equal to anything, including itself.
bool outcomes_equal(const ExecutionOutcome& a, const ExecutionOutcome& b,
                    const NormalizationPolicy& policy);

// Eq of record: equal-outcome count over test count, exact.
// Throws HarnessError on empty test vectors or length mismatch.
Rational computational_accuracy(const std::vector<ExecutionOutcome>& generated,
                                const std::vector<ExecutionOutcome>& reference,
                                const NormalizationPolicy& policy);

Json encode_outcome(const ExecutionOutcome& o);
ExecutionOutcome decode_outcome(const Json& j);

// Runs every test against the reference program inside scratch_dir.
// Deterministic, so callers may compute once per program and reuse.
std::vector<ExecutionOutcome> execute_reference(const ProgramUnit& program,
                                                const std::filesystem::path& suite_dir,
                                                const std::filesystem::path& scratch_dir,
                                                double timeout_s);

struct EvalResult {
    std::optional<Rational> ca;
    int tests_total = 0;
    int tests_passed = 0;
    std::optional<ErrorClass> error;
};

// Scores the translation living in generated_dir against reference outcomes.
// Classification order: TIMEOUT beats RUNTIME_ERROR beats TEST_FAIL; a
// missing entry file scores 0 with COMPILE_FAIL.
EvalResult evaluate_translation(const ProgramUnit& program,
                                const std::filesystem::path& generated_dir,
                                const std::vector<ExecutionOutcome>& reference_outcomes,
                                const NormalizationPolicy& policy, double timeout_s);

// Same classification applied to outcomes the caller already holds.
EvalResult score_outcomes(const ProgramUnit& program,
                          const std::vector<ExecutionOutcome>& generated,
                          const std::vector<ExecutionOutcome>& reference_outcomes,
                          const NormalizationPolicy& policy);

// Success per the strict definition: no recorded error and CA exactly 1.
bool is_successful_run(const RunRecord& record);

struct CategoryCounts {
    int programs = 0;
    int executed = 0;
    int error = 0;
    int pass = 0;
    int fail = 0;
    int deleted = 0;
    int inspect = 0;
    int total = 0;

    bool operator==(const CategoryCounts& o) const = default;
};

struct HarnessReport {
    std::map<Category, CategoryCounts> rows;

    bool operator==(const HarnessReport& o) const = default;
};

// Aggregates one record per program (callers pick which). deleted/inspect
// come from the manifest, pass/fail from record test counts; the invariant
// pass + fail + deleted + inspect = total holds per row by construction.
HarnessReport build_harness_report(const std::vector<RunRecord>& records,
                                   const std::vector<ProgramUnit>& programs);

Json report_to_json(const HarnessReport& report);
HarnessReport report_from_json(const Json& j);
std::string report_to_csv(const HarnessReport& report);
HarnessReport report_from_csv(const std::string& csv);

}  // namespace translab
