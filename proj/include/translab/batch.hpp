#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "translab/domain.hpp"
#include "translab/metrics.hpp"

namespace translab {

struct Suite {
    std::filesystem::path dir;          // manifest's directory
    std::filesystem::path fixture_dir;  // resolved; empty when the manifest names none
    std::vector<ProgramUnit> programs;
};

// Throws SchemaError on malformed manifests (including duplicate ids) and
// ConfigError when the file cannot be read.
Suite load_suite(const std::filesystem::path& manifest_path);

// Decodes the config and fails fast (ConfigError) when any of the three
// enable_* gate flags is absent, so both modes see a fully specified plan.
RunConfig load_run_config(const std::filesystem::path& config_path);

struct TranslateSpec {
    std::filesystem::path suite_manifest;
    std::filesystem::path config_path;
    std::vector<Mode> modes;
    int repeats = 1;
    std::int64_t seed_base = 0;
    int parallelism = 0;  // 0 -> min(hardware threads, 8)
    std::filesystem::path out_dir;
};

// Runs the full mode x program x repeat matrix. Writes one JSONL log per
// mode (runs-<mode>.jsonl) plus per-run model transcripts under
// transcripts/. Run seeds follow seed_base + repeat index, so repeat k uses
// the same seed in every mode. Record order in each log is (program, repeat)
// by construction regardless of parallelism.
// Exit status: 0 matrix completed and logs written (failing runs are data,
// recorded in the log, not an exit condition); 2 setup error, nothing written.
int run_translate(const TranslateSpec& spec, std::ostream& err);

struct ReportSpec {
    std::vector<std::filesystem::path> run_logs;
    std::optional<std::filesystem::path> suite_manifest;
    std::optional<std::filesystem::path> prices_path;
    std::filesystem::path out_dir;
    MetricsConfig metrics;
};

// Writes metrics.csv / metrics.json over all records, and per mode a
// harness report (harness-<mode>.csv/.json) built from the best-CA record
// of each program. Without a suite manifest, categories come from the
// records and deleted/inspect counts are zero. Empty logs still produce
// header-only outputs. Exit status: 0 ok, 2 unreadable or malformed input.
int run_report(const ReportSpec& spec, std::ostream& err);

struct CompareSpec {
    std::vector<std::filesystem::path> run_logs;
};

// Groups records by (program, mode) and prints a JSON determinism summary:
// per group the distinct canonical trace hashes and every pairwise
// divergence point. Exit status: 0 all comparable groups agree, 1 some
// group diverged, 2 unreadable or malformed input.
int run_compare_traces(const CompareSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace translab
