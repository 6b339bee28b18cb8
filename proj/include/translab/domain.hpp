#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace translab {

using Json = nlohmann::json;

// NIST COBOL85 module categories plus OTHER for anything unrecognized.
enum class Category { NC, SM, IC, SQ, IX, ST, SG, OB, IF, RL, CM, DB, RW, OTHER };

enum class Mode { DETERMINISTIC, AGENTIC };

enum class StageId { APPLY, PERSIST, VALIDATE, TEST };

enum class StageOutcome { PASSED, FAILED, SKIPPED };

enum class Tool { READ_FILE, WRITE_FILE, LIST_FILES, WEB_SCRAPE, RUN_COMMAND, GIT };

// Failure classification for a run. The harness only distinguishes runtime
// errors from test failures; the rest exist so batch reports can say why a
// run produced nothing to test.
enum class ErrorClass { COMPILE_FAIL, RUNTIME_ERROR, TEST_FAIL, TIMEOUT, BUDGET_EXHAUSTED, TOOL_ERROR };

std::string to_string(Category v);
std::string to_string(Mode v);
std::string to_string(StageId v);
std::string to_string(StageOutcome v);
std::string to_string(Tool v);
std::string to_string(ErrorClass v);

Category category_from_string(const std::string& s);  // unknown -> OTHER
Mode mode_from_string(const std::string& s);
StageId stage_id_from_string(const std::string& s);
StageOutcome stage_outcome_from_string(const std::string& s);
Tool tool_from_string(const std::string& s);
ErrorClass error_class_from_string(const std::string& s);

// Deterministic gate predicates: a closed tree language with no negation,
// evaluated purely over (SystemState, RunConfig). Purity is what makes the
// fixed pipeline's branching machine-checkable.
struct GatePredicate {
    enum class Kind { ALWAYS, FILES_MODIFIED, FLAG_ENABLED, ALL_OF, ANY_OF };

    Kind kind = Kind::ALWAYS;
    std::string flag_name;                 // FLAG_ENABLED only
    std::vector<GatePredicate> children;   // ALL_OF / ANY_OF only

    static GatePredicate always();
    static GatePredicate files_modified();
    static GatePredicate flag_enabled(std::string flag);
    static GatePredicate all_of(std::vector<GatePredicate> children);
    static GatePredicate any_of(std::vector<GatePredicate> children);

    bool operator==(const GatePredicate& o) const;
};

inline constexpr int kMaxRetryCeiling = 5;

struct Stage {
    StageId id = StageId::APPLY;
    GatePredicate gate;
    std::vector<std::string> strategies;
    int max_retries = 0;

    bool operator==(const Stage& o) const = default;
};

struct StagePlan {
    std::vector<Stage> stages;
    double global_timeout_s = 600.0;

    bool operator==(const StagePlan& o) const = default;
};

// Observable state a run accumulates. Only the orchestrator that owns the
// run mutates it; gates read it.
struct SystemState {
    std::set<std::string> modified_files;  // workspace-relative paths
    std::string workspace_root;
    std::map<StageId, StageOutcome> stage_outcomes;
};

struct BackendSpec {
    std::string kind;        // scripted | stub | http
    std::string model_id;
    std::string script_path; // scripted
    std::string base_url;    // http
    Json params = Json::object();  // backend-specific knobs (stub distribution etc.)

    bool operator==(const BackendSpec& o) const;
};

// The experiment's controlled configuration. Mode is the only field the
// experiment varies; everything else must be identical across modes.
struct RunConfig {
    Mode mode = Mode::DETERMINISTIC;
    std::uint64_t seed = 0;
    std::map<std::string, bool> flags;  // enable_persist, enable_validate, enable_test
    std::string prompts = "default-v1";
    BackendSpec backend;
    int max_agentic_steps = 32;
    std::int64_t token_budget = 1'000'000;
    double command_timeout_s = 10.0;
    double test_timeout_s = 10.0;

    bool operator==(const RunConfig& o) const;
    bool flag(const std::string& name) const;  // throws ConfigError when undeclared
};

RunConfig default_run_config();

struct TestCase {
    std::string id;
    std::string stdin_payload;  // raw bytes
    std::vector<std::string> argv;
    std::vector<std::pair<std::string, std::string>> expected_artifacts;  // (path, bytes)

    bool operator==(const TestCase& o) const = default;
};

// How to execute a program form: interpreter argv template ("{entry}" is
// replaced by the entry file), plus the directory the program is declared
// to write outputs into.
struct ExecSpec {
    std::vector<std::string> interpreter{"python3", "{entry}"};
    std::string entry;
    std::string output_dir = "out";

    bool operator==(const ExecSpec& o) const = default;
};

struct ProgramUnit {
    std::string id;
    Category category = Category::OTHER;
    std::string source_path;     // legacy source, as given in the manifest
    std::string reference_path;  // reference executable form
    std::vector<TestCase> tests;
    ExecSpec reference_exec;     // entry resolved against the manifest location
    ExecSpec target_exec;        // where the translation is expected to land
    // Suite-manifest annotations (NIST-style "deleted"/"inspect" test counts).
    int deleted = 0;
    int inspect = 0;

    bool operator==(const ProgramUnit& o) const = default;
};

struct TokenUsage {
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;

    std::int64_t total() const { return prompt_tokens + completion_tokens; }
    TokenUsage& operator+=(const TokenUsage& o) {
        prompt_tokens += o.prompt_tokens;
        completion_tokens += o.completion_tokens;
        return *this;
    }
    bool operator==(const TokenUsage& o) const = default;
};

// Per-run token accounting: one entry per model call, summable totals.
struct TokenLedger {
    struct Call {
        std::string model_id;
        TokenUsage usage;
        bool operator==(const Call& o) const = default;
    };
    std::vector<Call> calls;

    void record(std::string model_id, TokenUsage usage) {
        calls.push_back({std::move(model_id), usage});
    }
    TokenUsage totals() const {
        TokenUsage t;
        for (const auto& c : calls) t += c.usage;
        return t;
    }
    bool operator==(const TokenLedger& o) const = default;
};

struct ToolRequest {
    Tool tool = Tool::READ_FILE;
    Json args = Json::object();

    bool operator==(const ToolRequest& o) const;
};

struct ToolResult {
    enum class Status { OK, ERROR };

    Status status = Status::OK;
    std::string error_code;        // PATH_ESCAPE, BAD_ARGS, TIMEOUT, ...
    std::string stdout_bytes;
    std::string stderr_bytes;
    std::optional<int> exit_code;
    Json payload = Json::object();
    double duration_s = 0.0;

    bool ok() const { return status == Status::OK; }
};

// Tool error codes.
inline constexpr const char* kErrPathEscape = "PATH_ESCAPE";
inline constexpr const char* kErrBadArgs = "BAD_ARGS";
inline constexpr const char* kErrTimeout = "TIMEOUT";
inline constexpr const char* kErrNetworkDisabled = "NETWORK_DISABLED";
inline constexpr const char* kErrNotFound = "NOT_FOUND";
inline constexpr const char* kErrIo = "IO_ERROR";
inline constexpr const char* kErrCommandNotAllowed = "COMMAND_NOT_ALLOWED";
inline constexpr const char* kErrExecFail = "EXEC_FAIL";

}  // namespace translab
