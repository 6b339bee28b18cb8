#pragma once

#include <optional>
#include <string>

#include "translab/domain.hpp"
#include "translab/sandbox.hpp"
#include "translab/trace.hpp"

namespace translab {

// Collects raw trace entries as tools execute. Stage and strategy context are
// ambient: the orchestrator sets them, tool invocations stamp them.
class TraceRecorder {
public:
    TraceRecorder() = default;
    TraceRecorder(std::string run_id, std::string config_fingerprint);

    void set_stage(std::optional<StageId> stage) { stage_ = stage; }
    void set_strategy(std::optional<std::string> strategy) { strategy_ = std::move(strategy); }
    void append(Tool tool, Json args, const ToolResult& result);

    const RawTrace& raw() const { return trace_; }

private:
    RawTrace trace_;
    std::optional<StageId> stage_;
    std::optional<std::string> strategy_;
};

// Validates args against the tool's fixed schema, executes inside the sandbox,
// and appends one entry to the recorder (when given). Never throws for tool
// failures; those surface as ToolResult{status=ERROR, error_code}.
ToolResult invoke(const ToolRequest& request, const Sandbox& sandbox, TraceRecorder* recorder);

// Schema check alone, as applied by invoke before execution.
// Returns an error code (kErrBadArgs) or empty string when valid.
std::string validate_tool_args(Tool tool, const Json& args);

// Glob dialect used by LIST_FILES: '*' within a path segment, '?' single
// non-separator character, '**' spans segments, '[...]' character class.
bool glob_match(const std::string& pattern, const std::string& path);

}  // namespace translab
