#pragma once

#include <optional>
#include <string>

#include "translab/domain.hpp"
#include "translab/rational.hpp"
#include "translab/trace.hpp"

namespace translab {

// Agentic loop accounting. `accepted_tokens` counts only accepted steps and
// is what the budget invariant constrains; the ledger keeps the real spend,
// including a final response that was rejected for exceeding the budget.
struct AgenticSummary {
    int steps = 0;
    TokenUsage accepted_tokens;
    std::string termination_reason;  // MODEL_FINISH | STEP_LIMIT | TOKEN_BUDGET | FATAL_TOOL_ERROR

    bool operator==(const AgenticSummary& o) const = default;
};

// One complete orchestrated run.
struct RunRecord {
    std::string run_id;
    std::string program_id;
    Category category = Category::OTHER;
    RunConfig config;
    ToolCallTrace trace;
    std::map<StageId, StageOutcome> stage_outcomes;
    TokenLedger ledger;
    std::optional<Rational> ca;       // absent when TEST never ran
    std::optional<int> tests_total;
    std::optional<int> tests_passed;
    bool successful = false;
    double wall_time_s = 0.0;         // excluded from reproducibility comparisons
    std::optional<ErrorClass> error;
    std::optional<AgenticSummary> agentic;
};

inline constexpr const char* kAgenticModelFinish = "MODEL_FINISH";
inline constexpr const char* kAgenticStepLimit = "STEP_LIMIT";
inline constexpr const char* kAgenticTokenBudget = "TOKEN_BUDGET";
inline constexpr const char* kAgenticFatalToolError = "FATAL_TOOL_ERROR";

}  // namespace translab
