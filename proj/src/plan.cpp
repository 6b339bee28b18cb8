#include "translab/plan.hpp"

#include "translab/errors.hpp"

namespace translab {

StagePlan build_stage_plan(const RunConfig& config) {
    if (config.mode != Mode::DETERMINISTIC) {
        throw ConfigError("build_stage_plan requires DETERMINISTIC mode");
    }
    StagePlan plan;
    plan.global_timeout_s = 600.0;

    Stage apply;
    apply.id = StageId::APPLY;
    apply.gate = GatePredicate::always();
    apply.strategies = {kStrategyExactPatch, kStrategyWholeFileRewrite};
    apply.max_retries = 2;
    plan.stages.push_back(std::move(apply));

    Stage persist;
    persist.id = StageId::PERSIST;
    persist.gate = GatePredicate::all_of(
        {GatePredicate::flag_enabled("enable_persist"), GatePredicate::files_modified()});
    persist.strategies = {"git_commit"};
    // Re-running a failed commit cannot change its inputs, so no retries.
    persist.max_retries = 0;
    plan.stages.push_back(std::move(persist));

    Stage validate;
    validate.id = StageId::VALIDATE;
    validate.gate = GatePredicate::flag_enabled("enable_validate");
    validate.strategies = {"syntax_check"};
    validate.max_retries = 2;
    plan.stages.push_back(std::move(validate));

    Stage test;
    test.id = StageId::TEST;
    test.gate = GatePredicate::flag_enabled("enable_test");
    test.strategies = {"run_tests"};
    // The final evaluation is measured once; a deterministic rerun would
    // reproduce the same CA.
    test.max_retries = 0;
    plan.stages.push_back(std::move(test));

    for (const auto& stage : plan.stages) {
        if (stage.max_retries < 0 || stage.max_retries > kMaxRetryCeiling) {
            throw ConfigError("stage retry bound outside configured ceiling");
        }
    }
    return plan;
}

bool evaluate_gate(const GatePredicate& gate, const SystemState& state, const RunConfig& config) {
    switch (gate.kind) {
        case GatePredicate::Kind::ALWAYS:
            return true;
        case GatePredicate::Kind::FILES_MODIFIED:
            return !state.modified_files.empty();
        case GatePredicate::Kind::FLAG_ENABLED:
            return config.flag(gate.flag_name);
        case GatePredicate::Kind::ALL_OF:
            for (const auto& child : gate.children) {
                if (!evaluate_gate(child, state, config)) return false;
            }
            return true;
        case GatePredicate::Kind::ANY_OF:
            for (const auto& child : gate.children) {
                if (evaluate_gate(child, state, config)) return true;
            }
            return false;
    }
    return false;
}

}  // namespace translab
