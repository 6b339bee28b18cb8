#include <random>

#include "doctest.h"
#include "translab/errors.hpp"
#include "translab/plan.hpp"

using namespace translab;

namespace {

RunConfig config_with(bool persist, bool validate, bool test) {
    RunConfig c = default_run_config();
    c.flags["enable_persist"] = persist;
    c.flags["enable_validate"] = validate;
    c.flags["enable_test"] = test;
    return c;
}

// Independent recursive evaluator used as the oracle.
bool eval_oracle(const GatePredicate& g, const SystemState& s, const RunConfig& c) {
    switch (g.kind) {
        case GatePredicate::Kind::ALWAYS: return true;
        case GatePredicate::Kind::FILES_MODIFIED: return !s.modified_files.empty();
        case GatePredicate::Kind::FLAG_ENABLED: return c.flag(g.flag_name);
        case GatePredicate::Kind::ALL_OF: {
            for (const auto& ch : g.children)
                if (!eval_oracle(ch, s, c)) return false;
            return true;
        }
        case GatePredicate::Kind::ANY_OF: {
            for (const auto& ch : g.children)
                if (eval_oracle(ch, s, c)) return true;
            return false;
        }
    }
    return false;
}

GatePredicate random_gate(std::mt19937_64& rng, int depth) {
    const std::vector<std::string> flags = {"enable_persist", "enable_validate", "enable_test"};
    switch (depth > 0 ? rng() % 5 : rng() % 3) {
        case 0: return GatePredicate::always();
        case 1: return GatePredicate::files_modified();
        case 2: return GatePredicate::flag_enabled(flags[rng() % flags.size()]);
        default: {
            std::vector<GatePredicate> children;
            const std::size_t n = 1 + rng() % 3;
            for (std::size_t i = 0; i < n; ++i) children.push_back(random_gate(rng, depth - 1));
            return rng() % 2 ? GatePredicate::all_of(std::move(children))
                             : GatePredicate::any_of(std::move(children));
        }
    }
}

}  // namespace

TEST_CASE("the pipeline shape is fixed") {
    const StagePlan plan = build_stage_plan(config_with(true, true, true));
    REQUIRE(plan.stages.size() == 4);

    const Stage& apply = plan.stages[0];
    CHECK(apply.id == StageId::APPLY);
    CHECK(apply.gate == GatePredicate::always());
    CHECK(apply.strategies ==
          std::vector<std::string>{kStrategyExactPatch, kStrategyWholeFileRewrite});
    CHECK(apply.max_retries == 2);

    const Stage& persist = plan.stages[1];
    CHECK(persist.id == StageId::PERSIST);
    CHECK(persist.gate == GatePredicate::all_of({GatePredicate::flag_enabled("enable_persist"),
                                                 GatePredicate::files_modified()}));
    CHECK(persist.strategies == std::vector<std::string>{"git_commit"});
    CHECK(persist.max_retries == 0);

    const Stage& validate = plan.stages[2];
    CHECK(validate.id == StageId::VALIDATE);
    CHECK(validate.gate == GatePredicate::flag_enabled("enable_validate"));
    CHECK(validate.strategies == std::vector<std::string>{"syntax_check"});
    CHECK(validate.max_retries == 2);

    const Stage& test = plan.stages[3];
    CHECK(test.id == StageId::TEST);
    CHECK(test.gate == GatePredicate::flag_enabled("enable_test"));
    CHECK(test.strategies == std::vector<std::string>{"run_tests"});
    CHECK(test.max_retries == 0);
}

TEST_CASE("plans are pure functions of the config") {
    CHECK(build_stage_plan(config_with(true, true, true)) ==
          build_stage_plan(config_with(true, true, true)));
    // flag values gate execution, not plan structure
    CHECK(build_stage_plan(config_with(false, false, false)) ==
          build_stage_plan(config_with(true, true, true)));
}

TEST_CASE("gate truth table over flag and modification state") {
    SystemState clean;
    SystemState dirty;
    dirty.modified_files.insert("main.py");

    const StagePlan plan = build_stage_plan(config_with(true, true, true));
    const GatePredicate& persist_gate = plan.stages[1].gate;

    CHECK(evaluate_gate(persist_gate, dirty, config_with(true, true, true)));
    CHECK_FALSE(evaluate_gate(persist_gate, clean, config_with(true, true, true)));
    CHECK_FALSE(evaluate_gate(persist_gate, dirty, config_with(false, true, true)));
    CHECK_FALSE(evaluate_gate(persist_gate, clean, config_with(false, true, true)));

    CHECK(evaluate_gate(GatePredicate::always(), clean, config_with(false, false, false)));
}

TEST_CASE("undeclared flag is a config error, not false") {
    RunConfig c;  // no flags declared
    CHECK_THROWS_AS(evaluate_gate(GatePredicate::flag_enabled("enable_test"), SystemState{}, c),
                    ConfigError);
}

TEST_CASE("random gate trees agree with an independent evaluator") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 300; ++i) {
        const GatePredicate gate = random_gate(rng, 3);
        RunConfig c = config_with(rng() % 2 == 0, rng() % 2 == 0, rng() % 2 == 0);
        SystemState s;
        if (rng() % 2 == 0) s.modified_files.insert("f" + std::to_string(rng() % 3));
        CHECK(evaluate_gate(gate, s, c) == eval_oracle(gate, s, c));
    }
}
