#include "translab/domain.hpp"

#include "translab/errors.hpp"

namespace translab {

std::string to_string(Category v) {
    switch (v) {
        case Category::NC: return "NC";
        case Category::SM: return "SM";
        case Category::IC: return "IC";
        case Category::SQ: return "SQ";
        case Category::IX: return "IX";
        case Category::ST: return "ST";
        case Category::SG: return "SG";
        case Category::OB: return "OB";
        case Category::IF: return "IF";
        case Category::RL: return "RL";
        case Category::CM: return "CM";
        case Category::DB: return "DB";
        case Category::RW: return "RW";
        case Category::OTHER: return "OTHER";
    }
    return "OTHER";
}

Category category_from_string(const std::string& s) {
    static const std::map<std::string, Category> table = {
        {"NC", Category::NC}, {"SM", Category::SM}, {"IC", Category::IC}, {"SQ", Category::SQ},
        {"IX", Category::IX}, {"ST", Category::ST}, {"SG", Category::SG}, {"OB", Category::OB},
        {"IF", Category::IF}, {"RL", Category::RL}, {"CM", Category::CM}, {"DB", Category::DB},
        {"RW", Category::RW}, {"OTHER", Category::OTHER}};
    auto it = table.find(s);
    return it == table.end() ? Category::OTHER : it->second;
}

std::string to_string(Mode v) { return v == Mode::DETERMINISTIC ? "DETERMINISTIC" : "AGENTIC"; }

Mode mode_from_string(const std::string& s) {
    if (s == "DETERMINISTIC") return Mode::DETERMINISTIC;
    if (s == "AGENTIC") return Mode::AGENTIC;
    throw SchemaError("unknown mode: " + s);
}

std::string to_string(StageId v) {
    switch (v) {
        case StageId::APPLY: return "APPLY";
        case StageId::PERSIST: return "PERSIST";
        case StageId::VALIDATE: return "VALIDATE";
        case StageId::TEST: return "TEST";
    }
    return "APPLY";
}

StageId stage_id_from_string(const std::string& s) {
    if (s == "APPLY") return StageId::APPLY;
    if (s == "PERSIST") return StageId::PERSIST;
    if (s == "VALIDATE") return StageId::VALIDATE;
    if (s == "TEST") return StageId::TEST;
    throw SchemaError("unknown stage id: " + s);
}

std::string to_string(StageOutcome v) {
    switch (v) {
        case StageOutcome::PASSED: return "PASSED";
        case StageOutcome::FAILED: return "FAILED";
        case StageOutcome::SKIPPED: return "SKIPPED";
    }
    return "FAILED";
}

StageOutcome stage_outcome_from_string(const std::string& s) {
    if (s == "PASSED") return StageOutcome::PASSED;
    if (s == "FAILED") return StageOutcome::FAILED;
    if (s == "SKIPPED") return StageOutcome::SKIPPED;
    throw SchemaError("unknown stage outcome: " + s);
}

std::string to_string(Tool v) {
    switch (v) {
        case Tool::READ_FILE: return "READ_FILE";
        case Tool::WRITE_FILE: return "WRITE_FILE";
        case Tool::LIST_FILES: return "LIST_FILES";
        case Tool::WEB_SCRAPE: return "WEB_SCRAPE";
        case Tool::RUN_COMMAND: return "RUN_COMMAND";
        case Tool::GIT: return "GIT";
    }
    return "READ_FILE";
}

Tool tool_from_string(const std::string& s) {
    if (s == "READ_FILE") return Tool::READ_FILE;
    if (s == "WRITE_FILE") return Tool::WRITE_FILE;
    if (s == "LIST_FILES") return Tool::LIST_FILES;
    if (s == "WEB_SCRAPE") return Tool::WEB_SCRAPE;
    if (s == "RUN_COMMAND") return Tool::RUN_COMMAND;
    if (s == "GIT") return Tool::GIT;
    throw SchemaError("unknown tool: " + s);
}

std::string to_string(ErrorClass v) {
    switch (v) {
        case ErrorClass::COMPILE_FAIL: return "COMPILE_FAIL";
        case ErrorClass::RUNTIME_ERROR: return "RUNTIME_ERROR";
        case ErrorClass::TEST_FAIL: return "TEST_FAIL";
        case ErrorClass::TIMEOUT: return "TIMEOUT";
        case ErrorClass::BUDGET_EXHAUSTED: return "BUDGET_EXHAUSTED";
        case ErrorClass::TOOL_ERROR: return "TOOL_ERROR";
    }
    return "TOOL_ERROR";
}

ErrorClass error_class_from_string(const std::string& s) {
    if (s == "COMPILE_FAIL") return ErrorClass::COMPILE_FAIL;
    if (s == "RUNTIME_ERROR") return ErrorClass::RUNTIME_ERROR;
    if (s == "TEST_FAIL") return ErrorClass::TEST_FAIL;
    if (s == "TIMEOUT") return ErrorClass::TIMEOUT;
    if (s == "BUDGET_EXHAUSTED") return ErrorClass::BUDGET_EXHAUSTED;
    if (s == "TOOL_ERROR") return ErrorClass::TOOL_ERROR;
    throw SchemaError("unknown error class: " + s);
}

GatePredicate GatePredicate::always() { return GatePredicate{}; }

GatePredicate GatePredicate::files_modified() {
    GatePredicate g;
    g.kind = Kind::FILES_MODIFIED;
    return g;
}

GatePredicate GatePredicate::flag_enabled(std::string flag) {
    GatePredicate g;
    g.kind = Kind::FLAG_ENABLED;
    g.flag_name = std::move(flag);
    return g;
}

GatePredicate GatePredicate::all_of(std::vector<GatePredicate> children) {
    GatePredicate g;
    g.kind = Kind::ALL_OF;
    g.children = std::move(children);
    return g;
}

GatePredicate GatePredicate::any_of(std::vector<GatePredicate> children) {
    GatePredicate g;
    g.kind = Kind::ANY_OF;
    g.children = std::move(children);
    return g;
}

bool GatePredicate::operator==(const GatePredicate& o) const {
    return kind == o.kind && flag_name == o.flag_name && children == o.children;
}

bool BackendSpec::operator==(const BackendSpec& o) const {
    return kind == o.kind && model_id == o.model_id && script_path == o.script_path &&
           base_url == o.base_url && params == o.params;
}

bool RunConfig::operator==(const RunConfig& o) const {
    return mode == o.mode && seed == o.seed && flags == o.flags && prompts == o.prompts &&
           backend == o.backend && max_agentic_steps == o.max_agentic_steps &&
           token_budget == o.token_budget && command_timeout_s == o.command_timeout_s &&
           test_timeout_s == o.test_timeout_s;
}

bool RunConfig::flag(const std::string& name) const {
    auto it = flags.find(name);
    if (it == flags.end()) {
        throw ConfigError("flag not declared in config: " + name);
    }
    return it->second;
}

RunConfig default_run_config() {
    RunConfig c;
    c.flags = {{"enable_persist", true}, {"enable_validate", true}, {"enable_test", true}};
    return c;
}

bool ToolRequest::operator==(const ToolRequest& o) const { return tool == o.tool && args == o.args; }

}  // namespace translab
