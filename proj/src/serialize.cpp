#include "translab/serialize.hpp"

#include <sstream>

#include "translab/bytes.hpp"
#include "translab/errors.hpp"
#include "translab/sha256.hpp"

namespace translab {

namespace {

const Json& require(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw SchemaError(std::string("missing field: ") + key);
    }
    return *it;
}

std::string gate_kind_name(GatePredicate::Kind k) {
    switch (k) {
        case GatePredicate::Kind::ALWAYS: return "ALWAYS";
        case GatePredicate::Kind::FILES_MODIFIED: return "FILES_MODIFIED";
        case GatePredicate::Kind::FLAG_ENABLED: return "FLAG_ENABLED";
        case GatePredicate::Kind::ALL_OF: return "ALL_OF";
        case GatePredicate::Kind::ANY_OF: return "ANY_OF";
    }
    return "ALWAYS";
}

}  // namespace

Json encode(const GatePredicate& g) {
    Json j;
    j["kind"] = gate_kind_name(g.kind);
    if (g.kind == GatePredicate::Kind::FLAG_ENABLED) {
        j["flag"] = g.flag_name;
    }
    if (g.kind == GatePredicate::Kind::ALL_OF || g.kind == GatePredicate::Kind::ANY_OF) {
        Json children = Json::array();
        for (const auto& c : g.children) children.push_back(encode(c));
        j["children"] = std::move(children);
    }
    return j;
}

GatePredicate decode_gate(const Json& j) {
    const std::string kind = require(j, "kind").get<std::string>();
    if (kind == "ALWAYS") return GatePredicate::always();
    if (kind == "FILES_MODIFIED") return GatePredicate::files_modified();
    if (kind == "FLAG_ENABLED") return GatePredicate::flag_enabled(require(j, "flag").get<std::string>());
    if (kind == "ALL_OF" || kind == "ANY_OF") {
        std::vector<GatePredicate> children;
        for (const auto& c : require(j, "children")) children.push_back(decode_gate(c));
        return kind == "ALL_OF" ? GatePredicate::all_of(std::move(children))
                                : GatePredicate::any_of(std::move(children));
    }
    throw SchemaError("unknown gate kind: " + kind);
}

Json encode(const Stage& s) {
    Json j;
    j["id"] = to_string(s.id);
    j["gate"] = encode(s.gate);
    j["strategies"] = s.strategies;
    j["max_retries"] = s.max_retries;
    return j;
}

Stage decode_stage(const Json& j) {
    Stage s;
    s.id = stage_id_from_string(require(j, "id").get<std::string>());
    s.gate = decode_gate(require(j, "gate"));
    s.strategies = require(j, "strategies").get<std::vector<std::string>>();
    s.max_retries = require(j, "max_retries").get<int>();
    if (s.max_retries < 0 || s.max_retries > kMaxRetryCeiling) {
        throw SchemaError("stage max_retries outside ceiling");
    }
    if (s.id == StageId::APPLY && s.strategies.empty()) {
        throw SchemaError("APPLY stage requires at least one strategy");
    }
    return s;
}

Json encode(const StagePlan& p) {
    Json j;
    Json stages = Json::array();
    for (const auto& s : p.stages) stages.push_back(encode(s));
    j["stages"] = std::move(stages);
    j["global_timeout_s"] = p.global_timeout_s;
    return j;
}

StagePlan decode_stage_plan(const Json& j) {
    StagePlan p;
    for (const auto& s : require(j, "stages")) p.stages.push_back(decode_stage(s));
    p.global_timeout_s = require(j, "global_timeout_s").get<double>();
    return p;
}

Json encode(const SystemState& s) {
    Json j;
    j["modified_files"] = s.modified_files;
    j["workspace_root"] = s.workspace_root;
    Json outcomes;
    for (const auto& [id, outcome] : s.stage_outcomes) {
        outcomes[to_string(id)] = to_string(outcome);
    }
    j["stage_outcomes"] = std::move(outcomes);
    return j;
}

SystemState decode_system_state(const Json& j) {
    SystemState s;
    for (const auto& f : require(j, "modified_files")) s.modified_files.insert(f.get<std::string>());
    s.workspace_root = require(j, "workspace_root").get<std::string>();
    for (const auto& [key, value] : require(j, "stage_outcomes").items()) {
        s.stage_outcomes[stage_id_from_string(key)] = stage_outcome_from_string(value.get<std::string>());
    }
    return s;
}

Json encode(const BackendSpec& b) {
    Json j;
    j["kind"] = b.kind;
    j["model_id"] = b.model_id;
    j["script_path"] = b.script_path;
    j["base_url"] = b.base_url;
    j["params"] = b.params;
    return j;
}

BackendSpec decode_backend_spec(const Json& j) {
    BackendSpec b;
    b.kind = require(j, "kind").get<std::string>();
    b.model_id = require(j, "model_id").get<std::string>();
    b.script_path = j.value("script_path", "");
    b.base_url = j.value("base_url", "");
    b.params = j.value("params", Json::object());
    return b;
}

Json encode(const RunConfig& c) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["mode"] = to_string(c.mode);
    j["seed"] = c.seed;
    j["flags"] = c.flags;
    j["prompts"] = c.prompts;
    j["backend"] = encode(c.backend);
    j["max_agentic_steps"] = c.max_agentic_steps;
    j["token_budget"] = c.token_budget;
    j["command_timeout_s"] = c.command_timeout_s;
    j["test_timeout_s"] = c.test_timeout_s;
    return j;
}

RunConfig decode_run_config(const Json& j) {
    const std::string version = require(j, "schema_version").get<std::string>();
    if (version != kSchemaVersion) {
        throw SchemaError("unsupported config schema version: " + version);
    }
    RunConfig c;
    c.mode = mode_from_string(require(j, "mode").get<std::string>());
    c.seed = require(j, "seed").get<std::uint64_t>();
    c.flags = require(j, "flags").get<std::map<std::string, bool>>();
    c.prompts = require(j, "prompts").get<std::string>();
    c.backend = decode_backend_spec(require(j, "backend"));
    c.max_agentic_steps = require(j, "max_agentic_steps").get<int>();
    c.token_budget = require(j, "token_budget").get<std::int64_t>();
    c.command_timeout_s = j.value("command_timeout_s", 10.0);
    c.test_timeout_s = j.value("test_timeout_s", 10.0);
    if (c.max_agentic_steps < 0) throw SchemaError("max_agentic_steps must be non-negative");
    if (c.token_budget <= 0) throw SchemaError("token_budget must be positive");
    return c;
}

Json encode(const TestCase& t) {
    Json j;
    j["id"] = t.id;
    j["stdin_b64"] = base64_encode(t.stdin_payload);
    j["argv"] = t.argv;
    Json artifacts = Json::array();
    for (const auto& [path, bytes] : t.expected_artifacts) {
        artifacts.push_back(Json{{"path", path}, {"bytes_b64", base64_encode(bytes)}});
    }
    j["expected_artifacts"] = std::move(artifacts);
    return j;
}

TestCase decode_test_case(const Json& j) {
    TestCase t;
    t.id = require(j, "id").get<std::string>();
    if (j.contains("stdin_b64")) {
        t.stdin_payload = base64_decode(j.at("stdin_b64").get<std::string>());
    } else if (j.contains("stdin")) {
        t.stdin_payload = j.at("stdin").get<std::string>();  // authoring convenience
    }
    t.argv = j.value("argv", std::vector<std::string>{});
    for (const auto& a : j.value("expected_artifacts", Json::array())) {
        t.expected_artifacts.emplace_back(require(a, "path").get<std::string>(),
                                          base64_decode(require(a, "bytes_b64").get<std::string>()));
    }
    return t;
}

Json encode(const ExecSpec& e) {
    Json j;
    j["interpreter"] = e.interpreter;
    j["entry"] = e.entry;
    j["output_dir"] = e.output_dir;
    return j;
}

ExecSpec decode_exec_spec(const Json& j) {
    ExecSpec e;
    e.interpreter = require(j, "interpreter").get<std::vector<std::string>>();
    e.entry = require(j, "entry").get<std::string>();
    e.output_dir = require(j, "output_dir").get<std::string>();
    return e;
}

Json encode(const ProgramUnit& p) {
    Json j;
    j["id"] = p.id;
    j["category"] = to_string(p.category);
    j["source_path"] = p.source_path;
    j["reference_path"] = p.reference_path;
    Json tests = Json::array();
    for (const auto& t : p.tests) tests.push_back(encode(t));
    j["tests"] = std::move(tests);
    j["reference_exec"] = encode(p.reference_exec);
    j["target_exec"] = encode(p.target_exec);
    j["deleted"] = p.deleted;
    j["inspect"] = p.inspect;
    return j;
}

ProgramUnit decode_program_unit(const Json& j) {
    ProgramUnit p;
    p.id = require(j, "id").get<std::string>();
    p.category = category_from_string(require(j, "category").get<std::string>());
    p.source_path = require(j, "source_path").get<std::string>();
    p.reference_path = require(j, "reference_path").get<std::string>();
    for (const auto& t : require(j, "tests")) p.tests.push_back(decode_test_case(t));
    if (j.contains("reference_exec")) p.reference_exec = decode_exec_spec(j.at("reference_exec"));
    if (j.contains("target_exec")) p.target_exec = decode_exec_spec(j.at("target_exec"));
    p.deleted = j.value("deleted", 0);
    p.inspect = j.value("inspect", 0);
    return p;
}

Json encode(const TokenUsage& u) {
    Json j;
    j["prompt_tokens"] = u.prompt_tokens;
    j["completion_tokens"] = u.completion_tokens;
    return j;
}

TokenUsage decode_token_usage(const Json& j) {
    TokenUsage u;
    u.prompt_tokens = require(j, "prompt_tokens").get<std::int64_t>();
    u.completion_tokens = require(j, "completion_tokens").get<std::int64_t>();
    if (u.prompt_tokens < 0 || u.completion_tokens < 0) {
        throw SchemaError("token counts must be non-negative");
    }
    return u;
}

Json encode(const TokenLedger& l) {
    Json calls = Json::array();
    for (const auto& c : l.calls) {
        calls.push_back(Json{{"model_id", c.model_id}, {"usage", encode(c.usage)}});
    }
    Json j;
    j["calls"] = std::move(calls);
    j["totals"] = encode(l.totals());
    return j;
}

TokenLedger decode_token_ledger(const Json& j) {
    TokenLedger l;
    for (const auto& c : require(j, "calls")) {
        l.record(require(c, "model_id").get<std::string>(), decode_token_usage(require(c, "usage")));
    }
    return l;
}

Json encode(const Rational& r) {
    Json j;
    j["num"] = r.num();
    j["den"] = r.den();
    return j;
}

Rational decode_rational(const Json& j) {
    return Rational(require(j, "num").get<std::int64_t>(), require(j, "den").get<std::int64_t>());
}

Json encode(const TraceEntry& e) {
    Json j;
    j["seq"] = e.seq;
    j["stage"] = e.stage_id ? Json(to_string(*e.stage_id)) : Json(nullptr);
    j["tool"] = to_string(e.tool);
    j["args"] = e.canonical_args;
    j["status"] = e.ok ? "OK" : "ERROR";
    j["error_code"] = e.error_code;
    j["strategy"] = e.strategy_id ? Json(*e.strategy_id) : Json(nullptr);
    return j;
}

TraceEntry decode_trace_entry(const Json& j) {
    TraceEntry e;
    e.seq = require(j, "seq").get<std::uint64_t>();
    if (!require(j, "stage").is_null()) {
        e.stage_id = stage_id_from_string(j.at("stage").get<std::string>());
    }
    e.tool = tool_from_string(require(j, "tool").get<std::string>());
    e.canonical_args = require(j, "args");
    e.ok = require(j, "status").get<std::string>() == "OK";
    e.error_code = require(j, "error_code").get<std::string>();
    if (!require(j, "strategy").is_null()) {
        e.strategy_id = j.at("strategy").get<std::string>();
    }
    return e;
}

Json encode(const ToolCallTrace& t) {
    Json j;
    Json entries = Json::array();
    for (const auto& e : t.entries) entries.push_back(encode(e));
    j["entries"] = std::move(entries);
    j["run_id"] = t.run_id;
    j["config_fingerprint"] = t.config_fingerprint;
    return j;
}

ToolCallTrace decode_trace(const Json& j) {
    ToolCallTrace t;
    for (const auto& e : require(j, "entries")) t.entries.push_back(decode_trace_entry(e));
    t.run_id = require(j, "run_id").get<std::string>();
    t.config_fingerprint = require(j, "config_fingerprint").get<std::string>();
    return t;
}

Json encode(const RunRecord& r) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["run_id"] = r.run_id;
    j["program_id"] = r.program_id;
    j["category"] = to_string(r.category);
    j["config"] = encode(r.config);
    j["trace"] = encode(r.trace);
    Json outcomes;
    for (const auto& [id, outcome] : r.stage_outcomes) {
        outcomes[to_string(id)] = to_string(outcome);
    }
    j["stage_outcomes"] = std::move(outcomes);
    j["token_ledger"] = encode(r.ledger);
    j["ca"] = r.ca ? encode(*r.ca) : Json(nullptr);
    j["tests_total"] = r.tests_total ? Json(*r.tests_total) : Json(nullptr);
    j["tests_passed"] = r.tests_passed ? Json(*r.tests_passed) : Json(nullptr);
    j["successful"] = r.successful;
    j["wall_time_s"] = r.wall_time_s;
    j["error"] = r.error ? Json(to_string(*r.error)) : Json(nullptr);
    if (r.agentic) {
        Json a;
        a["steps"] = r.agentic->steps;
        a["accepted_tokens"] = encode(r.agentic->accepted_tokens);
        a["termination_reason"] = r.agentic->termination_reason;
        j["agentic"] = std::move(a);
    } else {
        j["agentic"] = Json(nullptr);
    }
    return j;
}

RunRecord decode_run_record(const Json& j) {
    const std::string version = require(j, "schema_version").get<std::string>();
    if (version != kSchemaVersion) {
        throw SchemaError("unsupported run record schema version: " + version);
    }
    RunRecord r;
    r.run_id = require(j, "run_id").get<std::string>();
    r.program_id = require(j, "program_id").get<std::string>();
    r.category = category_from_string(require(j, "category").get<std::string>());
    r.config = decode_run_config(require(j, "config"));
    r.trace = decode_trace(require(j, "trace"));
    for (const auto& [key, value] : require(j, "stage_outcomes").items()) {
        r.stage_outcomes[stage_id_from_string(key)] = stage_outcome_from_string(value.get<std::string>());
    }
    r.ledger = decode_token_ledger(require(j, "token_ledger"));
    if (!require(j, "ca").is_null()) r.ca = decode_rational(j.at("ca"));
    if (!require(j, "tests_total").is_null()) r.tests_total = j.at("tests_total").get<int>();
    if (!require(j, "tests_passed").is_null()) r.tests_passed = j.at("tests_passed").get<int>();
    r.successful = require(j, "successful").get<bool>();
    r.wall_time_s = require(j, "wall_time_s").get<double>();
    if (!require(j, "error").is_null()) {
        r.error = error_class_from_string(j.at("error").get<std::string>());
    }
    if (!require(j, "agentic").is_null()) {
        const Json& a = j.at("agentic");
        AgenticSummary s;
        s.steps = require(a, "steps").get<int>();
        s.accepted_tokens = decode_token_usage(require(a, "accepted_tokens"));
        s.termination_reason = require(a, "termination_reason").get<std::string>();
        r.agentic = std::move(s);
    }
    return r;
}

std::string config_fingerprint(const RunConfig& c) { return Sha256::hex_digest(encode(c).dump()); }

std::string run_records_to_jsonl(const std::vector<RunRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += encode(r).dump();
        out += '\n';
    }
    return out;
}

std::vector<RunRecord> run_records_from_jsonl(const std::string& text) {
    std::vector<RunRecord> records;
    std::vector<std::string> bad_lines;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            records.push_back(decode_run_record(Json::parse(line)));
        } catch (const std::exception& e) {
            bad_lines.push_back("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!bad_lines.empty()) {
        std::string msg = "run log contains invalid lines:";
        for (const auto& b : bad_lines) msg += "\n  " + b;
        throw SchemaError(msg);
    }
    return records;
}

}  // namespace translab
