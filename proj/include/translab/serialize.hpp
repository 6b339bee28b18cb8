#pragma once

#include <string>
#include <vector>

#include "translab/domain.hpp"
#include "translab/record.hpp"
#include "translab/trace.hpp"

namespace translab {

inline constexpr const char* kSchemaVersion = "v1";

// Encoders are deterministic: nlohmann objects keep keys sorted, byte-string
// fields are base64 (suffix _b64), enums are uppercase strings. Every
// decode(encode(x)) round-trips to an equal value and encode is stable under
// the round trip, so serializing twice is byte-identical.

Json encode(const GatePredicate& g);
GatePredicate decode_gate(const Json& j);

Json encode(const Stage& s);
Stage decode_stage(const Json& j);

Json encode(const StagePlan& p);
StagePlan decode_stage_plan(const Json& j);

Json encode(const SystemState& s);
SystemState decode_system_state(const Json& j);

Json encode(const BackendSpec& b);
BackendSpec decode_backend_spec(const Json& j);

Json encode(const RunConfig& c);  // includes schema_version
RunConfig decode_run_config(const Json& j);

Json encode(const TestCase& t);
TestCase decode_test_case(const Json& j);

Json encode(const ExecSpec& e);
ExecSpec decode_exec_spec(const Json& j);

Json encode(const ProgramUnit& p);
ProgramUnit decode_program_unit(const Json& j);

Json encode(const TokenUsage& u);
TokenUsage decode_token_usage(const Json& j);

Json encode(const TokenLedger& l);
TokenLedger decode_token_ledger(const Json& j);

Json encode(const Rational& r);
Rational decode_rational(const Json& j);

Json encode(const TraceEntry& e);
TraceEntry decode_trace_entry(const Json& j);

Json encode(const ToolCallTrace& t);
ToolCallTrace decode_trace(const Json& j);

Json encode(const RunRecord& r);  // includes schema_version
RunRecord decode_run_record(const Json& j);

// Fingerprint of a config: SHA-256 hex over its canonical serialization.
std::string config_fingerprint(const RunConfig& c);

// RunRecord JSONL: one record per line.
std::string run_records_to_jsonl(const std::vector<RunRecord>& records);
// Throws SchemaError listing offending line numbers on version mismatch or
// parse failure.
std::vector<RunRecord> run_records_from_jsonl(const std::string& text);

}  // namespace translab
