#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "translab/domain.hpp"
#include "translab/sha256.hpp"

namespace translab {

// One tool invocation as recorded while a run executes. Wall-clock data
// lives here and is stripped during canonicalization.
struct RawTraceEntry {
    std::optional<StageId> stage_id;            // absent in agentic mode
    Tool tool = Tool::READ_FILE;
    Json args = Json::object();
    bool ok = true;
    std::string error_code;                     // set when !ok
    std::optional<std::string> strategy_id;     // fallback attempts
    double duration_s = 0.0;
};

struct RawTrace {
    std::vector<RawTraceEntry> entries;
    std::string run_id;
    std::string config_fingerprint;
};

// Canonical form: logical sequence numbers, workspace-relative paths,
// recursively sorted keys, no timestamps or durations. Two runs took the
// same control path iff their canonical traces are equal.
struct TraceEntry {
    std::uint64_t seq = 0;
    std::optional<StageId> stage_id;
    Tool tool = Tool::READ_FILE;
    Json canonical_args = Json::object();
    bool ok = true;
    std::string error_code;
    std::optional<std::string> strategy_id;

    bool operator==(const TraceEntry& o) const;
};

struct ToolCallTrace {
    std::vector<TraceEntry> entries;
    std::string run_id;
    std::string config_fingerprint;

    bool operator==(const ToolCallTrace& o) const { return entries == o.entries; }
};

// Which arg keys hold workspace paths, per tool. Only these are
// relativized; content payloads are never rewritten.
const std::vector<std::string>& path_arg_keys(Tool tool);

// Strips durations, relativizes declared path args against sandbox_root and
// assigns sequence numbers. Throws CanonicalError on an absolute path that
// does not live under sandbox_root. Idempotent: canonicalizing the output
// again (with any root) is a no-op.
ToolCallTrace canonicalize(const RawTrace& raw, const std::string& sandbox_root);
ToolCallTrace canonicalize(const ToolCallTrace& trace);

// SHA-256 over a length-prefixed deterministic encoding:
//   digest("tct-v1" || for each entry: u64-le byte length || entry JSON)
// Entry JSON is compact UTF-8 with recursively sorted keys. Throws on a
// non-canonical trace (out-of-order seq, absolute path in a path arg).
Digest256 trace_hash(const ToolCallTrace& trace);
std::string trace_hash_hex(const ToolCallTrace& trace);

// Smallest index at which the traces differ; when one is a proper prefix of
// the other, the shorter length; nullopt iff the traces are equal.
std::optional<std::size_t> divergence_point(const ToolCallTrace& a, const ToolCallTrace& b);

}  // namespace translab
