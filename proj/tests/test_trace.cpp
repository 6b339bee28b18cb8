#include <string>

#include "doctest.h"
#include "translab/errors.hpp"
#include "translab/serialize.hpp"
#include "translab/trace.hpp"
#include "util.hpp"

using namespace translab;

namespace {

RawTraceEntry raw_entry(Tool tool, Json args, bool ok = true, std::string error = "") {
    RawTraceEntry e;
    e.tool = tool;
    e.args = std::move(args);
    e.ok = ok;
    e.error_code = std::move(error);
    e.duration_s = 1.5;  // must never reach the canonical form
    return e;
}

std::string golden(const char* name) {
    auto text = testutil::read_file(std::filesystem::path(TRANSLAB_SOURCE_DIR) / "tests" /
                                    "golden" / name);
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    return text;
}

}  // namespace

TEST_CASE("canonicalization relativizes paths, assigns seq, and is idempotent") {
    RawTrace raw;
    raw.run_id = "r1";
    raw.config_fingerprint = "f1";
    raw.entries.push_back(raw_entry(Tool::READ_FILE, Json{{"path", "/work/ws/a/b.py"}}));
    raw.entries.push_back(raw_entry(Tool::WRITE_FILE,
                                    Json{{"path", "main.py"}, {"content", "/work/ws/x"}}));
    raw.entries.push_back(raw_entry(Tool::RUN_COMMAND,
                                    Json{{"argv", Json::array({"python3", "main.py"})}}));

    const ToolCallTrace trace = canonicalize(raw, "/work/ws");
    REQUIRE(trace.entries.size() == 3);
    CHECK(trace.entries[0].seq == 0);
    CHECK(trace.entries[1].seq == 1);
    CHECK(trace.entries[2].seq == 2);
    CHECK(trace.entries[0].canonical_args.at("path") == "a/b.py");
    // only declared path args are rewritten; content payloads stay intact
    CHECK(trace.entries[1].canonical_args.at("content") == "/work/ws/x");
    CHECK(canonicalize(trace) == trace);
    CHECK(trace_hash_hex(canonicalize(trace)) == trace_hash_hex(trace));
}

TEST_CASE("paths outside the sandbox cannot be canonicalized") {
    RawTrace raw;
    raw.entries.push_back(raw_entry(Tool::READ_FILE, Json{{"path", "/etc/passwd"}}));
    CHECK_THROWS_AS(canonicalize(raw, "/work/ws"), CanonicalError);
}

TEST_CASE("empty trace hash matches the frozen digest") {
    ToolCallTrace empty;
    CHECK(trace_hash_hex(empty) == golden("empty_trace.sha256"));
}

TEST_CASE("sample trace hash matches the frozen digest") {
    // The golden digest was produced by an independent implementation of the
    // length-prefixed encoding (hashlib + json.dumps with sorted keys).
    ToolCallTrace t;
    TraceEntry e0;
    e0.seq = 0;
    e0.stage_id = StageId::APPLY;
    e0.tool = Tool::READ_FILE;
    e0.canonical_args = Json{{"path", "main.py"}};
    e0.ok = false;
    e0.error_code = "NOT_FOUND";
    e0.strategy_id = "exact_patch";
    TraceEntry e1;
    e1.seq = 1;
    e1.stage_id = StageId::APPLY;
    e1.tool = Tool::WRITE_FILE;
    e1.canonical_args = Json{{"content", "print(1)\n"}, {"path", "main.py"}};
    e1.strategy_id = "whole_file_rewrite";
    TraceEntry e2;
    e2.seq = 2;
    e2.tool = Tool::RUN_COMMAND;
    e2.canonical_args = Json{{"argv", Json::array({"python3", "main.py"})}};
    t.entries = {e0, e1, e2};

    CHECK(trace_hash_hex(t) == golden("sample_trace.sha256"));

    // any semantic field moves the digest
    ToolCallTrace flipped = t;
    flipped.entries[2].ok = false;
    flipped.entries[2].error_code = "TIMEOUT";
    CHECK(trace_hash_hex(flipped) != trace_hash_hex(t));
}

TEST_CASE("hashing rejects non-canonical traces") {
    ToolCallTrace bad_seq;
    TraceEntry a;
    a.seq = 1;  // must start at 0
    a.tool = Tool::LIST_FILES;
    a.canonical_args = Json{{"glob", "*"}};
    bad_seq.entries = {a};
    CHECK_THROWS_AS(trace_hash(bad_seq), CanonicalError);

    ToolCallTrace bad_path;
    TraceEntry b;
    b.seq = 0;
    b.tool = Tool::READ_FILE;
    b.canonical_args = Json{{"path", "/abs/path.py"}};
    bad_path.entries = {b};
    CHECK_THROWS_AS(trace_hash(bad_path), CanonicalError);
}

TEST_CASE("trace equality ignores run identity") {
    ToolCallTrace a, b;
    TraceEntry e;
    e.seq = 0;
    e.tool = Tool::LIST_FILES;
    e.canonical_args = Json{{"glob", "*"}};
    a.entries = {e};
    b.entries = {e};
    a.run_id = "r1";
    b.run_id = "r2";
    a.config_fingerprint = "f1";
    b.config_fingerprint = "f2";
    CHECK(a == b);
    CHECK(trace_hash_hex(a) == trace_hash_hex(b));
}

TEST_CASE("divergence point agrees with a brute-force scan") {
    auto entry = [](std::uint64_t seq, Tool tool, Json args) {
        TraceEntry e;
        e.seq = seq;
        e.tool = tool;
        e.canonical_args = std::move(args);
        return e;
    };
    ToolCallTrace a, b;
    a.entries = {entry(0, Tool::READ_FILE, Json{{"path", "x"}}),
                 entry(1, Tool::WRITE_FILE, Json{{"path", "y"}, {"content", "1"}}),
                 entry(2, Tool::RUN_COMMAND, Json{{"argv", Json::array({"python3"})}})};

    b = a;
    CHECK(divergence_point(a, b) == std::nullopt);

    b.entries[1].canonical_args["content"] = "2";
    CHECK(divergence_point(a, b) == 1);

    b = a;
    b.entries.pop_back();
    for (auto& e : b.entries) (void)e;
    CHECK(divergence_point(a, b) == 2);  // proper prefix: shorter length
    CHECK(divergence_point(b, a) == 2);

    ToolCallTrace empty;
    CHECK(divergence_point(empty, empty) == std::nullopt);
    CHECK(divergence_point(empty, a) == 0);
}

TEST_CASE("serialized traces round-trip") {
    ToolCallTrace t;
    TraceEntry e;
    e.seq = 0;
    e.stage_id = StageId::TEST;
    e.tool = Tool::RUN_COMMAND;
    e.canonical_args = Json{{"argv", Json::array({"python3", "main.py"})}};
    e.strategy_id = "run_tests";
    t.entries = {e};
    t.run_id = "r";
    t.config_fingerprint = "fp";

    const ToolCallTrace back = decode_trace(encode(t));
    CHECK(back == t);
    CHECK(back.entries[0].stage_id == StageId::TEST);
    CHECK(back.entries[0].strategy_id == "run_tests");
    CHECK(encode(back).dump() == encode(t).dump());
}
