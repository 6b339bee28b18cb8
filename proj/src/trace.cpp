#include "translab/trace.hpp"

#include <array>
#include <filesystem>

#include "translab/errors.hpp"

namespace translab {

namespace {

// Entry JSON used for both hashing and comparison. nlohmann::json keeps
// object keys sorted, which gives the recursive key ordering for free.
Json entry_json(const TraceEntry& e) {
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

std::string relativize(const std::string& value, const std::string& root) {
    namespace fs = std::filesystem;
    fs::path p = fs::path(value).lexically_normal();
    if (!p.is_absolute()) {
        return p.generic_string();
    }
    fs::path base = fs::path(root).lexically_normal();
    auto rel = p.lexically_relative(base);
    if (rel.empty() || *rel.begin() == "..") {
        throw CanonicalError("path outside sandbox root in trace: " + value);
    }
    return rel.generic_string();
}

void check_canonical(const ToolCallTrace& trace) {
    std::uint64_t expect = 0;
    for (const auto& e : trace.entries) {
        if (e.seq != expect++) {
            throw CanonicalError("trace sequence numbers are not canonical");
        }
        for (const auto& key : path_arg_keys(e.tool)) {
            if (e.canonical_args.contains(key)) {
                const auto& v = e.canonical_args.at(key);
                if (v.is_string() && !v.get_ref<const std::string&>().empty() &&
                    v.get_ref<const std::string&>().front() == '/') {
                    throw CanonicalError("absolute path in canonical trace args");
                }
            }
        }
    }
}

std::string le64(std::uint64_t v) {
    std::string out(8, '\0');
    for (int i = 0; i < 8; ++i) out[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    return out;
}

}  // namespace

const std::vector<std::string>& path_arg_keys(Tool tool) {
    static const std::vector<std::string> path_keys = {"path"};
    static const std::vector<std::string> none = {};
    switch (tool) {
        case Tool::READ_FILE:
        case Tool::WRITE_FILE:
            return path_keys;
        default:
            return none;
    }
}

bool TraceEntry::operator==(const TraceEntry& o) const {
    return seq == o.seq && stage_id == o.stage_id && tool == o.tool &&
           canonical_args == o.canonical_args && ok == o.ok && error_code == o.error_code &&
           strategy_id == o.strategy_id;
}

ToolCallTrace canonicalize(const RawTrace& raw, const std::string& sandbox_root) {
    ToolCallTrace out;
    out.run_id = raw.run_id;
    out.config_fingerprint = raw.config_fingerprint;
    out.entries.reserve(raw.entries.size());
    std::uint64_t seq = 0;
    for (const auto& r : raw.entries) {
        TraceEntry e;
        e.seq = seq++;
        e.stage_id = r.stage_id;
        e.tool = r.tool;
        e.canonical_args = r.args;  // re-dumped with sorted keys by nlohmann
        for (const auto& key : path_arg_keys(r.tool)) {
            if (e.canonical_args.contains(key) && e.canonical_args.at(key).is_string()) {
                e.canonical_args[key] =
                    relativize(e.canonical_args.at(key).get<std::string>(), sandbox_root);
            }
        }
        e.ok = r.ok;
        e.error_code = r.error_code;
        e.strategy_id = r.strategy_id;
        out.entries.push_back(std::move(e));
    }
    return out;
}

ToolCallTrace canonicalize(const ToolCallTrace& trace) {
    RawTrace raw;
    raw.run_id = trace.run_id;
    raw.config_fingerprint = trace.config_fingerprint;
    for (const auto& e : trace.entries) {
        RawTraceEntry r;
        r.stage_id = e.stage_id;
        r.tool = e.tool;
        r.args = e.canonical_args;
        r.ok = e.ok;
        r.error_code = e.error_code;
        r.strategy_id = e.strategy_id;
        raw.entries.push_back(std::move(r));
    }
    return canonicalize(raw, "/");
}

Digest256 trace_hash(const ToolCallTrace& trace) {
    check_canonical(trace);
    Sha256 h;
    h.update("tct-v1");
    for (const auto& e : trace.entries) {
        std::string line = entry_json(e).dump();
        h.update(le64(line.size()));
        h.update(line);
    }
    return h.finish();
}

std::string trace_hash_hex(const ToolCallTrace& trace) { return digest_hex(trace_hash(trace)); }

std::optional<std::size_t> divergence_point(const ToolCallTrace& a, const ToolCallTrace& b) {
    std::size_t n = std::min(a.entries.size(), b.entries.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& ea = a.entries[i];
        const auto& eb = b.entries[i];
        if (!(ea.tool == eb.tool && ea.canonical_args == eb.canonical_args && ea.ok == eb.ok &&
              ea.error_code == eb.error_code && ea.strategy_id == eb.strategy_id &&
              ea.stage_id == eb.stage_id)) {
            return i;
        }
    }
    if (a.entries.size() != b.entries.size()) {
        return n;
    }
    return std::nullopt;
}

}  // namespace translab
