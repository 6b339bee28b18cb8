#include "translab/model.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "translab/bytes.hpp"
#include "translab/errors.hpp"
#include "translab/sha256.hpp"

namespace translab {

std::string to_string(Role r) {
    switch (r) {
        case Role::SYSTEM: return "SYSTEM";
        case Role::USER: return "USER";
        case Role::TOOL_RESULT: return "TOOL_RESULT";
        case Role::ASSISTANT: return "ASSISTANT";
    }
    return "USER";
}

Role role_from_string(const std::string& s) {
    if (s == "SYSTEM") return Role::SYSTEM;
    if (s == "USER") return Role::USER;
    if (s == "TOOL_RESULT") return Role::TOOL_RESULT;
    if (s == "ASSISTANT") return Role::ASSISTANT;
    throw SchemaError("unknown role: " + s);
}

std::string to_string(ResponseKind k) {
    switch (k) {
        case ResponseKind::CODE_EDIT: return "CODE_EDIT";
        case ResponseKind::TOOL_ACTION: return "TOOL_ACTION";
        case ResponseKind::FINISH: return "FINISH";
    }
    return "FINISH";
}

ResponseKind response_kind_from_string(const std::string& s) {
    if (s == "CODE_EDIT") return ResponseKind::CODE_EDIT;
    if (s == "TOOL_ACTION") return ResponseKind::TOOL_ACTION;
    if (s == "FINISH") return ResponseKind::FINISH;
    throw SchemaError("unknown response kind: " + s);
}

Json encode_message(const Message& m) {
    return Json{{"role", to_string(m.role)}, {"content_b64", base64_encode(m.content)}};
}

Message decode_message(const Json& j) {
    Message m;
    m.role = role_from_string(j.at("role").get<std::string>());
    if (j.contains("content_b64")) {
        m.content = base64_decode(j.at("content_b64").get<std::string>());
    } else {
        m.content = j.at("content").get<std::string>();
    }
    return m;
}

Json encode_response(const ModelResponse& r) {
    Json j;
    j["kind"] = to_string(r.kind);
    switch (r.kind) {
        case ResponseKind::CODE_EDIT: {
            Json edits = Json::array();
            for (const auto& e : r.edits) {
                edits.push_back(Json{{"path", e.path}, {"content_b64", base64_encode(e.content)}});
            }
            j["edits"] = std::move(edits);
            break;
        }
        case ResponseKind::TOOL_ACTION:
            j["tool"] = to_string(r.tool_action.tool);
            j["args"] = r.tool_action.args;
            break;
        case ResponseKind::FINISH:
            j["status"] = r.finish_status;
            break;
    }
    if (r.usage_reported) {
        j["usage"] = Json{{"prompt_tokens", r.usage_reported->prompt_tokens},
                          {"completion_tokens", r.usage_reported->completion_tokens}};
    }
    return j;
}

ModelResponse decode_response(const Json& j) {
    ModelResponse r;
    r.kind = response_kind_from_string(j.at("kind").get<std::string>());
    switch (r.kind) {
        case ResponseKind::CODE_EDIT:
            for (const auto& e : j.at("edits")) {
                FileEdit edit;
                edit.path = e.at("path").get<std::string>();
                if (e.contains("content_b64")) {
                    edit.content = base64_decode(e.at("content_b64").get<std::string>());
                } else {
                    edit.content = e.at("content").get<std::string>();
                }
                r.edits.push_back(std::move(edit));
            }
            break;
        case ResponseKind::TOOL_ACTION:
            r.tool_action.tool = tool_from_string(j.at("tool").get<std::string>());
            r.tool_action.args = j.value("args", Json::object());
            break;
        case ResponseKind::FINISH:
            r.finish_status = j.value("status", "");
            break;
    }
    if (j.contains("usage")) {
        TokenUsage u;
        u.prompt_tokens = j.at("usage").at("prompt_tokens").get<std::int64_t>();
        u.completion_tokens = j.at("usage").at("completion_tokens").get<std::int64_t>();
        if (u.prompt_tokens < 0 || u.completion_tokens < 0) {
            throw SchemaError("negative token usage in response");
        }
        r.usage_reported = u;
    }
    return r;
}

std::int64_t estimate_tokens(const std::string& content) {
    return static_cast<std::int64_t>((content.size() + 3) / 4);
}

namespace {

std::int64_t response_content_bytes(const ModelResponse& r) {
    switch (r.kind) {
        case ResponseKind::CODE_EDIT: {
            std::int64_t n = 0;
            for (const auto& e : r.edits) {
                n += static_cast<std::int64_t>(e.path.size() + e.content.size());
            }
            return n;
        }
        case ResponseKind::TOOL_ACTION:
            return static_cast<std::int64_t>(r.tool_action.args.dump().size() +
                                             to_string(r.tool_action.tool).size());
        case ResponseKind::FINISH:
            return static_cast<std::int64_t>(r.finish_status.size());
    }
    return 0;
}

void validate_request(const ModelRequest& request) {
    if (request.messages.empty()) {
        throw BackendError("model request has no messages");
    }
    if (request.messages.front().role != Role::SYSTEM) {
        throw BackendError("model request must start with a SYSTEM message");
    }
    if (request.temperature < Rational(0)) {
        throw BackendError("temperature must be non-negative");
    }
}

}  // namespace

ScriptedBackend::ScriptedBackend(Json script) {
    model_id_ = script.value("model_id", "scripted");
    for (const auto& r : script.value("rules", Json::array())) {
        Rule rule;
        rule.contains = r.at("contains").get<std::string>();
        rule.response = r.at("response");
        rules_.push_back(std::move(rule));
    }
    for (const auto& s : script.value("steps", Json::array())) {
        steps_.push_back(s);
    }
    // Parse everything once so malformed scripts fail at load, not mid-run.
    for (const auto& r : rules_) decode_response(r.response);
    for (const auto& s : steps_) decode_response(s);
}

ScriptedBackend ScriptedBackend::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw BackendError("cannot open script: " + path.string());
    Json script;
    try {
        in >> script;
    } catch (const Json::exception& e) {
        throw BackendError("malformed script " + path.string() + ": " + e.what());
    }
    return ScriptedBackend(std::move(script));
}

ModelResponse ScriptedBackend::generate(const ModelRequest& request) {
    const std::string& last = request.messages.back().content;
    for (const auto& rule : rules_) {
        if (last.find(rule.contains) != std::string::npos) {
            return decode_response(rule.response);
        }
    }
    std::size_t index = 0;
    for (const auto& m : request.messages) {
        if (m.role == Role::ASSISTANT) ++index;
    }
    if (steps_.empty()) {
        throw BackendError("script exhausted: no rule matched and no steps defined");
    }
    if (index >= steps_.size()) index = steps_.size() - 1;
    return decode_response(steps_[index]);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t history_seed(const ModelRequest& request) {
    Sha256 h;
    for (const auto& m : request.messages) {
        h.update(to_string(m.role));
        h.update(std::string_view("\x00", 1));
        h.update(m.content);
        h.update(std::string_view("\x01", 1));
    }
    Digest256 d = h.finish();
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x = (x << 8) | d[static_cast<std::size_t>(i)];
    return splitmix64(request.seed ^ x);
}

}  // namespace

StochasticStubBackend::StochasticStubBackend(std::string model_id, const Json& params)
    : model_id_(std::move(model_id)) {
    w_tool_ = params.value("p_tool", 0.5);
    w_edit_ = params.value("p_edit", 0.25);
    w_finish_ = params.value("p_finish", 0.25);
    if (w_tool_ < 0 || w_edit_ < 0 || w_finish_ < 0 || w_tool_ + w_edit_ + w_finish_ <= 0) {
        throw BackendError("stub action weights must be non-negative and not all zero");
    }
}

ModelResponse StochasticStubBackend::generate(const ModelRequest& request) {
    std::mt19937_64 rng(history_seed(request));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double total = w_tool_ + w_edit_ + w_finish_;
    const double roll = unit(rng) * total;

    std::int64_t prompt_bytes = 0;
    for (const auto& m : request.messages) {
        prompt_bytes += static_cast<std::int64_t>(m.content.size());
    }
    TokenUsage usage;
    usage.prompt_tokens = (prompt_bytes + 3) / 4;
    usage.completion_tokens = 50 + static_cast<std::int64_t>(rng() % 351);

    ModelResponse r;
    r.usage_reported = usage;
    if (roll < w_tool_) {
        r.kind = ResponseKind::TOOL_ACTION;
        switch (rng() % 4) {
            case 0:
                r.tool_action.tool = Tool::LIST_FILES;
                r.tool_action.args = Json{{"glob", "**/*"}};
                break;
            case 1:
                r.tool_action.tool = Tool::READ_FILE;
                r.tool_action.args = Json{{"path", rng() % 2 ? "main.py" : "source.cob"}};
                break;
            case 2:
                r.tool_action.tool = Tool::RUN_COMMAND;
                r.tool_action.args = Json{{"argv", Json::array({"python3", "main.py"})}};
                break;
            default:
                r.tool_action.tool = Tool::WRITE_FILE;
                r.tool_action.args =
                    Json{{"path", "notes.txt"},
                         {"content", "draft " + std::to_string(rng() % 1000)}};
                break;
        }
    } else if (roll < w_tool_ + w_edit_) {
        r.kind = ResponseKind::CODE_EDIT;
        FileEdit edit;
        edit.path = "main.py";
        edit.content = "print(" + std::to_string(rng() % 100000) + ")\n";
        r.edits.push_back(std::move(edit));
    } else {
        r.kind = ResponseKind::FINISH;
        r.finish_status = "done";
    }
    return r;
}

ModelResponse complete(Backend& backend, const ModelRequest& request, TokenLedger& ledger,
                       std::vector<Json>* transcript) {
    validate_request(request);
    ModelResponse response = backend.generate(request);
    if (response.usage_reported) {
        response.usage = *response.usage_reported;
    } else {
        std::int64_t prompt_bytes = 0;
        for (const auto& m : request.messages) {
            prompt_bytes += static_cast<std::int64_t>(m.content.size());
        }
        response.usage.prompt_tokens = (prompt_bytes + 3) / 4;
        response.usage.completion_tokens = (response_content_bytes(response) + 3) / 4;
    }
    if (response.usage.prompt_tokens < 0 || response.usage.completion_tokens < 0) {
        throw BackendError("backend reported negative token usage");
    }
    ledger.record(backend.model_id(), response.usage);
    if (transcript) {
        Json messages = Json::array();
        for (const auto& m : request.messages) messages.push_back(encode_message(m));
        Json entry;
        entry["request"] = Json{{"prompt_bundle_id", request.prompt_bundle_id},
                                {"messages", std::move(messages)},
                                {"temperature", request.temperature.str()},
                                {"seed", request.seed}};
        Json resp = encode_response(response);
        resp["usage"] = Json{{"prompt_tokens", response.usage.prompt_tokens},
                             {"completion_tokens", response.usage.completion_tokens}};
        entry["response"] = std::move(resp);
        transcript->push_back(std::move(entry));
    }
    return response;
}

std::unique_ptr<Backend> make_http_backend(const BackendSpec& spec);  // http_backend.cpp

std::unique_ptr<Backend> make_backend(const BackendSpec& spec,
                                      const std::filesystem::path& base_dir) {
    if (spec.kind == "scripted") {
        std::filesystem::path p = spec.script_path;
        if (p.empty()) throw ConfigError("scripted backend requires script_path");
        if (p.is_relative()) p = base_dir / p;
        auto backend = std::make_unique<ScriptedBackend>(ScriptedBackend::from_file(p));
        return backend;
    }
    if (spec.kind == "stub") {
        return std::make_unique<StochasticStubBackend>(
            spec.model_id.empty() ? "stub" : spec.model_id, spec.params);
    }
    if (spec.kind == "http") {
        return make_http_backend(spec);
    }
    throw ConfigError("unknown backend kind: " + spec.kind);
}

}  // namespace translab
