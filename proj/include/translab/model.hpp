#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "translab/domain.hpp"
#include "translab/rational.hpp"

namespace translab {

enum class Role { SYSTEM, USER, TOOL_RESULT, ASSISTANT };

std::string to_string(Role r);
Role role_from_string(const std::string& s);

struct Message {
    Role role = Role::USER;
    std::string content;  // raw bytes
};

struct ModelRequest {
    std::string prompt_bundle_id;
    std::vector<Message> messages;  // non-empty, first role SYSTEM
    Rational temperature = Rational(0);
    std::uint64_t seed = 0;
};

enum class ResponseKind { CODE_EDIT, TOOL_ACTION, FINISH };

std::string to_string(ResponseKind k);
ResponseKind response_kind_from_string(const std::string& s);

struct FileEdit {
    std::string path;
    std::string content;  // raw bytes
};

struct ModelResponse {
    ResponseKind kind = ResponseKind::FINISH;
    std::vector<FileEdit> edits;          // CODE_EDIT payload
    ToolRequest tool_action;              // TOOL_ACTION payload
    std::string finish_status;            // FINISH payload
    std::optional<TokenUsage> usage_reported;  // absent when the backend has no meter
    TokenUsage usage;                     // authoritative, filled by complete()
};

Json encode_message(const Message& m);
Message decode_message(const Json& j);
Json encode_response(const ModelResponse& r);
ModelResponse decode_response(const Json& j);

// Stateless generators; every per-run quantity is a function of the request.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string model_id() const = 0;
    virtual ModelResponse generate(const ModelRequest& request) = 0;
};

// Replays a fixed script. The response index is the count of ASSISTANT
// messages already in the request, so replay is a pure function of the
// request and equal request sequences yield equal response sequences.
// Content rules (substring match on the last message) take precedence.
class ScriptedBackend : public Backend {
public:
    explicit ScriptedBackend(Json script);
    static ScriptedBackend from_file(const std::filesystem::path& path);

    std::string model_id() const override { return model_id_; }
    ModelResponse generate(const ModelRequest& request) override;

private:
    struct Rule {
        std::string contains;
        Json response;
    };
    std::string model_id_;
    std::vector<Rule> rules_;
    std::vector<Json> steps_;
};

// Seeded pseudo-model: response is a pure function of
// (request.seed, hash of message history). Action mix is configurable.
class StochasticStubBackend : public Backend {
public:
    StochasticStubBackend(std::string model_id, const Json& params);

    std::string model_id() const override { return model_id_; }
    ModelResponse generate(const ModelRequest& request) override;

private:
    std::string model_id_;
    double w_tool_ = 0.5;
    double w_edit_ = 0.25;
    double w_finish_ = 0.25;
};

// ceil(bytes / 4); the fallback meter when a backend reports no usage.
std::int64_t estimate_tokens(const std::string& content);

// Validates the request, delegates to the backend, fills usage (reported or
// estimated), records the call into the ledger, and optionally appends a
// request/response pair to the transcript.
ModelResponse complete(Backend& backend, const ModelRequest& request, TokenLedger& ledger,
                       std::vector<Json>* transcript = nullptr);

// Builds a backend from its spec: kinds "scripted", "stub", "http".
// Relative script paths resolve against base_dir.
std::unique_ptr<Backend> make_backend(const BackendSpec& spec,
                                      const std::filesystem::path& base_dir);

}  // namespace translab
