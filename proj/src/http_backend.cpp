#include <chrono>
#include <cstdlib>
#include <thread>

#include "translab/errors.hpp"
#include "translab/model.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

namespace translab {

namespace {

std::string wire_role(Role r) {
    switch (r) {
        case Role::SYSTEM: return "system";
        case Role::USER: return "user";
        case Role::TOOL_RESULT: return "tool";
        case Role::ASSISTANT: return "assistant";
    }
    return "user";
}

// Chat-completions style client. The assistant message content must itself be
// a JSON object in the response schema ({"kind": ...}); anything else is a
// protocol violation, not a transport failure, and is not retried.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(const BackendSpec& spec) : spec_(spec) {
        if (spec_.base_url.empty()) {
            throw ConfigError("http backend requires base_url");
        }
        api_key_env_ = spec_.params.value("api_key_env", "TRANSLAB_API_KEY");
        path_ = spec_.params.value("path", "/v1/chat/completions");
        retry_base_ms_ = spec_.params.value("retry_base_ms", 250);
        timeout_s_ = spec_.params.value("timeout_s", 60);
    }

    std::string model_id() const override { return spec_.model_id; }

    ModelResponse generate(const ModelRequest& request) override {
        Json body;
        body["model"] = spec_.model_id;
        Json messages = Json::array();
        for (const auto& m : request.messages) {
            messages.push_back(Json{{"role", wire_role(m.role)}, {"content", m.content}});
        }
        body["messages"] = std::move(messages);
        body["temperature"] = request.temperature.to_double();
        body["seed"] = request.seed;
        const std::string payload = body.dump();

        httplib::Headers headers = {{"Content-Type", "application/json"}};
        if (const char* key = std::getenv(api_key_env_.c_str()); key && *key) {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }

        std::string last_error;
        for (int attempt = 0; attempt < 3; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(retry_base_ms_ << (attempt - 1)));
            }
            httplib::Client client(spec_.base_url);
            client.set_connection_timeout(timeout_s_);
            client.set_read_timeout(timeout_s_);
            auto res = client.Post(path_, headers, payload, "application/json");
            if (!res) {
                last_error = "connection failed";
                continue;
            }
            if (res->status >= 500) {
                last_error = "server error " + std::to_string(res->status);
                continue;
            }
            if (res->status < 200 || res->status >= 300) {
                throw ProtocolError("provider returned status " + std::to_string(res->status));
            }
            return parse_provider_body(res->body);
        }
        throw TransportError("http backend failed after 3 attempts: " + last_error);
    }

private:
    ModelResponse parse_provider_body(const std::string& body) const {
        Json j;
        try {
            j = Json::parse(body);
        } catch (const Json::exception& e) {
            throw ProtocolError(std::string("provider body is not JSON: ") + e.what());
        }
        if (!j.contains("choices") || !j.at("choices").is_array() || j.at("choices").empty()) {
            throw ProtocolError("provider body lacks choices");
        }
        const Json& msg = j.at("choices").at(0).value("message", Json::object());
        if (!msg.contains("content") || !msg.at("content").is_string()) {
            throw ProtocolError("provider message lacks string content");
        }
        Json content;
        try {
            content = Json::parse(msg.at("content").get<std::string>());
        } catch (const Json::exception&) {
            throw ProtocolError("assistant content is not a JSON action object");
        }
        ModelResponse response;
        try {
            response = decode_response(content);
        } catch (const std::exception& e) {
            throw ProtocolError(std::string("assistant content is not a valid action: ") +
                                e.what());
        }
        if (j.contains("usage") && j.at("usage").is_object()) {
            const Json& u = j.at("usage");
            if (u.contains("prompt_tokens") && u.contains("completion_tokens")) {
                TokenUsage usage;
                usage.prompt_tokens = u.at("prompt_tokens").get<std::int64_t>();
                usage.completion_tokens = u.at("completion_tokens").get<std::int64_t>();
                if (usage.prompt_tokens < 0 || usage.completion_tokens < 0) {
                    throw ProtocolError("provider reported negative usage");
                }
                response.usage_reported = usage;
            }
        }
        return response;
    }

    BackendSpec spec_;
    std::string api_key_env_;
    std::string path_;
    int retry_base_ms_ = 250;
    int timeout_s_ = 60;
};

}  // namespace

std::unique_ptr<Backend> make_http_backend(const BackendSpec& spec) {
    return std::make_unique<HttpBackend>(spec);
}

}  // namespace translab
