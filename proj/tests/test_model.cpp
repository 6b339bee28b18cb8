#include <atomic>
#include <cstdlib>
#include <set>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "doctest.h"
#include "translab/errors.hpp"
#include "translab/model.hpp"
#include "util.hpp"

using namespace translab;

namespace {

ModelRequest request_with(std::vector<Message> messages, std::uint64_t seed = 0) {
    ModelRequest r;
    r.prompt_bundle_id = "default-v1";
    r.messages = std::move(messages);
    r.seed = seed;
    return r;
}

ModelRequest basic_request(std::uint64_t seed = 0, const std::string& user = "translate it") {
    return request_with({{Role::SYSTEM, "you are a translator"}, {Role::USER, user}}, seed);
}

Json translator_script() {
    return Json{
        {"schema_version", "v1"},
        {"model_id", "scripted-x"},
        {"rules", Json::array({Json{
             {"contains", "magic-phrase"},
             {"response", Json{{"kind", "CODE_EDIT"},
                               {"edits", Json::array({Json{{"path", "main.py"},
                                                           {"content", "print(7)\n"}}})}}}}})},
        {"steps", Json::array({Json{{"kind", "TOOL_ACTION"},
                                    {"tool", "LIST_FILES"},
                                    {"args", Json{{"glob", "*"}}}},
                               Json{{"kind", "FINISH"}, {"status", "done"}}})}};
}

}  // namespace

TEST_CASE("token estimation is ceil(bytes/4)") {
    CHECK(estimate_tokens("") == 0);
    CHECK(estimate_tokens("a") == 1);
    CHECK(estimate_tokens("abcd") == 1);
    CHECK(estimate_tokens("abcde") == 2);
    CHECK(estimate_tokens(std::string(4000, 'x')) == 1000);
}

TEST_CASE("scripted backend replays steps by assistant count and honors rules") {
    ScriptedBackend backend(translator_script());
    CHECK(backend.model_id() == "scripted-x");

    auto first = backend.generate(basic_request());
    CHECK(first.kind == ResponseKind::TOOL_ACTION);
    CHECK(first.tool_action.tool == Tool::LIST_FILES);

    // one ASSISTANT message in history -> second step
    auto second = backend.generate(request_with({{Role::SYSTEM, "s"},
                                                 {Role::USER, "u"},
                                                 {Role::ASSISTANT, "a1"},
                                                 {Role::TOOL_RESULT, "t"}}));
    CHECK(second.kind == ResponseKind::FINISH);
    CHECK(second.finish_status == "done");

    // beyond the script: clamps to the last step
    auto clamped = backend.generate(request_with({{Role::SYSTEM, "s"},
                                                  {Role::ASSISTANT, "a1"},
                                                  {Role::ASSISTANT, "a2"},
                                                  {Role::ASSISTANT, "a3"}}));
    CHECK(clamped.kind == ResponseKind::FINISH);

    // rules beat steps and match on the last message
    auto ruled = backend.generate(basic_request(0, "please magic-phrase now"));
    CHECK(ruled.kind == ResponseKind::CODE_EDIT);
    REQUIRE(ruled.edits.size() == 1);
    CHECK(ruled.edits[0].path == "main.py");
    CHECK(ruled.edits[0].content == "print(7)\n");
}

TEST_CASE("scripted backend validates its script at load time") {
    Json bad = translator_script();
    bad["steps"][0] = Json{{"kind", "NOT_A_KIND"}};
    CHECK_THROWS_AS(ScriptedBackend{bad}, SchemaError);

    Json empty = Json{{"model_id", "m"}, {"rules", Json::array()}, {"steps", Json::array()}};
    ScriptedBackend exhausted{empty};
    CHECK_THROWS_AS(exhausted.generate(basic_request()), BackendError);
}

TEST_CASE("complete validates the request shape") {
    ScriptedBackend backend(translator_script());
    TokenLedger ledger;

    ModelRequest no_messages = request_with({});
    CHECK_THROWS_AS(complete(backend, no_messages, ledger), BackendError);

    ModelRequest wrong_first = request_with({{Role::USER, "u"}});
    CHECK_THROWS_AS(complete(backend, wrong_first, ledger), BackendError);

    ModelRequest negative_temp = basic_request();
    negative_temp.temperature = Rational(-1, 2);
    CHECK_THROWS_AS(complete(backend, negative_temp, ledger), BackendError);

    CHECK(ledger.calls.empty());
}

TEST_CASE("complete meters usage and writes the transcript") {
    ScriptedBackend backend(translator_script());
    TokenLedger ledger;
    std::vector<Json> transcript;

    const ModelRequest req = basic_request();
    auto resp = complete(backend, req, ledger, &transcript);

    // script responses carry no usage, so the estimate applies
    std::int64_t prompt_bytes = 0;
    for (const auto& m : req.messages) prompt_bytes += static_cast<std::int64_t>(m.content.size());
    CHECK(resp.usage.prompt_tokens == (prompt_bytes + 3) / 4);
    CHECK(resp.usage.completion_tokens > 0);
    REQUIRE(ledger.calls.size() == 1);
    CHECK(ledger.calls[0].model_id == "scripted-x");
    CHECK(ledger.totals().prompt_tokens == resp.usage.prompt_tokens);

    REQUIRE(transcript.size() == 1);
    CHECK(transcript[0].contains("request"));
    CHECK(transcript[0].contains("response"));
    CHECK(transcript[0].at("request").at("prompt_bundle_id") == "default-v1");
}

TEST_CASE("reported usage wins over the estimate") {
    Json script = Json{
        {"model_id", "m"},
        {"rules", Json::array()},
        {"steps", Json::array({Json{{"kind", "FINISH"},
                                    {"status", "done"},
                                    {"usage", Json{{"prompt_tokens", 123},
                                                   {"completion_tokens", 456}}}}})}};
    ScriptedBackend backend(script);
    TokenLedger ledger;
    auto resp = complete(backend, basic_request(), ledger);
    CHECK(resp.usage.prompt_tokens == 123);
    CHECK(resp.usage.completion_tokens == 456);
    CHECK(ledger.totals().completion_tokens == 456);
}

TEST_CASE("stub responses are pure functions of seed and history") {
    StochasticStubBackend stub("stub", Json::object());

    const auto baseline = encode_response(stub.generate(basic_request(11)));
    for (int i = 0; i < 100; ++i) {
        CHECK(encode_response(stub.generate(basic_request(11))).dump() == baseline.dump());
    }

    // different history, same seed: different stream
    const auto other = encode_response(
        stub.generate(request_with({{Role::SYSTEM, "s"}, {Role::USER, "different"}}, 11)));
    CHECK((other.dump() != baseline.dump() ||
           encode_response(stub.generate(basic_request(12))).dump() != baseline.dump()));
}

TEST_CASE("paired seeds diverge in at least half the cases") {
    StochasticStubBackend stub("stub", Json::object());
    int diverged = 0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        auto a = encode_response(stub.generate(basic_request(2 * i)));
        auto b = encode_response(stub.generate(basic_request(2 * i + 1)));
        if (a.dump() != b.dump()) ++diverged;
    }
    CHECK(diverged >= 50);
}

TEST_CASE("stub action mix is steerable and validated") {
    StochasticStubBackend always_edit("stub", Json{{"p_tool", 0.0}, {"p_edit", 1.0},
                                                   {"p_finish", 0.0}});
    StochasticStubBackend always_tool("stub", Json{{"p_tool", 1.0}, {"p_edit", 0.0},
                                                   {"p_finish", 0.0}});
    for (std::uint64_t s = 0; s < 20; ++s) {
        CHECK(always_edit.generate(basic_request(s)).kind == ResponseKind::CODE_EDIT);
        CHECK(always_tool.generate(basic_request(s)).kind == ResponseKind::TOOL_ACTION);
    }
    CHECK_THROWS_AS(StochasticStubBackend("stub", Json{{"p_tool", -0.5}}), BackendError);
    CHECK_THROWS_AS(StochasticStubBackend("stub", Json{{"p_tool", 0.0}, {"p_edit", 0.0},
                                                       {"p_finish", 0.0}}),
                    BackendError);
}

TEST_CASE("make_backend wires kinds and resolves script paths") {
    const auto dir = testutil::tmp_dir("model-factory");
    testutil::write_file(dir / "script.json", translator_script().dump());

    BackendSpec scripted;
    scripted.kind = "scripted";
    scripted.model_id = "ignored";  // script's model_id wins
    scripted.script_path = "script.json";
    auto backend = make_backend(scripted, dir);
    CHECK(backend->model_id() == "scripted-x");

    BackendSpec missing = scripted;
    missing.script_path = "";
    CHECK_THROWS_AS(make_backend(missing, dir), ConfigError);

    BackendSpec unknown;
    unknown.kind = "quantum";
    CHECK_THROWS_AS(make_backend(unknown, dir), ConfigError);

    BackendSpec stub;
    stub.kind = "stub";
    stub.model_id = "stub-1";
    CHECK(make_backend(stub, dir)->model_id() == "stub-1");
}

TEST_CASE("http backend speaks chat-completions, retries 5xx, rejects junk") {
    httplib::Server server;
    std::atomic<int> hits{0};
    std::string seen_auth;
    std::string seen_body;

    server.Post("/v1/chat/completions",
                [&](const httplib::Request& req, httplib::Response& res) {
                    const int n = ++hits;
                    seen_auth = req.get_header_value("Authorization");
                    seen_body = req.body;
                    if (n == 1) {
                        res.status = 500;
                        res.set_content("overloaded", "text/plain");
                        return;
                    }
                    Json action{{"kind", "FINISH"}, {"status", "done"}};
                    Json body{{"choices",
                               Json::array({Json{{"message",
                                                  Json{{"role", "assistant"},
                                                       {"content", action.dump()}}}}})},
                              {"usage", Json{{"prompt_tokens", 9}, {"completion_tokens", 4}}}};
                    res.set_content(body.dump(), "application/json");
                });
    server.Post("/junk", [&](const httplib::Request&, httplib::Response& res) {
        Json body{{"choices",
                   Json::array({Json{{"message", Json{{"role", "assistant"},
                                                      {"content", "not json at all"}}}}})}};
        res.set_content(body.dump(), "application/json");
    });

    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    setenv("TRANSLAB_TEST_KEY", "sk-test-123", 1);
    BackendSpec spec;
    spec.kind = "http";
    spec.model_id = "remote-model";
    spec.base_url = "http://127.0.0.1:" + std::to_string(port);
    spec.params = Json{{"api_key_env", "TRANSLAB_TEST_KEY"}, {"retry_base_ms", 1}};

    auto backend = make_backend(spec, ".");
    auto resp = backend->generate(basic_request(5));
    CHECK(resp.kind == ResponseKind::FINISH);
    REQUIRE(resp.usage_reported.has_value());
    CHECK(resp.usage_reported->prompt_tokens == 9);
    CHECK(hits == 2);  // one 500, one success
    CHECK(seen_auth == "Bearer sk-test-123");
    const Json wire = Json::parse(seen_body);
    CHECK(wire.at("messages").at(0).at("role") == "system");
    CHECK(wire.at("model") == "remote-model");

    BackendSpec junk = spec;
    junk.params["path"] = "/junk";
    CHECK_THROWS_AS(make_backend(junk, ".")->generate(basic_request()), ProtocolError);

    BackendSpec missing = spec;
    missing.params["path"] = "/no-such-route";
    CHECK_THROWS_AS(make_backend(missing, ".")->generate(basic_request()), ProtocolError);

    server.stop();
    server_thread.join();

    // nothing listening: transport failure after retries
    BackendSpec dead = spec;
    CHECK_THROWS_AS(make_backend(dead, ".")->generate(basic_request()), TransportError);
}

TEST_CASE("message and response serialization round-trips") {
    Message m{Role::TOOL_RESULT, std::string("\x01\x02raw", 5)};
    const Message m2 = decode_message(encode_message(m));
    CHECK(m2.role == Role::TOOL_RESULT);
    CHECK(m2.content == m.content);

    ModelResponse edit;
    edit.kind = ResponseKind::CODE_EDIT;
    edit.edits.push_back({"a/b.py", "print(1)\n"});
    const ModelResponse edit2 = decode_response(encode_response(edit));
    CHECK(edit2.kind == ResponseKind::CODE_EDIT);
    REQUIRE(edit2.edits.size() == 1);
    CHECK(edit2.edits[0].path == "a/b.py");
    CHECK(edit2.edits[0].content == "print(1)\n");

    ModelResponse tool;
    tool.kind = ResponseKind::TOOL_ACTION;
    tool.tool_action = ToolRequest{Tool::RUN_COMMAND,
                                   Json{{"argv", Json::array({"python3", "main.py"})}}};
    const ModelResponse tool2 = decode_response(encode_response(tool));
    CHECK(tool2.kind == ResponseKind::TOOL_ACTION);
    CHECK(tool2.tool_action == tool.tool_action);
}
