#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "doctest.h"
#include "translab/tools.hpp"
#include "util.hpp"

using namespace translab;
namespace fs = std::filesystem;

namespace {

// Small interpreter for the subset of JSON Schema the tool contracts use:
// type, properties, required, additionalProperties, enum, minLength,
// minItems, items, oneOf, not. Keywords compose conjunctively.
bool schema_valid(const Json& schema, const Json& value) {
    if (schema.is_boolean()) return schema.get<bool>();
    if (schema.contains("type")) {
        const std::string t = schema.at("type").get<std::string>();
        if (t == "object" && !value.is_object()) return false;
        if (t == "string" && !value.is_string()) return false;
        if (t == "array" && !value.is_array()) return false;
    }
    if (schema.contains("enum")) {
        const auto& options = schema.at("enum");
        if (std::find(options.begin(), options.end(), value) == options.end()) return false;
    }
    if (schema.contains("minLength") && value.is_string() &&
        value.get<std::string>().size() < schema.at("minLength").get<std::size_t>()) {
        return false;
    }
    if (schema.contains("minItems") && value.is_array() &&
        value.size() < schema.at("minItems").get<std::size_t>()) {
        return false;
    }
    if (schema.contains("items") && value.is_array()) {
        for (const auto& item : value) {
            if (!schema_valid(schema.at("items"), item)) return false;
        }
    }
    if (value.is_object()) {
        if (schema.contains("required")) {
            for (const auto& key : schema.at("required")) {
                if (!value.contains(key.get<std::string>())) return false;
            }
        }
        if (schema.contains("properties")) {
            for (const auto& [key, sub] : schema.at("properties").items()) {
                if (value.contains(key) && !schema_valid(sub, value.at(key))) return false;
            }
            if (schema.value("additionalProperties", Json(true)) == Json(false)) {
                for (const auto& [key, v] : value.items()) {
                    (void)v;
                    if (!schema.at("properties").contains(key)) return false;
                }
            }
        }
    }
    if (schema.contains("not") && schema_valid(schema.at("not"), value)) return false;
    if (schema.contains("oneOf")) {
        int hits = 0;
        for (const auto& sub : schema.at("oneOf")) {
            if (schema_valid(sub, value)) ++hits;
        }
        if (hits != 1) return false;
    }
    return true;
}

Json load_schema(Tool tool) {
    std::string name = to_string(tool);
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    const fs::path p =
        fs::path(TRANSLAB_SOURCE_DIR) / "schemas" / "tools" / (name + ".json");
    return Json::parse(testutil::read_file(p));
}

struct ArgsCase {
    Json args;
    bool valid;
};

void check_agreement(Tool tool, const std::vector<ArgsCase>& cases) {
    const Json schema = load_schema(tool);
    for (const auto& c : cases) {
        CAPTURE(to_string(tool));
        CAPTURE(c.args.dump());
        CHECK(schema_valid(schema, c.args) == c.valid);
        CHECK(validate_tool_args(tool, c.args).empty() == c.valid);
    }
}

}  // namespace

TEST_CASE("every tool ships a closed argument schema") {
    for (Tool tool : {Tool::READ_FILE, Tool::WRITE_FILE, Tool::LIST_FILES, Tool::WEB_SCRAPE,
                      Tool::RUN_COMMAND, Tool::GIT}) {
        const Json schema = load_schema(tool);
        CHECK(schema.at("$schema") == "https://json-schema.org/draft/2020-12/schema");
        CHECK(schema.at("type") == "object");
        CHECK(schema.at("additionalProperties") == false);
        CHECK(schema.contains("required"));
        // Every declared property documents itself.
        for (const auto& [key, prop] : schema.at("properties").items()) {
            CAPTURE(key);
            CHECK(prop.contains("description"));
        }
    }
}

TEST_CASE("read_file schema matches the runtime validator") {
    check_agreement(Tool::READ_FILE,
                    {{Json{{"path", "a.txt"}}, true},
                     {Json{{"path", ""}}, true},  // escapes are an execution-time error
                     {Json::object(), false},
                     {Json{{"path", 5}}, false},
                     {Json{{"path", "a"}, {"extra", 1}}, false},
                     {Json("just a string"), false}});
}

TEST_CASE("write_file schema requires exactly one content form") {
    check_agreement(
        Tool::WRITE_FILE,
        {{Json{{"path", "a.txt"}, {"content", "hi"}}, true},
         {Json{{"path", "a.bin"}, {"content_b64", "QUJD"}}, true},
         {Json{{"path", "a.txt"}}, false},
         {Json{{"path", "a"}, {"content", "x"}, {"content_b64", "eA=="}}, false},
         {Json{{"content", "orphan"}}, false},
         {Json{{"path", "a"}, {"content", 3}}, false},
         {Json{{"path", "a"}, {"content_b64", Json::array()}}, false},
         {Json{{"path", "a"}, {"content", "x"}, {"mode", "w"}}, false}});
}

TEST_CASE("list_files schema demands a non-empty glob") {
    check_agreement(Tool::LIST_FILES, {{Json{{"glob", "**/*.py"}}, true},
                                       {Json{{"glob", "*"}}, true},
                                       {Json{{"glob", ""}}, false},
                                       {Json::object(), false},
                                       {Json{{"glob", 7}}, false},
                                       {Json{{"glob", "*"}, {"depth", 2}}, false}});
}

TEST_CASE("web_scrape schema demands a non-empty url") {
    check_agreement(Tool::WEB_SCRAPE, {{Json{{"url", "https://example.com/x"}}, true},
                                       {Json{{"url", ""}}, false},
                                       {Json::object(), false},
                                       {Json{{"url", 1}}, false},
                                       {Json{{"url", "https://x"}, {"method", "GET"}}, false}});
}

TEST_CASE("run_command schema pins argv shape and optional stdin") {
    check_agreement(
        Tool::RUN_COMMAND,
        {{Json{{"argv", Json::array({"python3"})}}, true},
         {Json{{"argv", Json::array({"python3", "main.py"})}, {"stdin_b64", "QUJD"}}, true},
         {Json{{"argv", Json::array()}}, false},
         {Json{{"argv", "python3"}}, false},
         {Json{{"argv", Json::array({1, 2})}}, false},
         {Json::object(), false},
         {Json{{"argv", Json::array({"x"})}, {"stdin_b64", 7}}, false},
         {Json{{"argv", Json::array({"x"})}, {"cwd", "/tmp"}}, false}});
}

TEST_CASE("git schema pins the subcommand set") {
    check_agreement(
        Tool::GIT,
        {{Json{{"subcommand", "init"}}, true},
         {Json{{"subcommand", "add"}, {"paths", Json::array({"a.py"})}}, true},
         {Json{{"subcommand", "commit"}, {"message", "m"}}, true},
         {Json{{"subcommand", "status"}}, true},
         {Json{{"subcommand", "log"}}, true},
         {Json{{"subcommand", "push"}}, false},
         {Json::object(), false},
         {Json{{"subcommand", "add"}, {"paths", "a.py"}}, false},
         {Json{{"subcommand", "add"}, {"paths", Json::array({"a", 2})}}, false},
         {Json{{"subcommand", "commit"}, {"message", 5}}, false},
         {Json{{"subcommand", "init"}, {"force", true}}, false}});
}
