#include "translab/tools.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <regex>
#include <set>

#include "translab/bytes.hpp"
#include "translab/errors.hpp"
#include "translab/sha256.hpp"
#include "translab/subprocess.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

namespace translab {

namespace fs = std::filesystem;

TraceRecorder::TraceRecorder(std::string run_id, std::string config_fingerprint) {
    trace_.run_id = std::move(run_id);
    trace_.config_fingerprint = std::move(config_fingerprint);
}

void TraceRecorder::append(Tool tool, Json args, const ToolResult& result) {
    RawTraceEntry entry;
    entry.stage_id = stage_;
    entry.tool = tool;
    entry.args = std::move(args);
    entry.ok = result.status == ToolResult::Status::OK;
    entry.error_code = result.error_code;
    entry.strategy_id = strategy_;
    entry.duration_s = result.duration_s;
    trace_.entries.push_back(std::move(entry));
}

namespace {

ToolResult error_result(std::string code) {
    ToolResult r;
    r.status = ToolResult::Status::ERROR;
    r.error_code = std::move(code);
    return r;
}

ToolResult ok_result(Json payload) {
    ToolResult r;
    r.status = ToolResult::Status::OK;
    r.payload = std::move(payload);
    return r;
}

bool keys_subset(const Json& args, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : args.items()) {
        (void)value;
        bool found = false;
        for (const char* a : allowed) {
            if (key == a) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

bool is_string_array(const Json& j) {
    if (!j.is_array()) return false;
    for (const auto& e : j) {
        if (!e.is_string()) return false;
    }
    return true;
}

const std::set<std::string> kGitSubcommands = {"init", "add", "commit", "status", "log"};

std::string read_file_bytes(const fs::path& p, std::string& out) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return kErrNotFound;
    std::ostringstream buf;
    buf << in.rdbuf();
    out = buf.str();
    return {};
}

ToolResult do_read_file(const Json& args, const Sandbox& sandbox) {
    auto resolved = sandbox.resolve_in_root(args.at("path").get<std::string>());
    if (!resolved) return error_result(kErrPathEscape);
    std::error_code ec;
    if (!fs::is_regular_file(*resolved, ec)) return error_result(kErrNotFound);
    std::string bytes;
    if (auto err = read_file_bytes(*resolved, bytes); !err.empty()) return error_result(err);
    ToolResult r = ok_result(Json{{"content_b64", base64_encode(bytes)}, {"size", bytes.size()}});
    r.stdout_bytes = std::move(bytes);
    return r;
}

ToolResult do_write_file(const Json& args, const Sandbox& sandbox) {
    auto resolved = sandbox.resolve_in_root(args.at("path").get<std::string>());
    if (!resolved) return error_result(kErrPathEscape);
    std::string bytes;
    if (args.contains("content_b64")) {
        try {
            bytes = base64_decode(args.at("content_b64").get<std::string>());
        } catch (const SchemaError&) {
            return error_result(kErrBadArgs);
        }
    } else {
        bytes = args.at("content").get<std::string>();
    }
    std::error_code ec;
    fs::create_directories(resolved->parent_path(), ec);
    std::ofstream out(*resolved, std::ios::binary | std::ios::trunc);
    if (!out) return error_result(kErrIo);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) return error_result(kErrIo);
    return ok_result(Json{{"bytes_written", bytes.size()}});
}

ToolResult do_list_files(const Json& args, const Sandbox& sandbox) {
    const std::string pattern = args.at("glob").get<std::string>();
    std::vector<std::string> matches;
    std::error_code ec;
    if (fs::is_directory(sandbox.root, ec)) {
        for (fs::recursive_directory_iterator it(sandbox.root, ec), end; it != end;
             it.increment(ec)) {
            if (ec) break;
            const fs::path rel = it->path().lexically_relative(sandbox.root);
            const std::string rel_str = rel.generic_string();
            if (rel_str == ".git" || rel_str.rfind(".git/", 0) == 0) {
                if (it->is_directory()) it.disable_recursion_pending();
                continue;
            }
            if (!it->is_regular_file()) continue;
            if (glob_match(pattern, rel_str)) matches.push_back(rel_str);
        }
    }
    std::sort(matches.begin(), matches.end());
    return ok_result(Json{{"files", matches}});
}

ToolResult live_fetch(const std::string& url) {
    static const std::regex url_re(R"(^(https?)://([^/:]+)(?::(\d+))?(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, url_re)) return error_result(kErrBadArgs);
    const std::string scheme = m[1];
    const std::string host = m[2];
    const std::string port = m[3];
    const std::string path = m[4].matched && m[4].length() > 0 ? m[4].str() : "/";
    std::string origin = scheme + "://" + host;
    if (!port.empty()) origin += ":" + port;
    httplib::Client client(origin);
    client.set_connection_timeout(10);
    client.set_read_timeout(10);
    auto res = client.Get(path);
    if (!res) return error_result(kErrIo);
    ToolResult r = ok_result(Json{{"url", url},
                                  {"status", res->status},
                                  {"content_type", res->get_header_value("Content-Type")},
                                  {"body_sha256", Sha256::hex_digest(res->body)},
                                  {"source", "live"}});
    r.stdout_bytes = res->body;
    return r;
}

ToolResult do_web_scrape(const Json& args, const Sandbox& sandbox) {
    const std::string url = args.at("url").get<std::string>();
    if (!sandbox.fixture_dir.empty()) {
        const std::string key = Sha256::hex_digest(url);
        const fs::path body_path = sandbox.fixture_dir / (key + ".body");
        const fs::path meta_path = sandbox.fixture_dir / (key + ".meta");
        std::error_code ec;
        if (fs::is_regular_file(body_path, ec)) {
            std::string body;
            if (auto err = read_file_bytes(body_path, body); !err.empty()) {
                return error_result(err);
            }
            std::string content_type = "application/octet-stream";
            if (fs::is_regular_file(meta_path, ec)) {
                std::string meta_text;
                if (read_file_bytes(meta_path, meta_text).empty()) {
                    try {
                        Json meta = Json::parse(meta_text);
                        content_type = meta.value("content_type", content_type);
                    } catch (const Json::exception&) {
                        // malformed meta falls back to the default type
                    }
                }
            }
            ToolResult r = ok_result(Json{{"url", url},
                                          {"content_type", content_type},
                                          {"body_sha256", Sha256::hex_digest(body)},
                                          {"source", "fixture"}});
            r.stdout_bytes = std::move(body);
            return r;
        }
    }
    if (!sandbox.allow_network) return error_result(kErrNetworkDisabled);
    return live_fetch(url);
}

ToolResult do_run_command(const Json& args, const Sandbox& sandbox) {
    const auto argv = args.at("argv").get<std::vector<std::string>>();
    auto command = resolve_command(sandbox, argv.front());
    if (!command) return error_result(kErrCommandNotAllowed);

    SubprocessSpec spec;
    spec.argv = argv;
    spec.argv[0] = *command;
    spec.cwd = sandbox.root.string();
    spec.env = sandbox_env(sandbox);
    spec.timeout_s = sandbox.command_timeout_s;
    if (args.contains("stdin_b64")) {
        try {
            spec.stdin_bytes = base64_decode(args.at("stdin_b64").get<std::string>());
        } catch (const SchemaError&) {
            return error_result(kErrBadArgs);
        }
    }
    SubprocessResult sub = run_subprocess(spec);
    ToolResult r;
    r.stdout_bytes = std::move(sub.stdout_bytes);
    r.stderr_bytes = std::move(sub.stderr_bytes);
    r.exit_code = sub.exit_code;
    if (sub.timed_out) {
        r.status = ToolResult::Status::ERROR;
        r.error_code = kErrTimeout;
        return r;
    }
    if (sub.exit_code == 127) {
        r.status = ToolResult::Status::ERROR;
        r.error_code = kErrExecFail;
        return r;
    }
    r.status = ToolResult::Status::OK;
    r.payload = Json{{"exit_code", sub.exit_code}};
    return r;
}

std::map<std::string, std::string> git_env(const Sandbox& sandbox) {
    auto env = sandbox_env(sandbox);
    std::string name = sandbox.git_author;
    std::string email = "translab@localhost";
    auto lt = name.find('<');
    auto gt = name.find('>');
    if (lt != std::string::npos && gt != std::string::npos && gt > lt) {
        email = name.substr(lt + 1, gt - lt - 1);
        name = name.substr(0, lt);
        while (!name.empty() && name.back() == ' ') name.pop_back();
    }
    const std::string date = std::to_string(sandbox.git_epoch) + " +0000";
    env["GIT_AUTHOR_NAME"] = name;
    env["GIT_AUTHOR_EMAIL"] = email;
    env["GIT_COMMITTER_NAME"] = name;
    env["GIT_COMMITTER_EMAIL"] = email;
    env["GIT_AUTHOR_DATE"] = date;
    env["GIT_COMMITTER_DATE"] = date;
    env["GIT_CONFIG_NOSYSTEM"] = "1";
    env["GIT_CONFIG_GLOBAL"] = "/dev/null";
    env["HOME"] = sandbox.root.string();
    return env;
}

ToolResult do_git(const Json& args, const Sandbox& sandbox) {
    const std::string sub = args.at("subcommand").get<std::string>();
    std::vector<std::string> argv = {"git"};
    if (sub == "init") {
        argv.insert(argv.end(), {"init", "-q", "-b", "main"});
    } else if (sub == "add") {
        argv.insert(argv.end(), {"add", "--"});
        for (const auto& p : args.value("paths", std::vector<std::string>{})) {
            if (!sandbox.resolve_in_root(p)) return error_result(kErrPathEscape);
            argv.push_back(p);
        }
    } else if (sub == "commit") {
        const std::string message = args.value("message", "update");
        argv.insert(argv.end(), {"commit", "-q", "--no-gpg-sign", "-m", message});
    } else if (sub == "status") {
        argv.insert(argv.end(), {"status", "--porcelain"});
    } else if (sub == "log") {
        argv.insert(argv.end(), {"log", "--pretty=format:%H"});
    } else {
        return error_result(kErrBadArgs);
    }

    Sandbox git_sandbox = sandbox;
    git_sandbox.command_allowlist.push_back("git");
    auto command = resolve_command(git_sandbox, "git");
    if (!command) return error_result(kErrExecFail);

    SubprocessSpec spec;
    spec.argv = std::move(argv);
    spec.argv[0] = *command;
    spec.cwd = sandbox.root.string();
    spec.env = git_env(sandbox);
    spec.timeout_s = sandbox.command_timeout_s;
    SubprocessResult result = run_subprocess(spec);
    ToolResult r;
    r.stdout_bytes = std::move(result.stdout_bytes);
    r.stderr_bytes = std::move(result.stderr_bytes);
    r.exit_code = result.exit_code;
    if (result.timed_out) {
        r.status = ToolResult::Status::ERROR;
        r.error_code = kErrTimeout;
        return r;
    }
    if (result.exit_code != 0) {
        r.status = ToolResult::Status::ERROR;
        r.error_code = kErrExecFail;
        return r;
    }
    r.status = ToolResult::Status::OK;
    r.payload = Json{{"exit_code", 0}};
    return r;
}

// Trace args must never leak host paths: escaped path values are masked.
Json trace_args_for(Tool tool, const Json& args, const ToolResult& result) {
    Json recorded = args;
    if (result.status == ToolResult::Status::ERROR && result.error_code == kErrPathEscape) {
        for (const auto& key : path_arg_keys(tool)) {
            if (recorded.contains(key)) recorded[key] = "<escaped>";
        }
        if (tool == Tool::GIT && recorded.contains("paths")) recorded["paths"] = "<escaped>";
    }
    if (tool == Tool::WEB_SCRAPE && result.status == ToolResult::Status::OK) {
        recorded["body_sha256"] = result.payload.at("body_sha256");
    }
    return recorded;
}

}  // namespace

std::string validate_tool_args(Tool tool, const Json& args) {
    if (!args.is_object()) return kErrBadArgs;
    switch (tool) {
        case Tool::READ_FILE:
            if (!keys_subset(args, {"path"})) return kErrBadArgs;
            if (!args.contains("path") || !args.at("path").is_string()) return kErrBadArgs;
            return {};
        case Tool::WRITE_FILE: {
            if (!keys_subset(args, {"path", "content", "content_b64"})) return kErrBadArgs;
            if (!args.contains("path") || !args.at("path").is_string()) return kErrBadArgs;
            const bool has_text = args.contains("content");
            const bool has_b64 = args.contains("content_b64");
            if (has_text == has_b64) return kErrBadArgs;
            if (has_text && !args.at("content").is_string()) return kErrBadArgs;
            if (has_b64 && !args.at("content_b64").is_string()) return kErrBadArgs;
            return {};
        }
        case Tool::LIST_FILES:
            if (!keys_subset(args, {"glob"})) return kErrBadArgs;
            if (!args.contains("glob") || !args.at("glob").is_string()) return kErrBadArgs;
            if (args.at("glob").get<std::string>().empty()) return kErrBadArgs;
            return {};
        case Tool::WEB_SCRAPE:
            if (!keys_subset(args, {"url"})) return kErrBadArgs;
            if (!args.contains("url") || !args.at("url").is_string()) return kErrBadArgs;
            if (args.at("url").get<std::string>().empty()) return kErrBadArgs;
            return {};
        case Tool::RUN_COMMAND:
            if (!keys_subset(args, {"argv", "stdin_b64"})) return kErrBadArgs;
            if (!args.contains("argv") || !is_string_array(args.at("argv")) ||
                args.at("argv").empty()) {
                return kErrBadArgs;
            }
            if (args.contains("stdin_b64") && !args.at("stdin_b64").is_string()) return kErrBadArgs;
            return {};
        case Tool::GIT: {
            if (!keys_subset(args, {"subcommand", "paths", "message"})) return kErrBadArgs;
            if (!args.contains("subcommand") || !args.at("subcommand").is_string()) {
                return kErrBadArgs;
            }
            if (kGitSubcommands.count(args.at("subcommand").get<std::string>()) == 0) {
                return kErrBadArgs;
            }
            if (args.contains("paths") && !is_string_array(args.at("paths"))) return kErrBadArgs;
            if (args.contains("message") && !args.at("message").is_string()) return kErrBadArgs;
            return {};
        }
    }
    return kErrBadArgs;
}

namespace {

// Memoized descent. Nested wildcards ("a/**/*.py") need more than one level
// of backtracking; the failure table keeps the walk at O(|pattern|*|path|).
bool glob_match_at(const std::string& pattern, std::size_t p, const std::string& path,
                   std::size_t s, std::vector<std::uint8_t>& failed) {
    const std::size_t cols = path.size() + 1;
    std::uint8_t& seen = failed[p * cols + s];
    if (seen) return false;

    auto reject = [&seen] {
        seen = 1;
        return false;
    };

    if (p == pattern.size()) {
        if (s == path.size()) return true;
        return reject();
    }
    const char pc = pattern[p];
    if (pc == '*') {
        std::size_t q = p;
        while (q < pattern.size() && pattern[q] == '*') ++q;
        if (q - p >= 2) {
            // "**/" also matches zero directories.
            if (q < pattern.size() && pattern[q] == '/' &&
                glob_match_at(pattern, q + 1, path, s, failed)) {
                return true;
            }
            for (std::size_t k = s; k <= path.size(); ++k) {
                if (glob_match_at(pattern, q, path, k, failed)) return true;
            }
        } else {
            for (std::size_t k = s;; ++k) {
                if (glob_match_at(pattern, q, path, k, failed)) return true;
                if (k >= path.size() || path[k] == '/') break;
            }
        }
        return reject();
    }
    if (s == path.size()) return reject();
    if (pc == '?') {
        if (path[s] != '/' && glob_match_at(pattern, p + 1, path, s + 1, failed)) return true;
        return reject();
    }
    if (pc == '[') {
        const std::size_t close = pattern.find(']', p + 1);
        if (close != std::string::npos) {
            const bool negate = pattern[p + 1] == '!';
            const std::size_t start = p + (negate ? 2 : 1);
            bool hit = false;
            for (std::size_t i = start; i < close; ++i) {
                if (i + 2 < close && pattern[i + 1] == '-') {
                    if (path[s] >= pattern[i] && path[s] <= pattern[i + 2]) hit = true;
                    i += 2;
                } else if (pattern[i] == path[s]) {
                    hit = true;
                }
            }
            if (hit != negate && path[s] != '/' &&
                glob_match_at(pattern, close + 1, path, s + 1, failed)) {
                return true;
            }
            return reject();
        }
        // unclosed '[' falls through and matches literally
    }
    if (pc == path[s] && glob_match_at(pattern, p + 1, path, s + 1, failed)) return true;
    return reject();
}

}  // namespace

bool glob_match(const std::string& pattern, const std::string& path) {
    std::vector<std::uint8_t> failed((pattern.size() + 1) * (path.size() + 1), 0);
    return glob_match_at(pattern, 0, path, 0, failed);
}

ToolResult invoke(const ToolRequest& request, const Sandbox& sandbox, TraceRecorder* recorder) {
    const auto start = std::chrono::steady_clock::now();
    ToolResult result;
    if (auto err = validate_tool_args(request.tool, request.args); !err.empty()) {
        result = error_result(err);
    } else {
        switch (request.tool) {
            case Tool::READ_FILE: result = do_read_file(request.args, sandbox); break;
            case Tool::WRITE_FILE: result = do_write_file(request.args, sandbox); break;
            case Tool::LIST_FILES: result = do_list_files(request.args, sandbox); break;
            case Tool::WEB_SCRAPE: result = do_web_scrape(request.args, sandbox); break;
            case Tool::RUN_COMMAND: result = do_run_command(request.args, sandbox); break;
            case Tool::GIT: result = do_git(request.args, sandbox); break;
        }
    }
    result.duration_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (recorder) {
        recorder->append(request.tool, trace_args_for(request.tool, request.args, result), result);
    }
    return result;
}

}  // namespace translab
