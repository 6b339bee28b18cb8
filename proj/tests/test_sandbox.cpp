#include <random>
#include <vector>

#include "doctest.h"
#include "translab/sandbox.hpp"
#include "util.hpp"

using namespace translab;
namespace fs = std::filesystem;

namespace {

// Independent confinement oracle: walk segments with an explicit stack;
// ".." below depth zero means escape.
std::optional<std::string> resolve_oracle(const std::string& rel) {
    if (rel.empty() || rel[0] == '/') return std::nullopt;
    std::vector<std::string> stack;
    std::string seg;
    auto flush = [&]() -> bool {
        if (seg.empty() || seg == ".") {
            seg.clear();
            return true;
        }
        if (seg == "..") {
            if (stack.empty()) return false;
            stack.pop_back();
            seg.clear();
            return true;
        }
        stack.push_back(seg);
        seg.clear();
        return true;
    };
    for (char c : rel) {
        if (c == '/') {
            if (!flush()) return std::nullopt;
        } else {
            seg += c;
        }
    }
    if (!flush()) return std::nullopt;
    std::string joined;
    for (const auto& s : stack) {
        if (!joined.empty()) joined += '/';
        joined += s;
    }
    return joined;
}

std::string random_path(std::mt19937_64& rng) {
    static const std::vector<std::string> segments = {
        "a", "b", "src", "..", ".", "main.py", "..", "deep", "..", "...", "..py"};
    std::string out;
    if (rng() % 8 == 0) out += '/';
    const std::size_t n = 1 + rng() % 6;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += '/';
        out += segments[rng() % segments.size()];
    }
    if (rng() % 10 == 0) out += '/';
    return out;
}

}  // namespace

TEST_CASE("path resolution confines lexically") {
    Sandbox sb;
    sb.root = testutil::tmp_dir("sandbox-root");

    CHECK(sb.resolve_in_root("a/b.txt") == sb.root / "a" / "b.txt");
    CHECK(sb.resolve_in_root("./x") == sb.root / "x");
    CHECK(sb.resolve_in_root("a/../b") == sb.root / "b");
    CHECK(sb.resolve_in_root("a/./../a/f") == sb.root / "a" / "f");

    CHECK_FALSE(sb.resolve_in_root("").has_value());
    CHECK_FALSE(sb.resolve_in_root("/etc/passwd").has_value());
    CHECK_FALSE(sb.resolve_in_root("../x").has_value());
    CHECK_FALSE(sb.resolve_in_root("a/../../x").has_value());
    CHECK_FALSE(sb.resolve_in_root("a/b/../../../..").has_value());
}

TEST_CASE("1000 fuzzed paths agree with the independent oracle") {
    Sandbox sb;
    sb.root = testutil::tmp_dir("sandbox-fuzz");
    std::mt19937_64 rng(99);

    for (int i = 0; i < 1000; ++i) {
        const std::string rel = random_path(rng);
        const auto resolved = sb.resolve_in_root(rel);
        const auto expected = resolve_oracle(rel);
        INFO("path: ", rel);
        CHECK(resolved.has_value() == expected.has_value());
        if (resolved && expected) {
            const fs::path want =
                expected->empty() ? sb.root : sb.root / fs::path(*expected);
            // Trailing '/' survives normalization but names the same entry.
            auto plain = [](const fs::path& p) {
                std::string s = p.lexically_normal().generic_string();
                while (s.size() > 1 && s.back() == '/') s.pop_back();
                return s;
            };
            CHECK(plain(*resolved) == plain(want));
            // and the invariant that matters: root stays a prefix. The first
            // component check avoids string-prefix traps like "..py".
            const fs::path rel_to_root = resolved->lexically_relative(sb.root);
            REQUIRE(!rel_to_root.empty());
            CHECK(rel_to_root.begin()->string() != "..");
        }
    }
}

TEST_CASE("command resolution honors the allowlist") {
    Sandbox sb;
    sb.root = testutil::tmp_dir("sandbox-cmd");

    const auto python = resolve_command(sb, "python3");
    REQUIRE(python.has_value());
    CHECK(python->front() == '/');

    CHECK_FALSE(resolve_command(sb, "sh").has_value());
    CHECK_FALSE(resolve_command(sb, "git").has_value());
    CHECK_FALSE(resolve_command(sb, "/usr/bin/python3").has_value());
    CHECK_FALSE(resolve_command(sb, "bin/python3").has_value());
    CHECK_FALSE(resolve_command(sb, "").has_value());

    sb.command_allowlist.push_back("definitely-not-installed-xyz");
    CHECK_FALSE(resolve_command(sb, "definitely-not-installed-xyz").has_value());
}

TEST_CASE("child environment is minimal and deterministic") {
    Sandbox sb;
    sb.root = testutil::tmp_dir("sandbox-env");
    sb.extra_env["GIT_DIR"] = ".git";

    const auto env = sandbox_env(sb);
    CHECK(env.count("PATH") == 1);
    CHECK(env.at("LC_ALL") == "C");
    CHECK(env.at("PYTHONHASHSEED") == "0");
    CHECK(env.at("PYTHONDONTWRITEBYTECODE") == "1");
    CHECK(env.at("GIT_DIR") == ".git");
}
