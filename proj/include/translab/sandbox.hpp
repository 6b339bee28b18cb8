#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace translab {

// Execution boundary shared by every tool. Path checks are purely lexical:
// the candidate is joined to root, normalized, and must keep root as a prefix.
// Symlinks are not chased; workspaces are created fresh so none exist.
struct Sandbox {
    std::filesystem::path root;
    bool allow_network = false;
    std::filesystem::path fixture_dir;  // web replay corpus; empty disables replay
    double command_timeout_s = 10.0;
    std::vector<std::string> command_allowlist = {"python3"};
    std::map<std::string, std::string> extra_env;  // merged into child environments
    std::string git_author = "translab <translab@localhost>";
    std::uint64_t git_epoch = 1577836800;  // commit timestamp basis, seed-derived by callers

    // Returns the confined absolute path, or nullopt when rel escapes root.
    std::optional<std::filesystem::path> resolve_in_root(const std::string& rel) const;
};

// Minimal child environment for sandboxed subprocesses: PATH plus extra_env.
std::map<std::string, std::string> sandbox_env(const Sandbox& sandbox);

// Absolute path of an allowlisted command, or nullopt when not permitted.
std::optional<std::string> resolve_command(const Sandbox& sandbox, const std::string& name);

}  // namespace translab
