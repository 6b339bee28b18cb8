#include "translab/sandbox.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdlib>

namespace translab {

namespace fs = std::filesystem;

std::optional<fs::path> Sandbox::resolve_in_root(const std::string& rel) const {
    if (rel.empty()) return std::nullopt;
    fs::path candidate = fs::path(rel);
    if (candidate.is_absolute()) return std::nullopt;
    fs::path joined = (root / candidate).lexically_normal();
    fs::path base = root.lexically_normal();
    auto bit = base.begin();
    auto jit = joined.begin();
    for (; bit != base.end(); ++bit, ++jit) {
        if (!bit->empty() && *bit == ".") continue;
        if (jit == joined.end() || *jit != *bit) return std::nullopt;
    }
    return joined;
}

std::map<std::string, std::string> sandbox_env(const Sandbox& sandbox) {
    std::map<std::string, std::string> env;
    const char* path = std::getenv("PATH");
    env["PATH"] = path ? path : "/usr/local/bin:/usr/bin:/bin";
    env["LC_ALL"] = "C";
    env["PYTHONHASHSEED"] = "0";
    env["PYTHONDONTWRITEBYTECODE"] = "1";
    for (const auto& [k, v] : sandbox.extra_env) env[k] = v;
    return env;
}

std::optional<std::string> resolve_command(const Sandbox& sandbox, const std::string& name) {
    if (name.empty() || name.find('/') != std::string::npos) return std::nullopt;
    if (std::find(sandbox.command_allowlist.begin(), sandbox.command_allowlist.end(), name) ==
        sandbox.command_allowlist.end()) {
        return std::nullopt;
    }
    std::string path_var;
    if (const char* p = std::getenv("PATH")) path_var = p;
    if (path_var.empty()) path_var = "/usr/local/bin:/usr/bin:/bin";
    std::size_t start = 0;
    while (start <= path_var.size()) {
        std::size_t end = path_var.find(':', start);
        if (end == std::string::npos) end = path_var.size();
        std::string dir = path_var.substr(start, end - start);
        if (!dir.empty()) {
            fs::path candidate = fs::path(dir) / name;
            std::error_code ec;
            if (fs::is_regular_file(candidate, ec) &&
                ::access(candidate.c_str(), X_OK) == 0) {
                return candidate.string();
            }
        }
        start = end + 1;
    }
    return std::nullopt;
}

}  // namespace translab
