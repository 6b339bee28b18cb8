#pragma once

#include <map>
#include <string>
#include <vector>

namespace translab {

struct SubprocessSpec {
    std::vector<std::string> argv;
    std::string cwd;
    std::string stdin_bytes;
    std::map<std::string, std::string> env;  // exact child environment, nothing inherited
    double timeout_s = 10.0;
    std::size_t max_capture_bytes = 8 * 1024 * 1024;
};

struct SubprocessResult {
    int exit_code = -1;        // -signo when signal-terminated
    bool timed_out = false;
    std::string stdout_bytes;  // raw, no text decoding
    std::string stderr_bytes;
    double duration_s = 0.0;
};

// Runs argv in its own process group; on timeout the whole group is killed.
SubprocessResult run_subprocess(const SubprocessSpec& spec);

}  // namespace translab
