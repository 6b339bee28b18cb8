#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "translab/fixtures.hpp"

namespace testutil {

// Fresh unique directory under the system temp root. Left in place on
// failure so the workspace can be inspected.
inline std::filesystem::path tmp_dir(const std::string& label) {
    static std::atomic<int> counter{0};
    const auto dir = std::filesystem::temp_directory_path() /
                     ("translab-test-" + std::to_string(::getpid())) /
                     (label + "-" + std::to_string(counter.fetch_add(1)));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// The bundled example suite, materialized once per test process.
inline const std::filesystem::path& suite_dir() {
    static const std::filesystem::path dir = [] {
        auto d = tmp_dir("suite");
        translab::init_fixtures(d);
        return d;
    }();
    return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace testutil
