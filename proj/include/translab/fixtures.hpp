#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace translab {

// One file of the bundled synthetic suite, path relative to the suite root.
struct FixtureFile {
    std::string path;
    std::string content;
};

// The full bundled suite: manifest, legacy sources, reference programs,
// scripted backends, run configs, a price table, and one web fixture.
const std::vector<FixtureFile>& fixture_suite_files();

// Materializes the suite under out_dir (directories created as needed).
void init_fixtures(const std::filesystem::path& out_dir);

}  // namespace translab
