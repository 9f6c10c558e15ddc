#pragma once

#include "agora/service/script.hpp"
#include "agora/service/service.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace agora::testing {

std::filesystem::path data_dir();
std::vector<std::filesystem::path> scenario_paths();
std::filesystem::path walkthrough_path();

// Defaults pointed at the bundled personas and scholar fixtures.
service::ServiceConfig test_config();
service::ScriptOptions script_options();

// Fresh in-memory service with a logical clock, fixture scholars and the
// bundled persona catalog.
std::unique_ptr<service::DeliberationService> make_service(const service::ServiceConfig& config = test_config(),
                                                           std::shared_ptr<service::EventStore> store = nullptr);

service::ScriptResult run_scenario(const std::filesystem::path& path);

// Splits a concatenation of thread transcripts at each header line.
std::vector<std::string> split_transcripts(const std::string& text);

// A scratch directory removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace agora::testing
