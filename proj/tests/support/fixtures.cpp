#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <sstream>

namespace agora::testing {

std::filesystem::path data_dir() { return AGORA_DATA_DIR; }

std::vector<std::filesystem::path> scenario_paths() {
    std::vector<std::filesystem::path> out;
    for (const auto& entry : std::filesystem::directory_iterator(data_dir() / "scenarios")) {
        if (entry.path().extension() == ".json") out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::filesystem::path walkthrough_path() { return data_dir() / "scenarios" / "deliberation_walkthrough.json"; }

service::ServiceConfig test_config() { return service::default_config(data_dir()); }

service::ScriptOptions script_options() {
    const auto config = test_config();
    auto deps = service::make_deps(config);
    return {config, deps.provider, deps.scholars, deps.catalog};
}

std::unique_ptr<service::DeliberationService> make_service(const service::ServiceConfig& config,
                                                           std::shared_ptr<service::EventStore> store) {
    auto deps = service::make_deps(config);
    deps.clock = std::make_shared<service::LogicalClock>();
    deps.store = store ? std::move(store) : std::make_shared<service::MemoryEventStore>();
    return std::make_unique<service::DeliberationService>(config, std::move(deps));
}

service::ScriptResult run_scenario(const std::filesystem::path& path) {
    return service::run_script(service::load_script(path), script_options());
}

std::vector<std::string> split_transcripts(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find("\"type\":\"thread\"") != std::string::npos) out.emplace_back();
        if (out.empty()) continue;
        out.back() += line + "\n";
    }
    return out;
}

TempDir::TempDir() {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("agora-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

}  // namespace agora::testing
