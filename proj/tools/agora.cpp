#include "agora/protocol/invariants.hpp"
#include "agora/protocol/transcript.hpp"
#include "agora/service/http_server.hpp"
#include "agora/service/script.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#ifndef AGORA_DATA_DIR
#define AGORA_DATA_DIR "data"
#endif

namespace {

using namespace agora;

service::HttpServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

service::ServiceConfig resolve_config(const std::string& path) {
    auto config = service::default_config(AGORA_DATA_DIR);
    if (!path.empty()) config = service::load_config(path, config);
    service::apply_env_overrides(config, service::process_env());
    spdlog::set_level(spdlog::level::from_str(config.log_level));
    return config;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

int serve(const std::string& config_path, const std::string& host, int port) {
    auto config = resolve_config(config_path);
    if (!host.empty()) config.host = host;
    if (port >= 0) config.port = static_cast<std::uint16_t>(port);
    service::DeliberationService svc(config, service::make_deps(config));
    svc.load_from_store();
    service::HttpServer server(svc, config.auth_token);
    const int bound = server.bind(config.host, config.port);
    if (bound < 0) {
        spdlog::error("cannot bind {}:{}", config.host, config.port);
        return 1;
    }
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    spdlog::info("listening on http://{}:{} (provider {}, scholar {})", config.host, bound, config.provider.kind,
                 config.scholar.mode);
    server.listen();
    g_server = nullptr;
    return 0;
}

int run_script(const std::string& config_path, const std::string& path, const std::string& provider,
               const std::string& transcript_out, const std::string& events_out) {
    auto config = resolve_config(config_path);
    if (!provider.empty()) config.provider.kind = provider;
    auto deps = service::make_deps(config);
    service::ScriptOptions options{config, deps.provider, deps.scholars, deps.catalog};
    const auto result = service::run_script(service::load_script(path), options);
    if (!transcript_out.empty()) write_file(transcript_out, result.transcript);
    if (!events_out.empty()) write_file(events_out, service::events_to_jsonl(result.events));
    std::cout << nlohmann::json{{"project_id", result.project_id},
                                {"digest", result.digest},
                                {"events", result.events.size()},
                                {"steps", result.steps}}
                     .dump(2)
              << "\n";
    return 0;
}

int export_project(const std::string& config_path, const std::string& project_id, const std::string& output) {
    auto config = resolve_config(config_path);
    if (config.data_dir.empty()) {
        spdlog::error("export needs data_dir (config or AGORA_DATA_DIR) pointing at the event logs");
        return 1;
    }
    service::DeliberationService svc(config, service::make_deps(config));
    svc.load_from_store();
    const auto doc = svc.export_project(project_id).dump(2) + "\n";
    if (output.empty() || output == "-") {
        std::cout << doc;
    } else {
        write_file(output, doc);
    }
    return 0;
}

int validate_transcript(const std::string& path) {
    protocol::ThreadState state;
    try {
        state = protocol::import_transcript(read_file(path));
    } catch (const protocol::TranscriptError& e) {
        std::cerr << "invalid: " << e.what() << "\n";
        return 1;
    }
    const auto problems = protocol::check_thread_invariants(state);
    for (const auto& p : problems) std::cerr << "invariant: " << p << "\n";
    if (!problems.empty()) return 1;
    std::cout << "ok: thread " << state.thread_id() << ", " << state.moves().size() << " moves, digest "
              << protocol::thread_digest(state) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"agora: multi-agent deliberation forum service"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("-c,--config", config_path, "YAML config file")->check(CLI::ExistingFile);

    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
    std::string host;
    int port = -1;
    serve_cmd->add_option("--host", host, "Bind address");
    serve_cmd->add_option("--port", port, "Port")->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--config", config_path, "YAML config file")->check(CLI::ExistingFile);

    auto* script_cmd = app.add_subcommand("run-script", "Run a scripted session headless");
    std::string script_path, provider, transcript_out, events_out;
    script_cmd->add_option("scenario", script_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    script_cmd->add_option("--provider", provider, "Language model provider")->check(CLI::IsMember({"mock", "live"}));
    script_cmd->add_option("--transcript", transcript_out, "Write the transcript here");
    script_cmd->add_option("--events", events_out, "Write the event log (JSONL) here");
    script_cmd->add_option("--config", config_path, "YAML config file")->check(CLI::ExistingFile);

    auto* export_cmd = app.add_subcommand("export", "Export a stored project");
    std::string project_id, output;
    export_cmd->add_option("project", project_id, "Project id")->required();
    export_cmd->add_option("-o,--output", output, "Output path ('-' for stdout)");
    export_cmd->add_option("--config", config_path, "YAML config file")->check(CLI::ExistingFile);

    auto* validate_cmd = app.add_subcommand("validate-transcript", "Replay and audit a thread transcript");
    std::string transcript_path;
    validate_cmd->add_option("file", transcript_path, "Transcript (JSONL)")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve_cmd) return serve(config_path, host, port);
        if (*script_cmd) return run_script(config_path, script_path, provider, transcript_out, events_out);
        if (*export_cmd) return export_project(config_path, project_id, output);
        if (*validate_cmd) return validate_transcript(transcript_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
