#include "cli.hpp"

#include <chrono>
#include <filesystem>

#include "cohemark/json_io.hpp"
#include "command.hpp"
#include "io.hpp"

#ifndef COHEMARK_VERSION
#define COHEMARK_VERSION "0.0.0"
#endif

namespace cohemark::cli {

using nlohmann::json;

json OptionTable::config() const {
    json j = json::object();
    for (const auto& e : entries_) j[e.name] = e.read();
    return j;
}

json OptionTable::paths(Role role) const {
    json j = json::object();
    for (const auto& e : entries_) {
        if (e.role != role) continue;
        const auto v = e.read();
        if (v.is_string() && !v.get<std::string>().empty()) j[e.name] = v;
    }
    return j;
}

std::vector<std::string> OptionTable::names(Role role) const {
    std::vector<std::string> out;
    for (const auto& e : entries_)
        if (e.role == role) out.push_back(e.name);
    return out;
}

int exit_code_for(Errc code) {
    switch (code) {
        case Errc::InvalidArgument:
        case Errc::DimensionMismatch:
        case Errc::InsufficientData:
        case Errc::EmbedderMismatch:
        case Errc::SchemaVersionMismatch:
        case Errc::RankOutOfRange:
            return kExitConfig;
        case Errc::IoFailure:
        case Errc::EmptyInput:
            return kExitIo;
        case Errc::RemoteUnavailable:
        case Errc::LmUnavailable:
        case Errc::EmptyResponse:
            return kExitRemote;
        case Errc::NumericalFailure:
            break;
    }
    return kExitInternal;
}

namespace {

void write_manifest(const Command& cmd, const OptionTable& table, double seconds) {
    std::string first_output;
    for (const auto& flag : table.names(OptionTable::Role::Output)) {
        const auto v = table.config()[flag];
        if (v.is_string() && !v.get<std::string>().empty()) {
            first_output = v.get<std::string>();
            break;
        }
    }
    if (first_output.empty()) return;

    const auto config = table.config();
    json m{{"command", cmd.name()},
           {"toolkit_version", COHEMARK_VERSION},
           {"config", config},
           {"inputs", table.paths(OptionTable::Role::Input)},
           {"outputs", table.paths(OptionTable::Role::Output)},
           {"output_flags", table.names(OptionTable::Role::Output)},
           {"duration_seconds", seconds}};
    if (config.contains("seed")) m["seed"] = config["seed"];
    write_file(first_output + ".manifest.json", m.dump(2) + "\n");
}

int rerun(const std::string& manifest_path, const std::string& out_dir, std::ostream& out, std::ostream& err) {
    json m;
    try {
        m = json::parse(read_file(manifest_path));
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidArgument, manifest_path + ": not a manifest: " + e.what());
    }
    if (!m.is_object() || !m.contains("command") || !m.contains("config") || !m["config"].is_object())
        throw Error(Errc::InvalidArgument, manifest_path + ": manifest lacks \"command\" or \"config\"");
    if (m.value("toolkit_version", "") != COHEMARK_VERSION)
        err << "warning: manifest was written by toolkit version " << m.value("toolkit_version", "?")
            << ", this is " << COHEMARK_VERSION << "\n";

    auto config = m["config"];
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        for (const auto& flag : m.value("output_flags", std::vector<std::string>{})) {
            if (!config.contains(flag) || !config[flag].is_string()) continue;
            const auto original = config[flag].get<std::string>();
            if (original.empty()) continue;
            config[flag] = (std::filesystem::path(out_dir) / std::filesystem::path(original).filename()).string();
        }
    }

    std::vector<std::string> args{m["command"].get<std::string>()};
    for (const auto& [key, value] : config.items()) {
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back("--" + key);
        } else if (value.is_string()) {
            if (value.get<std::string>().empty()) continue;
            args.push_back("--" + key);
            args.push_back(value.get<std::string>());
        } else {
            args.push_back("--" + key);
            args.push_back(value.dump());
        }
    }
    return run(args, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"CoheMark: sentence-level watermarking with fuzzy semantic clusters", "cohemark"};
    app.set_version_flag("--version", COHEMARK_VERSION);
    app.require_subcommand(1);

    auto commands = make_commands();
    std::vector<std::unique_ptr<OptionTable>> tables;
    std::vector<CLI::App*> subs;
    for (const auto& cmd : commands) {
        auto* sub = app.add_subcommand(cmd->name(), cmd->description());
        tables.push_back(std::make_unique<OptionTable>(sub));
        cmd->declare(*tables.back());
        subs.push_back(sub);
    }
    std::string manifest;
    std::string out_dir;
    auto* rerun_cmd = app.add_subcommand("rerun", "repeat a run from its manifest");
    rerun_cmd->add_option("--manifest", manifest, "manifest written next to a run's first output")->required();
    rerun_cmd->add_option("--out-dir", out_dir, "write outputs here instead of their recorded paths");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (rerun_cmd->parsed()) return rerun(manifest, out_dir, out, err);
        for (std::size_t i = 0; i < commands.size(); ++i) {
            if (!subs[i]->parsed()) continue;
            Context ctx{out, err};
            const auto start = std::chrono::steady_clock::now();
            const int rc = commands[i]->execute(ctx);
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
            if (rc == kExitOk || rc == kExitAllFailed) write_manifest(*commands[i], *tables[i], elapsed.count());
            return rc;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitConfig;
}

}  // namespace cohemark::cli
