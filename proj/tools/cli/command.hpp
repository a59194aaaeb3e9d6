#pragma once

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace cohemark::cli {

struct Context {
    std::ostream& out;
    std::ostream& err;
};

/// Registers subcommand options and remembers how to read each one back, so a
/// run's fully resolved configuration can be written to (and replayed from) its manifest.
class OptionTable {
  public:
    enum class Role { Config, Input, Output };

    explicit OptionTable(CLI::App* app) : app_(app) {}

    template <class T>
    CLI::Option* option(const std::string& name, T& ref, const std::string& description, Role role = Role::Config) {
        auto* opt = app_->add_option("--" + name, ref, description)->capture_default_str();
        entries_.push_back({name, role, [&ref] { return nlohmann::json(ref); }});
        return opt;
    }

    CLI::Option* flag(const std::string& name, bool& ref, const std::string& description) {
        auto* opt = app_->add_flag("--" + name, ref, description);
        entries_.push_back({name, Role::Config, [&ref] { return nlohmann::json(ref); }});
        return opt;
    }

    /// Every registered option, keyed by flag name without the leading dashes.
    [[nodiscard]] nlohmann::json config() const;
    [[nodiscard]] nlohmann::json paths(Role role) const;
    [[nodiscard]] std::vector<std::string> names(Role role) const;

  private:
    struct Entry {
        std::string name;
        Role role;
        std::function<nlohmann::json()> read;
    };

    CLI::App* app_;
    std::vector<Entry> entries_;
};

class Command {
  public:
    virtual ~Command() = default;

    [[nodiscard]] virtual std::string name() const = 0;
    [[nodiscard]] virtual std::string description() const = 0;
    virtual void declare(OptionTable& table) = 0;
    /// Returns the process exit code; throws cohemark::Error for mapped failures.
    virtual int execute(Context& ctx) = 0;
};

std::vector<std::unique_ptr<Command>> make_commands();

}  // namespace cohemark::cli
