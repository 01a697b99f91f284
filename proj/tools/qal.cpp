// qal: ground states and localization diagnostics for the quintic NLSE in a
// piecewise-constant random potential.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "qal/config.hpp"
#include "qal/error.hpp"

namespace {

struct CommandInfo {
    const char* name;
    const char* help;
};

constexpr CommandInfo commands[] = {
    {"ground", "relax the ground state; writes ground.dump and ground.csv"},
    {"evolve", "real-time propagate --input dump for t_final; writes evolve.dump"},
    {"potential", "write the sampled random potential to potential.txt"},
    {"fit", "tail fits of --input dump; prints one CSV row"},
    {"sweep", "parameter sweep; writes sweep.csv and sweep-agg.csv"},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anderson localization in the quintic nonlinear Schroedinger equation"};
    app.require_subcommand(1);

    std::string config_path;
    std::map<std::string, std::string> flags;
    for (const auto& info : commands) {
        auto* sub = app.add_subcommand(info.name, info.help);
        sub->add_option("--config", config_path, "flat key=value configuration file");
        for (const auto& key : qal::config_keys())
            sub->add_option("--" + key, flags[key], "override '" + key + "'");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    const auto* chosen = app.get_subcommands().front();
    const auto command = qal::parse_command(chosen->get_name());

    std::vector<qal::Override> overrides;
    for (const auto& key : qal::config_keys()) {
        if (chosen->count("--" + key) > 0) overrides.emplace_back(key, flags[key]);
    }

    qal::RunConfig config;
    try {
        config = config_path.empty() ? qal::parse_config("", overrides) : qal::load_config(config_path, overrides);
    } catch (const qal::Error& e) {
        std::cerr << "qal: " << qal::to_string(e.kind()) << ": " << e.what() << '\n';
        return e.exit_code();
    }
    return qal::dispatch(*command, config, std::cout, std::cerr, qal::workers_from_environment());
}
