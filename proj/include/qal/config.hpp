#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qal/sweeps.hpp"

namespace qal {

/// Complete, validated description of one CLI invocation.
struct RunConfig {
    ModelParams model;
    std::uint64_t seed = 42;
    double frag_threshold = default_fragmentation_threshold;
    double t_final = 5.0;

    std::optional<SweepVariable> sweep_var;
    std::vector<double> sweep_values;
    std::size_t n_seeds = 1;
    double jump_factor = default_jump_factor;
    std::uint32_t S_split = 200;
    std::size_t max_runs = 100'000;

    std::string out_dir = ".";
    std::string input;

    /// "key=value" for every key, in a fixed order; parse_config accepts it back.
    std::vector<std::string> describe() const;

    /// Requires sweep_var and sweep_values.
    SweepSpec sweep_spec() const;
};

using Override = std::pair<std::string, std::string>;

/// Keys accepted in config files and as --key flags.
const std::vector<std::string>& config_keys();

/*!
 * Flat key=value text ('#' starts a comment line) plus overrides applied in
 * order after the file.  Unknown keys and bad values raise ConfigError naming
 * the key.
 */
RunConfig parse_config(std::string_view text, const std::vector<Override>& overrides = {});

RunConfig load_config(const std::string& path, const std::vector<Override>& overrides = {});

/// Comma list "0,1,3" or inclusive range "start:stop:step".
std::vector<double> parse_value_list(std::string_view key, std::string_view text);

//---------------------------------------------------------------------------//

enum class Command { ground, evolve, potential, fit, sweep };

std::optional<Command> parse_command(std::string_view name);

/*!
 * Run one command.  Files go to config.out_dir; short human-readable results
 * go to `out`.  Returns 0 on success or the failing ErrorKind's exit code,
 * after writing one diagnostic line to `err`.
 */
int dispatch(Command command, const RunConfig& config, std::ostream& out, std::ostream& err,
             std::size_t workers = 0);

/// Worker count from QAL_WORKERS, or 0 (= hardware concurrency) when unset.
std::size_t workers_from_environment();

}  // namespace qal
