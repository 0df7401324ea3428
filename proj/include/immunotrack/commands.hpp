#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace immunotrack {

enum class Command { run, evaluate, forecast, inspect, gen_synthetic };

struct CliOptions {
    Command command = Command::evaluate;
    std::optional<std::string> config_path;
    std::optional<std::string> input;
    std::optional<std::string> output;
    std::optional<std::string> artifact;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> horizon;
    std::vector<std::string> sets;          // "key=value", applied in order
    std::optional<std::string> env_seed;    // IMMUNOTRACK_SEED
    unsigned threads = 1;
};

/// Executes one subcommand. Returns the process exit code; failures print a
/// single "error: <module>.<Code>: ..." line to `err`.
int run_command(const CliOptions& options, std::ostream& out, std::ostream& err);

}  // namespace immunotrack
