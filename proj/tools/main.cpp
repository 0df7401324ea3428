#include "immunotrack/commands.hpp"
#include "immunotrack/parallel.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    using immunotrack::Command;

    CLI::App app{"immunotrack: immune-inspired price trend trackers"};
    app.require_subcommand(1);

    immunotrack::CliOptions opts;
    opts.threads = immunotrack::default_thread_count();
    std::string config_path, input, output, artifact;
    std::uint64_t seed = 0;
    std::size_t horizon = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "flat key=value configuration file");
        sub->add_option("--set", opts.sets, "key=value override (repeatable)");
        sub->add_option("--seed", seed, "master RNG seed");
        sub->add_option("--output", output, "output path (default: stdout)");
        sub->add_option("--threads", opts.threads, "engine worker threads")
            ->check(CLI::PositiveNumber);
    };

    struct Sub {
        const char* name;
        const char* help;
        Command cmd;
    };
    const Sub subs[] = {
        {"run", "evolve trackers over a series and save the run artifact", Command::run},
        {"evaluate", "walk-forward evaluation against baselines", Command::evaluate},
        {"forecast", "forecast from a saved run artifact and recent prices", Command::forecast},
        {"inspect", "summarize a saved run artifact", Command::inspect},
        {"gen-synthetic", "write a synthetic price CSV", Command::gen_synthetic},
    };
    for (const Sub& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        add_common(sub);
        sub->add_option("--input", input, "price CSV (label,price)");
        sub->add_option("--horizon", horizon, "forecast horizon")->check(CLI::PositiveNumber);
        if (s.cmd == Command::forecast || s.cmd == Command::inspect) {
            sub->add_option("--artifact", artifact, "run artifact JSON")->required();
        }
        sub->callback([&opts, cmd = s.cmd] { opts.command = cmd; });
    }

    CLI11_PARSE(app, argc, argv);

    for (CLI::App* sub : app.get_subcommands()) {
        auto given = [sub](const char* name) {
            const CLI::Option* opt = sub->get_option_no_throw(name);
            return opt != nullptr && opt->count() > 0;
        };
        if (given("--config")) opts.config_path = config_path;
        if (given("--input")) opts.input = input;
        if (given("--output")) opts.output = output;
        if (given("--seed")) opts.seed = seed;
        if (given("--horizon")) opts.horizon = horizon;
        if (given("--artifact")) opts.artifact = artifact;
    }
    if (const char* env = std::getenv("IMMUNOTRACK_SEED")) opts.env_seed = env;

    return immunotrack::run_command(opts, std::cout, std::cerr);
}
