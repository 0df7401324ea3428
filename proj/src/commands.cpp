#include "immunotrack/commands.hpp"

#include "immunotrack/config.hpp"
#include "immunotrack/error.hpp"
#include "immunotrack/forecast.hpp"
#include "immunotrack/report.hpp"

#include <ostream>

namespace immunotrack {
namespace {

RunConfig resolve_config(const CliOptions& o) {
    std::string text;
    if (o.config_path) text = read_file(*o.config_path);
    std::vector<KeyValue> overrides;
    for (const std::string& s : o.sets) overrides.push_back(split_assignment(s));
    if (o.seed) overrides.emplace_back("seed", std::to_string(*o.seed));
    if (o.horizon) overrides.emplace_back("horizon", std::to_string(*o.horizon));
    if (o.input) overrides.emplace_back("input", *o.input);
    if (o.output) overrides.emplace_back("output", *o.output);
    return parse_config(text, overrides, o.env_seed);
}

PriceSeries load_input(const RunConfig& config) {
    if (!config.input.empty()) return read_series_file(config.input);
    if (auto synth = config.synthetic()) return synth_series(*synth, config.engine.seed);
    throw Error("cli", "BadValue", "input: set --input PATH or a synth_kind");
}

void emit(const RunConfig& config, const std::string& content, std::ostream& out) {
    if (config.output.empty()) {
        out << content;
    } else {
        write_file_atomic(config.output, content);
    }
}

LoadedArtifact load_artifact(const CliOptions& o) {
    if (!o.artifact) throw Error("cli", "BadValue", "artifact: --artifact PATH is required");
    return load_run_artifact(read_file(*o.artifact));
}

}  // namespace

int run_command(const CliOptions& o, std::ostream& out, std::ostream& err) {
    try {
        const ExecOptions exec{o.threads};
        switch (o.command) {
            case Command::run: {
                const RunConfig config = resolve_config(o);
                const RunArtifacts run = run_online(load_input(config), config, exec);
                emit(config, run_report_json(config, run), out);
                break;
            }
            case Command::evaluate: {
                const RunConfig config = resolve_config(o);
                const EvalReport report = evaluate(load_input(config), config, exec);
                emit(config, evaluation_report_json(config, report), out);
                break;
            }
            case Command::forecast: {
                const LoadedArtifact art = load_artifact(o);
                RunConfig config = art.config;
                if (o.horizon) set_config_value(config, "horizon", std::to_string(*o.horizon));
                if (o.output) config.output = *o.output;
                for (const std::string& s : o.sets) {
                    auto [k, v] = split_assignment(s);
                    set_config_value(config, k, v);
                }
                config.validate();
                if (!o.input) throw Error("cli", "BadValue", "input: --input PATH is required");
                const PriceSeries recent = read_series_file(*o.input);
                const MovementVector mv = to_movements(recent);
                const std::size_t anchor = mv.size();
                const std::size_t lookback = config.engine.length_cap();
                const auto tail = std::span<const double>(mv).last(std::min(lookback, mv.size()));
                const auto candidates =
                    forecast_candidates(art.sequence, art.pool, config.forecast_include_pool,
                                        art.warmup.signature_eps);
                const Forecast f =
                    forecast_from(candidates, tail, config.horizon, config.forecast_threshold,
                                  scale_at(mv, anchor, config), anchor);
                emit(config, forecast_json(f, recent.prices.back()), out);
                break;
            }
            case Command::inspect: {
                out << inspect_summary(load_artifact(o));
                break;
            }
            case Command::gen_synthetic: {
                const RunConfig config = resolve_config(o);
                const auto synth = config.synthetic();
                if (!synth) throw Error("cli", "BadValue", "synth_kind: required for gen-synthetic");
                emit(config, to_csv(synth_series(*synth, config.engine.seed)), out);
                break;
            }
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace immunotrack
