#pragma once

#include "immunotrack/clonal_engine.hpp"
#include "immunotrack/ingest.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace immunotrack {

enum class ScaleMode { fixed, rolling };

struct RunConfig {
    EngineConfig engine;

    ScaleMode scale_mode = ScaleMode::rolling;
    std::size_t scale_window = 50;
    double scale_value = 1.0;               // used when scale_mode == fixed
    std::optional<double> signature_eps;    // unset: 0.25 x baseline scale
    std::size_t min_repeats = 2;
    std::size_t max_pattern_len = 10;
    std::size_t generalize_every = 25;
    double forecast_threshold = 0.5;        // theta_f
    std::size_t horizon = 5;
    std::size_t warmup = 60;
    std::optional<double> dir_eps;          // unset: signature eps / 2
    bool forecast_include_pool = false;

    std::string input;
    std::string output;
    std::optional<SynthKind> synth_kind;    // unset: read `input`
    SynthParams synth{SynthKind::periodic, 500, 50.0, {}, 0.0, 1.0};

    /// Generator parameters when a synthetic source is configured.
    std::optional<SynthParams> synthetic() const;

    /// Throws cli.BadValue naming the offending key.
    void validate() const;
};

inline constexpr double kSignatureEpsFactor = 0.25;

using KeyValue = std::pair<std::string, std::string>;

/// Flat `key=value` text with `#` comments, then each override in order.
/// `env_seed` (IMMUNOTRACK_SEED) sits below both. Throws cli.UnknownKey and
/// cli.BadValue.
RunConfig parse_config(std::string_view file_text,
                       std::span<const KeyValue> overrides = {},
                       std::optional<std::string> env_seed = std::nullopt);

/// Applies a single key=value to `config` without validating the whole.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

/// Every key with its current value rendered as config-file text, in the
/// fixed key order. Parsing this back yields the same configuration.
std::vector<KeyValue> config_entries(const RunConfig& config);

/// Splits "key=value"; throws cli.BadValue when '=' is missing.
KeyValue split_assignment(std::string_view text);

}  // namespace immunotrack
