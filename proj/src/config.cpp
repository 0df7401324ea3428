#include "immunotrack/config.hpp"

#include "immunotrack/error.hpp"

#include <charconv>
#include <cmath>
#include <functional>

namespace immunotrack {
namespace {

[[noreturn]] void bad_value(std::string_view key, const std::string& why) {
    throw Error("cli", "BadValue", std::string(key) + ": " + why);
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(std::string_view key, std::string_view v) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
        bad_value(key, "'" + std::string(v) + "' is not a finite number");
    }
    return out;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) {
        bad_value(key, "'" + std::string(v) + "' is not a non-negative integer");
    }
    return out;
}

bool to_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    bad_value(key, "'" + std::string(v) + "' is not a boolean");
}

std::vector<double> to_list(std::string_view key, std::string_view v) {
    std::vector<double> out;
    while (!v.empty()) {
        const auto comma = v.find(',');
        out.push_back(to_double(key, trim(v.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
    }
    return out;
}

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += fmt(v[i]);
    }
    return out;
}

SynthParams& synth(RunConfig& c) { return c.synth; }

struct Field {
    const char* key;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::vector<Field>& fields() {
    using C = RunConfig;
    static const std::vector<Field> table = {
        {"pool_cap", [](C& c, std::string_view v) { c.engine.pool_cap = to_u64("pool_cap", v); },
         [](const C& c) { return std::to_string(c.engine.pool_cap); }},
        {"bind_threshold",
         [](C& c, std::string_view v) { c.engine.bind_threshold = to_double("bind_threshold", v); },
         [](const C& c) { return fmt(c.engine.bind_threshold); }},
        {"clone_factor",
         [](C& c, std::string_view v) { c.engine.clone_factor = to_double("clone_factor", v); },
         [](const C& c) { return fmt(c.engine.clone_factor); }},
        {"mutation_sigma",
         [](C& c, std::string_view v) { c.engine.mutation_sigma = to_double("mutation_sigma", v); },
         [](const C& c) { return fmt(c.engine.mutation_sigma); }},
        {"mut_frac_value",
         [](C& c, std::string_view v) { c.engine.frac_value = to_double("mut_frac_value", v); },
         [](const C& c) { return fmt(c.engine.frac_value); }},
        {"mut_frac_extend",
         [](C& c, std::string_view v) { c.engine.frac_extend = to_double("mut_frac_extend", v); },
         [](const C& c) { return fmt(c.engine.frac_extend); }},
        {"mut_frac_shorten",
         [](C& c, std::string_view v) { c.engine.frac_shorten = to_double("mut_frac_shorten", v); },
         [](const C& c) { return fmt(c.engine.frac_shorten); }},
        {"apoptosis_age",
         [](C& c, std::string_view v) {
             const auto a = to_u64("apoptosis_age", v);
             if (a > 1'000'000) bad_value("apoptosis_age", "too large");
             c.engine.apoptosis_age = static_cast<std::uint32_t>(a);
         },
         [](const C& c) { return std::to_string(c.engine.apoptosis_age); }},
        {"min_len", [](C& c, std::string_view v) { c.engine.min_len = to_u64("min_len", v); },
         [](const C& c) { return std::to_string(c.engine.min_len); }},
        {"max_len", [](C& c, std::string_view v) { c.engine.max_len = to_u64("max_len", v); },
         [](const C& c) { return std::to_string(c.engine.max_len); }},
        {"window", [](C& c, std::string_view v) { c.engine.window = to_u64("window", v); },
         [](const C& c) { return std::to_string(c.engine.window); }},
        {"seed", [](C& c, std::string_view v) { c.engine.seed = to_u64("seed", v); },
         [](const C& c) { return std::to_string(c.engine.seed); }},
        {"scale_mode",
         [](C& c, std::string_view v) {
             if (v == "fixed") c.scale_mode = ScaleMode::fixed;
             else if (v == "rolling") c.scale_mode = ScaleMode::rolling;
             else bad_value("scale_mode", "expected 'fixed' or 'rolling'");
         },
         [](const C& c) {
             return std::string(c.scale_mode == ScaleMode::fixed ? "fixed" : "rolling");
         }},
        {"scale_window",
         [](C& c, std::string_view v) { c.scale_window = to_u64("scale_window", v); },
         [](const C& c) { return std::to_string(c.scale_window); }},
        {"scale_value",
         [](C& c, std::string_view v) { c.scale_value = to_double("scale_value", v); },
         [](const C& c) { return fmt(c.scale_value); }},
        {"signature_eps",
         [](C& c, std::string_view v) {
             if (v == "auto") c.signature_eps.reset();
             else c.signature_eps = to_double("signature_eps", v);
         },
         [](const C& c) { return c.signature_eps ? fmt(*c.signature_eps) : std::string("auto"); }},
        {"min_repeats",
         [](C& c, std::string_view v) { c.min_repeats = to_u64("min_repeats", v); },
         [](const C& c) { return std::to_string(c.min_repeats); }},
        {"max_pattern_len",
         [](C& c, std::string_view v) { c.max_pattern_len = to_u64("max_pattern_len", v); },
         [](const C& c) { return std::to_string(c.max_pattern_len); }},
        {"generalize_every",
         [](C& c, std::string_view v) { c.generalize_every = to_u64("generalize_every", v); },
         [](const C& c) { return std::to_string(c.generalize_every); }},
        {"forecast_threshold",
         [](C& c, std::string_view v) {
             c.forecast_threshold = to_double("forecast_threshold", v);
         },
         [](const C& c) { return fmt(c.forecast_threshold); }},
        {"horizon", [](C& c, std::string_view v) { c.horizon = to_u64("horizon", v); },
         [](const C& c) { return std::to_string(c.horizon); }},
        {"warmup", [](C& c, std::string_view v) { c.warmup = to_u64("warmup", v); },
         [](const C& c) { return std::to_string(c.warmup); }},
        {"dir_eps",
         [](C& c, std::string_view v) {
             if (v == "auto") c.dir_eps.reset();
             else c.dir_eps = to_double("dir_eps", v);
         },
         [](const C& c) { return c.dir_eps ? fmt(*c.dir_eps) : std::string("auto"); }},
        {"forecast_include_pool",
         [](C& c, std::string_view v) {
             c.forecast_include_pool = to_bool("forecast_include_pool", v);
         },
         [](const C& c) { return std::string(c.forecast_include_pool ? "true" : "false"); }},
        {"input", [](C& c, std::string_view v) { c.input = v; },
         [](const C& c) { return c.input; }},
        {"output", [](C& c, std::string_view v) { c.output = v; },
         [](const C& c) { return c.output; }},
        {"synth_kind",
         [](C& c, std::string_view v) {
             if (v == "none") {
                 c.synth_kind.reset();
                 return;
             }
             try {
                 c.synth_kind = parse_synth_kind(v);
             } catch (const Error&) {
                 bad_value("synth_kind",
                           "expected none, periodic, periodic_noisy, random_walk or constant");
             }
         },
         [](const C& c) {
             return c.synth_kind ? std::string(synth_kind_name(*c.synth_kind))
                                 : std::string("none");
         }},
        {"synth_length",
         [](C& c, std::string_view v) { synth(c).length = to_u64("synth_length", v); },
         [](const C& c) { return std::to_string(c.synth.length); }},
        {"synth_base",
         [](C& c, std::string_view v) { synth(c).base = to_double("synth_base", v); },
         [](const C& c) { return fmt(c.synth.base); }},
        {"synth_pattern",
         [](C& c, std::string_view v) { synth(c).pattern = to_list("synth_pattern", v); },
         [](const C& c) { return fmt_list(c.synth.pattern); }},
        {"synth_noise",
         [](C& c, std::string_view v) { synth(c).noise_stddev = to_double("synth_noise", v); },
         [](const C& c) { return fmt(c.synth.noise_stddev); }},
        {"synth_step",
         [](C& c, std::string_view v) { synth(c).step_stddev = to_double("synth_step", v); },
         [](const C& c) { return fmt(c.synth.step_stddev); }},
    };
    return table;
}

}  // namespace

KeyValue split_assignment(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
        throw Error("cli", "BadValue", "expected key=value, got '" + std::string(text) + "'");
    }
    return {std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1)))};
}

void set_config_value(RunConfig& config, std::string_view key, std::string_view value) {
    for (const Field& f : fields()) {
        if (key == f.key) {
            f.set(config, value);
            return;
        }
    }
    throw Error("cli", "UnknownKey", "unknown configuration key '" + std::string(key) + "'");
}

std::vector<KeyValue> config_entries(const RunConfig& config) {
    std::vector<KeyValue> out;
    for (const Field& f : fields()) out.emplace_back(f.key, f.get(config));
    return out;
}

std::optional<SynthParams> RunConfig::synthetic() const {
    if (!synth_kind) return std::nullopt;
    SynthParams p = synth;
    p.kind = *synth_kind;
    return p;
}

void RunConfig::validate() const {
    try {
        engine.validate();
    } catch (const Error& e) {
        // Re-issue under the cli namespace; the message already names the key.
        std::string msg = e.what();
        msg = msg.substr(msg.find(": ") + 2);
        throw Error("cli", "BadValue", msg);
    }
    if (scale_window < 1) bad_value("scale_window", "must be >= 1");
    if (!(scale_value > 0.0)) bad_value("scale_value", "must be > 0");
    if (signature_eps && !(*signature_eps > 0.0)) bad_value("signature_eps", "must be > 0");
    if (min_repeats < 2) bad_value("min_repeats", "must be >= 2");
    if (max_pattern_len < 1) bad_value("max_pattern_len", "must be >= 1");
    if (generalize_every < 1) bad_value("generalize_every", "must be >= 1");
    if (!(forecast_threshold > 0.0 && forecast_threshold < 1.0)) {
        bad_value("forecast_threshold", "must lie in (0, 1)");
    }
    if (horizon < 1) bad_value("horizon", "must be >= 1");
    if (warmup < engine.window + 1) bad_value("warmup", "must be >= window + 1");
    if (dir_eps && !(*dir_eps > 0.0)) bad_value("dir_eps", "must be > 0");
    if (auto synthetic = this->synthetic()) {
        if (synthetic->length < 2) bad_value("synth_length", "must be >= 2");
        if (!(synthetic->base > 0.0)) bad_value("synth_base", "must be > 0");
        if (synthetic->noise_stddev < 0.0) bad_value("synth_noise", "must be >= 0");
        if (synthetic->step_stddev < 0.0) bad_value("synth_step", "must be >= 0");
        const bool periodic = synthetic->kind == SynthKind::periodic ||
                              synthetic->kind == SynthKind::periodic_noisy;
        if (periodic && synthetic->pattern.empty()) {
            bad_value("synth_pattern", "periodic generators need a delta pattern");
        }
    }
}

RunConfig parse_config(std::string_view file_text, std::span<const KeyValue> overrides,
                       std::optional<std::string> env_seed) {
    RunConfig config;
    if (env_seed) set_config_value(config, "seed", trim(*env_seed));

    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < file_text.size()) {
        auto nl = file_text.find('\n', pos);
        if (nl == std::string_view::npos) nl = file_text.size();
        std::string_view line = file_text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.find('=') == std::string_view::npos) {
            throw Error("cli", "BadValue",
                        "line " + std::to_string(line_no) + ": expected key=value");
        }
        auto [key, value] = split_assignment(line);
        set_config_value(config, key, value);
    }
    for (const auto& [key, value] : overrides) set_config_value(config, key, value);
    config.validate();
    return config;
}

}  // namespace immunotrack
