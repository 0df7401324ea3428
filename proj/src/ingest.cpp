#include "immunotrack/ingest.hpp"

#include "immunotrack/error.hpp"
#include "immunotrack/rng.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace immunotrack {
namespace {

[[noreturn]] void fail(const char* code, const std::string& message) {
    throw Error("ingest", code, message);
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

double parse_price(std::string_view field, std::size_t line_no) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (field.empty() || ec != std::errc{} || ptr != last) {
        fail("BadPrice", "line " + std::to_string(line_no) + ": '" +
                             std::string(field) + "' is not a decimal number");
    }
    if (!std::isfinite(value) || value <= 0.0) {
        fail("BadPrice", "line " + std::to_string(line_no) + ": price " +
                             std::string(field) + " must be finite and > 0");
    }
    return value;
}

}  // namespace

void validate_series(const PriceSeries& series) {
    if (series.labels.size() != series.prices.size()) {
        fail("MalformedCsv", "label and price counts differ");
    }
    if (series.prices.size() < 2) {
        fail("TooShort", "a series needs at least 2 prices, got " +
                             std::to_string(series.prices.size()));
    }
    for (std::size_t i = 0; i < series.prices.size(); ++i) {
        const double p = series.prices[i];
        if (!std::isfinite(p) || p <= 0.0) {
            fail("BadPrice", "price at index " + std::to_string(i) +
                                 " must be finite and > 0");
        }
    }
}

PriceSeries load_series(std::string_view text) {
    PriceSeries series;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        const bool last_line = nl == std::string_view::npos;
        if (last_line) nl = text.size();
        std::string_view line = strip_cr(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (last_line && line.empty()) break;  // trailing newline
        if (!header_seen) {
            if (line != "label,price") {
                fail("MalformedCsv", "expected header 'label,price', got '" +
                                         std::string(line) + "'");
            }
            header_seen = true;
            if (last_line) break;
            continue;
        }
        const std::size_t comma = line.find(',');
        if (comma == std::string_view::npos ||
            line.find(',', comma + 1) != std::string_view::npos) {
            fail("MalformedCsv",
                 "line " + std::to_string(line_no) + ": expected 2 columns");
        }
        series.labels.emplace_back(line.substr(0, comma));
        series.prices.push_back(parse_price(line.substr(comma + 1), line_no));
        if (last_line) break;
    }
    if (!header_seen) fail("MalformedCsv", "empty input");
    validate_series(series);
    return series;
}

PriceSeries read_series_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("Io", "cannot open input file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_series(buf.str());
}

std::string to_csv(const PriceSeries& series) {
    std::string out = "label,price\n";
    char num[64];
    for (std::size_t i = 0; i < series.prices.size(); ++i) {
        auto [ptr, ec] = std::to_chars(num, num + sizeof num, series.prices[i]);
        out += series.labels[i];
        out += ',';
        out.append(num, ptr);
        out += '\n';
    }
    return out;
}

MovementVector to_movements(const PriceSeries& series) {
    MovementVector out;
    out.reserve(series.prices.empty() ? 0 : series.prices.size() - 1);
    for (std::size_t i = 1; i < series.prices.size(); ++i) {
        out.push_back(series.prices[i] - series.prices[i - 1]);
    }
    return out;
}

Antigen make_antigen(std::span<const double> movements, std::size_t anchor,
                     std::size_t window) {
    if (window < 1 || anchor < window || anchor > movements.size()) {
        fail("WindowOutOfRange", "anchor " + std::to_string(anchor) +
                                     " with window " + std::to_string(window) +
                                     " over " + std::to_string(movements.size()) +
                                     " movements");
    }
    auto slice = movements.subspan(anchor - window, window);
    return Antigen{anchor, MovementVector(slice.begin(), slice.end())};
}

SynthKind parse_synth_kind(std::string_view name) {
    if (name == "periodic") return SynthKind::periodic;
    if (name == "periodic_noisy") return SynthKind::periodic_noisy;
    if (name == "random_walk") return SynthKind::random_walk;
    if (name == "constant") return SynthKind::constant;
    fail("BadParams", "unknown generator '" + std::string(name) + "'");
}

std::string_view synth_kind_name(SynthKind kind) {
    switch (kind) {
        case SynthKind::periodic: return "periodic";
        case SynthKind::periodic_noisy: return "periodic_noisy";
        case SynthKind::random_walk: return "random_walk";
        case SynthKind::constant: return "constant";
    }
    return "constant";
}

PriceSeries synth_series(const SynthParams& params, std::uint64_t seed) {
    if (params.length < 2) fail("BadParams", "length must be >= 2");
    if (!std::isfinite(params.base) || params.base <= 0.0) {
        fail("BadParams", "base price must be finite and > 0");
    }
    const bool periodic = params.kind == SynthKind::periodic ||
                          params.kind == SynthKind::periodic_noisy;
    if (periodic && params.pattern.empty()) {
        fail("BadParams", "periodic generators need a non-empty delta pattern");
    }
    if (params.kind == SynthKind::periodic_noisy && !(params.noise_stddev >= 0.0)) {
        fail("BadParams", "noise stddev must be >= 0");
    }
    if (params.kind == SynthKind::random_walk && !(params.step_stddev >= 0.0)) {
        fail("BadParams", "step stddev must be >= 0");
    }

    Rng rng = substream(seed, StreamTag::synthetic);
    std::normal_distribution<double> noise(
        0.0, params.kind == SynthKind::random_walk ? params.step_stddev
                                                   : params.noise_stddev);
    PriceSeries s;
    s.labels.reserve(params.length);
    s.prices.reserve(params.length);
    double price = params.base;
    for (std::size_t i = 0; i < params.length; ++i) {
        if (i > 0) {
            double delta = 0.0;
            switch (params.kind) {
                case SynthKind::constant: break;
                case SynthKind::periodic:
                    delta = params.pattern[(i - 1) % params.pattern.size()];
                    break;
                case SynthKind::periodic_noisy:
                    delta = params.pattern[(i - 1) % params.pattern.size()];
                    if (params.noise_stddev > 0.0) delta += noise(rng);
                    break;
                case SynthKind::random_walk:
                    if (params.step_stddev > 0.0) delta = noise(rng);
                    break;
            }
            price += delta;
        }
        if (!std::isfinite(price) || price <= 0.0) {
            fail("BadParams", "generated price at index " + std::to_string(i) +
                                  " is not > 0; raise the base price");
        }
        s.labels.push_back("t" + std::to_string(i));
        s.prices.push_back(price);
    }
    return s;
}

MovementStats movement_stats(std::span<const double> movements) {
    if (movements.empty()) return {};
    double sum = 0.0;
    for (double m : movements) sum += m;
    const double mean = sum / static_cast<double>(movements.size());
    double ss = 0.0;
    for (double m : movements) ss += (m - mean) * (m - mean);
    return {mean, std::sqrt(ss / static_cast<double>(movements.size()))};
}

double rolling_scale(std::span<const double> movements, std::size_t anchor,
                     std::size_t window, double floor) {
    anchor = std::min(anchor, movements.size());
    const std::size_t lo = anchor > window ? anchor - window : 0;
    const double sd = movement_stats(movements.subspan(lo, anchor - lo)).stddev;
    return std::max(sd, floor);
}

}  // namespace immunotrack
