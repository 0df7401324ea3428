#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace immunotrack {

using MovementVector = std::vector<double>;

struct PriceSeries {
    std::vector<std::string> labels;
    std::vector<double> prices;

    std::size_t size() const noexcept { return prices.size(); }
};

/// The W most recent movements ending at price index `anchor`.
struct Antigen {
    std::size_t anchor = 0;
    MovementVector movements;
};

struct MovementStats {
    double mean = 0.0;
    double stddev = 0.0;
};

enum class SynthKind { periodic, periodic_noisy, random_walk, constant };

struct SynthParams {
    SynthKind kind = SynthKind::constant;
    std::size_t length = 0;
    double base = 50.0;
    std::vector<double> pattern;  // periodic kinds
    double noise_stddev = 0.0;    // periodic_noisy
    double step_stddev = 1.0;     // random_walk
};

/// Parses `label,price` CSV. Throws ingest.MalformedCsv / BadPrice / TooShort.
PriceSeries load_series(std::string_view text);
PriceSeries read_series_file(const std::string& path);
std::string to_csv(const PriceSeries& series);

/// Checks the PriceSeries invariants, throwing the same errors as load_series.
void validate_series(const PriceSeries& series);

/// result[i] = prices[i+1] - prices[i]
MovementVector to_movements(const PriceSeries& series);

/// Movements anchor-W .. anchor-1, i.e. the deltas ending at price `anchor`.
Antigen make_antigen(std::span<const double> movements, std::size_t anchor,
                     std::size_t window);

PriceSeries synth_series(const SynthParams& params, std::uint64_t seed);
SynthKind parse_synth_kind(std::string_view name);
std::string_view synth_kind_name(SynthKind kind);

/// Population mean and standard deviation. Empty input yields {0, 0}.
MovementStats movement_stats(std::span<const double> movements);

/// Standard deviation of movements[anchor-window .. anchor-1] (clamped at 0),
/// floored at `floor`. This is the rolling affinity scale at `anchor`.
double rolling_scale(std::span<const double> movements, std::size_t anchor,
                     std::size_t window, double floor = 1e-6);

}  // namespace immunotrack
