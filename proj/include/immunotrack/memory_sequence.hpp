#pragma once

#include "immunotrack/clonal_engine.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace immunotrack {

/// Movements quantized to round(m / eps).
using Signature = std::vector<std::int64_t>;

/// Throws memory_sequence.BadEpsilon when eps is not finite or not > 0.
Signature signature(std::span<const double> movements, double eps);

struct SequenceEntry {
    std::int64_t start_generation = 0;
    std::int64_t end_generation = 0;  // inclusive
    MovementVector movements;
    std::size_t dominance = 0;        // clone count at promotion
    Signature sig;

    std::int64_t span() const noexcept { return end_generation - start_generation + 1; }
};

struct Pattern {
    std::vector<Signature> tuples;
    std::size_t count = 0;
    std::vector<std::size_t> starts;  // entry indices, non-overlapping, ascending

    friend bool operator==(const Pattern&, const Pattern&) = default;
};

struct TrackerSequence {
    std::vector<SequenceEntry> entries;
    std::vector<Pattern> patterns;
};

/// Appends the report's dominant tracker, or stretches the last entry when the
/// signatures agree. Reports without a dominant candidate leave a gap.
void promote_dominant(const GenerationReport& report, TrackerSequence& sequence,
                      double eps);

/// Repeated contiguous runs of signatures (length 1..max_pattern_len) with at
/// least min_repeats greedy non-overlapping occurrences. Ordered longest first,
/// then by count, then by first occurrence. Shorter patterns whose every
/// occurrence sits inside one occurrence of an already reported longer pattern
/// are dropped.
std::vector<Pattern> generalize(std::span<const Signature> signatures,
                                std::size_t min_repeats, std::size_t max_pattern_len);
void generalize(TrackerSequence& sequence, std::size_t min_repeats,
                std::size_t max_pattern_len);

struct PoolSnapshot {
    MovementVector movements;
    Signature sig;
    std::int64_t dwell = 0;
    std::size_t first_entry = 0;
};

/// Distinct-by-signature snapshots, most dwell time first.
std::vector<PoolSnapshot> long_term_pool(const TrackerSequence& sequence);

}  // namespace immunotrack
