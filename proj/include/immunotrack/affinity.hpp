#pragma once

#include "immunotrack/ingest.hpp"
#include "immunotrack/tracker.hpp"

#include <span>

namespace immunotrack {

struct BindRecord {
    std::uint64_t tracker_id = 0;
    std::size_t anchor = 0;
    double affinity = 0.0;
    std::size_t matched_len = 0;
    // Proliferation outcome of this bind.
    std::size_t clone_count = 0;
    std::size_t value_clones = 0;
    std::size_t extend_clones = 0;
    std::size_t shorten_clones = 0;
};

/// RMS(a - b) / scale. Throws affinity.LengthMismatch / affinity.BadScale.
double distance(std::span<const double> a, std::span<const double> b, double scale);

/// exp(-distance) against the last a.size() values of `window`.
double suffix_affinity(std::span<const double> movements,
                       std::span<const double> window, double scale);

/// Affinity of a tracker whose tail is aligned with the antigen's most recent
/// movement. A tracker longer than the antigen is a LengthMismatch.
double bind_affinity(const Tracker& tracker, const Antigen& antigen, double scale);

inline bool is_bound(double affinity, double threshold) noexcept {
    return affinity >= threshold;
}

}  // namespace immunotrack
