#pragma once

#include "immunotrack/ingest.hpp"

#include <cstdint>

namespace immunotrack {

/// B-cell analogue: a review period of movements plus bookkeeping counters.
struct Tracker {
    std::uint64_t id = 0;
    MovementVector movements;
    std::int64_t birth_generation = 0;
    std::uint64_t stimulation = 0;
    std::uint32_t consecutive_misses = 0;
    std::uint64_t lineage_id = 0;

    std::size_t length() const noexcept { return movements.size(); }

    friend bool operator==(const Tracker&, const Tracker&) = default;
};

}  // namespace immunotrack
