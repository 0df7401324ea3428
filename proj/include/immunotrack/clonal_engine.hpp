#pragma once

#include "immunotrack/affinity.hpp"
#include "immunotrack/ingest.hpp"
#include "immunotrack/parallel.hpp"
#include "immunotrack/rng.hpp"
#include "immunotrack/tracker.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace immunotrack {

struct EngineConfig {
    std::size_t pool_cap = 200;         // N
    double bind_threshold = 0.5;        // theta
    double clone_factor = 3.0;          // beta
    double mutation_sigma = 0.5;        // sigma0
    double frac_value = 1.0 / 3.0;
    double frac_extend = 1.0 / 3.0;
    double frac_shorten = 1.0 / 3.0;
    std::uint32_t apoptosis_age = 5;    // A
    std::size_t min_len = 3;            // Lmin
    std::size_t max_len = 12;           // Lmax
    std::size_t window = 20;            // W
    std::uint64_t seed = 42;

    /// Throws clonal_engine.BadConfig naming the offending field.
    void validate() const;

    std::size_t length_cap() const noexcept { return max_len < window ? max_len : window; }
};

struct SubsetSizes {
    std::size_t value = 0;
    std::size_t extend = 0;
    std::size_t shorten = 0;

    std::size_t total() const noexcept { return value + extend + shorten; }
};

struct DominantCandidate {
    Tracker tracker;  // snapshot taken before its clones were mutated
    std::size_t clone_count = 0;
    double affinity = 0.0;
};

struct GenerationReport {
    std::int64_t generation = 0;
    std::vector<BindRecord> binds;
    std::size_t pool_before = 0;
    std::size_t clones_created = 0;
    std::size_t deaths_apoptosis = 0;
    std::size_t deaths_cap = 0;
    std::size_t pool_after = 0;
    std::optional<DominantCandidate> dominant;
};

struct CullCounts {
    std::size_t apoptosis = 0;
    std::size_t cap = 0;
};

/// N fresh trackers with short review periods drawn from the warm-up movement
/// distribution. Ids are first_id, first_id + 1, ...
std::vector<Tracker> init_population(const EngineConfig& config,
                                     const MovementStats& stats,
                                     std::int64_t birth_generation,
                                     std::uint64_t first_id = 1);

/// max(1, round(beta * affinity * m)), rounding half away from zero.
std::size_t clone_count(double affinity, std::size_t length, const EngineConfig& config);

/// Splits clone_count across (value, extend, shorten) by largest remainder.
SubsetSizes partition_clones(std::size_t count, const EngineConfig& config);

/// Fresh clone of `parent`: new id, same lineage, counters reset.
Tracker make_clone(const Tracker& parent, std::uint64_t id, std::int64_t generation);

Tracker mutate_value(Tracker clone, double affinity, double scale,
                     const EngineConfig& config, Rng& rng);
/// Appends one movement at the tail; falls back to mutate_value at the length cap.
Tracker mutate_extend(Tracker clone, const MovementStats& stats, double affinity,
                      double scale, const EngineConfig& config, Rng& rng);
/// Removes one movement; falls back to mutate_value at Lmin.
Tracker mutate_shorten(Tracker clone, double affinity, double scale,
                       const EngineConfig& config, Rng& rng);

/// Total survival order: stimulation desc, misses asc, birth desc, id asc.
bool outranks(const Tracker& a, const Tracker& b) noexcept;

/// Removes trackers with misses >= A, then keeps the top N by `outranks`.
/// Survivors keep their relative order.
CullCounts apoptosis_and_cap(std::vector<Tracker>& pool, const EngineConfig& config);

/// One clonal-selection generation over `pool`. `next_id` is advanced past
/// every id handed to a new clone.
GenerationReport generation_step(std::vector<Tracker>& pool, const Antigen& antigen,
                                 double scale, const EngineConfig& config,
                                 const MovementStats& stats, std::int64_t generation,
                                 std::uint64_t& next_id, const ExecOptions& exec = {});

/// The short-term memory pool together with the state needed to evolve it.
class ClonalEngine {
public:
    ClonalEngine(EngineConfig config, MovementStats stats, std::int64_t birth_generation);

    GenerationReport step(const Antigen& antigen, double scale, std::int64_t generation,
                          const ExecOptions& exec = {});

    const std::vector<Tracker>& pool() const noexcept { return pool_; }
    const EngineConfig& config() const noexcept { return config_; }
    const MovementStats& stats() const noexcept { return stats_; }

private:
    EngineConfig config_;
    MovementStats stats_;
    std::vector<Tracker> pool_;
    std::uint64_t next_id_ = 1;
};

}  // namespace immunotrack
