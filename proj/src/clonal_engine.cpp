#include "immunotrack/clonal_engine.hpp"

#include "immunotrack/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace immunotrack {
namespace {

[[noreturn]] void bad_config(const std::string& field, const std::string& why) {
    throw Error("clonal_engine", "BadConfig", field + " " + why);
}

double draw_normal(Rng& rng, double mean, double stddev) {
    if (!(stddev > 0.0)) return mean;
    std::normal_distribution<double> dist(mean, stddev);
    return dist(rng);
}

std::size_t draw_index(Rng& rng, std::size_t n) {
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    return dist(rng);
}

}  // namespace

void EngineConfig::validate() const {
    if (pool_cap < 1) bad_config("pool_cap", "must be >= 1");
    if (!(bind_threshold > 0.0 && bind_threshold < 1.0)) {
        bad_config("bind_threshold", "must lie in (0, 1)");
    }
    if (!(clone_factor > 0.0) || !std::isfinite(clone_factor)) {
        bad_config("clone_factor", "must be finite and > 0");
    }
    if (!(mutation_sigma > 0.0) || !std::isfinite(mutation_sigma)) {
        bad_config("mutation_sigma", "must be finite and > 0");
    }
    for (auto [name, f] : std::array<std::pair<const char*, double>, 3>{
             {{"mut_frac_value", frac_value},
              {"mut_frac_extend", frac_extend},
              {"mut_frac_shorten", frac_shorten}}}) {
        if (!(f > 0.0) || !std::isfinite(f)) bad_config(name, "must be > 0");
    }
    if (std::abs(frac_value + frac_extend + frac_shorten - 1.0) > 1e-9) {
        bad_config("mut_frac_value/mut_frac_extend/mut_frac_shorten", "must sum to 1");
    }
    if (apoptosis_age < 1) bad_config("apoptosis_age", "must be >= 1");
    if (window < 1) bad_config("window", "must be >= 1");
    if (min_len < 1) bad_config("min_len", "must be >= 1");
    if (max_len > window) bad_config("max_len", "must be <= window");
    if (min_len > max_len) bad_config("min_len", "must be <= max_len");
}

std::vector<Tracker> init_population(const EngineConfig& config,
                                     const MovementStats& stats,
                                     std::int64_t birth_generation,
                                     std::uint64_t first_id) {
    config.validate();
    const std::size_t max_initial = std::min(config.length_cap(), config.min_len + 2);
    std::vector<Tracker> pool;
    pool.reserve(config.pool_cap);
    for (std::size_t i = 0; i < config.pool_cap; ++i) {
        Rng rng = substream(config.seed, StreamTag::init_population, i);
        std::uniform_int_distribution<std::size_t> len_dist(config.min_len, max_initial);
        Tracker t;
        t.id = first_id + i;
        t.lineage_id = t.id;
        t.birth_generation = birth_generation;
        t.movements.resize(len_dist(rng));
        for (double& v : t.movements) v = draw_normal(rng, stats.mean, stats.stddev);
        pool.push_back(std::move(t));
    }
    return pool;
}

std::size_t clone_count(double affinity, std::size_t length, const EngineConfig& config) {
    const long n = std::lround(config.clone_factor * affinity * static_cast<double>(length));
    return static_cast<std::size_t>(std::max(1L, n));
}

SubsetSizes partition_clones(std::size_t count, const EngineConfig& config) {
    const std::array<double, 3> fracs{config.frac_value, config.frac_extend,
                                      config.frac_shorten};
    std::array<std::size_t, 3> sizes{};
    std::array<double, 3> remainders{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double quota = fracs[i] * static_cast<double>(count);
        sizes[i] = static_cast<std::size_t>(std::floor(quota));
        remainders[i] = quota - std::floor(quota);
        assigned += sizes[i];
    }
    // Guard against fractions summing to slightly more than 1.
    while (assigned > count) {
        auto it = std::max_element(sizes.begin(), sizes.end());
        --*it;
        --assigned;
    }
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return remainders[a] > remainders[b];
    });
    for (std::size_t k = 0; assigned < count; k = (k + 1) % 3, ++assigned) {
        ++sizes[order[k]];
    }
    return {sizes[0], sizes[1], sizes[2]};
}

Tracker make_clone(const Tracker& parent, std::uint64_t id, std::int64_t generation) {
    Tracker c;
    c.id = id;
    c.movements = parent.movements;
    c.birth_generation = generation;
    c.lineage_id = parent.lineage_id;
    return c;
}

Tracker mutate_value(Tracker clone, double affinity, double scale,
                     const EngineConfig& config, Rng& rng) {
    if (clone.movements.empty()) return clone;
    const std::size_t idx = draw_index(rng, clone.movements.size());
    const double sd = config.mutation_sigma * (1.0 - affinity) * scale;
    clone.movements[idx] += draw_normal(rng, 0.0, sd);
    return clone;
}

Tracker mutate_extend(Tracker clone, const MovementStats& stats, double affinity,
                      double scale, const EngineConfig& config, Rng& rng) {
    if (clone.movements.size() >= config.length_cap()) {
        return mutate_value(std::move(clone), affinity, scale, config, rng);
    }
    clone.movements.push_back(draw_normal(rng, stats.mean, stats.stddev));
    return clone;
}

Tracker mutate_shorten(Tracker clone, double affinity, double scale,
                       const EngineConfig& config, Rng& rng) {
    if (clone.movements.size() <= config.min_len) {
        return mutate_value(std::move(clone), affinity, scale, config, rng);
    }
    const std::size_t idx = draw_index(rng, clone.movements.size());
    clone.movements.erase(clone.movements.begin() + static_cast<std::ptrdiff_t>(idx));
    return clone;
}

bool outranks(const Tracker& a, const Tracker& b) noexcept {
    if (a.stimulation != b.stimulation) return a.stimulation > b.stimulation;
    if (a.consecutive_misses != b.consecutive_misses) {
        return a.consecutive_misses < b.consecutive_misses;
    }
    if (a.birth_generation != b.birth_generation) {
        return a.birth_generation > b.birth_generation;
    }
    return a.id < b.id;
}

CullCounts apoptosis_and_cap(std::vector<Tracker>& pool, const EngineConfig& config) {
    CullCounts counts;
    const auto before = pool.size();
    std::erase_if(pool, [&](const Tracker& t) {
        return t.consecutive_misses >= config.apoptosis_age;
    });
    counts.apoptosis = before - pool.size();
    if (pool.size() <= config.pool_cap) return counts;

    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::nth_element(order.begin(),
                     order.begin() + static_cast<std::ptrdiff_t>(config.pool_cap),
                     order.end(), [&](std::size_t a, std::size_t b) {
                         return outranks(pool[a], pool[b]);
                     });
    std::vector<bool> keep(pool.size(), false);
    for (std::size_t i = 0; i < config.pool_cap; ++i) keep[order[i]] = true;
    std::vector<Tracker> survivors;
    survivors.reserve(config.pool_cap);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (keep[i]) survivors.push_back(std::move(pool[i]));
    }
    counts.cap = pool.size() - survivors.size();
    pool = std::move(survivors);
    return counts;
}

GenerationReport generation_step(std::vector<Tracker>& pool, const Antigen& antigen,
                                 double scale, const EngineConfig& config,
                                 const MovementStats& stats, std::int64_t generation,
                                 std::uint64_t& next_id, const ExecOptions& exec) {
    GenerationReport report;
    report.generation = generation;
    report.pool_before = pool.size();

    std::vector<double> affinity(pool.size());
    parallel_for(pool.size(), exec.threads, [&](std::size_t i) {
        affinity[i] = bind_affinity(pool[i], antigen, scale);
    });

    // Sequential bookkeeping pass fixes clone ids and subset sizes, so the
    // parallel mutation pass below has no ordering freedom left.
    struct Plan {
        std::size_t parent;
        std::size_t first_slot;
        SubsetSizes subsets;
        std::uint64_t first_id;
    };
    std::vector<Plan> plans;
    std::size_t total_clones = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        Tracker& t = pool[i];
        if (!is_bound(affinity[i], config.bind_threshold)) {
            ++t.consecutive_misses;
            continue;
        }
        t.consecutive_misses = 0;
        const std::size_t n = clone_count(affinity[i], t.length(), config);
        t.stimulation += n;
        const SubsetSizes subsets = partition_clones(n, config);
        plans.push_back({i, total_clones, subsets, next_id});
        next_id += n;
        total_clones += n;

        BindRecord rec;
        rec.tracker_id = t.id;
        rec.anchor = antigen.anchor;
        rec.affinity = affinity[i];
        rec.matched_len = t.length();
        rec.clone_count = n;
        rec.value_clones = subsets.value;
        rec.extend_clones = subsets.extend;
        rec.shorten_clones = subsets.shorten;
        report.binds.push_back(rec);

        const bool better =
            !report.dominant || n > report.dominant->clone_count ||
            (n == report.dominant->clone_count &&
             (affinity[i] > report.dominant->affinity ||
              (affinity[i] == report.dominant->affinity &&
               t.id < report.dominant->tracker.id)));
        if (better) report.dominant = DominantCandidate{t, n, affinity[i]};
    }

    std::vector<Tracker> clones(total_clones);
    parallel_for(plans.size(), exec.threads, [&](std::size_t p) {
        const Plan& plan = plans[p];
        const Tracker& parent = pool[plan.parent];
        const double a = affinity[plan.parent];
        for (std::size_t k = 0; k < plan.subsets.total(); ++k) {
            Rng rng = substream(config.seed, StreamTag::clone,
                                static_cast<std::uint64_t>(generation), parent.id, k);
            Tracker c = make_clone(parent, plan.first_id + k, generation);
            if (k < plan.subsets.value) {
                c = mutate_value(std::move(c), a, scale, config, rng);
            } else if (k < plan.subsets.value + plan.subsets.extend) {
                c = mutate_extend(std::move(c), stats, a, scale, config, rng);
            } else {
                c = mutate_shorten(std::move(c), a, scale, config, rng);
            }
            clones[plan.first_slot + k] = std::move(c);
        }
    });

    report.clones_created = total_clones;
    pool.insert(pool.end(), std::make_move_iterator(clones.begin()),
                std::make_move_iterator(clones.end()));
    const CullCounts culled = apoptosis_and_cap(pool, config);
    report.deaths_apoptosis = culled.apoptosis;
    report.deaths_cap = culled.cap;
    report.pool_after = pool.size();
    return report;
}

ClonalEngine::ClonalEngine(EngineConfig config, MovementStats stats,
                           std::int64_t birth_generation)
    : config_(config), stats_(stats) {
    pool_ = init_population(config_, stats_, birth_generation, next_id_);
    next_id_ += pool_.size();
}

GenerationReport ClonalEngine::step(const Antigen& antigen, double scale,
                                    std::int64_t generation, const ExecOptions& exec) {
    return generation_step(pool_, antigen, scale, config_, stats_, generation, next_id_,
                           exec);
}

}  // namespace immunotrack
