#pragma once

#include "immunotrack/clonal_engine.hpp"
#include "immunotrack/config.hpp"
#include "immunotrack/memory_sequence.hpp"
#include "immunotrack/parallel.hpp"

#include <span>
#include <string>
#include <vector>

namespace immunotrack {

struct Contributor {
    Signature sig;
    double affinity = 0.0;
    std::size_t split = 0;  // number of leading movements matched
};

struct Forecast {
    std::size_t anchor = 0;
    std::size_t horizon = 0;
    std::vector<double> predicted;
    std::vector<double> confidence;
    std::vector<Contributor> contributors;  // sorted by (signature, split)
};

/// Matches every split of every candidate: its first j movements against the
/// last j observed, continuing with movements j.. when affinity >= threshold.
Forecast forecast_from(std::span<const PoolSnapshot> candidates,
                       std::span<const double> recent, std::size_t horizon,
                       double threshold, double scale, std::size_t anchor = 0);

/// Forecast from the long-term pool of `sequence`.
Forecast forecast(const TrackerSequence& sequence, std::span<const double> recent,
                  std::size_t horizon, double threshold, double scale,
                  std::size_t anchor = 0);

/// Long-term pool snapshots, optionally followed by live trackers whose
/// signature is not already present.
std::vector<PoolSnapshot> forecast_candidates(const TrackerSequence& sequence,
                                              std::span<const Tracker> live_pool,
                                              bool include_pool, double eps);

/// Sign agreement; a realized zero counts iff |predicted| < dir_eps.
bool direction_correct(double predicted, double realized, double dir_eps) noexcept;

/// Quantities fixed once the warm-up slice has been seen.
struct WarmupState {
    MovementStats stats;
    double baseline_scale = 1.0;
    double signature_eps = 0.25;
    double dir_eps = 0.125;
};

WarmupState warmup_state(std::span<const double> movements, const RunConfig& config);
double scale_at(std::span<const double> movements, std::size_t anchor,
                const RunConfig& config);

struct RunArtifacts {
    WarmupState warmup;
    TrackerSequence sequence;
    std::vector<GenerationReport> generations;
    std::vector<Tracker> final_pool;
    std::size_t pool_cap_peak = 0;
};

/// Drives the engine over anchors warmup .. n-1 without scoring.
/// Throws forecast.TooShort when the series is shorter than the warm-up.
RunArtifacts run_online(const PriceSeries& series, const RunConfig& config,
                        const ExecOptions& exec = {});

struct ModelMetrics {
    std::string model;
    double mae = 0.0;
    double rmse = 0.0;
    double dir_acc = 0.0;
};

struct EvalRecord {
    std::size_t anchor = 0;
    double realized = 0.0;       // movement from price anchor to anchor + 1
    double persistence = 0.0;
    double drift = 0.0;
    double last_movement = 0.0;
    Forecast forecast;           // tracker system, config.horizon steps

    double tracker() const { return forecast.predicted.front(); }
};

struct EvalReport {
    std::vector<ModelMetrics> metrics;  // tracker, persistence, drift, last_movement
    std::size_t steps = 0;
    std::vector<EvalRecord> records;
    RunArtifacts run;
};

/// 1-step metrics over `records` for each model, in the EvalReport order.
std::vector<ModelMetrics> score(std::span<const EvalRecord> records, double dir_eps);

/// Walk-forward evaluation over anchors warmup .. n-2.
/// Throws forecast.TooShort when no anchor has a realized next movement.
EvalReport evaluate(const PriceSeries& series, const RunConfig& config,
                    const ExecOptions& exec = {});

}  // namespace immunotrack
