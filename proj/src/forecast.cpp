#include "immunotrack/forecast.hpp"

#include "immunotrack/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

namespace immunotrack {

Forecast forecast_from(std::span<const PoolSnapshot> candidates,
                       std::span<const double> recent, std::size_t horizon,
                       double threshold, double scale, std::size_t anchor) {
    Forecast out;
    out.anchor = anchor;
    out.horizon = horizon;
    out.predicted.assign(horizon, 0.0);
    out.confidence.assign(horizon, 0.0);

    struct Match {
        const PoolSnapshot* snap;
        std::size_t split;
        double affinity;
    };
    std::vector<Match> matches;
    for (const PoolSnapshot& c : candidates) {
        const std::size_t m = c.movements.size();
        for (std::size_t j = 1; j < m && j <= recent.size(); ++j) {
            const double a = suffix_affinity(std::span(c.movements).first(j), recent, scale);
            if (a >= threshold) matches.push_back({&c, j, a});
        }
    }
    std::sort(matches.begin(), matches.end(), [](const Match& x, const Match& y) {
        if (x.snap->sig != y.snap->sig) return x.snap->sig < y.snap->sig;
        return x.split < y.split;
    });

    std::vector<double> weighted(horizon, 0.0);
    std::vector<double> weight(horizon, 0.0);
    std::vector<std::size_t> n(horizon, 0);
    for (const Match& mt : matches) {
        const auto& mv = mt.snap->movements;
        for (std::size_t k = 0; k < horizon && mt.split + k < mv.size(); ++k) {
            weighted[k] += mt.affinity * mv[mt.split + k];
            weight[k] += mt.affinity;
            ++n[k];
        }
        out.contributors.push_back({mt.snap->sig, mt.affinity, mt.split});
    }
    for (std::size_t k = 0; k < horizon; ++k) {
        if (n[k] == 0) continue;
        out.predicted[k] = weighted[k] / weight[k];
        out.confidence[k] = weight[k] / static_cast<double>(n[k]);
    }
    return out;
}

Forecast forecast(const TrackerSequence& sequence, std::span<const double> recent,
                  std::size_t horizon, double threshold, double scale,
                  std::size_t anchor) {
    const auto pool = long_term_pool(sequence);
    return forecast_from(pool, recent, horizon, threshold, scale, anchor);
}

std::vector<PoolSnapshot> forecast_candidates(const TrackerSequence& sequence,
                                              std::span<const Tracker> live_pool,
                                              bool include_pool, double eps) {
    auto candidates = long_term_pool(sequence);
    if (!include_pool) return candidates;
    std::set<Signature> seen;
    for (const PoolSnapshot& c : candidates) seen.insert(c.sig);
    for (const Tracker& t : live_pool) {
        Signature sig = signature(t.movements, eps);
        if (seen.insert(sig).second) candidates.push_back({t.movements, std::move(sig), 0, 0});
    }
    return candidates;
}

bool direction_correct(double predicted, double realized, double dir_eps) noexcept {
    if (realized == 0.0) return std::abs(predicted) < dir_eps;
    return (predicted > 0.0 && realized > 0.0) || (predicted < 0.0 && realized < 0.0);
}

double scale_at(std::span<const double> movements, std::size_t anchor,
                const RunConfig& config) {
    if (config.scale_mode == ScaleMode::fixed) return config.scale_value;
    return rolling_scale(movements, anchor, config.scale_window);
}

WarmupState warmup_state(std::span<const double> movements, const RunConfig& config) {
    // Prices 0 .. warmup-1, i.e. movements 0 .. warmup-2.
    const std::size_t n = std::min(movements.size(), config.warmup - 1);
    WarmupState w;
    w.stats = movement_stats(movements.first(n));
    w.baseline_scale = scale_at(movements, n, config);
    w.signature_eps = config.signature_eps.value_or(kSignatureEpsFactor * w.baseline_scale);
    w.dir_eps = config.dir_eps.value_or(w.signature_eps / 2.0);
    return w;
}

namespace {

// One online pass. `on_step` runs after the engine and the sequence have been
// updated for anchor t, with everything observable up to price t.
struct WalkForward {
    const RunConfig& config;
    const ExecOptions& exec;
    std::span<const double> movements;
    RunArtifacts run;
    ClonalEngine engine;

    WalkForward(const RunConfig& cfg, const ExecOptions& ex, std::span<const double> mv)
        : config(cfg),
          exec(ex),
          movements(mv),
          run{warmup_state(mv, cfg), {}, {}, {}, 0},
          engine(cfg.engine, run.warmup.stats,
                 static_cast<std::int64_t>(cfg.warmup) - 1) {
        run.pool_cap_peak = engine.pool().size();
    }

    void step(std::size_t t) {
        const Antigen antigen = make_antigen(movements, t, config.engine.window);
        const double scale = scale_at(movements, t, config);
        GenerationReport report = engine.step(antigen, scale, static_cast<std::int64_t>(t), exec);
        promote_dominant(report, run.sequence, run.warmup.signature_eps);
        const std::size_t generation = t - config.warmup + 1;
        if (generation % config.generalize_every == 0) {
            generalize(run.sequence, config.min_repeats, config.max_pattern_len);
        }
        run.pool_cap_peak = std::max(run.pool_cap_peak, engine.pool().size());
        run.generations.push_back(std::move(report));
    }

    Forecast predict(std::size_t t, std::size_t horizon) const {
        const std::size_t lookback = config.engine.length_cap();
        const auto observed = movements.first(t);
        const auto recent = observed.last(std::min(lookback, observed.size()));
        const double scale = scale_at(movements, t, config);
        const auto candidates = forecast_candidates(run.sequence, engine.pool(),
                                                    config.forecast_include_pool,
                                                    run.warmup.signature_eps);
        return forecast_from(candidates, recent, horizon, config.forecast_threshold, scale, t);
    }

    RunArtifacts finish() {
        generalize(run.sequence, config.min_repeats, config.max_pattern_len);
        run.final_pool = engine.pool();
        return std::move(run);
    }
};

[[noreturn]] void too_short(std::size_t n, std::size_t need) {
    throw Error("forecast", "TooShort",
                "series has " + std::to_string(n) + " prices, need at least " +
                    std::to_string(need));
}

}  // namespace

RunArtifacts run_online(const PriceSeries& series, const RunConfig& config,
                        const ExecOptions& exec) {
    config.validate();
    if (series.size() < config.warmup) too_short(series.size(), config.warmup);
    const MovementVector movements = to_movements(series);
    WalkForward wf(config, exec, movements);
    for (std::size_t t = config.warmup; t < series.size(); ++t) wf.step(t);
    return wf.finish();
}

std::vector<ModelMetrics> score(std::span<const EvalRecord> records, double dir_eps) {
    using Pick = std::function<double(const EvalRecord&)>;
    const std::vector<std::pair<std::string, Pick>> models = {
        {"tracker", [](const EvalRecord& r) { return r.tracker(); }},
        {"persistence", [](const EvalRecord& r) { return r.persistence; }},
        {"drift", [](const EvalRecord& r) { return r.drift; }},
        {"last_movement", [](const EvalRecord& r) { return r.last_movement; }},
    };
    std::vector<ModelMetrics> out;
    const double n = static_cast<double>(records.size());
    for (const auto& [name, pick] : models) {
        double abs_sum = 0.0;
        double sq_sum = 0.0;
        std::size_t hits = 0;
        for (const EvalRecord& r : records) {
            const double p = pick(r);
            const double e = p - r.realized;
            abs_sum += std::abs(e);
            sq_sum += e * e;
            hits += direction_correct(p, r.realized, dir_eps) ? 1 : 0;
        }
        ModelMetrics m;
        m.model = name;
        if (n > 0) {
            m.mae = abs_sum / n;
            m.rmse = std::sqrt(sq_sum / n);
            m.dir_acc = static_cast<double>(hits) / n;
        }
        out.push_back(m);
    }
    return out;
}

EvalReport evaluate(const PriceSeries& series, const RunConfig& config,
                    const ExecOptions& exec) {
    config.validate();
    if (series.size() < config.warmup + 2) too_short(series.size(), config.warmup + 2);
    const MovementVector movements = to_movements(series);
    WalkForward wf(config, exec, movements);

    EvalReport report;
    double observed_sum = 0.0;
    std::size_t observed_n = 0;
    auto observe_until = [&](std::size_t t) {
        for (; observed_n < t; ++observed_n) observed_sum += movements[observed_n];
    };
    for (std::size_t t = config.warmup; t + 1 < series.size(); ++t) {
        wf.step(t);
        observe_until(t);
        EvalRecord rec;
        rec.anchor = t;
        rec.realized = movements[t];
        rec.persistence = 0.0;
        rec.drift = observed_sum / static_cast<double>(observed_n);
        rec.last_movement = movements[t - 1];
        rec.forecast = wf.predict(t, config.horizon);
        report.records.push_back(std::move(rec));
    }
    report.run = wf.finish();
    report.steps = report.records.size();
    report.metrics = score(report.records, report.run.warmup.dir_eps);
    return report;
}

}  // namespace immunotrack
