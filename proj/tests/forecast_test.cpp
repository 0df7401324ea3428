#include "immunotrack/error.hpp"
#include "immunotrack/forecast.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace immunotrack;

namespace {

PoolSnapshot snap(MovementVector m, Signature sig) {
    return PoolSnapshot{std::move(m), std::move(sig), 1, 0};
}

PriceSeries series_of(std::vector<double> prices) {
    PriceSeries s;
    for (std::size_t i = 0; i < prices.size(); ++i) s.labels.push_back("d" + std::to_string(i));
    s.prices = std::move(prices);
    return s;
}

RunConfig small_run() {
    RunConfig c;
    c.engine.pool_cap = 60;
    c.warmup = 30;
    c.horizon = 3;
    c.generalize_every = 10;
    return c;
}

std::string code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.qualified_code();
    }
    return "";
}

}  // namespace

TEST(ForecastFrom, SingleExactContributor) {
    const std::vector<PoolSnapshot> pool{snap({1, -1, 1}, {1, -1, 1})};
    const std::vector<double> recent{3, 1, -1};
    const Forecast f = forecast_from(pool, recent, 1, 0.99, 1.0);
    ASSERT_EQ(f.predicted.size(), 1u);
    EXPECT_EQ(f.predicted[0], 1.0);
    EXPECT_EQ(f.confidence[0], 1.0);
    ASSERT_EQ(f.contributors.size(), 1u);
    EXPECT_EQ(f.contributors[0].split, 2u);
}

TEST(ForecastFrom, EmptyCandidatesFallBackToZero) {
    const std::vector<double> recent{1, 2};
    const Forecast f = forecast(TrackerSequence{}, recent, 3, 0.5, 1.0, 17);
    EXPECT_EQ(f.predicted, (std::vector<double>{0, 0, 0}));
    EXPECT_EQ(f.confidence, (std::vector<double>{0, 0, 0}));
    EXPECT_TRUE(f.contributors.empty());
    EXPECT_EQ(f.anchor, 17u);
    EXPECT_EQ(f.horizon, 3u);
}

TEST(ForecastFrom, AffinityWeightedMean) {
    // With scale 1 and recent [0], a leading movement of ln(1/a) binds at a.
    const std::vector<PoolSnapshot> pool{snap({std::log(1.25), 2.0}, {1}),
                                         snap({std::log(2.5), 4.0}, {2})};
    const std::vector<double> recent{0.0};
    const Forecast f = forecast_from(pool, recent, 1, 0.3, 1.0);
    ASSERT_EQ(f.contributors.size(), 2u);
    EXPECT_NEAR(f.contributors[0].affinity, 0.8, 1e-12);
    EXPECT_NEAR(f.contributors[1].affinity, 0.4, 1e-12);
    const double expected = (0.8 * 2 + 0.4 * 4) / 1.2;
    EXPECT_NEAR(f.predicted[0], expected, 1e-12);
    EXPECT_NEAR(f.predicted[0], 2.6667, 5e-5);
    EXPECT_NEAR(f.confidence[0], 0.6, 1e-12);
    // Raising the threshold above the weaker bind leaves only the stronger one.
    const Forecast strict = forecast_from(pool, recent, 1, 0.5, 1.0);
    EXPECT_NEAR(strict.predicted[0], 2.0, 1e-12);
}

TEST(ForecastFrom, ContinuationsAreTruncatedPerStep) {
    const std::vector<PoolSnapshot> pool{snap({0, 5, 6}, {0, 5, 6})};
    const std::vector<double> recent{0};
    const Forecast f = forecast_from(pool, recent, 4, 0.9, 1.0);
    EXPECT_EQ(f.predicted, (std::vector<double>{5, 6, 0, 0}));
    EXPECT_EQ(f.confidence, (std::vector<double>{1, 1, 0, 0}));
}

TEST(ForecastFrom, CandidateOrderDoesNotMatter) {
    std::mt19937_64 gen(8);
    std::normal_distribution<double> val(0.0, 1.0);
    std::vector<PoolSnapshot> pool;
    for (std::int64_t i = 0; i < 40; ++i) {
        MovementVector m(5);
        for (double& v : m) v = val(gen);
        pool.push_back(snap(m, {i}));
    }
    std::vector<double> recent(8);
    for (double& v : recent) v = val(gen);
    const Forecast base = forecast_from(pool, recent, 3, 0.3, 1.0);
    ASSERT_FALSE(base.contributors.empty());
    for (int k = 0; k < 10; ++k) {
        std::shuffle(pool.begin(), pool.end(), gen);
        const Forecast f = forecast_from(pool, recent, 3, 0.3, 1.0);
        EXPECT_EQ(f.predicted, base.predicted);
        EXPECT_EQ(f.confidence, base.confidence);
    }
}

TEST(DirectionCorrect, Rules) {
    EXPECT_TRUE(direction_correct(1.0, 2.0, 0.1));
    EXPECT_TRUE(direction_correct(-0.5, -2.0, 0.1));
    EXPECT_FALSE(direction_correct(1.0, -2.0, 0.1));
    EXPECT_FALSE(direction_correct(0.0, 2.0, 0.1));
    EXPECT_TRUE(direction_correct(0.05, 0.0, 0.1));
    EXPECT_FALSE(direction_correct(0.2, 0.0, 0.1));
}

TEST(ForecastCandidates, IncludesLiveTrackersOnlyWhenAsked) {
    TrackerSequence seq;
    GenerationReport r;
    r.generation = 1;
    Tracker t;
    t.movements = {1, 1};
    r.dominant = DominantCandidate{t, 2, 1.0};
    promote_dominant(r, seq, 1.0);
    Tracker a = t;
    Tracker b;
    b.movements = {3, 3};
    const std::vector<Tracker> live{a, b};
    EXPECT_EQ(forecast_candidates(seq, live, false, 1.0).size(), 1u);
    const auto with_pool = forecast_candidates(seq, live, true, 1.0);
    ASSERT_EQ(with_pool.size(), 2u);
    EXPECT_EQ(with_pool[1].sig, (Signature{3, 3}));
}

TEST(Evaluate, ConstantSeries) {
    const RunConfig c = small_run();
    const EvalReport r = evaluate(series_of(std::vector<double>(80, 42.0)), c);
    EXPECT_EQ(r.steps, 80u - 1 - c.warmup);
    ASSERT_EQ(r.metrics.size(), 4u);
    EXPECT_EQ(r.metrics[1].model, "persistence");
    EXPECT_EQ(r.metrics[1].mae, 0.0);
    EXPECT_EQ(r.metrics[1].dir_acc, 1.0);
    for (const EvalRecord& rec : r.records) EXPECT_EQ(rec.realized, 0.0);
}

TEST(Evaluate, BaselinesAndPersistenceIdentity) {
    std::mt19937_64 gen(21);
    const PriceSeries s = series_of(oracle::random_prices(gen, 120));
    const RunConfig c = small_run();
    const EvalReport r = evaluate(s, c);
    ASSERT_EQ(r.steps, 120u - 1 - c.warmup);
    double abs_sum = 0.0;
    for (const EvalRecord& rec : r.records) {
        const std::size_t t = rec.anchor;
        EXPECT_EQ(rec.realized, s.prices[t + 1] - s.prices[t]);
        EXPECT_EQ(rec.last_movement, s.prices[t] - s.prices[t - 1]);
        EXPECT_NEAR(rec.drift, (s.prices[t] - s.prices[0]) / static_cast<double>(t), 1e-9);
        EXPECT_EQ(rec.forecast.predicted.size(), c.horizon);
        abs_sum += std::abs(rec.realized);
    }
    EXPECT_NEAR(r.metrics[1].mae, abs_sum / static_cast<double>(r.steps), 1e-12);
    EXPECT_EQ(r.records.front().anchor, c.warmup);
    for (const ModelMetrics& m : r.metrics) {
        EXPECT_GE(m.dir_acc, 0.0);
        EXPECT_LE(m.dir_acc, 1.0);
        EXPECT_LE(m.mae, m.rmse + 1e-12);
    }
}

TEST(Evaluate, DeterministicAcrossRunsAndThreads) {
    std::mt19937_64 gen(33);
    const PriceSeries s = series_of(oracle::random_prices(gen, 150));
    RunConfig c = small_run();
    c.engine.pool_cap = 200;
    const EvalReport a = evaluate(s, c, {1});
    const EvalReport b = evaluate(s, c, {1});
    const EvalReport p = evaluate(s, c, {4});
    for (const EvalReport* other : {&b, &p}) {
        ASSERT_EQ(a.records.size(), other->records.size());
        for (std::size_t i = 0; i < a.records.size(); ++i) {
            EXPECT_EQ(a.records[i].forecast.predicted, other->records[i].forecast.predicted);
        }
        EXPECT_EQ(a.run.final_pool, other->run.final_pool);
        EXPECT_EQ(a.run.sequence.patterns, other->run.sequence.patterns);
    }
}

TEST(Evaluate, ForecastsIgnoreFuturePrices) {
    std::mt19937_64 gen(55);
    const PriceSeries full = series_of(oracle::random_prices(gen, 140));
    const RunConfig c = small_run();
    const EvalReport whole = evaluate(full, c);
    for (std::size_t cut : {c.warmup + 2, std::size_t{77}, std::size_t{139}}) {
        PriceSeries prefix = full;
        prefix.prices.resize(cut);
        prefix.labels.resize(cut);
        const EvalReport part = evaluate(prefix, c);
        ASSERT_EQ(part.records.size(), cut - 1 - c.warmup);
        for (std::size_t i = 0; i < part.records.size(); ++i) {
            EXPECT_EQ(part.records[i].forecast.predicted, whole.records[i].forecast.predicted);
            EXPECT_EQ(part.records[i].forecast.confidence, whole.records[i].forecast.confidence);
        }
    }
}

TEST(Evaluate, TooShort) {
    const RunConfig c = small_run();
    EXPECT_EQ(code_of([&] { evaluate(series_of(std::vector<double>(c.warmup + 1, 5.0)), c); }),
              "forecast.TooShort");
    EXPECT_EQ(code_of([&] { run_online(series_of(std::vector<double>(c.warmup - 1, 5.0)), c); }),
              "forecast.TooShort");
}

TEST(RunOnline, GenerationPerAnchor) {
    const RunConfig c = small_run();
    EXPECT_TRUE(run_online(series_of(std::vector<double>(c.warmup, 5.0)), c).generations.empty());
    std::mt19937_64 gen(2);
    const RunArtifacts r = run_online(series_of(oracle::random_prices(gen, 90)), c);
    ASSERT_EQ(r.generations.size(), 90u - c.warmup);
    for (std::size_t i = 0; i < r.generations.size(); ++i) {
        EXPECT_EQ(r.generations[i].generation, static_cast<std::int64_t>(c.warmup + i));
        EXPECT_LE(r.generations[i].pool_after, c.engine.pool_cap);
    }
    EXPECT_LE(r.pool_cap_peak, c.engine.pool_cap);
}

TEST(WarmupState, DerivedTolerances) {
    RunConfig c = small_run();
    std::vector<double> mv;
    for (int i = 0; i < 60; ++i) mv.push_back(i % 2 == 0 ? 1.0 : -1.0);
    const WarmupState w = warmup_state(mv, c);
    EXPECT_NEAR(w.baseline_scale, rolling_scale(mv, c.warmup - 1, c.scale_window), 0.0);
    EXPECT_DOUBLE_EQ(w.signature_eps, 0.25 * w.baseline_scale);
    EXPECT_DOUBLE_EQ(w.dir_eps, w.signature_eps / 2);
    c.signature_eps = 0.3;
    c.dir_eps = 0.01;
    const WarmupState fixed = warmup_state(mv, c);
    EXPECT_EQ(fixed.signature_eps, 0.3);
    EXPECT_EQ(fixed.dir_eps, 0.01);
}
