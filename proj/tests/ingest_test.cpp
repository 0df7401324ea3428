#include "immunotrack/error.hpp"
#include "immunotrack/ingest.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace immunotrack;

namespace {

std::string error_code(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.qualified_code();
    }
    return "none";
}

}  // namespace

TEST(LoadSeries, ParsesRowsInOrder) {
    const PriceSeries s = load_series("label,price\nd1,10\nd2,12\nd3,11");
    EXPECT_EQ(s.prices, (std::vector<double>{10, 12, 11}));
    EXPECT_EQ(s.labels, (std::vector<std::string>{"d1", "d2", "d3"}));
}

TEST(LoadSeries, AcceptsTrailingNewlineAndCrlf) {
    const PriceSeries s = load_series("label,price\r\n2020-01-01,1.5\r\n2020-01-02,2.25\r\n");
    EXPECT_EQ(s.prices, (std::vector<double>{1.5, 2.25}));
    EXPECT_EQ(s.labels[0], "2020-01-01");
}

TEST(LoadSeries, Errors) {
    EXPECT_EQ(error_code([] { load_series("label,price\nd1,10"); }), "ingest.TooShort");
    EXPECT_EQ(error_code([] { load_series("label,price\nd1,10\nd2,-3"); }), "ingest.BadPrice");
    EXPECT_EQ(error_code([] { load_series("label,price\nd1,10\nd2,0"); }), "ingest.BadPrice");
    EXPECT_EQ(error_code([] { load_series("label,price\nd1,10\nd2,abc"); }), "ingest.BadPrice");
    EXPECT_EQ(error_code([] { load_series("label,price\nd1,10\nd2,inf"); }), "ingest.BadPrice");
    EXPECT_EQ(error_code([] { load_series("label,price\nd1,10\nd2,1,000"); }),
              "ingest.MalformedCsv");
    EXPECT_EQ(error_code([] { load_series("date,close\nd1,10\nd2,11"); }),
              "ingest.MalformedCsv");
    EXPECT_EQ(error_code([] { load_series("label,price\nd1 10\nd2,11"); }),
              "ingest.MalformedCsv");
    EXPECT_EQ(error_code([] { load_series(""); }), "ingest.MalformedCsv");
}

TEST(LoadSeries, CsvRoundTripIsExact) {
    std::mt19937_64 gen(7);
    PriceSeries s;
    s.prices = oracle::random_prices(gen, 50);
    for (std::size_t i = 0; i < s.prices.size(); ++i) s.labels.push_back("p" + std::to_string(i));
    const PriceSeries back = load_series(to_csv(s));
    EXPECT_EQ(back.prices, s.prices);
    EXPECT_EQ(back.labels, s.labels);
}

TEST(ToMovements, Examples) {
    auto mv = [](std::vector<double> p) {
        return to_movements(PriceSeries{std::vector<std::string>(p.size(), "x"), p});
    };
    EXPECT_EQ(mv({10, 12, 11}), (MovementVector{2, -1}));
    EXPECT_EQ(mv({5, 5, 5}), (MovementVector{0, 0}));
    EXPECT_EQ(mv({1, 2, 4, 8}), (MovementVector{1, 2, 4}));
}

TEST(ToMovements, PrefixSumsReconstructPrices) {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<std::size_t> len(2, 300);
        PriceSeries s;
        s.prices = oracle::random_prices(gen, len(gen));
        s.labels.assign(s.prices.size(), "x");
        const MovementVector m = to_movements(s);
        ASSERT_EQ(m.size(), s.prices.size() - 1);
        double p = s.prices[0];
        for (std::size_t i = 0; i < m.size(); ++i) {
            p += m[i];
            ASSERT_NEAR(p, s.prices[i + 1], 1e-9);
        }
    }
}

TEST(MakeAntigen, Examples) {
    const MovementVector m{2, -1, 3, 0};
    EXPECT_EQ(make_antigen(m, 4, 3).movements, (MovementVector{-1, 3, 0}));
    EXPECT_EQ(make_antigen(m, 4, 3).anchor, 4u);
    EXPECT_EQ(make_antigen(MovementVector{7}, 1, 1).movements, (MovementVector{7}));
    EXPECT_EQ(error_code([&] { make_antigen(m, 2, 3); }), "ingest.WindowOutOfRange");
    EXPECT_EQ(error_code([&] { make_antigen(m, 5, 3); }), "ingest.WindowOutOfRange");
    EXPECT_EQ(error_code([&] { make_antigen(m, 4, 0); }), "ingest.WindowOutOfRange");
}

TEST(MakeAntigen, LastMovementIsLatestPriceChange) {
    std::mt19937_64 gen(3);
    PriceSeries s;
    s.prices = oracle::random_prices(gen, 80);
    s.labels.assign(s.prices.size(), "x");
    const MovementVector m = to_movements(s);
    const std::size_t w = 20;
    for (std::size_t t = w; t < s.prices.size(); ++t) {
        const Antigen a = make_antigen(m, t, w);
        ASSERT_EQ(a.movements.size(), w);
        EXPECT_EQ(a.movements.back(), s.prices[t] - s.prices[t - 1]);
        for (std::size_t i = 0; i < w; ++i) {
            EXPECT_EQ(a.movements[i], s.prices[t - w + 1 + i] - s.prices[t - w + i]);
        }
    }
}

TEST(SynthSeries, Constant) {
    const PriceSeries s = synth_series({SynthKind::constant, 4, 50.0, {}, 0, 0}, 1);
    EXPECT_EQ(s.prices, (std::vector<double>{50, 50, 50, 50}));
}

TEST(SynthSeries, PeriodicCyclesPattern) {
    const std::vector<double> pattern{1, 1, -1, 2, -3};
    const PriceSeries s = synth_series({SynthKind::periodic, 11, 50.0, pattern, 0, 0}, 1);
    const MovementVector m = to_movements(s);
    ASSERT_EQ(m.size(), 10u);
    for (std::size_t i = 0; i < m.size(); ++i) EXPECT_EQ(m[i], pattern[i % 5]);
    EXPECT_EQ(s.prices.front(), 50.0);
}

TEST(SynthSeries, DeterministicPerSeed) {
    const SynthParams rw{SynthKind::random_walk, 200, 100.0, {}, 0, 1.0};
    EXPECT_EQ(synth_series(rw, 9).prices, synth_series(rw, 9).prices);
    EXPECT_NE(synth_series(rw, 9).prices, synth_series(rw, 10).prices);
    const SynthParams noisy{SynthKind::periodic_noisy, 200, 50.0, {1, -1}, 0.1, 0};
    EXPECT_EQ(synth_series(noisy, 4).prices, synth_series(noisy, 4).prices);
}

TEST(SynthSeries, NonPositivePriceIsAnError) {
    EXPECT_EQ(error_code([] { synth_series({SynthKind::periodic, 5, 2.0, {-1}, 0, 0}, 1); }),
              "ingest.BadParams");
    EXPECT_EQ(error_code([] { synth_series({SynthKind::periodic, 5, 2.0, {}, 0, 0}, 1); }),
              "ingest.BadParams");
    EXPECT_EQ(error_code([] { synth_series({SynthKind::constant, 1, 2.0, {}, 0, 0}, 1); }),
              "ingest.BadParams");
}

TEST(RollingScale, WindowAndFloor) {
    const MovementVector m{0, 0, 0, 1, -1, 1, -1};
    EXPECT_DOUBLE_EQ(rolling_scale(m, 7, 4), 1.0);
    EXPECT_DOUBLE_EQ(rolling_scale(m, 3, 50), 1e-6);
    EXPECT_DOUBLE_EQ(rolling_scale(m, 0, 50), 1e-6);
    const MovementStats st = movement_stats(m);
    EXPECT_NEAR(st.mean, 0.0, 1e-15);
    EXPECT_NEAR(st.stddev, std::sqrt(4.0 / 7.0), 1e-15);
}
