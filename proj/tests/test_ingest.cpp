#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "leadlag/ingest.hpp"
#include "oracles.hpp"

using namespace leadlag;

namespace {

TickSeries log_ticks(std::vector<double> t, std::vector<double> x)
{
    return {std::move(t), std::move(x), PriceScale::log_price};
}

PathSample random_path(std::mt19937_64& rng, std::size_t n, double pi1, double pi2)
{
    std::normal_distribution<double> z;
    std::bernoulli_distribution b1(pi1), b2(pi2);
    PathSample p;
    for (std::size_t k = 0; k < n; ++k) {
        p.returns1.push_back(z(rng));
        p.returns2.push_back(z(rng));
    }
    p.mask1.assign(n + 1, false);
    p.mask2.assign(n + 1, false);
    for (std::size_t k = 1; k <= n; ++k) {
        p.mask1[k] = b1(rng);
        p.mask2[k] = b2(rng);
    }
    return p;
}

}  // namespace

TEST(AlignToGrid, TicksOnEveryGridPoint)
{
    const std::vector<double> prices{100, 101, 99.5, 102, 102};
    TickSeries t{{0, 1, 2, 3, 4}, prices, PriceScale::raw_price};
    const auto r = align_to_grid(t, 0.0, 1.0, 4);
    ASSERT_EQ(r.returns.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(r.returns[k], std::log(prices[k + 1]) - std::log(prices[k]));
    for (bool o : r.observed) EXPECT_TRUE(o);
}

TEST(AlignToGrid, MissingPointCarriesForward)
{
    const double x0 = 0.3, x2 = 1.1;
    const auto r = align_to_grid(log_ticks({0, 2}, {x0, x2}), 0.0, 1.0, 2);
    EXPECT_EQ(r.returns[0], 0.0);
    EXPECT_DOUBLE_EQ(r.returns[1], x2 - x0);
    EXPECT_TRUE(r.observed[0]);
    EXPECT_FALSE(r.observed[1]);
    EXPECT_TRUE(r.observed[2]);
}

TEST(AlignToGrid, LastTickInSlotWins)
{
    // three ticks in (0, 1], two sharing a timestamp
    const auto r = align_to_grid(log_ticks({0, 0.2, 0.9, 0.9}, {0, 5, 6, 7}), 0.0, 1.0, 1);
    EXPECT_DOUBLE_EQ(r.returns[0], 7.0);
}

TEST(AlignToGrid, OffGridTicksAndOrigin)
{
    // t0 = 10.5, tau = 2: grid points 10.5, 12.5, 14.5
    const auto r = align_to_grid(log_ticks({9.0, 11.0, 12.5, 13.0}, {1, 2, 3, 4}), 10.5, 2.0, 2);
    EXPECT_DOUBLE_EQ(r.returns[0], 3 - 1);
    EXPECT_DOUBLE_EQ(r.returns[1], 4 - 3);
    EXPECT_DOUBLE_EQ(r.t0, 10.5);
}

TEST(AlignToGrid, Errors)
{
    EXPECT_THROW(align_to_grid(log_ticks({1.0}, {0.0}), 0.0, 1.0, 3), DataError);
    EXPECT_THROW(align_to_grid(log_ticks({0.0}, {0.0}), 0.0, 1.0, 0), DataError);
    EXPECT_THROW(align_to_grid(log_ticks({}, {}), 0.0, 1.0, 3), DataError);
    EXPECT_THROW(align_to_grid(log_ticks({0.0, 2.0, 1.0}, {0, 0, 0}), 0.0, 1.0, 3), DataError);
}

TEST(AlignToGrid, TelescopesAndIsIdempotent)
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> z;
    std::vector<double> t, x;
    double level = 0;
    for (int i = 0; i < 200; ++i) {
        t.push_back(i);
        x.push_back(level);
        level += z(rng);
    }
    const auto r = align_to_grid(log_ticks(t, x), 0.0, 1.0, 199);
    double sum = 0;
    for (double v : r.returns) sum += v;
    EXPECT_NEAR(sum, x.back() - x.front(), 1e-12);

    // rebuild ticks from the aligned returns and realign
    std::vector<double> t2, x2{0.0};
    for (std::size_t k = 0; k <= r.n; ++k) t2.push_back(static_cast<double>(k));
    for (double v : r.returns) x2.push_back(x2.back() + v);
    const auto again = align_to_grid(log_ticks(t2, x2), 0.0, 1.0, 199);
    for (std::size_t k = 0; k < r.n; ++k) EXPECT_NEAR(again.returns[k], r.returns[k], 1e-12);
}

TEST(ReturnsFromSample, ZeroMasksGiveRawIncrements)
{
    std::mt19937_64 rng(1);
    const auto p = random_path(rng, 50, 0.0, 0.0);
    const auto [a, b] = returns_from_sample(p, 0.25);
    for (std::size_t k = 0; k < 50; ++k) {
        EXPECT_NEAR(a.returns[k], p.returns1[k], 1e-12);
        EXPECT_NEAR(b.returns[k], p.returns2[k], 1e-12);
    }
    EXPECT_DOUBLE_EQ(a.tau, 0.25);
}

TEST(ReturnsFromSample, AllMissingGivesZeros)
{
    std::mt19937_64 rng(2);
    auto p = random_path(rng, 30, 0.0, 0.0);
    p.mask1.assign(31, true);
    p.mask1[0] = false;
    const auto [a, b] = returns_from_sample(p, 1.0);
    for (double v : a.returns) EXPECT_EQ(v, 0.0);
    for (std::size_t k = 1; k <= 30; ++k) EXPECT_FALSE(a.observed[k]);
}

TEST(ReturnsFromSample, MatchesChiExpansion)
{
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> len(1, 64);
    std::uniform_real_distribution<double> prob(0.0, 0.9);
    for (int c = 0; c < 300; ++c) {
        const auto p = random_path(rng, len(rng), prob(rng), prob(rng));
        const auto [a, b] = returns_from_sample(p, 1.0);
        const auto o1 = oracle::chi_returns(p.returns1, p.mask1);
        const auto o2 = oracle::chi_returns(p.returns2, p.mask2);
        for (std::size_t k = 0; k < o1.size(); ++k) {
            ASSERT_NEAR(a.returns[k], o1[k], 1e-12) << "case " << c << " k=" << k;
            ASSERT_NEAR(b.returns[k], o2[k], 1e-12) << "case " << c << " k=" << k;
        }
    }
}

TEST(ReturnsFromSample, ChiExpansionHandExample)
{
    // observed at 0 and 2, missing at 1: (0, d0 + d1)
    const auto o = oracle::chi_returns({0.5, 0.25}, {false, true, false});
    EXPECT_EQ(o[0], 0.0);
    EXPECT_DOUBLE_EQ(o[1], 0.75);
}

TEST(ReturnsFromSample, LengthMismatch)
{
    PathSample p{{1, 2}, {1}, {false, false, false}, {false, false, false}, 0};
    EXPECT_THROW(returns_from_sample(p, 1.0), DataError);
}

TEST(TickCsv, WellFormed)
{
    std::istringstream in("# comment\ntimestamp,price\n0,100\n1.5,100.25\n\n3,99\n");
    const auto t = parse_tick_csv(in);
    ASSERT_EQ(t.size(), 3u);
    EXPECT_DOUBLE_EQ(t.timestamps[1], 1.5);
    EXPECT_DOUBLE_EQ(t.prices[2], 99.0);
    EXPECT_EQ(t.scale, PriceScale::raw_price);
}

TEST(TickCsv, DecreasingTimestampNamesRow)
{
    std::istringstream in("timestamp,price\n5,100\n4,101\n6,102\n");
    try {
        parse_tick_csv(in);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
    }
}

TEST(TickCsv, Rejections)
{
    {
        std::istringstream in("");
        try {
            parse_tick_csv(in);
            FAIL();
        } catch (const DataError& e) {
            EXPECT_NE(std::string(e.what()).find("no ticks"), std::string::npos);
        }
    }
    {
        std::istringstream in("timestamp,price\n");
        EXPECT_THROW(parse_tick_csv(in), DataError);
    }
    {
        std::istringstream in("timestamp,price\n0,1\n1,0\n");
        EXPECT_THROW(parse_tick_csv(in), DataError);
    }
    {
        std::istringstream in("timestamp,price\n0,-1\n");
        EXPECT_NO_THROW(parse_tick_csv(in, PriceScale::log_price));
    }
    {
        std::istringstream in("time,value\n0,1\n");
        EXPECT_THROW(parse_tick_csv(in), DataError);
    }
    {
        std::istringstream in("timestamp,price\n0,abc\n");
        EXPECT_THROW(parse_tick_csv(in), DataError);
    }
    EXPECT_THROW(read_csv("/nonexistent/ticks.csv"), DataError);
}

TEST(TickCsv, RoundTrip)
{
    TickSeries t{{0, 0.5, 2.25}, {100.125, 99.0, 101.75}, PriceScale::raw_price};
    std::stringstream s;
    write_tick_csv(s, t);
    const auto back = parse_tick_csv(s);
    EXPECT_EQ(back.timestamps, t.timestamps);
    EXPECT_EQ(back.prices, t.prices);
}

TEST(AlignedCsv, Layout)
{
    const auto r = align_to_grid(log_ticks({0, 2}, {0, 1}), 0.0, 1.0, 2);
    std::ostringstream s;
    write_aligned_csv(s, r);
    EXPECT_EQ(s.str(), "k,return,observed\n0,0,0\n1,1,1\n");
}
