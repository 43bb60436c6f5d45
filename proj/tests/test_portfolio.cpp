#include "support.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace dynmsa;
using namespace testing_support;

namespace {

/// 25 stocks: cluster 0 = S00..S02 (small), cluster 1 = S03..S12, cluster 2 = S13..S24.
struct SelectionFixture {
    Clustering clustering;
    std::vector<StockScore> scores;

    SelectionFixture() {
        std::vector<int> labels;
        for (int i = 0; i < 25; ++i) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "S%02d", i);
            clustering.tickers.emplace_back(buf);
            labels.push_back(i < 3 ? 0 : i < 13 ? 1 : 2);
        }
        clustering.partition = Partition(labels);
        for (std::size_t i = 3; i < 25; ++i)
            scores.push_back({i, clustering.partition[i], 0.01 * static_cast<double>((i * 7) % 25)});
    }
};

Date ymd(int y, unsigned m, unsigned d) { return Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}}; }

}  // namespace

TEST(Select, FloorQuotaWithRepair) {
    const SelectionFixture f;
    const auto out = select(f.clustering, f.scores, SelectionConfig{8, 5, SelectionMode::Bottom});
    ASSERT_EQ(out.size(), 8u);
    for (const char* t : {"S00", "S01", "S02"}) EXPECT_NE(std::find(out.begin(), out.end(), t), out.end());
    std::size_t from1 = 0, from2 = 0;
    for (const auto& t : out) {
        const int i = std::stoi(t.substr(1));
        from1 += i >= 3 && i < 13;
        from2 += i >= 13;
    }
    EXPECT_EQ(from1, 2u);
    EXPECT_EQ(from2, 3u);  // remainder 0.727 beats 0.273
    EXPECT_EQ(out, select(f.clustering, f.scores, SelectionConfig{8, 5, SelectionMode::Bottom}));
}

TEST(Select, BottomTakesLowestScores) {
    const SelectionFixture f;
    const auto bottom = select(f.clustering, f.scores, SelectionConfig{8, 5, SelectionMode::Bottom});
    const auto top = select(f.clustering, f.scores, SelectionConfig{8, 5, SelectionMode::Top});
    // cluster 1 scores: i*7 % 25 for i = 3..12 -> lowest two at i = 4 (3) and i = 11 (2)
    EXPECT_NE(std::find(bottom.begin(), bottom.end(), "S04"), bottom.end());
    EXPECT_NE(std::find(bottom.begin(), bottom.end(), "S11"), bottom.end());
    // cluster 1 highest two: i = 7 (24) and i = 3 (21)
    EXPECT_NE(std::find(top.begin(), top.end(), "S03"), top.end());
    EXPECT_NE(std::find(top.begin(), top.end(), "S07"), top.end());
}

TEST(Select, SingleLargeCluster) {
    Clustering c{{"A", "B", "C", "D", "E", "F", "G"}, Partition::whole(7)};
    std::vector<StockScore> s;
    const double v[] = {0.5, 0.1, 0.7, 0.3, 0.2, 0.9, 0.4};
    for (std::size_t i = 0; i < 7; ++i) s.push_back({i, 0, v[i]});
    EXPECT_EQ(select(c, s, SelectionConfig{5, 5, SelectionMode::Bottom}),
              (std::vector<std::string>{"A", "B", "D", "E", "G"}));
}

TEST(Select, AllSmall) {
    Clustering c{{"A", "B", "C", "D"}, Partition(std::vector<int>{0, 0, 1, 2})};
    EXPECT_EQ(select(c, {}, SelectionConfig{4, 5, SelectionMode::Bottom}), (std::vector<std::string>{"A", "B", "C", "D"}));
    EXPECT_THROW(select(c, {}, SelectionConfig{3, 5, SelectionMode::Bottom}), Error);
}

TEST(SelectProperty, ExactSizeDistinctSmallIncludedModesAgreeOnSmall) {
    std::mt19937_64 rng(81);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 60;
        const auto c = random_correlation(n, 80, rng, 6, 0.8);
        const auto p = random_partition(n, 3 + static_cast<std::size_t>(trial % 15), rng);
        std::vector<std::string> tickers;
        for (std::size_t i = 0; i < n; ++i) tickers.push_back("T" + std::to_string(100 + i));
        const Clustering cl{tickers, p};
        const auto scores = stock_scores(p, c);
        std::set<std::string> small;
        for (const auto& members : p.clusters())
            if (members.size() <= 5)
                for (auto v : members) small.insert(tickers[v]);
        const std::size_t k = std::max<std::size_t>(small.size(), 20);
        const auto b = select(cl, scores, SelectionConfig{k, 5, SelectionMode::Bottom});
        const auto t = select(cl, scores, SelectionConfig{k, 5, SelectionMode::Top});
        EXPECT_EQ(b.size(), k);
        EXPECT_EQ(std::set<std::string>(b.begin(), b.end()).size(), k);
        for (const auto& s : small) {
            EXPECT_TRUE(std::binary_search(b.begin(), b.end(), s));
            EXPECT_TRUE(std::binary_search(t.begin(), t.end(), s));
        }
    }
}

TEST(PortfolioRisk, KnownCases) {
    Matrix one = Matrix::Ones(1, 1);
    EXPECT_NEAR(portfolio_risk(std::vector<double>{1.0}, std::vector<double>{0.2}, one), 0.04, 1e-15);
    Matrix hedge(2, 2);
    hedge << 1, -1, -1, 1;
    EXPECT_NEAR(portfolio_risk(std::vector<double>{0.5, 0.5}, std::vector<double>{0.2, 0.2}, hedge), 0.0, 1e-15);
    EXPECT_THROW(portfolio_risk(std::vector<double>{0.5, 0.6}, std::vector<double>{0.2, 0.2}, hedge), ContractError);
}

TEST(PortfolioRisk, QuadraticFormOracle) {
    Matrix c(3, 3);
    c << 1, 0.3, -0.2, 0.3, 1, 0.5, -0.2, 0.5, 1;
    const std::vector<double> w{0.5, 0.3, 0.2}, s{0.1, 0.25, 0.18};
    EXPECT_NEAR(portfolio_risk(w, s, c), oracle_risk(w, s, c), 1e-12);
}

TEST(PortfolioRiskProperty, DiversificationLimits) {
    std::mt19937_64 rng(82);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 8);
        std::vector<double> w(n), s(n);
        double sum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = u(rng);
            s[i] = u(rng);
            sum += w[i];
        }
        for (auto& x : w) x /= sum;
        double lin = 0, sq = 0;
        for (std::size_t i = 0; i < n; ++i) {
            lin += w[i] * s[i];
            sq += w[i] * w[i] * s[i] * s[i];
        }
        const auto N = static_cast<Eigen::Index>(n);
        EXPECT_NEAR(portfolio_risk(w, s, Matrix::Ones(N, N)), lin * lin, 1e-12);
        EXPECT_NEAR(portfolio_risk(w, s, Matrix::Identity(N, N)), sq, 1e-12);
    }
}

TEST(Backtest, HandCompoundedTwoStocks) {
    ReturnPanel rp;
    rp.tickers = {"A", "B"};
    rp.dates = {ymd(2020, 1, 30), ymd(2020, 2, 3), ymd(2020, 2, 4), ymd(2020, 2, 5)};
    rp.returns.resize(4, 2);
    rp.returns << 0.5, 0.5, 0.01, 0.03, -0.02, 0.04, 0.05, -0.01;
    const auto r = backtest(rp, {{ymd(2020, 1, 31), {"A", "B"}}}, {"A"});
    ASSERT_EQ(r.portfolio_returns.size(), 3u);
    const double expect = 1.02 * 1.01 * 1.02;
    EXPECT_NEAR(r.portfolio_equity.back(), expect, 1e-12);
    EXPECT_NEAR(r.benchmark_equity.back(), 1.01 * 0.98 * 1.05, 1e-12);
    EXPECT_EQ(r.dates.front(), ymd(2020, 1, 31));
}

TEST(Backtest, FullUniverseEqualsBenchmarkAndSingleStockCompounds) {
    const auto rp = compute_returns(make_synthetic_panel([] {
        SynthConfig c;
        c.months = 4;
        c.stocks = 6;
        c.blocks = 2;
        return c;
    }()).prices);
    const std::vector<MonthlySelection> sel{{ymd(2017, 8, 31), rp.tickers}, {ymd(2017, 9, 30), rp.tickers}};
    const auto r = backtest(rp, sel, rp.tickers);
    EXPECT_EQ(r.portfolio_equity, r.benchmark_equity);

    const auto single = backtest(rp, {{ymd(2017, 8, 31), {rp.tickers[2]}}}, rp.tickers);
    double e = 1.0;
    for (std::size_t d = 0; d < rp.dates.size(); ++d)
        if (ymd(2017, 8, 31) < rp.dates[d]) e *= 1.0 + rp.returns(static_cast<Eigen::Index>(d), 2);
    EXPECT_NEAR(single.portfolio_equity.back(), e, 1e-12);
    for (double v : single.portfolio_equity) EXPECT_GT(v, 0.0);
    EXPECT_THROW(backtest(rp, {{ymd(2017, 8, 31), {"NOPE"}}}, rp.tickers), Error);
}

namespace {
const std::vector<double> kR{0.012, -0.008, 0.004, 0.015, -0.021, 0.003, 0.009, -0.004, 0.011, -0.013, 0.006, 0.002,
                             -0.007, 0.018, -0.010, 0.005, 0.001, -0.003, 0.014, -0.006, 0.008, -0.015, 0.010, 0.004};
const std::vector<double> kB{0.010, -0.006, 0.002, 0.011, -0.018, 0.004, 0.007, -0.002, 0.009, -0.010, 0.003, 0.001,
                             -0.005, 0.014, -0.008, 0.006, 0.000, -0.004, 0.012, -0.005, 0.006, -0.012, 0.008, 0.003};
}  // namespace

TEST(Kpis, TwentyFourObservationOracle) {
    const auto k = kpis(kR, kB);
    EXPECT_NEAR(k.sharpe, 2.2569245821166515, 1e-9);
    EXPECT_NEAR(k.sortino, 3.4056257493763384, 1e-9);
    EXPECT_NEAR(k.max_dd, -0.021, 1e-9);
    EXPECT_NEAR(k.beta, 1.2311475409836061, 1e-9);
    EXPECT_NEAR(k.alpha, 0.03139672131147589, 1e-9);
    EXPECT_NEAR(k.r_squared, 0.9870123763026003, 1e-9);
    EXPECT_NEAR(k.ann_ret, 0.4255083414047405, 1e-9);
    EXPECT_NEAR(k.ann_vola, 0.16283220224192918, 1e-9);
    EXPECT_NEAR(k.down_vola, 0.10790968445881029, 1e-9);
}

TEST(Kpis, SelfBenchmark) {
    const auto k = kpis(kR, kR);
    EXPECT_NEAR(k.beta, 1.0, 1e-12);
    EXPECT_NEAR(k.r_squared, 1.0, 1e-12);
    EXPECT_NEAR(k.alpha, 0.0, 1e-12);
}

TEST(Kpis, MonotoneUpHasNoDrawdownAndFlatBenchmarkFlagged) {
    const std::vector<double> up{0.01, 0.02, 0.0, 0.005}, flat{0.0, 0.0, 0.0, 0.0};
    const auto k = kpis(up, flat);
    EXPECT_EQ(k.max_dd, 0.0);
    EXPECT_FALSE(k.beta_defined);
    EXPECT_GE(k.ann_vola, 0.0);
    EXPECT_GE(k.down_vola, 0.0);
}
