#include "support.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

using namespace dynmsa;
using namespace testing_support;

namespace {

CleanedCorrelation cleaned_from(const Matrix& m, double lambda_plus = 2.0) {
    CleanedCorrelation c;
    c.matrix = m;
    c.bounds.lambda_plus = lambda_plus;
    for (Eigen::Index i = 0; i < m.rows(); ++i) c.tickers.push_back("T" + std::to_string(10 + i));
    return c;
}

SectorMap alternating(const std::vector<std::string>& tickers) {
    SectorMap s;
    for (std::size_t i = 0; i < tickers.size(); ++i) s.emplace(tickers[i], static_cast<Sector>(i % 3));
    return s;
}

SynthPanel small_panel(double shuffle = 0.0) {
    SynthConfig c;
    c.months = 8;
    c.stocks = 60;
    c.blocks = 4;
    c.shuffle_fraction = shuffle;
    c.seed = 3;
    return make_synthetic_panel(c);
}

RunConfig small_config(const std::filesystem::path& out) {
    RunConfig cfg;
    cfg.portfolio_k = 20;
    cfg.theta_grid_size = 21;
    cfg.output_dir = out.string();
    return cfg;
}

}  // namespace

TEST(ThetaGrid, TwoPointsAreEndpoints) {
    Matrix m = Matrix::Constant(4, 4, 0.35);
    m.diagonal().setOnes();
    m(0, 1) = m(1, 0) = 0.6;
    const auto g = theta_grid(cleaned_from(m, 2.0), 2);
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(g[0], 0.0);
    EXPECT_EQ(g[1], 0.6);
    EXPECT_EQ(theta_grid(cleaned_from(m, 0.5), 3).back(), 0.5);
    EXPECT_THROW(theta_grid(cleaned_from(m), 1), ContractError);
}

TEST(OptimizeTheta, TwoBlocksSeparated) {
    Matrix m = Matrix::Identity(12, 12);
    for (Eigen::Index i = 0; i < 12; ++i)
        for (Eigen::Index j = 0; j < 12; ++j)
            if (i != j) m(i, j) = (i < 6) == (j < 6) ? 0.8 : 0.1;
    const auto c = cleaned_from(m);
    const auto r = optimize_theta(c, alternating(c.tickers), 41, 1);
    EXPECT_GE(r.theta_star, 0.1);
    EXPECT_LT(r.theta_star, 0.8);
    EXPECT_EQ(r.partition, Partition(std::vector<int>{0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1}));
    for (const auto& pt : r.curve)
        if (pt.objective) {
            EXPECT_LE(*pt.objective, *r.quality.objective);
        }
}

TEST(OptimizeTheta, EqualOffDiagonalsTakeSmallestValidTheta) {
    Matrix m = Matrix::Constant(9, 9, 0.3);
    m.diagonal().setOnes();
    const auto c = cleaned_from(m);
    const auto r = optimize_theta(c, alternating(c.tickers), 11, 1);
    std::optional<double> first_valid;
    for (const auto& pt : r.curve)
        if (pt.objective) {
            if (!first_valid) first_valid = pt.theta;
            EXPECT_NEAR(*pt.objective, 0.0, 1e-15);
        }
    ASSERT_TRUE(first_valid);
    EXPECT_EQ(r.theta_star, *first_valid);
}

TEST(Config, JsonRoundTripAndUnknownKey) {
    RunConfig c;
    c.lookback_months = 6;
    c.modes = {SelectionMode::Top};
    c.rng_seed = 99;
    RunConfig d;
    apply_json(d, nlohmann::json::parse(to_json(c).dump()));
    EXPECT_EQ(to_json(c), to_json(d));
    EXPECT_THROW(apply_json(d, nlohmann::json::parse(R"({"lookback": 3})")), Error);
    RunConfig bad;
    bad.theta_grid_size = 1;
    EXPECT_THROW(bad.validate(), ContractError);
}

TEST(RunWindow, PlantedBlocksRecovered) {
    QuietWarnings quiet;
    const auto panel = small_panel();
    const auto rp = compute_returns(panel.prices);
    const auto windows = month_end_windows(rp, 3);
    const auto corr = pearson_correlation(rp, windows.back());
    RunConfig cfg;
    cfg.portfolio_k = 20;
    const auto r = run_window(corr, panel.sectors, cfg);
    EXPECT_GE(ari(r.final_partition, Partition(panel.labels)), 0.9);
    ASSERT_TRUE(r.final_quality.objective && r.leiden_quality.objective);
    EXPECT_GE(*r.final_quality.objective, *r.leiden_quality.objective);
    EXPECT_EQ(r.selections.at(SelectionMode::Bottom).size(), 20u);

    const auto again = run_window(corr, panel.sectors, cfg);
    EXPECT_EQ(window_json(r).dump(), window_json(again).dump());
}

TEST(RunPipeline, OutputsManifestAndDeterminism) {
    QuietWarnings quiet;
    const auto panel = small_panel(0.3);
    const auto dir = temp_dir("pipeline");
    write_synthetic_panel(panel, dir / "in");
    auto cfg = small_config(dir / "a");
    const auto a = run_pipeline(cfg, (dir / "in/prices.csv").string(), (dir / "in/sectors.csv").string());
    ASSERT_TRUE(a.ok);
    EXPECT_EQ(a.results.size(), 5u);

    cfg.output_dir = (dir / "b").string();
    cfg.workers = 3;
    run_pipeline(cfg, (dir / "in/prices.csv").string(), (dir / "in/sectors.csv").string());

    const auto manifest = nlohmann::json::parse(read_file(dir / "a/manifest.json"));
    EXPECT_EQ(manifest["status"], "ok");
    EXPECT_EQ(manifest["window_count"], 5);
    std::set<std::string> listed;
    for (const auto& f : manifest["files"]) {
        const std::string rel = f["path"];
        listed.insert(rel);
        const auto content = read_file(dir / "a" / rel);
        EXPECT_EQ(f["sha256"], sha256_hex(content)) << rel;
        if (rel != "config.json") {
            EXPECT_EQ(content, read_file(dir / "b" / rel)) << rel;
        }
    }
    for (const char* f : {"metrics.csv", "ttests.csv", "theta_curves.csv", "cluster_sizes.csv", "ari.csv", "cocluster.csv",
                          "cross_sector.csv", "selections.csv", "equity.csv", "kpis.csv", "config.json"})
        EXPECT_TRUE(listed.contains(f)) << f;

    for (const auto& r : a.results) {
        ASSERT_TRUE(r.final_quality.objective);
        if (r.sector_baseline.objective) {
            EXPECT_GE(*r.final_quality.objective, *r.sector_baseline.objective);
        }
        if (r.leiden_quality.objective) {
            EXPECT_GE(*r.final_quality.objective, *r.leiden_quality.objective);
        }
    }
}

TEST(RunPipeline, EmptySectorFileFailsBeforeWindows) {
    const auto panel = small_panel();
    const auto dir = temp_dir("pipeline_empty");
    write_synthetic_panel(panel, dir / "in");
    write_file(dir / "in/sectors.csv", "ticker,sector\n");
    EXPECT_THROW(run_pipeline(small_config(dir / "out"), (dir / "in/prices.csv").string(),
                              (dir / "in/sectors.csv").string()),
                 Error);
    EXPECT_FALSE(std::filesystem::exists(dir / "out"));
}

TEST(RunPipeline, WindowFailureIsRecorded) {
    QuietWarnings quiet;
    const auto panel = small_panel();
    auto cfg = small_config(temp_dir("pipeline_fail") / "out");
    cfg.portfolio_k = 1000;  // larger than the universe, so every selection fails
    const auto s = run_pipeline(cfg, compute_returns(panel.prices), panel.sectors);
    EXPECT_FALSE(s.ok);
    const auto manifest = nlohmann::json::parse(read_file(std::filesystem::path(cfg.output_dir) / "manifest.json"));
    EXPECT_EQ(manifest["status"], "failed");
    EXPECT_EQ(manifest["windows"][0]["status"], "failed");
}

TEST(Synth, PlantedCorrelationLevels) {
    SynthConfig c;
    c.months = 24;
    c.stocks = 40;
    c.blocks = 2;
    const auto p = make_synthetic_panel(c);
    const auto rp = compute_returns(p.prices);
    const auto corr = pearson_correlation(rp, Window{Date{}, 24, 0, rp.dates.size()});
    double within = 0, across = 0;
    int nw = 0, na = 0;
    for (Eigen::Index i = 0; i < 40; ++i)
        for (Eigen::Index j = i + 1; j < 40; ++j)
            if (p.labels[static_cast<std::size_t>(i)] == p.labels[static_cast<std::size_t>(j)]) {
                within += corr.values(i, j);
                ++nw;
            } else {
                across += corr.values(i, j);
                ++na;
            }
    EXPECT_NEAR(within / nw, 0.7, 0.05);
    EXPECT_NEAR(across / na, 0.05, 0.05);
}
