/**
 * @file pipeline.hpp
 * @brief End-to-end orchestration: per-window cleaning, threshold search,
 *        sector-seeded Leiden, spectral refinement, selection, and the run
 *        directory writer (per-window JSON, tidy CSVs, manifest).
 */

#pragma once

#include "dynmsa/community.hpp"
#include "dynmsa/core.hpp"
#include "dynmsa/ingest.hpp"
#include "dynmsa/metrics.hpp"
#include "dynmsa/portfolio.hpp"
#include "dynmsa/rmt.hpp"
#include "dynmsa/spectral.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace dynmsa {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct RunConfig {
    int lookback_months = 3;
    std::size_t theta_grid_size = 41;
    std::size_t small_n = 5;
    std::size_t portfolio_k = 75;
    std::vector<SelectionMode> modes{SelectionMode::Bottom, SelectionMode::Top};
    std::uint64_t rng_seed = 42;
    double min_coverage = 0.95;
    double resolution = 1.0;
    std::size_t workers = 1;
    std::string output_dir = "run";

    void validate() const {
        if (lookback_months < 1 || lookback_months > 120) throw ContractError("lookback_months must be in [1, 120]");
        if (theta_grid_size < 2) throw ContractError("theta_grid_size must be >= 2");
        if (small_n < 1) throw ContractError("small_n must be >= 1");
        if (portfolio_k < 1) throw ContractError("portfolio_k must be >= 1");
        if (modes.empty()) throw ContractError("at least one selection mode is required");
        if (!(min_coverage >= 0.0 && min_coverage <= 1.0)) throw ContractError("min_coverage must be in [0, 1]");
        if (!(resolution > 0.0)) throw ContractError("resolution must be positive");
        if (workers < 1) throw ContractError("workers must be >= 1");
    }
};

inline SelectionMode parse_selection_mode(std::string_view s) {
    if (s == "bottom") return SelectionMode::Bottom;
    if (s == "top") return SelectionMode::Top;
    throw ContractError("unknown selection mode '" + std::string(s) + "'");
}

inline nlohmann::ordered_json to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["lookback_months"] = c.lookback_months;
    j["theta_grid_size"] = c.theta_grid_size;
    j["small_n"] = c.small_n;
    j["portfolio_k"] = c.portfolio_k;
    j["modes"] = nlohmann::ordered_json::array();
    for (auto m : c.modes) j["modes"].push_back(std::string(selection_mode_name(m)));
    j["rng_seed"] = c.rng_seed;
    j["min_coverage"] = c.min_coverage;
    j["resolution"] = c.resolution;
    j["workers"] = c.workers;
    j["output_dir"] = c.output_dir;
    return j;
}

/// Overlays the keys present in a flat JSON object onto `c`. Unknown keys are errors.
inline void apply_json(RunConfig& c, const nlohmann::json& j) {
    if (!j.is_object()) throw Error("config: expected a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key == "lookback_months") c.lookback_months = v.get<int>();
        else if (key == "theta_grid_size") c.theta_grid_size = v.get<std::size_t>();
        else if (key == "small_n") c.small_n = v.get<std::size_t>();
        else if (key == "portfolio_k") c.portfolio_k = v.get<std::size_t>();
        else if (key == "modes") {
            c.modes.clear();
            for (const auto& m : v) c.modes.push_back(parse_selection_mode(m.get<std::string>()));
        } else if (key == "rng_seed") c.rng_seed = v.get<std::uint64_t>();
        else if (key == "min_coverage") c.min_coverage = v.get<double>();
        else if (key == "resolution") c.resolution = v.get<double>();
        else if (key == "workers") c.workers = v.get<std::size_t>();
        else if (key == "output_dir") c.output_dir = v.get<std::string>();
        else throw Error("config: unknown key '" + key + "'");
    }
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path);
    RunConfig c;
    try {
        apply_json(c, nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw Error("config " + path + ": " + e.what());
    }
    return c;
}

// ---------------------------------------------------------------------------
// Threshold search
// ---------------------------------------------------------------------------

struct ThetaPoint {
    double theta = 0.0;
    std::size_t edges = 0;
    std::size_t n_clusters = 0;
    double modularity = 0.0;
    std::optional<double> objective;
};

struct ThetaSearch {
    double theta_star = 0.0;
    Partition partition;
    ClusterQuality quality;
    std::vector<ThetaPoint> curve;
};

/// Evenly spaced grid over [0, min(lambda_plus, largest off-diagonal entry)].
inline std::vector<double> theta_grid(const CleanedCorrelation& cleaned, std::size_t grid) {
    if (grid < 2) throw ContractError("theta grid needs at least 2 points");
    const double upper = std::max(0.0, std::min(cleaned.bounds.lambda_plus, cleaned.max_off_diagonal()));
    std::vector<double> out(grid);
    for (std::size_t g = 0; g < grid; ++g)
        out[g] = upper * static_cast<double>(g) / static_cast<double>(grid - 1);
    return out;
}

/**
 * Brute-force threshold search: for each grid point, threshold the cleaned
 * matrix, seed Leiden with the sector partition and score the result by
 * rho_intra - rho_inter. The first (smallest) maximiser wins. If no grid point
 * yields a scorable partition, the smallest threshold is used.
 */
inline ThetaSearch optimize_theta(const CleanedCorrelation& cleaned, const SectorMap& sectors, std::size_t grid,
                                  std::uint64_t seed, double resolution = 1.0) {
    ThetaSearch out;
    const auto seed_partition = sector_seed(cleaned.tickers, sectors);
    std::optional<std::size_t> best;
    std::vector<Partition> parts;
    for (double theta : theta_grid(cleaned, grid)) {
        const auto g = build_graph(threshold(cleaned, theta), cleaned.tickers);
        Partition part = leiden(g, seed_partition, resolution, seed);
        ThetaPoint pt;
        pt.theta = theta;
        pt.edges = g.edge_count();
        pt.n_clusters = part.cluster_count();
        pt.modularity = g.edge_count() > 0 ? modularity(g, part, resolution) : 0.0;
        pt.objective = objective(part, cleaned.matrix);
        if (pt.objective && (!best || *pt.objective > *out.curve[*best].objective)) best = out.curve.size();
        out.curve.push_back(pt);
        parts.push_back(std::move(part));
    }
    if (!best) {
        warn("optimize_theta: no threshold gives a scorable partition; using the smallest threshold");
        best = 0;
    }
    out.theta_star = out.curve[*best].theta;
    out.partition = parts[*best];
    out.quality = cluster_quality(out.partition, cleaned.matrix, out.curve[*best].modularity);
    return out;
}

// ---------------------------------------------------------------------------
// Window
// ---------------------------------------------------------------------------

struct WindowResult {
    Date anchor{};
    std::vector<std::string> tickers;
    std::vector<std::string> excluded;
    std::size_t n_days = 0;
    double theta_star = 0.0;
    MpBounds bounds;
    std::size_t kept_eigenvalues = 0;
    ClusterQuality sector_baseline;  ///< sector partition scored at theta*
    ClusterQuality leiden_quality;   ///< before refinement
    ClusterQuality final_quality;
    Partition leiden_partition;
    Partition final_partition;
    Provenance provenance = Provenance::Leiden;
    std::optional<std::size_t> k_chosen;
    std::vector<ThetaPoint> theta_curve;
    std::map<SelectionMode, std::vector<std::string>> selections;
};

/// clean -> optimize_theta -> refine -> quality metrics -> selections.
inline WindowResult run_window(const CorrelationMatrix& corr, const SectorMap& sectors, const RunConfig& cfg) {
    WindowResult r;
    r.anchor = corr.anchor;
    r.tickers = corr.tickers;
    r.excluded = corr.excluded;
    r.n_days = corr.n_days;
    if (corr.size() < 2) throw Error("window has fewer than 2 usable stocks");

    const auto cleaned = clean(corr);
    r.bounds = cleaned.bounds;
    r.kept_eigenvalues = cleaned.kept_count;

    auto search = optimize_theta(cleaned, sectors, cfg.theta_grid_size, cfg.rng_seed, cfg.resolution);
    r.theta_star = search.theta_star;
    r.theta_curve = std::move(search.curve);
    r.leiden_partition = search.partition;
    r.leiden_quality = search.quality;

    const auto graph = build_graph(threshold(cleaned, r.theta_star), cleaned.tickers);
    auto q_of = [&](const Partition& p) { return graph.edge_count() > 0 ? modularity(graph, p, cfg.resolution) : 0.0; };

    const auto seed_partition = sector_seed(cleaned.tickers, sectors);
    r.sector_baseline = cluster_quality(seed_partition, cleaned.matrix, q_of(seed_partition));

    auto outcome = refine(r.leiden_partition, cleaned.matrix, cfg.small_n, cfg.rng_seed);
    r.final_partition = outcome.final;
    r.provenance = outcome.chosen;
    r.k_chosen = outcome.k_chosen;
    r.final_quality = cluster_quality(r.final_partition, cleaned.matrix, q_of(r.final_partition));

    const Clustering clustering{r.tickers, r.final_partition};
    const auto scores = stock_scores(r.final_partition, cleaned.matrix);
    for (auto mode : cfg.modes) {
        SelectionConfig sc;
        sc.k = cfg.portfolio_k;
        sc.small_n = cfg.small_n;
        sc.mode = mode;
        r.selections[mode] = select(clustering, scores, sc);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

inline std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

namespace detail {

inline std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

inline nlohmann::ordered_json opt_json(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline nlohmann::ordered_json quality_json(const ClusterQuality& q) {
    nlohmann::ordered_json j;
    j["rho_intra"] = opt_json(q.rho_intra);
    j["rho_inter"] = opt_json(q.rho_inter);
    j["objective"] = opt_json(q.objective);
    j["modularity"] = q.modularity;
    j["n_clusters"] = q.n_clusters;
    return j;
}

inline nlohmann::ordered_json clusters_json(const std::vector<std::string>& tickers, const Partition& p) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& c : p.clusters()) {
        nlohmann::ordered_json members = nlohmann::ordered_json::array();
        for (auto v : c) members.push_back(tickers[v]);
        arr.push_back(std::move(members));
    }
    return arr;
}

/// Writes files under a run directory and records their digests.
class RunWriter {
public:
    explicit RunWriter(std::filesystem::path root) : root_(std::move(root)) {
        std::filesystem::create_directories(root_);
    }

    void write(const std::string& rel, const std::string& content) {
        const auto path = root_ / rel;
        std::filesystem::create_directories(path.parent_path());
        std::ofstream f(path, std::ios::binary);
        f << content;
        if (!f) throw Error("failed writing " + path.string());
        files_.push_back({rel, sha256_hex(content), content.size()});
    }

    struct Entry {
        std::string path;
        std::string sha256;
        std::size_t bytes;
    };
    const std::vector<Entry>& files() const { return files_; }
    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path root_;
    std::vector<Entry> files_;
};

}  // namespace detail

/// The per-window JSON document.
inline nlohmann::ordered_json window_json(const WindowResult& r) {
    nlohmann::ordered_json j;
    j["anchor"] = format_date(r.anchor);
    j["theta_star"] = r.theta_star;
    j["clusters"] = detail::clusters_json(r.tickers, r.final_partition);
    j["rho_intra"] = detail::opt_json(r.final_quality.rho_intra);
    j["rho_inter"] = detail::opt_json(r.final_quality.rho_inter);
    j["objective"] = detail::opt_json(r.final_quality.objective);
    j["modularity"] = r.final_quality.modularity;
    j["provenance"] = std::string(provenance_name(r.provenance));
    j["k_chosen"] = r.k_chosen ? nlohmann::ordered_json(*r.k_chosen) : nlohmann::ordered_json(nullptr);
    j["n_days"] = r.n_days;
    j["lambda_plus"] = r.bounds.lambda_plus;
    j["kept_eigenvalues"] = r.kept_eigenvalues;
    j["excluded"] = r.excluded;
    j["leiden"] = detail::quality_json(r.leiden_quality);
    j["leiden_clusters"] = detail::clusters_json(r.tickers, r.leiden_partition);
    j["sector_baseline"] = detail::quality_json(r.sector_baseline);
    nlohmann::ordered_json sel;
    for (const auto& [mode, tickers] : r.selections) sel[std::string(selection_mode_name(mode))] = tickers;
    j["selections"] = sel;
    return j;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

struct WindowStatus {
    Date anchor{};
    bool ok = false;
    std::string error;
};

struct RunSummary {
    std::filesystem::path run_dir;
    std::vector<WindowResult> results;  ///< successful windows, anchor order
    std::vector<WindowStatus> statuses;
    bool ok = false;
};

/// Evaluates `fn(i)` for i in [0, count) on `workers` threads.
template <class Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
}

/// Processes every window of an in-memory panel and writes the run directory.
inline RunSummary run_pipeline(const RunConfig& cfg, const ReturnPanel& rp, const SectorMap& sectors,
                               const std::vector<DroppedTicker>& dropped = {}) {
    cfg.validate();
    if (sectors.empty()) throw Error("sector map is empty");
    for (const auto& t : rp.tickers)
        if (!sectors.contains(t)) throw Error("ticker '" + t + "' has no sector");

    RunSummary summary;
    summary.run_dir = cfg.output_dir;
    const auto windows = month_end_windows(rp, cfg.lookback_months);

    std::vector<std::optional<WindowResult>> slots(windows.size());
    std::vector<std::string> errors(windows.size());
    parallel_for(windows.size(), cfg.workers, [&](std::size_t i) {
        try {
            slots[i] = run_window(pearson_correlation(rp, windows[i]), sectors, cfg);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    for (std::size_t i = 0; i < windows.size(); ++i) {
        summary.statuses.push_back({windows[i].anchor, slots[i].has_value(), errors[i]});
        if (slots[i]) summary.results.push_back(std::move(*slots[i]));
    }

    detail::RunWriter out(summary.run_dir);
    out.write("config.json", to_json(cfg).dump(2) + "\n");

    for (const auto& r : summary.results) out.write("windows/" + format_date(r.anchor) + ".json", window_json(r).dump(2) + "\n");

    {
        std::ostringstream m;
        m << "anchor,n_stocks,n_days,theta_star,lambda_plus,kept_eigenvalues,"
             "n_clusters_leiden,rho_intra_leiden,rho_inter_leiden,objective_leiden,modularity_leiden,"
             "n_clusters_final,rho_intra_final,rho_inter_final,objective_final,modularity_final,"
             "n_clusters_sector,rho_intra_sector,rho_inter_sector,objective_sector,modularity_sector,"
             "provenance,k_chosen\n";
        for (const auto& r : summary.results) {
            auto q = [&](const ClusterQuality& c) {
                return std::to_string(c.n_clusters) + ',' + detail::opt(c.rho_intra) + ',' + detail::opt(c.rho_inter) +
                       ',' + detail::opt(c.objective) + ',' + format_double(c.modularity);
            };
            m << format_date(r.anchor) << ',' << r.tickers.size() << ',' << r.n_days << ','
              << format_double(r.theta_star) << ',' << format_double(r.bounds.lambda_plus) << ','
              << r.kept_eigenvalues << ',' << q(r.leiden_quality) << ',' << q(r.final_quality) << ','
              << q(r.sector_baseline) << ',' << provenance_name(r.provenance) << ','
              << (r.k_chosen ? std::to_string(*r.k_chosen) : std::string()) << '\n';
        }
        out.write("metrics.csv", m.str());
    }

    {
        std::ostringstream t;
        t << "metric,n,mean_difference,t_statistic,p_value\n";
        auto paired = [&](const char* name, auto get) {
            std::vector<double> before, after;
            for (const auto& r : summary.results) {
                auto b = get(r.leiden_quality), a = get(r.final_quality);
                if (b && a) {
                    before.push_back(*b);
                    after.push_back(*a);
                }
            }
            const auto res = paired_t_test(before, after);
            t << name << ',' << res.n << ',' << format_double(res.mean_difference) << ','
              << format_double(res.statistic) << ',' << format_double(res.p_value) << '\n';
        };
        paired("rho_intra", [](const ClusterQuality& c) { return c.rho_intra; });
        paired("rho_inter", [](const ClusterQuality& c) { return c.rho_inter; });
        paired("modularity", [](const ClusterQuality& c) { return std::optional<double>(c.modularity); });
        paired("objective", [](const ClusterQuality& c) { return c.objective; });
        out.write("ttests.csv", t.str());
    }

    {
        std::ostringstream c;
        c << "anchor,theta,edges,n_clusters,modularity,objective\n";
        for (const auto& r : summary.results)
            for (const auto& pt : r.theta_curve)
                c << format_date(r.anchor) << ',' << format_double(pt.theta) << ',' << pt.edges << ','
                  << pt.n_clusters << ',' << format_double(pt.modularity) << ',' << detail::opt(pt.objective) << '\n';
        out.write("theta_curves.csv", c.str());
    }

    {
        std::ostringstream c;
        c << "anchor,cluster,size\n";
        for (const auto& r : summary.results) {
            const auto sizes = r.final_partition.cluster_sizes();
            for (std::size_t k = 0; k < sizes.size(); ++k)
                c << format_date(r.anchor) << ',' << k << ',' << sizes[k] << '\n';
        }
        out.write("cluster_sizes.csv", c.str());
    }

    std::vector<Clustering> clusterings;
    for (const auto& r : summary.results) clusterings.push_back({r.tickers, r.final_partition});

    {
        std::ostringstream a;
        a << "anchor,ari_vs_previous,z_score\n";
        std::vector<double> series;
        for (std::size_t i = 1; i < clusterings.size(); ++i) series.push_back(ari(clusterings[i - 1], clusterings[i]));
        const auto z = z_scores(series);
        for (std::size_t i = 0; i < series.size(); ++i)
            a << format_date(summary.results[i + 1].anchor) << ',' << format_double(series[i]) << ','
              << format_double(z[i]) << '\n';
        out.write("ari.csv", a.str());
    }

    if (!clusterings.empty()) {
        const auto P = cocluster(clusterings);
        std::ostringstream c;
        c << "ticker_a,ticker_b,probability,copresent\n";
        for (std::size_t i = 0; i < P.tickers.size(); ++i)
            for (std::size_t j = i + 1; j < P.tickers.size(); ++j) {
                const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
                c << P.tickers[i] << ',' << P.tickers[j] << ',' << format_double(P.probability(ii, jj)) << ','
                  << P.copresent(ii, jj) << '\n';
            }
        out.write("cocluster.csv", c.str());

        std::ostringstream x;
        x << "ticker,sector,s_cross,s_same,s_total,s_most,p_cross,p_most,most_connected_sector\n";
        for (const auto& e : cross_sector(P, sectors))
            x << e.ticker << ',' << sector_name(e.sector) << ',' << format_double(e.s_cross) << ','
              << format_double(e.s_same) << ',' << format_double(e.s_total) << ',' << format_double(e.s_most) << ','
              << detail::opt(e.p_cross) << ',' << detail::opt(e.p_most) << ','
              << (e.most_connected_sector ? std::string(sector_name(*e.most_connected_sector)) : std::string())
              << '\n';
        out.write("cross_sector.csv", x.str());
    }

    {
        std::ostringstream s;
        s << "anchor,mode,ticker\n";
        for (const auto& r : summary.results)
            for (const auto& [mode, tickers] : r.selections)
                for (const auto& t : tickers)
                    s << format_date(r.anchor) << ',' << selection_mode_name(mode) << ',' << t << '\n';
        out.write("selections.csv", s.str());
    }

    if (!summary.results.empty()) {
        std::vector<std::pair<std::string, BacktestResult>> tests;
        for (auto mode : cfg.modes) {
            std::vector<MonthlySelection> sel;
            for (const auto& r : summary.results) sel.push_back({r.anchor, r.selections.at(mode)});
            tests.emplace_back("portfolio_" + std::string(selection_mode_name(mode)), backtest(rp, sel, rp.tickers));
        }
        const auto& dates = tests.front().second.dates;

        std::ostringstream e;
        e << "date,benchmark";
        for (const auto& [name, _] : tests) e << ',' << name;
        e << '\n';
        for (std::size_t d = 0; d < dates.size(); ++d) {
            e << format_date(dates[d]) << ',' << format_double(tests.front().second.benchmark_equity[d]);
            for (const auto& [_, bt] : tests) e << ',' << format_double(bt.portfolio_equity[d]);
            e << '\n';
        }
        out.write("equity.csv", e.str());

        std::ostringstream k;
        k << "strategy,ann_ret,ann_vola,sharpe,sortino,max_dd,down_vola,beta,r_squared,alpha\n";
        auto row = [&](const std::string& name, const KpiRecord& r) {
            k << name << ',' << format_double(r.ann_ret) << ',' << format_double(r.ann_vola) << ','
              << format_double(r.sharpe) << ',' << format_double(r.sortino) << ',' << format_double(r.max_dd) << ','
              << format_double(r.down_vola) << ',' << format_double(r.beta) << ',' << format_double(r.r_squared)
              << ',' << format_double(r.alpha) << '\n';
        };
        const auto& bench = tests.front().second.benchmark_returns;
        if (bench.size() >= 2) {
            for (const auto& [name, bt] : tests) row(name, kpis(bt.portfolio_returns, bench));
            row("benchmark", kpis(bench, bench));
        }
        out.write("kpis.csv", k.str());
    }

    summary.ok = std::all_of(summary.statuses.begin(), summary.statuses.end(), [](const auto& s) { return s.ok; });

    nlohmann::ordered_json manifest;
    manifest["status"] = summary.ok ? "ok" : "failed";
    manifest["lookback_months"] = cfg.lookback_months;
    manifest["window_count"] = windows.size();
    manifest["dropped_tickers"] = nlohmann::ordered_json::array();
    for (const auto& d : dropped) manifest["dropped_tickers"].push_back({{"ticker", d.ticker}, {"coverage", d.coverage}});
    manifest["windows"] = nlohmann::ordered_json::array();
    for (const auto& s : summary.statuses) {
        nlohmann::ordered_json w;
        w["anchor"] = format_date(s.anchor);
        w["status"] = s.ok ? "ok" : "failed";
        if (!s.ok) w["error"] = s.error;
        manifest["windows"].push_back(std::move(w));
    }
    manifest["files"] = nlohmann::ordered_json::array();
    for (const auto& f : out.files())
        manifest["files"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    const auto text = manifest.dump(2) + "\n";
    std::ofstream(summary.run_dir / "manifest.json", std::ios::binary) << text;
    return summary;
}

/// Loads the input files and runs the pipeline. Input errors throw before any window runs.
inline RunSummary run_pipeline(const RunConfig& cfg, const std::string& prices_path, const std::string& sectors_path) {
    cfg.validate();
    const auto sectors = load_sectors(sectors_path);
    auto loaded = load_prices(prices_path, cfg.min_coverage);
    for (const auto& d : loaded.dropped)
        warn("dropped " + d.ticker + " (coverage " + format_double(d.coverage) + ")");
    return run_pipeline(cfg, compute_returns(loaded.panel), sectors, loaded.dropped);
}

}  // namespace dynmsa
