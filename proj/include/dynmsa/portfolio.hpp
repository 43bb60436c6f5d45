/**
 * @file portfolio.hpp
 * @brief Cluster-aware stock selection, portfolio variance, monthly-rebalanced
 *        equal-weight backtests and performance KPIs.
 */

#pragma once

#include "dynmsa/core.hpp"
#include "dynmsa/ingest.hpp"
#include "dynmsa/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dynmsa {

enum class SelectionMode { Bottom, Top };

inline std::string_view selection_mode_name(SelectionMode m) { return m == SelectionMode::Bottom ? "bottom" : "top"; }

struct SelectionConfig {
    std::size_t k = 75;
    std::size_t small_n = 5;
    SelectionMode mode = SelectionMode::Bottom;
};

/// Mean correlation of a stock with the other members of its cluster.
struct StockScore {
    std::size_t stock = 0;  ///< index into the clustering's tickers
    std::size_t cluster = 0;
    double stock_intra = 0.0;
};

/// Scores for every stock in a cluster of size >= 2.
inline std::vector<StockScore> stock_scores(const Partition& p, const Matrix& corr) {
    std::vector<StockScore> out;
    const auto clusters = p.clusters();
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        const auto& members = clusters[c];
        if (members.size() < 2) continue;
        for (auto s : members) {
            double sum = 0.0;
            for (auto t : members)
                if (t != s) sum += corr(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t));
            out.push_back({s, c, sum / static_cast<double>(members.size() - 1)});
        }
    }
    return out;
}

/**
 * Every stock of a cluster with size <= small_n, then floor-proportional quotas
 * from the larger clusters filled in stock_intra order (ascending for Bottom,
 * descending for Top). Slots lost to flooring go one at a time to the largest
 * fractional remainder, then the larger cluster, then the lower cluster id.
 * Returns exactly cfg.k tickers, sorted.
 */
inline std::vector<std::string> select(const Clustering& clustering, std::span<const StockScore> scores,
                                       const SelectionConfig& cfg) {
    if (cfg.k < 1 || cfg.small_n < 1) throw ContractError("select: k and small_n must be >= 1");
    const auto& p = clustering.partition;
    if (clustering.tickers.size() != p.size()) throw ContractError("select: tickers do not match partition");
    if (p.size() < cfg.k) throw ContractError("select: universe smaller than portfolio size");

    const auto clusters = p.clusters();
    std::vector<std::size_t> chosen;
    std::vector<std::size_t> large;
    std::size_t large_total = 0;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        if (clusters[c].size() <= cfg.small_n)
            chosen.insert(chosen.end(), clusters[c].begin(), clusters[c].end());
        else {
            large.push_back(c);
            large_total += clusters[c].size();
        }
    }
    if (chosen.size() > cfg.k)
        throw Error("select: small clusters hold " + std::to_string(chosen.size()) + " stocks, more than k = " +
                    std::to_string(cfg.k));
    const std::size_t remaining = cfg.k - chosen.size();
    if (remaining > large_total) throw Error("select: not enough stocks in large clusters to fill the portfolio");

    struct Quota {
        std::size_t cluster;
        std::size_t size;
        std::size_t take;
        double remainder;
    };
    std::vector<Quota> quotas;
    std::size_t assigned = 0;
    for (auto c : large) {
        const double exact = static_cast<double>(clusters[c].size()) / static_cast<double>(large_total) *
                             static_cast<double>(remaining);
        const auto take = static_cast<std::size_t>(std::floor(exact));
        quotas.push_back({c, clusters[c].size(), take, exact - static_cast<double>(take)});
        assigned += take;
    }
    std::vector<std::size_t> order(quotas.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
        if (quotas[a].remainder != quotas[b].remainder) return quotas[a].remainder > quotas[b].remainder;
        if (quotas[a].size != quotas[b].size) return quotas[a].size > quotas[b].size;
        return quotas[a].cluster < quotas[b].cluster;
    });
    for (std::size_t i = 0; assigned < remaining; i = (i + 1) % order.size()) {
        auto& q = quotas[order[i]];
        if (q.take < q.size) {
            ++q.take;
            ++assigned;
        }
    }

    std::vector<std::optional<double>> intra(p.size());
    for (const auto& s : scores)
        if (s.stock < p.size()) intra[s.stock] = s.stock_intra;

    for (const auto& q : quotas) {
        auto members = clusters[q.cluster];
        for (auto s : members)
            if (!intra[s]) throw ContractError("select: missing score for " + clustering.tickers[s]);
        std::stable_sort(members.begin(), members.end(), [&](auto a, auto b) {
            return cfg.mode == SelectionMode::Bottom ? *intra[a] < *intra[b] : *intra[a] > *intra[b];
        });
        chosen.insert(chosen.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(q.take));
    }

    std::vector<std::string> out;
    out.reserve(chosen.size());
    for (auto s : chosen) out.push_back(clustering.tickers[s]);
    std::sort(out.begin(), out.end());
    return out;
}

/// sum_i w_i^2 s_i^2 + sum_{i != j} w_i w_j s_i s_j rho_ij
inline double portfolio_risk(std::span<const double> weights, std::span<const double> vols, const Matrix& corr) {
    const std::size_t n = weights.size();
    if (vols.size() != n || static_cast<std::size_t>(corr.rows()) != n || static_cast<std::size_t>(corr.cols()) != n)
        throw ContractError("portfolio_risk: dimension mismatch");
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(wsum - 1.0) > 1e-9) throw ContractError("portfolio_risk: weights must sum to 1");
    double risk = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        risk += weights[i] * weights[i] * vols[i] * vols[i];
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                risk += weights[i] * weights[j] * vols[i] * vols[j] *
                        corr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    return risk;
}

// ---------------------------------------------------------------------------
// Backtest
// ---------------------------------------------------------------------------

struct MonthlySelection {
    Date anchor;
    std::vector<std::string> tickers;
};

struct BacktestResult {
    std::vector<Date> dates;  ///< dates[0] is the first anchor; later entries are trading days
    std::vector<double> portfolio_returns;  ///< one per trading day (dates[1..])
    std::vector<double> benchmark_returns;
    std::vector<double> portfolio_equity;  ///< starts at 1.0, same length as dates
    std::vector<double> benchmark_equity;
};

namespace detail {
inline std::vector<std::size_t> resolve(const ReturnPanel& rp, const std::vector<std::string>& tickers) {
    std::vector<std::size_t> cols;
    cols.reserve(tickers.size());
    for (const auto& t : tickers) {
        auto idx = rp.ticker_index(t);
        if (!idx) throw Error("backtest: ticker '" + t + "' not in return panel");
        cols.push_back(*idx);
    }
    return cols;
}
}  // namespace detail

/**
 * Holds each selection from the trading day after its anchor through the next
 * anchor (the last one through the end of the panel). Within a month the
 * portfolio is equally weighted every day, so its daily return is the mean of
 * its members' returns. The benchmark weights `benchmark` equally the same way.
 */
inline BacktestResult backtest(const ReturnPanel& rp, const std::vector<MonthlySelection>& selections,
                               const std::vector<std::string>& benchmark) {
    BacktestResult out;
    if (selections.empty()) return out;
    const auto bench_cols = detail::resolve(rp, benchmark);
    if (bench_cols.empty()) throw ContractError("backtest: empty benchmark universe");

    out.dates.push_back(selections.front().anchor);
    out.portfolio_equity.push_back(1.0);
    out.benchmark_equity.push_back(1.0);
    for (std::size_t s = 0; s < selections.size(); ++s) {
        if (s > 0 && !(selections[s - 1].anchor < selections[s].anchor))
            throw ContractError("backtest: anchors must be strictly increasing");
        const auto cols = detail::resolve(rp, selections[s].tickers);
        if (cols.empty()) throw ContractError("backtest: empty selection at " + format_date(selections[s].anchor));
        const Date start = selections[s].anchor;
        const bool last = s + 1 == selections.size();
        for (std::size_t d = 0; d < rp.dates.size(); ++d) {
            const Date day = rp.dates[d];
            if (!(start < day)) continue;
            if (!last && selections[s + 1].anchor < day) break;
            double pr = 0.0, br = 0.0;
            for (auto c : cols) pr += rp.returns(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(c));
            for (auto c : bench_cols) br += rp.returns(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(c));
            pr /= static_cast<double>(cols.size());
            br /= static_cast<double>(bench_cols.size());
            out.dates.push_back(day);
            out.portfolio_returns.push_back(pr);
            out.benchmark_returns.push_back(br);
            out.portfolio_equity.push_back(out.portfolio_equity.back() * (1.0 + pr));
            out.benchmark_equity.push_back(out.benchmark_equity.back() * (1.0 + br));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// KPIs
// ---------------------------------------------------------------------------

inline constexpr double kTradingDays = 252.0;

/**
 * Annualised performance figures from daily returns (252 days, zero risk-free
 * rate):
 *   ann_ret   = prod(1 + r)^(252 / n) - 1
 *   ann_vola  = sd(r) * sqrt(252), sample standard deviation
 *   sharpe    = mean(r) / sd(r) * sqrt(252)
 *   down_vola = sqrt(mean(min(r, 0)^2)) * sqrt(252)
 *   sortino   = mean(r) * 252 / down_vola
 *   max_dd    = min_t (E_t / max_{s <= t} E_s - 1), E_0 = 1
 *   beta, alpha, r_squared from OLS of r on the benchmark; alpha = intercept * 252
 * Ratios with a zero denominator are reported as 0 and flagged.
 */
struct KpiRecord {
    double ann_ret = 0.0;
    double ann_vola = 0.0;
    double sharpe = 0.0;
    double sortino = 0.0;
    double max_dd = 0.0;
    double down_vola = 0.0;
    double beta = 0.0;
    double r_squared = 0.0;
    double alpha = 0.0;
    bool beta_defined = true;  ///< false when the benchmark has zero variance
};

inline double max_drawdown(std::span<const double> daily) {
    double equity = 1.0, peak = 1.0, worst = 0.0;
    for (double r : daily) {
        equity *= 1.0 + r;
        peak = std::max(peak, equity);
        worst = std::min(worst, equity / peak - 1.0);
    }
    return worst;
}

inline KpiRecord kpis(std::span<const double> daily, std::span<const double> benchmark_daily) {
    if (daily.size() != benchmark_daily.size()) throw ContractError("kpis: series are not aligned");
    const std::size_t n = daily.size();
    if (n < 2) throw ContractError("kpis: need at least 2 observations");
    const double nd = static_cast<double>(n);

    KpiRecord k;
    double growth = 1.0, mean = 0.0, bmean = 0.0, down = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        growth *= 1.0 + daily[i];
        mean += daily[i];
        bmean += benchmark_daily[i];
        const double neg = std::min(daily[i], 0.0);
        down += neg * neg;
    }
    mean /= nd;
    bmean /= nd;
    double var = 0.0, bvar = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = daily[i] - mean, db = benchmark_daily[i] - bmean;
        var += dx * dx;
        bvar += db * db;
        cov += dx * db;
    }

    const double sd = std::sqrt(var / (nd - 1.0));
    k.ann_ret = std::pow(growth, kTradingDays / nd) - 1.0;
    k.ann_vola = sd * std::sqrt(kTradingDays);
    k.sharpe = sd > 0 ? mean / sd * std::sqrt(kTradingDays) : 0.0;
    k.down_vola = std::sqrt(down / nd) * std::sqrt(kTradingDays);
    k.sortino = k.down_vola > 0 ? mean * kTradingDays / k.down_vola : 0.0;
    k.max_dd = max_drawdown(daily);

    if (bvar > 0) {
        k.beta = cov / bvar;
        k.alpha = (mean - k.beta * bmean) * kTradingDays;
        k.r_squared = var > 0 ? cov * cov / (var * bvar) : 0.0;
    } else {
        k.beta_defined = false;
        k.alpha = mean * kTradingDays;
    }
    return k;
}

}  // namespace dynmsa
