/**
 * @file ingest.hpp
 * @brief Price/sector loading, simple returns, calendar-month look-back windows
 *        and per-window Pearson correlation matrices.
 */

#pragma once

#include "dynmsa/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace dynmsa {

// ---------------------------------------------------------------------------
// Sectors
// ---------------------------------------------------------------------------

/// The eleven GICS sectors, in GICS code order (10, 15, ..., 60).
enum class Sector : int {
    Energy,
    Materials,
    Industrials,
    ConsumerDiscretionary,
    ConsumerStaples,
    HealthCare,
    Financials,
    InformationTechnology,
    CommunicationServices,
    Utilities,
    RealEstate,
};

inline constexpr std::size_t kSectorCount = 11;

inline constexpr std::array<std::string_view, kSectorCount> kSectorNames = {
    "Energy",          "Materials",   "Industrials",
    "Consumer Discretionary", "Consumer Staples", "Health Care",
    "Financials",      "Information Technology", "Communication Services",
    "Utilities",       "Real Estate",
};

inline std::string_view sector_name(Sector s) { return kSectorNames[static_cast<std::size_t>(s)]; }

inline std::optional<Sector> parse_sector(std::string_view name) {
    for (std::size_t i = 0; i < kSectorCount; ++i)
        if (kSectorNames[i] == name) return static_cast<Sector>(i);
    return std::nullopt;
}

using SectorMap = std::map<std::string, Sector, std::less<>>;

// ---------------------------------------------------------------------------
// Panels
// ---------------------------------------------------------------------------

struct PricePanel {
    std::vector<Date> dates;
    std::vector<std::string> tickers;
    Matrix close;  ///< [day x ticker]
};

struct ReturnPanel {
    std::vector<Date> dates;
    std::vector<std::string> tickers;
    Matrix returns;  ///< [day x ticker], simple returns

    std::optional<std::size_t> ticker_index(std::string_view t) const {
        auto it = std::find(tickers.begin(), tickers.end(), t);
        if (it == tickers.end()) return std::nullopt;
        return static_cast<std::size_t>(it - tickers.begin());
    }
};

struct DroppedTicker {
    std::string ticker;
    double coverage;
};

struct LoadedPrices {
    PricePanel panel;
    std::vector<DroppedTicker> dropped;
};

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline bool parse_double(std::string_view s, double& v) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && p == s.data() + s.size() && std::isfinite(v);
}

inline std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return in;
}

}  // namespace detail

/**
 * Builds a rectangular panel from long-format observations.
 *
 * Tickers observed on fewer than `min_coverage` of the trading days are dropped.
 * The trading calendar is the union of dates observed for retained tickers;
 * remaining gaps are forward-filled, and a leading gap takes the first observed
 * price.
 */
inline LoadedPrices assemble_prices(const std::map<std::string, std::map<int, double>>& obs,
                                    const std::map<int, Date>& all_dates, double min_coverage) {
    LoadedPrices out;
    const double total_days = static_cast<double>(all_dates.size());
    std::vector<std::string> kept;
    for (const auto& [ticker, series] : obs) {
        const double cov = total_days > 0 ? static_cast<double>(series.size()) / total_days : 0.0;
        if (cov < min_coverage)
            out.dropped.push_back({ticker, cov});
        else
            kept.push_back(ticker);
    }
    if (kept.empty()) throw Error("price panel is empty after applying coverage filter");

    std::set<int> day_keys;
    for (const auto& t : kept)
        for (const auto& [k, _] : obs.at(t)) day_keys.insert(k);

    PricePanel& p = out.panel;
    p.tickers = kept;
    p.dates.reserve(day_keys.size());
    for (int k : day_keys) p.dates.push_back(all_dates.at(k));
    p.close.resize(static_cast<Eigen::Index>(day_keys.size()), static_cast<Eigen::Index>(kept.size()));

    for (std::size_t j = 0; j < kept.size(); ++j) {
        const auto& series = obs.at(kept[j]);
        double last = series.begin()->second;
        Eigen::Index row = 0;
        for (int k : day_keys) {
            if (auto it = series.find(k); it != series.end()) last = it->second;
            p.close(row++, static_cast<Eigen::Index>(j)) = last;
        }
    }
    return out;
}

/// Reads a `date,ticker,close` CSV. See assemble_prices for the missing-data policy.
inline LoadedPrices load_prices(const std::string& path, double min_coverage = 0.95) {
    auto in = detail::open_or_throw(path);
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw Error(path + ": empty price file");
    ++lineno;
    if (detail::trim(line) != "date,ticker,close")
        throw ParseError(path, lineno, "expected header 'date,ticker,close'");

    std::map<std::string, std::map<int, double>> obs;
    std::map<int, Date> dates;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = detail::trim(line);
        if (sv.empty()) continue;
        auto cells = detail::split_csv(sv);
        if (cells.size() != 3) throw ParseError(path, lineno, "expected 3 columns");
        Date d;
        if (!parse_date(detail::trim(cells[0]), d))
            throw ParseError(path, lineno, "invalid date '" + std::string(cells[0]) + "'");
        std::string ticker(detail::trim(cells[1]));
        if (ticker.empty()) throw ParseError(path, lineno, "empty ticker");
        double close = 0;
        if (!detail::parse_double(detail::trim(cells[2]), close))
            throw ParseError(path, lineno, "non-numeric close '" + std::string(cells[2]) + "'");
        const int key = static_cast<int>(std::chrono::sys_days{d}.time_since_epoch().count());
        dates.emplace(key, d);
        if (!obs[ticker].emplace(key, close).second)
            throw ParseError(path, lineno, "duplicate row for " + ticker + " on " + format_date(d));
    }
    if (obs.empty()) throw Error(path + ": price file has no rows");
    return assemble_prices(obs, dates, min_coverage);
}

/// Reads a `ticker,sector` CSV; sector names must be GICS names verbatim.
inline SectorMap load_sectors(const std::string& path) {
    auto in = detail::open_or_throw(path);
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw Error(path + ": empty sector file");
    ++lineno;
    if (detail::trim(line) != "ticker,sector") throw ParseError(path, lineno, "expected header 'ticker,sector'");

    SectorMap map;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = detail::trim(line);
        if (sv.empty()) continue;
        auto cells = detail::split_csv(sv);
        if (cells.size() != 2) throw ParseError(path, lineno, "expected 2 columns");
        auto sector = parse_sector(detail::trim(cells[1]));
        if (!sector) throw ParseError(path, lineno, "unknown sector '" + std::string(cells[1]) + "'");
        std::string ticker(detail::trim(cells[0]));
        if (!map.emplace(ticker, *sector).second) throw ParseError(path, lineno, "duplicate ticker " + ticker);
    }
    if (map.empty()) throw Error(path + ": sector file has no rows");
    return map;
}

/// r_d = (P_d - P_{d-1}) / P_{d-1}.
inline ReturnPanel compute_returns(const PricePanel& panel) {
    const auto days = panel.close.rows();
    const auto n = panel.close.cols();
    if (days < 2) throw ContractError("compute_returns needs at least 2 days");
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index d = 0; d < days; ++d)
            if (!(panel.close(d, j) > 0.0))
                throw Error("nonpositive price for " + panel.tickers[static_cast<std::size_t>(j)] + " on " +
                            format_date(panel.dates[static_cast<std::size_t>(d)]));

    ReturnPanel rp;
    rp.dates.assign(panel.dates.begin() + 1, panel.dates.end());
    rp.tickers = panel.tickers;
    rp.returns.resize(days - 1, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index d = 1; d < days; ++d)
            rp.returns(d - 1, j) = (panel.close(d, j) - panel.close(d - 1, j)) / panel.close(d - 1, j);
    return rp;
}

// ---------------------------------------------------------------------------
// Windows
// ---------------------------------------------------------------------------

/// Contiguous slice [begin, end) of ReturnPanel rows covering `lookback_months`
/// calendar months that end at `anchor`.
struct Window {
    Date anchor;
    int lookback_months = 0;
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
};

/**
 * One window per month-end anchor with a complete look-back.
 *
 * The first calendar month of the panel never starts a look-back: its opening
 * return needs the previous month's closing price, which the panel lacks. A
 * panel spanning M calendar months therefore yields M - n windows.
 */
inline std::vector<Window> month_end_windows(const ReturnPanel& rp, int lookback_months) {
    if (lookback_months < 1) throw ContractError("lookback_months must be >= 1");
    std::vector<Window> out;
    if (rp.dates.empty()) {
        warn("month_end_windows: empty return panel");
        return out;
    }
    const int first = month_index(rp.dates.front());
    const int span = month_index(rp.dates.back()) - first + 1;
    if (span <= lookback_months) {
        warn("month_end_windows: panel spans " + std::to_string(span) + " months, need more than " +
             std::to_string(lookback_months));
        return out;
    }
    auto first_day_of = [&](int idx) {
        return std::lower_bound(rp.dates.begin(), rp.dates.end(), idx,
                                [](const Date& d, int i) { return month_index(d) < i; }) -
               rp.dates.begin();
    };
    for (int j = lookback_months; j < span; ++j) {
        Window w;
        w.anchor = month_end(first + j);
        w.lookback_months = lookback_months;
        w.begin = static_cast<std::size_t>(first_day_of(first + j - lookback_months + 1));
        w.end = static_cast<std::size_t>(first_day_of(first + j + 1));
        if (w.size() < 2) {
            warn("month_end_windows: window ending " + format_date(w.anchor) + " has fewer than 2 days, skipped");
            continue;
        }
        out.push_back(w);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Correlation
// ---------------------------------------------------------------------------

struct CorrelationMatrix {
    std::vector<std::string> tickers;
    Matrix values;
    Date anchor{};
    int lookback_months = 0;
    std::size_t n_days = 0;
    std::vector<std::string> excluded;  ///< zero-variance tickers left out of this window

    std::size_t size() const { return tickers.size(); }
};

/// Pearson correlation of the window's daily returns. Symmetric bit-for-bit with
/// an exact unit diagonal.
inline CorrelationMatrix pearson_correlation(const ReturnPanel& rp, const Window& w) {
    if (w.size() < 2) throw ContractError("pearson_correlation needs a window with at least 2 days");
    if (w.end > static_cast<std::size_t>(rp.returns.rows())) throw ContractError("window exceeds return panel");

    const auto days = static_cast<Eigen::Index>(w.size());
    auto block = rp.returns.middleRows(static_cast<Eigen::Index>(w.begin), days);

    CorrelationMatrix cm;
    cm.anchor = w.anchor;
    cm.lookback_months = w.lookback_months;
    cm.n_days = w.size();

    std::vector<Eigen::Index> cols;
    Matrix centered(days, block.cols());
    for (Eigen::Index j = 0; j < block.cols(); ++j) {
        Vector x = block.col(j);
        const double mean = x.mean();
        Vector c = x.array() - mean;
        const double scale = 1.0 + x.cwiseAbs().maxCoeff();
        const double norm = c.norm();
        if (norm <= 1e-14 * scale * std::sqrt(static_cast<double>(days))) {
            cm.excluded.push_back(rp.tickers[static_cast<std::size_t>(j)]);
            continue;
        }
        centered.col(static_cast<Eigen::Index>(cols.size())) = c / norm;
        cols.push_back(j);
        cm.tickers.push_back(rp.tickers[static_cast<std::size_t>(j)]);
    }
    const auto n = static_cast<Eigen::Index>(cols.size());
    Matrix z = centered.leftCols(n);
    cm.values = z.transpose() * z;
    for (Eigen::Index i = 0; i < n; ++i) {
        cm.values(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = std::clamp(cm.values(i, j), -1.0, 1.0);
            cm.values(i, j) = v;
            cm.values(j, i) = v;
        }
    }
    return cm;
}

}  // namespace dynmsa
