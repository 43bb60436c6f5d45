/**
 * @file synth.hpp
 * @brief Planted-block synthetic price panels with ground-truth labels.
 *
 * Daily returns follow a two-level factor model,
 *   r = mu + sigma * (a * market + b * block + c * idiosyncratic),
 * with a^2 = rho_across, a^2 + b^2 = rho_within and unit total variance, so the
 * population correlation is rho_within inside a block and rho_across between
 * blocks. An optional shock month switches every stock onto the market factor
 * (pairwise correlation shock_rho) with volatility scaled by shock_vol_multiplier.
 */

#pragma once

#include "dynmsa/core.hpp"
#include "dynmsa/ingest.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace dynmsa {

struct SynthConfig {
    int months = 85;
    std::size_t stocks = 120;
    std::size_t blocks = 6;
    double rho_within = 0.7;
    double rho_across = 0.05;
    double daily_vol = 0.01;
    double daily_drift = 0.0003;
    double shuffle_fraction = 0.0;     ///< share of stocks given a wrong sector label
    std::optional<int> shock_month;    ///< 0-based month index of the shock
    double shock_rho = 0.9;
    double shock_vol_multiplier = 3.0;
    Date start{std::chrono::year{2017}, std::chrono::month{7}, std::chrono::day{1}};
    std::uint64_t seed = 7;
};

struct SynthPanel {
    PricePanel prices;
    SectorMap sectors;
    std::vector<std::size_t> labels;  ///< planted block per ticker
};

inline SynthPanel make_synthetic_panel(const SynthConfig& cfg) {
    if (cfg.blocks < 1 || cfg.blocks > kSectorCount) throw ContractError("synth: blocks must be in [1, 11]");
    if (cfg.stocks < cfg.blocks) throw ContractError("synth: fewer stocks than blocks");
    if (cfg.months < 1) throw ContractError("synth: months must be >= 1");
    if (!(cfg.rho_across >= 0 && cfg.rho_across <= cfg.rho_within && cfg.rho_within < 1))
        throw ContractError("synth: need 0 <= rho_across <= rho_within < 1");

    using namespace std::chrono;
    SynthPanel out;
    const int first_month = month_index(cfg.start);
    for (sys_days d = sys_days{year_month_day{cfg.start.year(), cfg.start.month(), day{1}}};; d += days{1}) {
        const Date ymd{d};
        if (month_index(ymd) >= first_month + cfg.months) break;
        const auto wd = weekday{d}.c_encoding();
        if (wd != 0 && wd != 6) out.prices.dates.push_back(ymd);
    }

    const std::size_t n = cfg.stocks;
    for (std::size_t i = 0; i < n; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "S%03zu", i);
        out.prices.tickers.emplace_back(buf);
        out.labels.push_back(i * cfg.blocks / n);
    }

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const double a = std::sqrt(cfg.rho_across);
    const double b = std::sqrt(cfg.rho_within - cfg.rho_across);
    const double c = std::sqrt(1.0 - cfg.rho_within);
    const double sa = std::sqrt(cfg.shock_rho);
    const double sc = std::sqrt(1.0 - cfg.shock_rho);

    const auto days_n = static_cast<Eigen::Index>(out.prices.dates.size());
    out.prices.close.resize(days_n, static_cast<Eigen::Index>(n));
    out.prices.close.row(0).setConstant(100.0);
    std::vector<double> block_f(cfg.blocks);
    for (Eigen::Index d = 1; d < days_n; ++d) {
        const double market = gauss(rng);
        for (auto& f : block_f) f = gauss(rng);
        const bool shocked =
            cfg.shock_month && month_index(out.prices.dates[static_cast<std::size_t>(d)]) - first_month == *cfg.shock_month;
        for (std::size_t i = 0; i < n; ++i) {
            const double eps = gauss(rng);
            const double z = shocked ? sa * market + sc * eps : a * market + b * block_f[out.labels[i]] + c * eps;
            const double vol = shocked ? cfg.daily_vol * cfg.shock_vol_multiplier : cfg.daily_vol;
            const double r = std::max(cfg.daily_drift + vol * z, -0.5);
            const auto j = static_cast<Eigen::Index>(i);
            out.prices.close(d, j) = out.prices.close(d - 1, j) * (1.0 + r);
        }
    }

    std::vector<Sector> sector_of(n);
    for (std::size_t i = 0; i < n; ++i) sector_of[i] = static_cast<Sector>(out.labels[i]);
    const auto n_shuffle = static_cast<std::size_t>(std::llround(cfg.shuffle_fraction * static_cast<double>(n)));
    if (n_shuffle > 0 && cfg.blocks > 1) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        std::shuffle(idx.begin(), idx.end(), rng);
        std::uniform_int_distribution<std::size_t> other(1, cfg.blocks - 1);
        for (std::size_t s = 0; s < n_shuffle; ++s) {
            const auto i = idx[s];
            sector_of[i] = static_cast<Sector>((out.labels[i] + other(rng)) % cfg.blocks);
        }
    }
    for (std::size_t i = 0; i < n; ++i) out.sectors.emplace(out.prices.tickers[i], sector_of[i]);
    return out;
}

/// Writes prices.csv, sectors.csv and labels.csv into `dir`.
inline void write_synthetic_panel(const SynthPanel& panel, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "prices.csv");
        f << "date,ticker,close\n";
        for (std::size_t d = 0; d < panel.prices.dates.size(); ++d) {
            const auto date = format_date(panel.prices.dates[d]);
            for (std::size_t j = 0; j < panel.prices.tickers.size(); ++j)
                f << date << ',' << panel.prices.tickers[j] << ','
                  << format_double(panel.prices.close(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(j)))
                  << '\n';
        }
    }
    {
        std::ofstream f(dir / "sectors.csv");
        f << "ticker,sector\n";
        for (const auto& [t, s] : panel.sectors) f << t << ',' << sector_name(s) << '\n';
    }
    {
        std::ofstream f(dir / "labels.csv");
        f << "ticker,block\n";
        for (std::size_t i = 0; i < panel.prices.tickers.size(); ++i)
            f << panel.prices.tickers[i] << ',' << panel.labels[i] << '\n';
    }
    if (!std::filesystem::exists(dir / "labels.csv")) throw Error("synth: failed writing to " + dir.string());
}

}  // namespace dynmsa
