/**
 * @file metrics.hpp
 * @brief Cluster quality (intra/inter correlation, objective), adjusted Rand
 *        index, co-clustering frequencies, cross-sector statistics and paired
 *        t-tests.
 */

#pragma once

#include "dynmsa/core.hpp"
#include "dynmsa/ingest.hpp"
#include "dynmsa/partition.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace dynmsa {

// ---------------------------------------------------------------------------
// Intra / inter correlation
// ---------------------------------------------------------------------------

/**
 * Mean over clusters of the mean correlation across each cluster's unique
 * off-diagonal pairs. Singleton clusters have no pairs and are skipped.
 */
inline double intra_corr(const Partition& p, const Matrix& corr) {
    if (p.size() != static_cast<std::size_t>(corr.rows())) throw ContractError("intra_corr: size mismatch");
    double sum = 0.0;
    std::size_t used = 0;
    for (const auto& c : p.clusters()) {
        if (c.size() < 2) continue;
        double s = 0.0;
        for (std::size_t a = 0; a < c.size(); ++a)
            for (std::size_t b = a + 1; b < c.size(); ++b)
                s += corr(static_cast<Eigen::Index>(c[a]), static_cast<Eigen::Index>(c[b]));
        sum += s / (0.5 * static_cast<double>(c.size()) * static_cast<double>(c.size() - 1));
        ++used;
    }
    if (used == 0) throw Error("intra_corr: every cluster is a singleton");
    return sum / static_cast<double>(used);
}

/// Mean over unique cluster pairs of the mean cross-pair correlation.
inline double inter_corr(const Partition& p, const Matrix& corr) {
    if (p.size() != static_cast<std::size_t>(corr.rows())) throw ContractError("inter_corr: size mismatch");
    if (p.cluster_count() < 2) throw Error("inter_corr: needs at least two clusters");
    const auto clusters = p.clusters();
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t x = 0; x < clusters.size(); ++x)
        for (std::size_t y = x + 1; y < clusters.size(); ++y) {
            double s = 0.0;
            for (auto a : clusters[x])
                for (auto b : clusters[y]) s += corr(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            sum += s / (static_cast<double>(clusters[x].size()) * static_cast<double>(clusters[y].size()));
            ++pairs;
        }
    return sum / static_cast<double>(pairs);
}

inline double intra_corr(const Partition& p, const CorrelationMatrix& c) { return intra_corr(p, c.values); }
inline double inter_corr(const Partition& p, const CorrelationMatrix& c) { return inter_corr(p, c.values); }

/// rho_intra - rho_inter, or nullopt when either term is undefined.
inline std::optional<double> objective(const Partition& p, const Matrix& corr) {
    if (p.cluster_count() < 2 || p.cluster_count() == p.size()) return std::nullopt;
    return intra_corr(p, corr) - inter_corr(p, corr);
}

struct ClusterQuality {
    std::optional<double> rho_intra;
    std::optional<double> rho_inter;
    std::optional<double> objective;  ///< rho_intra - rho_inter when both are defined
    double modularity = 0.0;
    std::size_t n_clusters = 0;
};

inline ClusterQuality cluster_quality(const Partition& p, const Matrix& corr, double modularity_value) {
    ClusterQuality q;
    q.n_clusters = p.cluster_count();
    q.modularity = modularity_value;
    if (p.cluster_count() < p.size()) q.rho_intra = intra_corr(p, corr);
    if (p.cluster_count() >= 2) q.rho_inter = inter_corr(p, corr);
    if (q.rho_intra && q.rho_inter) q.objective = *q.rho_intra - *q.rho_inter;
    return q;
}

// ---------------------------------------------------------------------------
// Adjusted Rand index
// ---------------------------------------------------------------------------

/// Pair counts: a = together in both, b = together only in the first,
/// c = together only in the second, d = apart in both.
struct PairCounts {
    double a = 0, b = 0, c = 0, d = 0;
};

inline PairCounts pair_counts(const Partition& p1, const Partition& p2) {
    if (p1.size() != p2.size()) throw ContractError("pair_counts: partitions differ in size");
    PairCounts pc;
    for (std::size_t i = 0; i < p1.size(); ++i)
        for (std::size_t j = i + 1; j < p1.size(); ++j) {
            const bool s1 = p1[i] == p1[j], s2 = p2[i] == p2[j];
            if (s1 && s2) pc.a += 1;
            else if (s1) pc.b += 1;
            else if (s2) pc.c += 1;
            else pc.d += 1;
        }
    return pc;
}

inline double rand_index(const Partition& p1, const Partition& p2) {
    const auto pc = pair_counts(p1, p2);
    return (pc.a + pc.d) / (pc.a + pc.b + pc.c + pc.d);
}

/**
 * Adjusted Rand index from the contingency table. When both partitions are
 * trivial in the same way (the chance-corrected ratio is 0/0) the result is 1.
 */
inline double ari(const Partition& p1, const Partition& p2) {
    if (p1.size() != p2.size()) throw ContractError("ari: partitions differ in size");
    if (p1.size() < 2) throw Error("ari: needs at least two common elements");
    auto comb2 = [](double x) { return 0.5 * x * (x - 1.0); };
    std::map<std::pair<std::size_t, std::size_t>, double> table;
    for (std::size_t i = 0; i < p1.size(); ++i) table[{p1[i], p2[i]}] += 1.0;
    double sum_ij = 0.0;
    for (const auto& [_, n] : table) sum_ij += comb2(n);
    double sum_a = 0.0, sum_b = 0.0;
    for (auto s : p1.cluster_sizes()) sum_a += comb2(static_cast<double>(s));
    for (auto s : p2.cluster_sizes()) sum_b += comb2(static_cast<double>(s));
    const double total = comb2(static_cast<double>(p1.size()));
    const double expected = sum_a * sum_b / total;
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;
    return (sum_ij - expected) / (max_index - expected);
}

/// ARI over the tickers common to both clusterings.
inline double ari(const Clustering& c1, const Clustering& c2) {
    std::unordered_map<std::string, std::size_t> pos2;
    for (std::size_t i = 0; i < c2.tickers.size(); ++i) pos2.emplace(c2.tickers[i], i);
    std::vector<std::size_t> l1, l2;
    for (std::size_t i = 0; i < c1.tickers.size(); ++i)
        if (auto it = pos2.find(c1.tickers[i]); it != pos2.end()) {
            l1.push_back(c1.partition[i]);
            l2.push_back(c2.partition[it->second]);
        }
    return ari(Partition(l1), Partition(l2));
}

/// Standard scores against the series' own mean and sample standard deviation.
inline std::vector<double> z_scores(std::span<const double> xs) {
    std::vector<double> out(xs.size(), 0.0);
    if (xs.size() < 2) return out;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(xs.size() - 1));
    if (sd == 0.0) return out;
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (xs[i] - mean) / sd;
    return out;
}

// ---------------------------------------------------------------------------
// Co-clustering
// ---------------------------------------------------------------------------

struct CoClusterMatrix {
    std::vector<std::string> tickers;  ///< sorted
    Matrix probability;                ///< together / co-present; 0 where never co-present
    Eigen::MatrixXi copresent;         ///< windows in which both stocks appear
    std::size_t window_count = 0;

    bool present(std::size_t i, std::size_t j) const {
        return copresent(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0;
    }
};

inline CoClusterMatrix cocluster(std::span<const Clustering> windows) {
    if (windows.empty()) throw ContractError("cocluster: needs at least one partition");
    CoClusterMatrix out;
    out.window_count = windows.size();
    std::map<std::string, std::size_t> index;
    for (const auto& w : windows)
        for (const auto& t : w.tickers) index.emplace(t, 0);
    for (auto& [t, i] : index) {
        i = out.tickers.size();
        out.tickers.push_back(t);
    }
    const auto n = static_cast<Eigen::Index>(out.tickers.size());
    Eigen::MatrixXi together = Eigen::MatrixXi::Zero(n, n);
    out.copresent = Eigen::MatrixXi::Zero(n, n);
    for (const auto& w : windows) {
        std::vector<Eigen::Index> pos;
        for (const auto& t : w.tickers) pos.push_back(static_cast<Eigen::Index>(index.at(t)));
        for (std::size_t a = 0; a < pos.size(); ++a)
            for (std::size_t b = 0; b < pos.size(); ++b) {
                out.copresent(pos[a], pos[b]) += 1;
                if (w.partition[a] == w.partition[b]) together(pos[a], pos[b]) += 1;
            }
    }
    out.probability = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (out.copresent(i, j) > 0)
                out.probability(i, j) = static_cast<double>(together(i, j)) / static_cast<double>(out.copresent(i, j));
    return out;
}

// ---------------------------------------------------------------------------
// Cross-sector co-clustering
// ---------------------------------------------------------------------------

struct CrossSectorEntry {
    std::string ticker;
    Sector sector{};
    double s_cross = 0.0;
    double s_same = 0.0;
    double s_total = 0.0;
    double s_most = 0.0;
    std::optional<double> p_cross;  ///< undefined when s_total == 0
    std::optional<double> p_most;
    std::optional<Sector> most_connected_sector;
};

using CrossSectorReport = std::vector<CrossSectorEntry>;

/// Per-stock co-clustering strength with its own sector, with other sectors,
/// and with the single most-connected other sector.
inline CrossSectorReport cross_sector(const CoClusterMatrix& P, const SectorMap& sectors) {
    const std::size_t n = P.tickers.size();
    std::vector<Sector> sec(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto it = sectors.find(P.tickers[i]);
        if (it == sectors.end()) throw Error("cross_sector: ticker '" + P.tickers[i] + "' has no sector");
        sec[i] = it->second;
    }
    CrossSectorReport report(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& e = report[i];
        e.ticker = P.tickers[i];
        e.sector = sec[i];
        std::array<double, kSectorCount> by_sector{};
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || !P.present(i, j)) continue;
            const double pij = P.probability(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (sec[j] == sec[i])
                e.s_same += pij;
            else {
                e.s_cross += pij;
                by_sector[static_cast<std::size_t>(sec[j])] += pij;
            }
        }
        e.s_total = e.s_cross + e.s_same;
        for (std::size_t s = 0; s < kSectorCount; ++s) {
            if (static_cast<Sector>(s) == sec[i]) continue;
            if (by_sector[s] > e.s_most) {
                e.s_most = by_sector[s];
                e.most_connected_sector = static_cast<Sector>(s);
            }
        }
        if (e.s_total > 0.0) {
            e.p_cross = e.s_cross / e.s_total;
            e.p_most = e.s_most / e.s_total;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Paired t-test
// ---------------------------------------------------------------------------

struct TTestResult {
    double mean_difference = 0.0;
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

/// Two-sided paired t-test on after - before.
inline TTestResult paired_t_test(std::span<const double> before, std::span<const double> after) {
    if (before.size() != after.size()) throw ContractError("paired_t_test: size mismatch");
    TTestResult r;
    r.n = before.size();
    if (r.n < 2) return r;
    std::vector<double> d(r.n);
    for (std::size_t i = 0; i < r.n; ++i) d[i] = after[i] - before[i];
    double mean = 0.0;
    for (double x : d) mean += x;
    mean /= static_cast<double>(r.n);
    double var = 0.0;
    for (double x : d) var += (x - mean) * (x - mean);
    var /= static_cast<double>(r.n - 1);
    r.mean_difference = mean;
    if (var == 0.0) {
        r.statistic = mean == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), mean);
        r.p_value = mean == 0.0 ? 1.0 : 0.0;
        return r;
    }
    r.statistic = mean / std::sqrt(var / static_cast<double>(r.n));
    boost::math::students_t dist(static_cast<double>(r.n - 1));
    r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.statistic)));
    return r;
}

}  // namespace dynmsa
