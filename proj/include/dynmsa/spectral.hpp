/**
 * @file spectral.hpp
 * @brief Spectral regrouping of small communities.
 *
 * Small communities become units. Units are compared by the mean correlation
 * over all their cross pairs (UPGMA linkage), embedded with the symmetric
 * normalised Laplacian of that similarity, and grouped by k-means for each k in
 * the allowed range. The best regrouping is kept only if it strictly raises
 * rho_intra - rho_inter over the whole stock-level partition.
 */

#pragma once

#include "dynmsa/core.hpp"
#include "dynmsa/ingest.hpp"
#include "dynmsa/metrics.hpp"
#include "dynmsa/numerics.hpp"
#include "dynmsa/partition.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace dynmsa {

struct SimilarityMatrix {
    std::vector<std::vector<std::size_t>> units;  ///< stock indices of each unit
    Matrix values;

    std::size_t size() const { return units.size(); }
};

/// S_ij = mean correlation over a in unit i, b in unit j. The diagonal is the
/// mean over the unit's own distinct pairs (1 for a singleton unit).
inline SimilarityMatrix similarity(const std::vector<std::vector<std::size_t>>& units, const Matrix& corr) {
    SimilarityMatrix s;
    s.units = units;
    const auto n = static_cast<Eigen::Index>(units.size());
    s.values.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& ui = units[static_cast<std::size_t>(i)];
        if (ui.empty()) throw ContractError("similarity: empty unit");
        if (ui.size() == 1) {
            s.values(i, i) = 1.0;
        } else {
            double sum = 0.0;
            for (std::size_t a = 0; a < ui.size(); ++a)
                for (std::size_t b = a + 1; b < ui.size(); ++b)
                    sum += corr(static_cast<Eigen::Index>(ui[a]), static_cast<Eigen::Index>(ui[b]));
            s.values(i, i) = sum / (0.5 * static_cast<double>(ui.size() * (ui.size() - 1)));
        }
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const auto& uj = units[static_cast<std::size_t>(j)];
            double sum = 0.0;
            for (auto a : ui)
                for (auto b : uj) sum += corr(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            s.values(i, j) = s.values(j, i) = sum / static_cast<double>(ui.size() * uj.size());
        }
    }
    return s;
}

inline SimilarityMatrix similarity(const std::vector<std::vector<std::size_t>>& units, const CorrelationMatrix& c) {
    return similarity(units, c.values);
}

/**
 * Groups units into exactly k groups.
 *
 * Affinities are the similarities shifted by their minimum (so all weights are
 * nonnegative) with a zero diagonal. Rows of the k eigenvectors of
 * L = I - D^{-1/2} W D^{-1/2} with the smallest eigenvalues are normalised to
 * unit length and clustered with k-means.
 */
inline Partition spectral_cluster(const SimilarityMatrix& s, std::size_t k, std::uint64_t seed) {
    const std::size_t n = s.size();
    if (k < 1 || k > n) throw ContractError("spectral_cluster: k = " + std::to_string(k) + " outside [1, " +
                                            std::to_string(n) + "]");
    if (k == 1) return Partition::whole(n);

    const auto N = static_cast<Eigen::Index>(n);
    Matrix w = s.values.array() - s.values.minCoeff();
    w.diagonal().setZero();
    Vector inv_sqrt_deg(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        const double d = w.row(i).sum();
        inv_sqrt_deg(i) = d > 0 ? 1.0 / std::sqrt(d) : 0.0;
    }
    Matrix lap = Matrix::Identity(N, N) - inv_sqrt_deg.asDiagonal() * w * inv_sqrt_deg.asDiagonal();
    lap = 0.5 * (lap + lap.transpose());

    const auto eig = eig_sym(lap);
    const auto K = static_cast<Eigen::Index>(k);
    Matrix embed(N, K);
    for (Eigen::Index c = 0; c < K; ++c) embed.col(c) = eig.vectors.col(N - 1 - c);
    for (Eigen::Index i = 0; i < N; ++i) {
        const double norm = embed.row(i).norm();
        if (norm > 0) embed.row(i) /= norm;
    }
    return Partition(kmeans(embed, k, seed).labels);
}

/// Cluster-count search range: from min(5, units) to 10 when there are more
/// than ten small communities, else to their count.
inline std::pair<std::size_t, std::size_t> k_range(std::size_t unit_count, std::size_t small_count) {
    const std::size_t lo = std::min<std::size_t>(5, unit_count);
    const std::size_t hi = small_count > 10 ? 10 : small_count;
    return {lo, std::min(std::max(hi, lo), unit_count)};
}

/// Stock-level partition: each fixed cluster kept whole, units merged per `groups`.
inline Partition compose_partition(std::size_t n_stocks, const std::vector<std::vector<std::size_t>>& fixed,
                                   const std::vector<std::vector<std::size_t>>& units, const Partition& groups) {
    std::vector<std::size_t> labels(n_stocks, static_cast<std::size_t>(-1));
    for (std::size_t c = 0; c < fixed.size(); ++c)
        for (auto v : fixed[c]) labels[v] = c;
    for (std::size_t u = 0; u < units.size(); ++u)
        for (auto v : units[u]) labels[v] = fixed.size() + groups[u];
    for (auto l : labels)
        if (l == static_cast<std::size_t>(-1)) throw ContractError("compose_partition: stock not covered");
    return Partition(labels);
}

namespace detail {
inline double objective_or_lowest(const Partition& p, const Matrix& corr) {
    return objective(p, corr).value_or(-std::numeric_limits<double>::infinity());
}
}  // namespace detail

struct KSearchResult {
    Partition groups;  ///< grouping of units
    std::size_t k = 0;
    double delta = -std::numeric_limits<double>::infinity();
};

/// Tries every k in k_range and keeps the grouping with the largest
/// stock-level rho_intra - rho_inter (smallest k on ties).
inline KSearchResult search_k(const SimilarityMatrix& s, std::size_t small_count, const Matrix& corr,
                              const std::vector<std::vector<std::size_t>>& fixed, std::uint64_t seed) {
    if (s.size() < 2) throw ContractError("search_k: needs at least two units");
    const auto [lo, hi] = k_range(s.size(), small_count);
    KSearchResult best;
    for (std::size_t k = lo; k <= hi; ++k) {
        Partition groups = spectral_cluster(s, k, seed);
        const double delta =
            detail::objective_or_lowest(compose_partition(static_cast<std::size_t>(corr.rows()), fixed, s.units, groups), corr);
        if (best.k == 0 || delta > best.delta) {
            best.groups = std::move(groups);
            best.k = k;
            best.delta = delta;
        }
    }
    return best;
}

enum class Provenance { Leiden, Spectral };

inline std::string_view provenance_name(Provenance p) { return p == Provenance::Leiden ? "leiden" : "spectral"; }

struct RefinementOutcome {
    Partition final;
    std::optional<double> delta_spectral;
    std::optional<double> delta_leiden;
    Provenance chosen = Provenance::Leiden;
    std::optional<std::size_t> k_chosen;
};

/**
 * Regroups communities of size <= small_n and keeps the result only if its
 * objective strictly exceeds the Leiden partition's. Larger communities pass
 * through untouched.
 */
inline RefinementOutcome refine(const Partition& leiden_partition, const Matrix& corr, std::size_t small_n,
                                std::uint64_t seed) {
    if (leiden_partition.size() != static_cast<std::size_t>(corr.rows()))
        throw ContractError("refine: partition does not match correlation matrix");
    RefinementOutcome out;
    out.final = leiden_partition;
    out.delta_leiden = objective(leiden_partition, corr);

    std::vector<std::vector<std::size_t>> fixed, units;
    for (auto& c : leiden_partition.clusters()) (c.size() <= small_n ? units : fixed).push_back(std::move(c));
    if (units.size() < 2) return out;

    const auto sim = similarity(units, corr);
    const auto found = search_k(sim, units.size(), corr, fixed, seed);
    if (!std::isfinite(found.delta)) return out;
    out.delta_spectral = found.delta;
    out.k_chosen = found.k;

    const double leiden_delta = out.delta_leiden.value_or(-std::numeric_limits<double>::infinity());
    if (found.delta > leiden_delta) {
        out.final = compose_partition(leiden_partition.size(), fixed, units, found.groups);
        out.chosen = Provenance::Spectral;
    }
    return out;
}

inline RefinementOutcome refine(const Partition& p, const CorrelationMatrix& c, std::size_t small_n,
                                std::uint64_t seed) {
    return refine(p, c.values, small_n, seed);
}

}  // namespace dynmsa
