/**
 * @file partition.hpp
 * @brief Node-to-cluster assignment with contiguous, canonical cluster ids.
 */

#pragma once

#include "dynmsa/core.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>
#include <vector>

namespace dynmsa {

/**
 * Assignment of nodes 0..n-1 to clusters 0..c-1.
 *
 * Ids are renumbered in order of first appearance, so two partitions that group
 * nodes identically compare equal regardless of the labels they were built from.
 */
class Partition {
public:
    Partition() = default;

    template <class Label>
    explicit Partition(const std::vector<Label>& raw) {
        std::unordered_map<Label, std::size_t> remap;
        labels_.reserve(raw.size());
        for (const auto& l : raw) {
            auto [it, inserted] = remap.try_emplace(l, remap.size());
            labels_.push_back(it->second);
        }
        count_ = remap.size();
    }

    static Partition singletons(std::size_t n) {
        std::vector<std::size_t> l(n);
        for (std::size_t i = 0; i < n; ++i) l[i] = i;
        return Partition(l);
    }

    static Partition whole(std::size_t n) { return Partition(std::vector<std::size_t>(n, 0)); }

    static Partition from_clusters(std::size_t n, const std::vector<std::vector<std::size_t>>& clusters) {
        std::vector<std::size_t> l(n, static_cast<std::size_t>(-1));
        for (std::size_t c = 0; c < clusters.size(); ++c)
            for (auto v : clusters[c]) {
                if (v >= n || l[v] != static_cast<std::size_t>(-1))
                    throw ContractError("from_clusters: node " + std::to_string(v) + " out of range or repeated");
                l[v] = c;
            }
        for (std::size_t v = 0; v < n; ++v)
            if (l[v] == static_cast<std::size_t>(-1))
                throw ContractError("from_clusters: node " + std::to_string(v) + " unassigned");
        return Partition(l);
    }

    std::size_t size() const { return labels_.size(); }
    std::size_t cluster_count() const { return count_; }
    std::size_t operator[](std::size_t node) const { return labels_[node]; }
    const std::vector<std::size_t>& labels() const { return labels_; }

    /// Members of each cluster, ascending, indexed by cluster id.
    std::vector<std::vector<std::size_t>> clusters() const {
        std::vector<std::vector<std::size_t>> out(count_);
        for (std::size_t v = 0; v < labels_.size(); ++v) out[labels_[v]].push_back(v);
        return out;
    }

    std::vector<std::size_t> cluster_sizes() const {
        std::vector<std::size_t> out(count_, 0);
        for (auto l : labels_) ++out[l];
        return out;
    }

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    std::vector<std::size_t> labels_;
    std::size_t count_ = 0;
};

/// A partition of a named set of stocks.
struct Clustering {
    std::vector<std::string> tickers;
    Partition partition;
};

}  // namespace dynmsa
