/**
 * @file community.hpp
 * @brief Threshold graphs, modularity, sector-seeded partitions and the Leiden
 *        algorithm (fast local moving, refinement, aggregation).
 */

#pragma once

#include "dynmsa/core.hpp"
#include "dynmsa/ingest.hpp"
#include "dynmsa/partition.hpp"
#include "dynmsa/rmt.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace dynmsa {

/// Undirected, unweighted simple graph. Isolated nodes are allowed.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::size_t n) : adj_(n) {}

    /// Adds edge {i, j}; the caller guarantees i != j and no duplicate.
    void add_edge(std::size_t i, std::size_t j) {
        if (i == j) throw ContractError("Graph: self-loops are not allowed");
        adj_[i].push_back(j);
        adj_[j].push_back(i);
        ++edges_;
    }

    std::size_t node_count() const { return adj_.size(); }
    std::size_t edge_count() const { return edges_; }
    std::size_t degree(std::size_t i) const { return adj_[i].size(); }
    const std::vector<std::size_t>& neighbors(std::size_t i) const { return adj_[i]; }

    std::vector<std::string> nodes;  ///< ticker per node, may be empty for anonymous graphs

private:
    std::vector<std::vector<std::size_t>> adj_;
    std::size_t edges_ = 0;
};

inline Graph build_graph(const ThresholdGraphMatrix& t, const std::vector<std::string>& tickers = {}) {
    const auto n = t.size();
    if (!tickers.empty() && tickers.size() != n) throw ContractError("build_graph: ticker count mismatch");
    Graph g(n);
    g.nodes = tickers;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (t.adjacency(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) g.add_edge(i, j);
    return g;
}

/// Q = sum_c [ L_c / m - gamma * (D_c / 2m)^2 ]; defined as 0 on an edgeless graph.
inline double modularity(const Graph& g, const Partition& p, double resolution = 1.0) {
    if (p.size() != g.node_count()) throw ContractError("modularity: partition does not cover the graph");
    const double m = static_cast<double>(g.edge_count());
    if (m == 0) {
        warn("modularity: graph has no edges, Q defined as 0");
        return 0.0;
    }
    std::vector<double> internal(p.cluster_count(), 0.0), degree(p.cluster_count(), 0.0);
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        degree[p[v]] += static_cast<double>(g.degree(v));
        for (auto u : g.neighbors(v))
            if (u > v && p[u] == p[v]) internal[p[v]] += 1.0;
    }
    double q = 0.0;
    for (std::size_t c = 0; c < p.cluster_count(); ++c) {
        const double frac = degree[c] / (2.0 * m);
        q += internal[c] / m - resolution * frac * frac;
    }
    return q;
}

/// One cluster per sector present among `tickers`.
inline Partition sector_seed(const std::vector<std::string>& tickers, const SectorMap& sectors) {
    std::vector<int> labels;
    labels.reserve(tickers.size());
    for (const auto& t : tickers) {
        auto it = sectors.find(t);
        if (it == sectors.end()) throw Error("sector_seed: ticker '" + t + "' has no sector");
        labels.push_back(static_cast<int>(it->second));
    }
    return Partition(labels);
}

// ---------------------------------------------------------------------------
// Leiden
// ---------------------------------------------------------------------------

struct LeidenOptions {
    double resolution = 1.0;
    std::uint64_t rng_seed = 0;
    double tolerance = 1e-10;  ///< stop when an outer iteration gains less than this
    int max_iterations = 50;
};

struct LeidenResult {
    Partition partition;
    /// Modularity of the seed, then after every accepted outer iteration.
    std::vector<double> quality;
    int iterations = 0;
};

namespace detail {

struct WeightedGraph {
    std::vector<std::vector<std::pair<std::size_t, double>>> adj;  ///< distinct neighbours only
    std::vector<double> strength;                                  ///< degree in the original graph
    double two_m = 0.0;

    std::size_t size() const { return adj.size(); }
};

inline WeightedGraph to_weighted(const Graph& g) {
    WeightedGraph w;
    w.adj.resize(g.node_count());
    w.strength.resize(g.node_count());
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        for (auto u : g.neighbors(v)) w.adj[v].emplace_back(u, 1.0);
        w.strength[v] = static_cast<double>(g.degree(v));
    }
    w.two_m = 2.0 * static_cast<double>(g.edge_count());
    return w;
}

/// Relabels in place to 0..c-1 by first appearance; returns c.
inline std::size_t renumber(std::vector<std::size_t>& labels) {
    std::vector<std::size_t> map(labels.size() + 1, static_cast<std::size_t>(-1));
    std::size_t next = 0;
    for (auto& l : labels) {
        if (map[l] == static_cast<std::size_t>(-1)) map[l] = next++;
        l = map[l];
    }
    return next;
}

class LeidenPass {
public:
    LeidenPass(double resolution, std::mt19937_64& rng) : gamma_(resolution), rng_(rng) {}

    /// Fast local moving with a revisit queue. `comm` holds ids in [0, n).
    void move_nodes(const WeightedGraph& g, std::vector<std::size_t>& comm) {
        const std::size_t n = g.size();
        std::vector<double> total(n, 0.0);
        std::vector<std::size_t> count(n, 0);
        for (std::size_t v = 0; v < n; ++v) {
            total[comm[v]] += g.strength[v];
            ++count[comm[v]];
        }
        std::vector<std::size_t> empty;
        for (std::size_t c = n; c-- > 0;)
            if (count[c] == 0) empty.push_back(c);

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng_);
        std::deque<std::size_t> queue(order.begin(), order.end());
        std::vector<char> queued(n, 1);

        std::vector<double> link(n, 0.0);
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> touched;

        while (!queue.empty()) {
            const std::size_t v = queue.front();
            queue.pop_front();
            queued[v] = 0;
            const std::size_t cur = comm[v];
            const double kv = g.strength[v];

            touched.clear();
            for (const auto& [u, w] : g.adj[v]) {
                const auto c = comm[u];
                if (!seen[c]) {
                    seen[c] = 1;
                    touched.push_back(c);
                }
                link[c] += w;
            }

            total[cur] -= kv;
            --count[cur];
            std::size_t best = cur;
            double best_gain = link[cur] - gamma_ * kv * total[cur] / g.two_m;
            for (auto c : touched) {
                if (c == cur) continue;
                const double gain = link[c] - gamma_ * kv * total[c] / g.two_m;
                if (gain > best_gain + kEps) {
                    best = c;
                    best_gain = gain;
                }
            }
            if (count[cur] > 0 && 0.0 > best_gain + kEps) {
                best = empty.back();
                empty.pop_back();
            }
            total[best] += kv;
            ++count[best];

            if (best != cur) {
                if (count[cur] == 0) empty.push_back(cur);
                comm[v] = best;
                for (const auto& [u, w] : g.adj[v])
                    if (comm[u] != best && !queued[u]) {
                        queue.push_back(u);
                        queued[u] = 1;
                    }
            }
            for (auto c : touched) {
                link[c] = 0.0;
                seen[c] = 0;
            }
        }
    }

    /// Refines each community into well-connected sub-communities; merges are
    /// drawn uniformly among strictly improving, well-connected targets.
    std::vector<std::size_t> refine(const WeightedGraph& g, const std::vector<std::size_t>& comm,
                                    std::size_t comm_count) {
        const std::size_t n = g.size();
        std::vector<std::size_t> ref(n);
        std::iota(ref.begin(), ref.end(), std::size_t{0});
        std::vector<double> total(g.strength);
        std::vector<std::size_t> count(n, 1);
        std::vector<double> external(n, 0.0);

        std::vector<std::vector<std::size_t>> members(comm_count);
        for (std::size_t v = 0; v < n; ++v) members[comm[v]].push_back(v);

        std::vector<double> link(n, 0.0);
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> touched, candidates;

        for (const auto& S : members) {
            double total_s = 0.0;
            for (auto v : S) total_s += g.strength[v];

            std::vector<std::size_t> well_connected;
            for (auto v : S) {
                double w_in = 0.0;
                for (const auto& [u, w] : g.adj[v])
                    if (comm[u] == comm[v]) w_in += w;
                external[v] = w_in;
                if (w_in >= gamma_ * g.strength[v] * (total_s - g.strength[v]) / g.two_m) well_connected.push_back(v);
            }
            std::shuffle(well_connected.begin(), well_connected.end(), rng_);

            for (auto v : well_connected) {
                const std::size_t own = ref[v];
                if (count[own] != 1) continue;
                const double kv = g.strength[v];

                touched.clear();
                for (const auto& [u, w] : g.adj[v]) {
                    if (comm[u] != comm[v]) continue;
                    const auto r = ref[u];
                    if (r == own) continue;
                    if (!seen[r]) {
                        seen[r] = 1;
                        touched.push_back(r);
                    }
                    link[r] += w;
                }
                candidates.clear();
                for (auto r : touched) {
                    const bool connected = external[r] >= gamma_ * total[r] * (total_s - total[r]) / g.two_m;
                    const double gain = link[r] - gamma_ * kv * total[r] / g.two_m;
                    if (connected && gain > kEps) candidates.push_back(r);
                }
                if (!candidates.empty()) {
                    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
                    const auto target = candidates[pick(rng_)];
                    external[target] += external[own] - 2.0 * link[target];
                    total[target] += kv;
                    ++count[target];
                    total[own] = 0.0;
                    count[own] = 0;
                    external[own] = 0.0;
                    ref[v] = target;
                }
                for (auto r : touched) {
                    link[r] = 0.0;
                    seen[r] = 0;
                }
            }
        }
        return ref;
    }

    static WeightedGraph aggregate(const WeightedGraph& g, const std::vector<std::size_t>& ref, std::size_t count) {
        WeightedGraph out;
        out.two_m = g.two_m;
        out.adj.resize(count);
        out.strength.assign(count, 0.0);
        std::vector<std::vector<std::size_t>> members(count);
        for (std::size_t v = 0; v < g.size(); ++v) {
            members[ref[v]].push_back(v);
            out.strength[ref[v]] += g.strength[v];
        }
        std::vector<double> link(count, 0.0);
        std::vector<char> seen(count, 0);
        std::vector<std::size_t> touched;
        for (std::size_t a = 0; a < count; ++a) {
            touched.clear();
            for (auto v : members[a])
                for (const auto& [u, w] : g.adj[v]) {
                    const auto b = ref[u];
                    if (b == a) continue;
                    if (!seen[b]) {
                        seen[b] = 1;
                        touched.push_back(b);
                    }
                    link[b] += w;
                }
            std::sort(touched.begin(), touched.end());
            for (auto b : touched) {
                out.adj[a].emplace_back(b, link[b]);
                link[b] = 0.0;
                seen[b] = 0;
            }
        }
        return out;
    }

private:
    static constexpr double kEps = 1e-12;
    double gamma_;
    std::mt19937_64& rng_;
};

/// One Leiden run: move, refine, aggregate until the aggregate stops shrinking.
inline std::vector<std::size_t> leiden_run(const WeightedGraph& base, std::vector<std::size_t> labels,
                                           LeidenPass& pass) {
    WeightedGraph g = base;
    std::vector<std::size_t> node_of(base.size());
    std::iota(node_of.begin(), node_of.end(), std::size_t{0});
    std::vector<std::size_t> comm = std::move(labels);
    renumber(comm);

    for (;;) {
        pass.move_nodes(g, comm);
        const auto comm_count = renumber(comm);
        if (comm_count == g.size()) break;

        auto ref = pass.refine(g, comm, comm_count);
        const auto ref_count = renumber(ref);
        if (ref_count == g.size()) break;

        WeightedGraph next = LeidenPass::aggregate(g, ref, ref_count);
        std::vector<std::size_t> next_comm(ref_count);
        for (std::size_t v = 0; v < g.size(); ++v) next_comm[ref[v]] = comm[v];
        for (auto& x : node_of) x = ref[x];
        g = std::move(next);
        comm = std::move(next_comm);
    }

    std::vector<std::size_t> flat(base.size());
    for (std::size_t v = 0; v < base.size(); ++v) flat[v] = comm[node_of[v]];
    return flat;
}

/// Splits communities into connected components. Degree-zero nodes keep the
/// label of their community's first component.
inline std::vector<std::size_t> split_disconnected(const Graph& g, const std::vector<std::size_t>& labels) {
    const std::size_t n = g.node_count();
    std::vector<std::size_t> out(n, static_cast<std::size_t>(-1));
    std::size_t next = *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<char> claimed(next, 0);
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < n; ++s) {
        if (out[s] != static_cast<std::size_t>(-1) || g.degree(s) == 0) continue;
        const auto own = labels[s];
        const auto label = claimed[own] ? next++ : own;
        claimed[own] = 1;
        out[s] = label;
        stack.assign(1, s);
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            for (auto u : g.neighbors(v))
                if (labels[u] == own && out[u] == static_cast<std::size_t>(-1)) {
                    out[u] = label;
                    stack.push_back(u);
                }
        }
    }
    for (std::size_t v = 0; v < n; ++v)
        if (out[v] == static_cast<std::size_t>(-1)) out[v] = labels[v];
    return out;
}

}  // namespace detail

/**
 * Leiden modularity optimisation starting from `seed`.
 *
 * Outer iterations repeat full Leiden runs (with communities split into
 * connected components afterwards) until modularity improves by less than
 * `tolerance`. The returned partition never has lower modularity than the seed.
 */
inline LeidenResult leiden_trace(const Graph& g, const Partition& seed, const LeidenOptions& opts = {}) {
    if (seed.size() != g.node_count()) throw ContractError("leiden: seed partition does not cover the graph");
    LeidenResult res;
    res.partition = seed;
    if (g.edge_count() == 0 || g.node_count() == 0) {
        res.quality.push_back(0.0);
        return res;
    }

    std::mt19937_64 rng(opts.rng_seed);
    detail::LeidenPass pass(opts.resolution, rng);
    const auto base = detail::to_weighted(g);

    double best = modularity(g, seed, opts.resolution);
    res.quality.push_back(best);
    std::vector<std::size_t> labels = seed.labels();

    for (int it = 0; it < opts.max_iterations; ++it) {
        auto next = detail::split_disconnected(g, detail::leiden_run(base, labels, pass));
        Partition candidate(next);
        const double q = modularity(g, candidate, opts.resolution);
        res.iterations = it + 1;
        if (q < best) break;
        res.quality.push_back(q);
        const double gain = q - best;
        best = q;
        labels = candidate.labels();
        res.partition = std::move(candidate);
        if (gain < opts.tolerance) break;
    }
    return res;
}

inline Partition leiden(const Graph& g, const Partition& seed, double resolution = 1.0, std::uint64_t rng_seed = 0) {
    LeidenOptions opts;
    opts.resolution = resolution;
    opts.rng_seed = rng_seed;
    return leiden_trace(g, seed, opts).partition;
}

}  // namespace dynmsa
