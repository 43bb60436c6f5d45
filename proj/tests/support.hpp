// Shared fixtures and brute-force reference implementations for the test suite.
#pragma once

#include "dynmsa/dynmsa.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testing_support {

using dynmsa::Matrix;
using dynmsa::Partition;

/// Sample correlation of an i.i.d. N(0,1) panel with a planted block structure.
inline Matrix random_correlation(std::size_t n, std::size_t days, std::mt19937_64& rng, std::size_t blocks = 1,
                                 double loading = 0.0) {
    std::normal_distribution<double> g;
    Matrix r(static_cast<Eigen::Index>(days), static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < days; ++t) {
        std::vector<double> f(blocks);
        for (auto& x : f) x = g(rng);
        for (std::size_t j = 0; j < n; ++j)
            r(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = loading * f[j * blocks / n] + g(rng);
    }
    Matrix c(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index a = 0; a < c.rows(); ++a)
        for (Eigen::Index b = 0; b < c.cols(); ++b) {
            double ma = 0, mb = 0;
            for (Eigen::Index t = 0; t < r.rows(); ++t) {
                ma += r(t, a);
                mb += r(t, b);
            }
            ma /= static_cast<double>(days);
            mb /= static_cast<double>(days);
            double sab = 0, saa = 0, sbb = 0;
            for (Eigen::Index t = 0; t < r.rows(); ++t) {
                sab += (r(t, a) - ma) * (r(t, b) - mb);
                saa += (r(t, a) - ma) * (r(t, a) - ma);
                sbb += (r(t, b) - mb) * (r(t, b) - mb);
            }
            c(a, b) = a == b ? 1.0 : sab / std::sqrt(saa * sbb);
        }
    return c;
}

/// Symmetric matrix with uniform off-diagonals in [-1, 1] and unit diagonal.
inline Matrix random_symmetric(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        m(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < m.cols(); ++j) m(i, j) = m(j, i) = u(rng);
    }
    return m;
}

inline Partition random_partition(std::size_t n, std::size_t labels, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> u(0, labels - 1);
    std::vector<std::size_t> l(n);
    for (auto& x : l) x = u(rng);
    return Partition(l);
}

inline dynmsa::Graph random_graph(std::size_t n, double p, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(p);
    dynmsa::Graph g(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (coin(rng)) g.add_edge(i, j);
    return g;
}

// ---- brute-force oracles -------------------------------------------------

inline double oracle_intra(const std::vector<std::size_t>& labels, const Matrix& c) {
    std::size_t k = 0;
    for (auto l : labels) k = std::max(k, l + 1);
    double total = 0;
    std::size_t used = 0;
    for (std::size_t cl = 0; cl < k; ++cl) {
        double s = 0;
        std::size_t pairs = 0;
        for (std::size_t i = 0; i < labels.size(); ++i)
            for (std::size_t j = i + 1; j < labels.size(); ++j)
                if (labels[i] == cl && labels[j] == cl) {
                    s += c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                    ++pairs;
                }
        if (pairs) {
            total += s / static_cast<double>(pairs);
            ++used;
        }
    }
    return total / static_cast<double>(used);
}

inline double oracle_inter(const std::vector<std::size_t>& labels, const Matrix& c) {
    std::size_t k = 0;
    for (auto l : labels) k = std::max(k, l + 1);
    double total = 0;
    std::size_t cluster_pairs = 0;
    for (std::size_t x = 0; x < k; ++x)
        for (std::size_t y = x + 1; y < k; ++y) {
            double s = 0;
            std::size_t n = 0;
            for (std::size_t i = 0; i < labels.size(); ++i)
                for (std::size_t j = 0; j < labels.size(); ++j)
                    if (labels[i] == x && labels[j] == y) {
                        s += c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                        ++n;
                    }
            total += s / static_cast<double>(n);
            ++cluster_pairs;
        }
    return total / static_cast<double>(cluster_pairs);
}

/// ARI from the four pair counts.
inline double oracle_ari(const std::vector<std::size_t>& p, const std::vector<std::size_t>& q) {
    double a = 0, b = 0, c = 0, d = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j) {
            const bool s1 = p[i] == p[j], s2 = q[i] == q[j];
            (s1 && s2 ? a : s1 ? b : s2 ? c : d) += 1;
        }
    const double den = (a + b) * (b + d) + (a + c) * (c + d);
    return den == 0 ? 1.0 : 2.0 * (a * d - b * c) / den;
}

inline double oracle_risk(const std::vector<double>& w, const std::vector<double>& s, const Matrix& c) {
    const auto n = static_cast<Eigen::Index>(w.size());
    Matrix cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) cov(i, j) = s[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(j)] * c(i, j);
    Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(w.data(), n);
    return wv.dot(cov * wv);
}

/// Q = (1/2m) sum_ij [A_ij - k_i k_j / 2m] delta(c_i, c_j), straight from the adjacency.
inline double oracle_modularity(const dynmsa::Graph& g, const std::vector<std::size_t>& labels) {
    const std::size_t n = g.node_count();
    const double m2 = 2.0 * static_cast<double>(g.edge_count());
    std::vector<std::vector<int>> a(n, std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (auto j : g.neighbors(i)) a[i][j] = 1;
    double q = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (labels[i] == labels[j])
                q += a[i][j] - static_cast<double>(g.degree(i) * g.degree(j)) / m2;
    return q / m2;
}

/// Global modularity optimum by enumerating every set partition (restricted growth strings).
inline double exhaustive_best_modularity(const dynmsa::Graph& g) {
    const std::size_t n = g.node_count();
    std::vector<std::size_t> rgs(n, 0), maxv(n, 0);
    double best = -1.0;
    for (;;) {
        best = std::max(best, oracle_modularity(g, rgs));
        std::size_t i = n - 1;
        while (i > 0 && rgs[i] == maxv[i - 1] + 1) --i;
        if (i == 0) break;
        ++rgs[i];
        maxv[i] = std::max(maxv[i - 1], rgs[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            rgs[j] = 0;
            maxv[j] = maxv[i];
        }
    }
    return best;
}

inline bool connected_within(const dynmsa::Graph& g, const std::vector<std::size_t>& members) {
    if (members.size() <= 1) return true;
    std::vector<char> in(g.node_count(), 0), seen(g.node_count(), 0);
    for (auto v : members) in[v] = 1;
    std::vector<std::size_t> stack{members.front()};
    seen[members.front()] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto u : g.neighbors(v))
            if (in[u] && !seen[u]) {
                seen[u] = 1;
                ++reached;
                stack.push_back(u);
            }
    }
    return reached == members.size();
}

// ---- files -----------------------------------------------------------------

inline std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("dynmsa_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline std::string write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p) << text;
    return p.string();
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Silences library warnings for the lifetime of the object.
struct QuietWarnings {
    dynmsa::WarningSink previous;
    QuietWarnings() : previous(dynmsa::set_warning_sink(nullptr)) {}
    ~QuietWarnings() { dynmsa::set_warning_sink(previous); }
};

}  // namespace testing_support
