/**
 * @file numerics.hpp
 * @brief Dense symmetric eigendecomposition (cyclic Jacobi) and seeded k-means.
 */

#pragma once

#include "dynmsa/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace dynmsa {

/// Eigenvalues sorted descending; column i of `vectors` pairs with `values[i]`.
struct EigenDecomposition {
    Vector values;
    Matrix vectors;
    int sweeps = 0;
};

/**
 * Symmetric eigendecomposition by cyclic Jacobi rotations.
 *
 * Sweeps over all (p, q) pairs until the off-diagonal Frobenius norm drops below
 * 1e-12 * ||A||_F, or 100 sweeps. Each eigenvector's largest-magnitude entry is
 * made positive so the output is canonical.
 */
inline EigenDecomposition eig_sym(const Matrix& input) {
    if (input.rows() != input.cols()) throw ContractError("eig_sym: matrix is not square");
    const Eigen::Index n = input.rows();
    const double scale = std::max(1.0, input.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (std::abs(input(i, j) - input(j, i)) > 1e-12 * scale)
                throw ContractError("eig_sym: matrix is not symmetric");

    Matrix a = (input + input.transpose()) * 0.5;
    Matrix v = Matrix::Identity(n, n);
    const double total = a.norm();
    const double tol = 1e-12 * total;

    auto off_norm = [&] {
        double s = 0;
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i)
                if (i != j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    EigenDecomposition out;
    for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
        out.sweeps = sweep + 1;
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (Eigen::Index r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    a(r, p) = a(p, r) = c * arp - s * arq;
                    a(r, q) = a(q, r) = s * arp + c * arq;
                }
                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = a(q, p) = 0.0;

                for (Eigen::Index r = 0; r < n; ++r) {
                    const double vrp = v(r, p);
                    const double vrq = v(r, q);
                    v(r, p) = c * vrp - s * vrq;
                    v(r, q) = s * vrp + c * vrq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return a(x, x) > a(y, y); });

    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto src = order[static_cast<std::size_t>(i)];
        out.values(i) = a(src, src);
        Vector col = v.col(src);
        Eigen::Index arg = 0;
        col.cwiseAbs().maxCoeff(&arg);
        if (col(arg) < 0) col = -col;
        out.vectors.col(i) = col;
    }
    return out;
}

// ---------------------------------------------------------------------------
// k-means
// ---------------------------------------------------------------------------

struct KMeansOptions {
    int restarts = 10;
    int max_iterations = 300;
};

struct KMeansResult {
    std::vector<std::size_t> labels;
    double inertia = 0.0;
    /// Inertia of the winning restart: seeding assignment first, then after each update.
    std::vector<double> history;
};

namespace detail {

inline double sq_dist(const Matrix& pts, Eigen::Index i, const Matrix& centers, Eigen::Index c) {
    return (pts.row(i) - centers.row(c)).squaredNorm();
}

inline Matrix kmeanspp_seed(const Matrix& pts, std::size_t k, std::mt19937_64& rng) {
    const auto n = pts.rows();
    Matrix centers(static_cast<Eigen::Index>(k), pts.cols());
    std::vector<bool> chosen(static_cast<std::size_t>(n), false);
    std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
    Eigen::Index idx = first(rng);
    centers.row(0) = pts.row(idx);
    chosen[static_cast<std::size_t>(idx)] = true;

    std::vector<double> d2(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = sq_dist(pts, i, centers, 0);

    for (std::size_t c = 1; c < k; ++c) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        if (total > 0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double r = u(rng);
            idx = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                r -= d2[static_cast<std::size_t>(i)];
                if (r < 0 && d2[static_cast<std::size_t>(i)] > 0) {
                    idx = i;
                    break;
                }
            }
            while (d2[static_cast<std::size_t>(idx)] == 0 && idx > 0) --idx;
        } else {
            // Every point coincides with a center: take the lowest unused index.
            idx = 0;
            while (chosen[static_cast<std::size_t>(idx)]) ++idx;
        }
        chosen[static_cast<std::size_t>(idx)] = true;
        centers.row(static_cast<Eigen::Index>(c)) = pts.row(idx);
        for (Eigen::Index i = 0; i < n; ++i)
            d2[static_cast<std::size_t>(i)] =
                std::min(d2[static_cast<std::size_t>(i)], sq_dist(pts, i, centers, static_cast<Eigen::Index>(c)));
    }
    return centers;
}

/// Nearest-center assignment, ties to the lowest center index.
inline void assign(const Matrix& pts, const Matrix& centers, std::vector<std::size_t>& labels) {
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        std::size_t best = 0;
        double best_d = sq_dist(pts, i, centers, 0);
        for (Eigen::Index c = 1; c < centers.rows(); ++c) {
            const double d = sq_dist(pts, i, centers, c);
            if (d < best_d) {
                best_d = d;
                best = static_cast<std::size_t>(c);
            }
        }
        labels[static_cast<std::size_t>(i)] = best;
    }
}

/// Gives each empty label the point farthest from its center, taken from a
/// cluster that keeps at least one member.
inline void repair_empty(const Matrix& pts, const Matrix& centers, std::vector<std::size_t>& labels,
                         std::size_t k) {
    std::vector<std::size_t> counts(k, 0);
    for (auto l : labels) ++counts[l];
    for (std::size_t e = 0; e < k; ++e) {
        if (counts[e] != 0) continue;
        Eigen::Index far = -1;
        double far_d = -1;
        for (Eigen::Index i = 0; i < pts.rows(); ++i) {
            const auto l = labels[static_cast<std::size_t>(i)];
            if (counts[l] < 2) continue;
            const double d = sq_dist(pts, i, centers, static_cast<Eigen::Index>(l));
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        --counts[labels[static_cast<std::size_t>(far)]];
        labels[static_cast<std::size_t>(far)] = e;
        ++counts[e];
    }
}

inline Matrix centroids(const Matrix& pts, const std::vector<std::size_t>& labels, std::size_t k) {
    Matrix c = Matrix::Zero(static_cast<Eigen::Index>(k), pts.cols());
    std::vector<double> counts(k, 0.0);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        const auto l = labels[static_cast<std::size_t>(i)];
        c.row(static_cast<Eigen::Index>(l)) += pts.row(i);
        counts[l] += 1.0;
    }
    for (std::size_t l = 0; l < k; ++l) c.row(static_cast<Eigen::Index>(l)) /= counts[l];
    return c;
}

inline double inertia(const Matrix& pts, const Matrix& centers, const std::vector<std::size_t>& labels) {
    double s = 0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
        s += sq_dist(pts, i, centers, static_cast<Eigen::Index>(labels[static_cast<std::size_t>(i)]));
    return s;
}

}  // namespace detail

/**
 * Lloyd's k-means with "++" seeding over `restarts` independent starts; the
 * lowest-inertia run wins (earliest on ties). Every label 0..k-1 is nonempty.
 * Rows of `points` are the units being clustered.
 */
inline KMeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, KMeansOptions opts = {}) {
    const auto n = static_cast<std::size_t>(points.rows());
    if (k < 1) throw ContractError("kmeans: k must be >= 1");
    if (k > n) throw ContractError("kmeans: k = " + std::to_string(k) + " exceeds " + std::to_string(n) + " points");

    std::mt19937_64 rng(seed);
    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();

    for (int run = 0; run < std::max(1, opts.restarts); ++run) {
        Matrix centers = detail::kmeanspp_seed(points, k, rng);
        std::vector<std::size_t> labels(n, 0);
        KMeansResult cur;

        detail::assign(points, centers, labels);
        cur.history.push_back(detail::inertia(points, centers, labels));
        detail::repair_empty(points, centers, labels, k);
        centers = detail::centroids(points, labels, k);
        cur.history.push_back(detail::inertia(points, centers, labels));

        for (int it = 0; it < opts.max_iterations; ++it) {
            std::vector<std::size_t> next(n, 0);
            detail::assign(points, centers, next);
            detail::repair_empty(points, centers, next, k);
            if (next == labels) break;
            labels = std::move(next);
            centers = detail::centroids(points, labels, k);
            cur.history.push_back(detail::inertia(points, centers, labels));
        }
        cur.labels = std::move(labels);
        cur.inertia = cur.history.back();
        if (cur.inertia < best.inertia) best = std::move(cur);
    }
    return best;
}

}  // namespace dynmsa
