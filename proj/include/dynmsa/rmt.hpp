/**
 * @file rmt.hpp
 * @brief Marchenko-Pastur noise band, eigenvalue-averaging correlation cleaning
 *        and Heaviside thresholding into a binary adjacency matrix.
 *
 * Cleaning replaces every eigenvalue inside [lambda_minus, lambda_plus] with the
 * mean of those eigenvalues and rebuilds V * diag(lambda~) * V^T. Averaging
 * preserves the eigenvalue sum, hence the trace. The rebuilt matrix is then
 * rescaled to a unit diagonal so entries read as correlations again.
 */

#pragma once

#include "dynmsa/core.hpp"
#include "dynmsa/ingest.hpp"
#include "dynmsa/numerics.hpp"

#include <cmath>
#include <numbers>

namespace dynmsa {

struct MpBounds {
    double lambda_minus = 0.0;
    double lambda_plus = 0.0;
    double q = 0.0;       ///< n_assets / n_days
    double sigma2 = 1.0;

    bool contains(double x) const { return x >= lambda_minus && x <= lambda_plus; }
};

inline MpBounds mp_bounds(std::size_t n_assets, std::size_t n_days, double sigma2 = 1.0) {
    if (n_assets == 0 || n_days == 0) throw ContractError("mp_bounds: n_assets and n_days must be positive");
    MpBounds b;
    b.q = static_cast<double>(n_assets) / static_cast<double>(n_days);
    b.sigma2 = sigma2;
    const double r = std::sqrt(b.q);
    b.lambda_minus = sigma2 * (1.0 - r) * (1.0 - r);
    b.lambda_plus = sigma2 * (1.0 + r) * (1.0 + r);
    return b;
}

/// Marchenko-Pastur density; zero outside the band.
inline double mp_density(double x, const MpBounds& b) {
    if (x <= b.lambda_minus || x >= b.lambda_plus || x <= 0.0) return 0.0;
    return std::sqrt((x - b.lambda_minus) * (b.lambda_plus - x)) / (2.0 * std::numbers::pi * b.sigma2 * b.q * x);
}

struct CleanedCorrelation {
    std::vector<std::string> tickers;
    Matrix matrix;                 ///< unit-diagonal cleaned correlations
    std::size_t kept_count = 0;    ///< eigenvalues outside the noise band
    double noise_mean = 0.0;       ///< replacement value for in-band eigenvalues
    Vector eigenvalues;            ///< original, descending
    Vector cleaned_eigenvalues;    ///< after replacement, same order
    double reconstructed_trace = 0.0;  ///< trace before unit-diagonal rescaling
    MpBounds bounds;

    std::size_t size() const { return tickers.size(); }

    /// Largest off-diagonal entry (0 for a 1x1 matrix).
    double max_off_diagonal() const {
        double m = -std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < matrix.rows(); ++i)
            for (Eigen::Index j = i + 1; j < matrix.cols(); ++j) m = std::max(m, matrix(i, j));
        return std::isfinite(m) ? m : 0.0;
    }
};

inline CleanedCorrelation clean(const CorrelationMatrix& corr, const MpBounds& bounds) {
    if (bounds.q >= 1.0)
        warn("clean: aspect ratio q = " + format_double(bounds.q) +
             " >= 1, Marchenko-Pastur bounds used outside their regime");

    CleanedCorrelation out;
    out.tickers = corr.tickers;
    out.bounds = bounds;
    const auto n = corr.values.rows();
    const auto eig = eig_sym(corr.values);
    out.eigenvalues = eig.values;
    out.cleaned_eigenvalues = eig.values;

    double noise_sum = 0.0;
    std::size_t noise_count = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (bounds.contains(eig.values(i))) {
            noise_sum += eig.values(i);
            ++noise_count;
        }

    if (noise_count == 0) {
        out.matrix = corr.values;
        out.kept_count = static_cast<std::size_t>(n);
        out.noise_mean = 0.0;
        out.reconstructed_trace = corr.values.trace();
        return out;
    }

    out.noise_mean = noise_sum / static_cast<double>(noise_count);
    out.kept_count = static_cast<std::size_t>(n) - noise_count;
    for (Eigen::Index i = 0; i < n; ++i)
        if (bounds.contains(eig.values(i))) out.cleaned_eigenvalues(i) = out.noise_mean;

    Matrix rebuilt = eig.vectors * out.cleaned_eigenvalues.asDiagonal() * eig.vectors.transpose();
    out.reconstructed_trace = rebuilt.trace();

    out.matrix.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.matrix(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double denom = std::sqrt(rebuilt(i, i) * rebuilt(j, j));
            const double v = denom > 0 ? std::clamp(0.5 * (rebuilt(i, j) + rebuilt(j, i)) / denom, -1.0, 1.0) : 0.0;
            out.matrix(i, j) = out.matrix(j, i) = v;
        }
    }
    return out;
}

/// Convenience: Marchenko-Pastur bounds from the window's own dimensions, sigma^2 = 1.
inline CleanedCorrelation clean(const CorrelationMatrix& corr) {
    return clean(corr, mp_bounds(corr.size(), corr.n_days));
}

/// Binary adjacency; the diagonal is always zero.
struct ThresholdGraphMatrix {
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> adjacency;
    double theta = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(adjacency.rows()); }
};

/// T_ij = H(C_ij - theta) off the diagonal, with H(x) = 1 only for x > 0.
inline ThresholdGraphMatrix threshold(const Matrix& cleaned, double theta) {
    ThresholdGraphMatrix t;
    t.theta = theta;
    const auto n = cleaned.rows();
    t.adjacency.setZero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (cleaned(i, j) - theta > 0.0) t.adjacency(i, j) = t.adjacency(j, i) = 1;
    return t;
}

inline ThresholdGraphMatrix threshold(const CleanedCorrelation& cleaned, double theta) {
    return threshold(cleaned.matrix, theta);
}

}  // namespace dynmsa
