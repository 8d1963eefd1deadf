#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dissimilarity.hpp"
#include "matrix.hpp"

namespace deepvat {

/// SpecVAT embedding settings. Without an explicit gamma the affinity uses
/// 1 / (2 median(d)^2) over the off-diagonal entries.
struct SpectralConfig {
    std::size_t r = 2;
    std::optional<double> affinity_gamma;
};

inline double median_heuristic_gamma(const DissimilarityMatrix& d) {
    std::vector<double> upper;
    const std::size_t n = d.size();
    upper.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) upper.push_back(d(i, j));
    }
    if (upper.empty()) return 1.0;
    const std::size_t mid = upper.size() / 2;
    std::nth_element(upper.begin(), upper.begin() + static_cast<std::ptrdiff_t>(mid), upper.end());
    double median = upper[mid];
    if (upper.size() % 2 == 0) {
        const double lower = *std::max_element(upper.begin(), upper.begin() + static_cast<std::ptrdiff_t>(mid));
        median = 0.5 * (median + lower);
    }
    return median > 0.0 ? 1.0 / (2.0 * median * median) : 1.0;
}

/// Symmetric normalised Laplacian I - D^-1/2 W D^-1/2 of the Gaussian
/// affinity W = exp(-gamma d^2) (zero diagonal).
inline Matrix normalized_laplacian(const DissimilarityMatrix& d, double gamma) {
    if (!(gamma > 0.0)) throw Error("spectral: affinity gamma must be positive");
    const std::size_t n = d.size();
    Matrix w(n, n);
    std::vector<double> degree(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            w(i, j) = std::exp(-gamma * d(i, j) * d(i, j));
            degree[i] += w(i, j);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(degree[i] > 0.0)) throw Error("spectral: isolated vertex " + std::to_string(i) + " (zero degree)");
    }
    Matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double normed = w(i, j) / std::sqrt(degree[i] * degree[j]);
            l(i, j) = (i == j ? 1.0 : 0.0) - normed;
        }
    }
    return l;
}

/// Eigenpairs of the Laplacian in ascending eigenvalue order. Each
/// eigenvector's first component with magnitude above 1e-12 is made positive.
struct Eigenpairs {
    std::vector<double> values;
    Matrix vectors;  // column k is the k-th eigenvector
};

inline Eigenpairs symmetric_eigenpairs(const Matrix& m) {
    const auto n = static_cast<Eigen::Index>(m.rows());
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success) throw Error("spectral: eigen-decomposition did not converge");

    Eigenpairs out{std::vector<double>(static_cast<std::size_t>(n)), Matrix(m.rows(), m.rows())};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values[static_cast<std::size_t>(k)] = solver.eigenvalues()(k);
        auto v = solver.eigenvectors().col(k);
        double sign = 1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(v(i)) > 1e-12) {
                sign = v(i) < 0.0 ? -1.0 : 1.0;
                break;
            }
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            out.vectors(static_cast<std::size_t>(i), static_cast<std::size_t>(k)) = sign * v(i);
        }
    }
    return out;
}

/// SpecVAT embedding: the r eigenvectors of smallest eigenvalue of the
/// normalised Laplacian, rows rescaled to unit length (zero rows kept).
inline Matrix spectral_embed(const DissimilarityMatrix& d, const SpectralConfig& config) {
    const std::size_t n = d.size();
    if (config.r < 1 || config.r > n) {
        throw Error("spectral: r = " + std::to_string(config.r) + " outside [1, " + std::to_string(n) + "]");
    }
    const double gamma = config.affinity_gamma ? *config.affinity_gamma : median_heuristic_gamma(d);
    const auto pairs = symmetric_eigenpairs(normalized_laplacian(d, gamma));
    Matrix y(n, config.r);
    for (std::size_t i = 0; i < n; ++i) {
        double norm = 0.0;
        for (std::size_t k = 0; k < config.r; ++k) {
            y(i, k) = pairs.vectors(i, k);
            norm += y(i, k) * y(i, k);
        }
        norm = std::sqrt(norm);
        if (norm > 0.0) {
            for (std::size_t k = 0; k < config.r; ++k) y(i, k) /= norm;
        }
    }
    return y;
}

}  // namespace deepvat
