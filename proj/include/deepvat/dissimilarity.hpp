#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "matrix.hpp"

namespace deepvat {

enum class Metric { euclidean, cosine, precomputed, kernel_transformed };

inline Metric metric_from_name(std::string_view name) {
    if (name == "euclidean") return Metric::euclidean;
    if (name == "cosine") return Metric::cosine;
    throw Error("unknown metric '" + std::string(name) + "' (expected euclidean or cosine)");
}

inline std::string_view metric_name(Metric m) {
    switch (m) {
        case Metric::euclidean: return "euclidean";
        case Metric::cosine: return "cosine";
        case Metric::precomputed: return "precomputed";
        case Metric::kernel_transformed: return "kernel_transformed";
    }
    return "?";
}

/// Symmetric, zero-diagonal, nonnegative N x N matrix.
struct DissimilarityMatrix {
    Matrix values;
    Metric metric = Metric::precomputed;

    std::size_t size() const { return values.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return values(i, j); }
};

/// Check the dissimilarity invariants on an imported matrix.
inline DissimilarityMatrix as_dissimilarity(Matrix m) {
    if (m.rows() != m.cols()) {
        throw Error("dissimilarity: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                    ", expected square");
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (m(i, i) != 0.0) throw Error("dissimilarity: nonzero diagonal at " + std::to_string(i));
        for (std::size_t j = 0; j < i; ++j) {
            if (m(i, j) != m(j, i)) {
                throw Error("dissimilarity: asymmetric entry (" + std::to_string(i) + ", " + std::to_string(j) + ")");
            }
            if (!(m(i, j) >= 0.0) || !std::isfinite(m(i, j))) {
                throw Error("dissimilarity: negative or non-finite entry (" + std::to_string(i) + ", " +
                            std::to_string(j) + ")");
            }
        }
    }
    return DissimilarityMatrix{std::move(m), Metric::precomputed};
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return std::sqrt(s);
}

inline double squared_norm(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return s;
}

/// 1 - cos(a, b) given precomputed norms; clamped to [0, 2].
inline double cosine_dissimilarity(std::span<const double> a, std::span<const double> b, double norm_a,
                                   double norm_b) {
    double dot = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) dot += a[k] * b[k];
    const double d = 1.0 - dot / (norm_a * norm_b);
    if (d < 0.0) return 0.0;
    return d > 2.0 ? 2.0 : d;
}

/// Row-to-row distance under a fixed metric, for callers that never build
/// the full matrix (sampling over large N).
class PointDistance {
public:
    PointDistance(const Matrix& x, Metric metric) : x_(x), metric_(metric) {
        if (metric_ != Metric::euclidean && metric_ != Metric::cosine) {
            throw Error("point distance: metric must be euclidean or cosine");
        }
        if (metric_ == Metric::cosine) {
            norms_.resize(x.rows());
            for (std::size_t i = 0; i < x.rows(); ++i) {
                norms_[i] = std::sqrt(squared_norm(x.row(i)));
                if (norms_[i] == 0.0) throw Error("cosine dissimilarity: zero-norm row " + std::to_string(i));
            }
        }
    }

    double operator()(std::size_t i, std::size_t j) const {
        if (metric_ == Metric::euclidean) return euclidean_distance(x_.row(i), x_.row(j));
        return cosine_dissimilarity(x_.row(i), x_.row(j), norms_[i], norms_[j]);
    }

    std::size_t size() const { return x_.rows(); }

private:
    const Matrix& x_;
    Metric metric_;
    std::vector<double> norms_;
};

/// Full pairwise matrix. Each unordered pair is evaluated once and mirrored.
inline DissimilarityMatrix pairwise_dissimilarity(const Matrix& x, Metric metric) {
    if (x.rows() < 1) throw Error("dissimilarity: no objects");
    const PointDistance dist(x, metric);
    const std::size_t n = x.rows();
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = dist(i, j);
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return DissimilarityMatrix{std::move(d), metric};
}

/// KernelVAT-style transform: 1 - exp(-gamma * d^2). Order preserving, output
/// in [0, 1), diagonal stays 0.
inline DissimilarityMatrix rbf_kernel_transform(const DissimilarityMatrix& d, double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error("rbf kernel: gamma must be positive");
    const std::size_t n = d.size();
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = -std::expm1(-gamma * d(i, j) * d(i, j));
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return DissimilarityMatrix{std::move(out), Metric::kernel_transformed};
}

}  // namespace deepvat
