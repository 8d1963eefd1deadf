#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "matrix.hpp"
#include "rng.hpp"

namespace deepvat {

/// Exact t-SNE settings. Defaults follow the usual reference implementation.
struct TsneConfig {
    double perplexity = 30.0;
    std::size_t output_dims = 2;
    std::size_t iterations = 1000;
    double learning_rate = 200.0;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    std::size_t momentum_switch_iter = 250;
    double early_exaggeration = 12.0;
    std::size_t exaggeration_iters = 250;
    std::uint64_t seed = 0;
};

namespace tsne_detail {

inline constexpr std::size_t kMaxBisectionSteps = 64;
inline constexpr double kEntropyTolerance = 1e-6;

}  // namespace tsne_detail

/// Squared Euclidean distances between all rows.
inline Matrix squared_distances(const Matrix& x) {
    const std::size_t n = x.rows();
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto a = x.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto b = x.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k) {
                const double diff = a[k] - b[k];
                s += diff * diff;
            }
            d(i, j) = s;
            d(j, i) = s;
        }
    }
    return d;
}

/// Conditional distribution p_{j|i} for one row together with its realised
/// perplexity exp(H).
struct ConditionalRow {
    std::vector<double> p;
    double perplexity = 0.0;
};

/// Gaussian bandwidth search for row `i` of squared distances.
///
/// Distances are shifted by the row minimum (which cancels in the
/// normalisation) so the kernel never underflows entirely. The precision beta
/// is doubled or halved until the target is bracketed, then bisected; at
/// most 64 steps.
inline ConditionalRow conditional_probabilities(std::span<const double> dist2, std::size_t i, double perplexity) {
    const std::size_t n = dist2.size();
    ConditionalRow out;
    out.p.assign(n, 0.0);
    if (n < 2) return out;

    double d_min = std::numeric_limits<double>::infinity();
    double d_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        d_min = std::min(d_min, dist2[j]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (j != i) d_sum += dist2[j] - d_min;
    }
    const double mean_shifted = d_sum / static_cast<double>(n - 1);

    const double target_entropy = std::log(perplexity);
    double beta = mean_shifted > 0.0 ? 1.0 / mean_shifted : 1.0;
    double beta_lo = 0.0;
    double beta_hi = std::numeric_limits<double>::infinity();
    double entropy = 0.0;

    for (std::size_t step = 0; step < tsne_detail::kMaxBisectionSteps; ++step) {
        double sum = 0.0;
        double weighted = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double shifted = dist2[j] - d_min;
            const double w = std::exp(-beta * shifted);
            out.p[j] = w;
            sum += w;
            weighted += shifted * w;
        }
        entropy = std::log(sum) + beta * weighted / sum;
        for (double& v : out.p) v /= sum;

        const double diff = entropy - target_entropy;
        if (std::abs(diff) < tsne_detail::kEntropyTolerance) break;
        if (diff > 0.0) {
            beta_lo = beta;
            beta = std::isinf(beta_hi) ? beta * 2.0 : 0.5 * (beta + beta_hi);
        } else {
            beta_hi = beta;
            beta = 0.5 * (beta + beta_lo);
        }
    }
    out.perplexity = std::exp(entropy);
    return out;
}

/// Symmetrised input affinities p_ij = (p_{j|i} + p_{i|j}) / 2N.
struct Affinities {
    Matrix p;
    std::vector<double> row_perplexity;
};

inline Affinities joint_probabilities(const Matrix& x, double perplexity) {
    const std::size_t n = x.rows();
    const Matrix d2 = squared_distances(x);
    Matrix cond(n, n);
    Affinities out{Matrix(n, n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        auto row = conditional_probabilities(d2.row(i), i, perplexity);
        out.row_perplexity[i] = row.perplexity;
        std::copy(row.p.begin(), row.p.end(), cond.row(i).begin());
    }
    const double scale = 1.0 / (2.0 * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = (cond(i, j) + cond(j, i)) * scale;
            out.p(i, j) = v;
            out.p(j, i) = v;
        }
    }
    return out;
}

/// Unnormalised Student-t kernel (1 + |y_i - y_j|^2)^-1, zero diagonal, and
/// its total over ordered pairs.
inline double student_kernel(const Matrix& y, Matrix& num) {
    const std::size_t n = y.rows();
    num = Matrix(n, n);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto a = y.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto b = y.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k) {
                const double diff = a[k] - b[k];
                s += diff * diff;
            }
            const double v = 1.0 / (1.0 + s);
            num(i, j) = v;
            num(j, i) = v;
            z += 2.0 * v;
        }
    }
    return z;
}

/// KL(P || Q) for the embedding y.
inline double kl_divergence(const Matrix& p, const Matrix& y) {
    Matrix num;
    const double z = student_kernel(y, num);
    double kl = 0.0;
    for (std::size_t i = 0; i < p.rows(); ++i) {
        for (std::size_t j = 0; j < p.cols(); ++j) {
            if (i == j || p(i, j) <= 0.0) continue;
            kl += p(i, j) * std::log(p(i, j) / (num(i, j) / z));
        }
    }
    return kl;
}

/// dKL/dy_i = 4 sum_j (p_ij - q_ij) (1 + |y_i - y_j|^2)^-1 (y_i - y_j).
/// `exaggeration` multiplies P (early exaggeration phase).
inline Matrix kl_gradient(const Matrix& p, const Matrix& y, double exaggeration = 1.0) {
    const std::size_t n = y.rows();
    const std::size_t dims = y.cols();
    Matrix num;
    const double z = student_kernel(y, num);
    Matrix grad(n, dims);
    for (std::size_t i = 0; i < n; ++i) {
        auto g = grad.row(i);
        const auto yi = y.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double coeff = (exaggeration * p(i, j) - num(i, j) / z) * num(i, j);
            const auto yj = y.row(j);
            for (std::size_t k = 0; k < dims; ++k) g[k] += 4.0 * coeff * (yi[k] - yj[k]);
        }
    }
    return grad;
}

struct TsneResult {
    Matrix embedding;
    Affinities affinities;
    double kl_initial = 0.0;
    double kl_final = 0.0;
};

inline void validate(const TsneConfig& config, std::size_t n) {
    if (n < 4) throw Error("tsne: need at least 4 objects, got " + std::to_string(n));
    if (!(config.perplexity > 0.0) || !(config.perplexity < static_cast<double>(n - 1) / 3.0)) {
        throw Error("tsne: perplexity " + std::to_string(config.perplexity) + " infeasible for N = " +
                    std::to_string(n) + " (must be < (N - 1) / 3)");
    }
    if (config.iterations < 1) throw Error("tsne: iterations must be >= 1");
    if (config.output_dims < 1) throw Error("tsne: output_dims must be >= 1");
    if (!(config.learning_rate > 0.0)) throw Error("tsne: learning rate must be positive");
}

/// Exact t-SNE with gains, momentum switch and early exaggeration.
inline TsneResult run_tsne(const Matrix& x, const TsneConfig& config) {
    const std::size_t n = x.rows();
    validate(config, n);
    const std::size_t dims = config.output_dims;

    TsneResult out;
    out.affinities = joint_probabilities(x, config.perplexity);
    const Matrix& p = out.affinities.p;

    SplitMix64 rng(config.seed);
    Matrix y(n, dims);
    for (double& v : y.values()) v = 1e-4 * rng.normal();
    out.kl_initial = kl_divergence(p, y);

    Matrix update(n, dims);
    Matrix gains(n, dims, 1.0);
    for (std::size_t iter = 0; iter < config.iterations; ++iter) {
        const double exaggeration = iter < config.exaggeration_iters ? config.early_exaggeration : 1.0;
        const double momentum = iter < config.momentum_switch_iter ? config.initial_momentum : config.final_momentum;
        const Matrix grad = kl_gradient(p, y, exaggeration);

        auto g = grad.values();
        auto u = update.values();
        auto gn = gains.values();
        auto yv = y.values();
        for (std::size_t k = 0; k < yv.size(); ++k) {
            gn[k] = (g[k] > 0.0) != (u[k] > 0.0) ? gn[k] + 0.2 : gn[k] * 0.8;
            if (gn[k] < 0.01) gn[k] = 0.01;
            u[k] = momentum * u[k] - config.learning_rate * gn[k] * g[k];
            yv[k] += u[k];
        }
        for (std::size_t k = 0; k < dims; ++k) {
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += y(i, k);
            mean /= static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) y(i, k) -= mean;
        }
        for (double v : yv) {
            if (!std::isfinite(v)) throw Error("tsne: non-finite coordinate at iteration " + std::to_string(iter));
        }
    }
    out.kl_final = kl_divergence(p, y);
    out.embedding = std::move(y);
    return out;
}

inline EmbeddingSet tsne(const EmbeddingSet& x, const TsneConfig& config) {
    auto result = run_tsne(x.data, config);
    return EmbeddingSet{std::move(result.embedding), x.labels};
}

}  // namespace deepvat
