#pragma once

#include <cmath>
#include <cstdint>

#include "matrix.hpp"
#include "rng.hpp"

namespace deepvat {

/// Gaussian random projection Y = X R / sqrt(target_dim).
///
/// R is p x target_dim, filled row-major from the normal stream of a
/// SplitMix64 seeded with `seed`.
inline Matrix random_project(const Matrix& x, std::size_t target_dim, std::uint64_t seed) {
    const std::size_t p = x.cols();
    if (target_dim < 1 || target_dim > p) {
        throw Error("random projection: target dimension " + std::to_string(target_dim) + " outside [1, " +
                    std::to_string(p) + "]");
    }
    SplitMix64 rng(seed);
    Matrix r(p, target_dim);
    for (double& v : r.values()) v = rng.normal();

    const double scale = 1.0 / std::sqrt(static_cast<double>(target_dim));
    Matrix y(x.rows(), target_dim);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto xi = x.row(i);
        auto yi = y.row(i);
        for (std::size_t k = 0; k < p; ++k) {
            const double a = xi[k];
            if (a == 0.0) continue;
            const auto rk = r.row(k);
            for (std::size_t t = 0; t < target_dim; ++t) yi[t] += a * rk[t];
        }
        for (double& v : yi) v *= scale;
    }
    return y;
}

inline EmbeddingSet random_project(const EmbeddingSet& x, std::size_t target_dim, std::uint64_t seed) {
    return EmbeddingSet{random_project(x.data, target_dim, seed), x.labels};
}

}  // namespace deepvat
