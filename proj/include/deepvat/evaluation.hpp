#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "matrix.hpp"

namespace deepvat {

/// counts[a][b] = number of objects with predicted label a and true label b.
struct ContingencyTable {
    std::vector<std::vector<std::int64_t>> counts;
    std::int64_t n_total = 0;

    std::size_t k_pred() const { return counts.size(); }
    std::size_t k_true() const { return counts.empty() ? 0 : counts[0].size(); }
};

inline ContingencyTable contingency(const Labels& pred, const Labels& truth) {
    if (pred.size() != truth.size()) {
        throw Error("evaluation: label lengths differ (" + std::to_string(pred.size()) + " vs " +
                    std::to_string(truth.size()) + ")");
    }
    if (pred.empty()) throw Error("evaluation: empty label vectors");
    const Labels a = relabel_contiguous(std::span<const int>(pred));
    const Labels b = relabel_contiguous(std::span<const int>(truth));
    const auto ka = static_cast<std::size_t>(*std::max_element(a.begin(), a.end()) + 1);
    const auto kb = static_cast<std::size_t>(*std::max_element(b.begin(), b.end()) + 1);
    ContingencyTable table{std::vector<std::vector<std::int64_t>>(ka, std::vector<std::int64_t>(kb, 0)),
                           static_cast<std::int64_t>(pred.size())};
    for (std::size_t i = 0; i < a.size(); ++i) ++table.counts[a[i]][b[i]];
    return table;
}

struct Assignment {
    std::int64_t weight = 0;
    std::vector<std::size_t> row_to_col;  // row i matched to column row_to_col[i]
};

/// Kuhn-Munkres (Hungarian) maximum-weight perfect matching on a matrix
/// zero-padded to square. Potentials-based O(n^3) formulation on the cost
/// max_weight - w.
inline Assignment max_weight_assignment(const std::vector<std::vector<std::int64_t>>& weights) {
    const std::size_t rows = weights.size();
    const std::size_t cols = rows ? weights[0].size() : 0;
    const std::size_t n = std::max(rows, cols);
    if (n == 0) return {};

    std::int64_t w_max = 0;
    for (const auto& row : weights) {
        for (auto v : row) w_max = std::max(w_max, v);
    }
    auto cost = [&](std::size_t i, std::size_t j) -> std::int64_t {
        const std::int64_t w = (i < rows && j < cols) ? weights[i][j] : 0;
        return w_max - w;
    };

    constexpr std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
    // 1-based arrays; column 0 is the virtual source.
    std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0);
    std::vector<std::size_t> match_col(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match_col[0] = i;
        std::size_t j0 = 0;
        std::vector<std::int64_t> min_v(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = match_col[j0];
            std::int64_t delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const std::int64_t cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < min_v[j]) {
                    min_v[j] = cur;
                    way[j] = j0;
                }
                if (min_v[j] < delta) {
                    delta = min_v[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_v[j] -= delta;
                }
            }
            j0 = j1;
        } while (match_col[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match_col[j0] = match_col[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    Assignment out;
    out.row_to_col.assign(n, 0);
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t i = match_col[j] - 1;
        out.row_to_col[i] = j - 1;
        if (i < rows && j - 1 < cols) out.weight += weights[i][j - 1];
    }
    return out;
}

/// Percentage of objects whose predicted cluster maps to their true class
/// under the best one-to-one label mapping. Surplus clusters on either side
/// map to nothing.
inline double partition_accuracy(const Labels& pred, const Labels& truth) {
    const auto table = contingency(pred, truth);
    const auto best = max_weight_assignment(table.counts);
    return 100.0 * static_cast<double>(best.weight) / static_cast<double>(table.n_total);
}

/// NMI with arithmetic-mean normalisation, 2 I(U;V) / (H(U) + H(V)), natural
/// logs. Both partitions single-cluster gives 1; exactly one gives 0.
inline double nmi(const Labels& pred, const Labels& truth) {
    const auto table = contingency(pred, truth);
    const double n = static_cast<double>(table.n_total);
    std::vector<double> row_sum(table.k_pred(), 0.0), col_sum(table.k_true(), 0.0);
    for (std::size_t a = 0; a < table.k_pred(); ++a) {
        for (std::size_t b = 0; b < table.k_true(); ++b) {
            row_sum[a] += static_cast<double>(table.counts[a][b]);
            col_sum[b] += static_cast<double>(table.counts[a][b]);
        }
    }
    auto entropy = [n](const std::vector<double>& sizes) {
        double h = 0.0;
        for (double s : sizes) {
            if (s > 0.0) h -= (s / n) * std::log(s / n);
        }
        return h;
    };
    const double hu = entropy(row_sum);
    const double hv = entropy(col_sum);
    if (table.k_pred() == 1 && table.k_true() == 1) return 1.0;
    if (hu == 0.0 || hv == 0.0) return 0.0;

    double mi = 0.0;
    for (std::size_t a = 0; a < table.k_pred(); ++a) {
        for (std::size_t b = 0; b < table.k_true(); ++b) {
            const double c = static_cast<double>(table.counts[a][b]);
            if (c == 0.0) continue;
            mi += (c / n) * std::log(c * n / (row_sum[a] * col_sum[b]));
        }
    }
    return std::clamp(2.0 * mi / (hu + hv), 0.0, 1.0);
}

}  // namespace deepvat
