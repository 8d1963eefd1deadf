#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "dissimilarity.hpp"
#include "matrix.hpp"
#include "rng.hpp"

namespace deepvat {

/// How the first distinguished object is chosen.
struct MaximinStart {
    /// nullopt: the object with the largest dissimilarity row sum.
    /// Otherwise a uniformly drawn object from this seed.
    std::optional<std::uint64_t> random_seed;
};

/// k' mutually far objects: after the seed, each pick maximises its minimum
/// distance to those already chosen (smallest index on ties). Distances are
/// computed on demand; no N x N matrix is formed.
inline std::vector<std::size_t> maximin_select(const Matrix& x, Metric metric, std::size_t k_prime,
                                               MaximinStart start = {}) {
    const std::size_t n = x.rows();
    if (k_prime < 1 || k_prime > n) {
        throw Error("maximin: k' = " + std::to_string(k_prime) + " outside [1, " + std::to_string(n) + "]");
    }
    const PointDistance dist(x, metric);

    std::size_t first = 0;
    if (start.random_seed) {
        SplitMix64 rng(*start.random_seed);
        first = static_cast<std::size_t>(rng.below(n));
    } else {
        std::vector<double> row_sum(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double v = dist(i, j);
                row_sum[i] += v;
                row_sum[j] += v;
            }
        }
        first = static_cast<std::size_t>(std::max_element(row_sum.begin(), row_sum.end()) - row_sum.begin());
    }

    std::vector<std::size_t> chosen{first};
    chosen.reserve(k_prime);
    std::vector<char> taken(n, 0);
    taken[first] = 1;
    std::vector<double> min_dist(n);
    for (std::size_t v = 0; v < n; ++v) min_dist[v] = dist(first, v);

    while (chosen.size() < k_prime) {
        std::size_t next = n;
        for (std::size_t v = 0; v < n; ++v) {
            if (!taken[v] && (next == n || min_dist[v] > min_dist[next])) next = v;
        }
        taken[next] = 1;
        chosen.push_back(next);
        for (std::size_t v = 0; v < n; ++v) {
            if (!taken[v]) min_dist[v] = std::min(min_dist[v], dist(next, v));
        }
    }
    return chosen;
}

/// Nearest prototype rule: group_of[i] is the position in `distinguished`
/// of the closest prototype, smallest position on ties.
inline std::vector<std::size_t> npr_group(const Matrix& x, Metric metric,
                                          const std::vector<std::size_t>& distinguished) {
    if (distinguished.empty()) throw Error("npr: no distinguished objects");
    for (auto idx : distinguished) {
        if (idx >= x.rows()) throw Error("npr: distinguished index " + std::to_string(idx) + " out of range");
    }
    const PointDistance dist(x, metric);
    std::vector<std::size_t> group_of(x.rows(), 0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double best = dist(i, distinguished[0]);
        for (std::size_t j = 1; j < distinguished.size(); ++j) {
            const double v = dist(i, distinguished[j]);
            if (v < best) {
                best = v;
                group_of[i] = j;
            }
        }
    }
    return group_of;
}

struct MmrsResult {
    std::vector<std::size_t> distinguished;
    std::vector<std::size_t> group_of;
    std::vector<std::size_t> sample;           // ascending original indices
    std::vector<std::size_t> per_group_quota;  // ceil(n * |G_j| / N)
};

/// ceil(n * group_size / total) in exact integer arithmetic.
inline std::size_t proportional_quota(std::size_t n, std::size_t group_size, std::size_t total) {
    return (n * group_size + total - 1) / total;
}

/// Maximin and random sampling.
///
/// Groups are visited in prototype order; each group's members (ascending
/// index) are shuffled by a partial Fisher-Yates pass drawing from one
/// SplitMix64 stream seeded with `seed`, and the first n_j are kept.
inline MmrsResult mmrs_sample(const Matrix& x, Metric metric, std::size_t k_prime, std::size_t n,
                              std::uint64_t seed, MaximinStart start = {}) {
    const std::size_t total = x.rows();
    if (n < 1 || n > total) {
        throw Error("mmrs: sample size n = " + std::to_string(n) + " outside [1, " + std::to_string(total) + "]");
    }
    MmrsResult out;
    out.distinguished = maximin_select(x, metric, k_prime, start);
    out.group_of = npr_group(x, metric, out.distinguished);

    std::vector<std::vector<std::size_t>> members(k_prime);
    for (std::size_t i = 0; i < total; ++i) members[out.group_of[i]].push_back(i);

    SplitMix64 rng(seed);
    out.per_group_quota.resize(k_prime);
    for (std::size_t j = 0; j < k_prime; ++j) {
        auto& group = members[j];
        const std::size_t quota = proportional_quota(n, group.size(), total);
        out.per_group_quota[j] = quota;
        for (std::size_t i = 0; i < quota; ++i) {
            const std::size_t pick = i + static_cast<std::size_t>(rng.below(group.size() - i));
            std::swap(group[i], group[pick]);
        }
        out.sample.insert(out.sample.end(), group.begin(), group.begin() + static_cast<std::ptrdiff_t>(quota));
    }
    std::sort(out.sample.begin(), out.sample.end());
    return out;
}

}  // namespace deepvat
