#pragma once

// Independent reference implementations used only by the tests. None of
// these share code paths with the library routines they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include "deepvat/matrix.hpp"
#include "deepvat/rng.hpp"

namespace oracle {

using deepvat::Matrix;

/// Random symmetric matrix with distinct off-diagonal entries: a shuffled
/// set of integers 1..m scaled by a random factor plus a jitter.
inline Matrix random_distinct_dissimilarity(std::size_t n, deepvat::SplitMix64& rng) {
    const std::size_t m = n * (n - 1) / 2;
    std::vector<double> weights(m);
    for (std::size_t k = 0; k < m; ++k) weights[k] = static_cast<double>(k + 1) + 0.25 * rng.uniform();
    for (std::size_t k = m; k > 1; --k) std::swap(weights[k - 1], weights[rng.below(k)]);
    Matrix d(n, n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            d(i, j) = d(j, i) = weights[k++];
        }
    }
    return d;
}

inline Matrix random_points(std::size_t n, std::size_t p, deepvat::SplitMix64& rng, double scale = 1.0) {
    Matrix x(n, p);
    for (double& v : x.values()) v = scale * rng.normal();
    return x;
}

/// Min over all simple paths of the max edge, by depth-first enumeration.
inline Matrix brute_force_minimax(const Matrix& d) {
    const std::size_t n = d.rows();
    Matrix out(n, n);
    std::vector<char> on_path(n, 0);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t t = s + 1; t < n; ++t) {
            double best = std::numeric_limits<double>::infinity();
            std::function<void(std::size_t, double)> walk = [&](std::size_t u, double bottleneck) {
                if (u == t) {
                    best = std::min(best, bottleneck);
                    return;
                }
                on_path[u] = 1;
                for (std::size_t v = 0; v < n; ++v) {
                    if (!on_path[v] && v != u) walk(v, std::max(bottleneck, d(u, v)));
                }
                on_path[u] = 0;
            };
            walk(s, 0.0);
            out(s, t) = out(t, s) = best;
        }
    }
    return out;
}

struct Edge {
    double w;
    std::size_t a, b;
};

/// Kruskal with a plain union-find.
inline std::vector<Edge> kruskal_mst(const Matrix& d) {
    const std::size_t n = d.rows();
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) edges.push_back({d(i, j), i, j});
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return x.w < y.w; });
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    std::vector<Edge> tree;
    for (const auto& e : edges) {
        const auto ra = find(e.a), rb = find(e.b);
        if (ra != rb) {
            parent[ra] = rb;
            tree.push_back(e);
        }
    }
    return tree;
}

inline double mst_weight(const Matrix& d) {
    double total = 0.0;
    for (const auto& e : kruskal_mst(d)) total += e.w;
    return total;
}

/// Max edge on the unique tree path between every pair of the Kruskal MST.
inline Matrix mst_path_max(const Matrix& d) {
    const std::size_t n = d.rows();
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
    for (const auto& e : kruskal_mst(d)) {
        adj[e.a].push_back({e.b, e.w});
        adj[e.b].push_back({e.a, e.w});
    }
    Matrix out(n, n);
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<double> best(n, -1.0);
        std::vector<std::size_t> stack{s};
        best[s] = 0.0;
        while (!stack.empty()) {
            const auto u = stack.back();
            stack.pop_back();
            for (auto [v, w] : adj[u]) {
                if (best[v] < 0.0) {
                    best[v] = std::max(best[u], w);
                    stack.push_back(v);
                }
            }
        }
        for (std::size_t t = 0; t < n; ++t) out(s, t) = best[t];
    }
    return out;
}

/// Naive agglomerative single linkage down to k clusters; returns the
/// partition as a set of sorted member lists.
inline std::set<std::vector<std::size_t>> single_linkage(const Matrix& d, std::size_t k) {
    const std::size_t n = d.rows();
    std::vector<std::vector<std::size_t>> clusters(n);
    for (std::size_t i = 0; i < n; ++i) clusters[i] = {i};
    while (clusters.size() > k) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t ba = 0, bb = 1;
        for (std::size_t a = 0; a < clusters.size(); ++a) {
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                for (auto i : clusters[a]) {
                    for (auto j : clusters[b]) {
                        if (d(i, j) < best) {
                            best = d(i, j);
                            ba = a;
                            bb = b;
                        }
                    }
                }
            }
        }
        clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
    }
    std::set<std::vector<std::size_t>> out;
    for (auto& c : clusters) {
        std::sort(c.begin(), c.end());
        out.insert(c);
    }
    return out;
}

inline std::set<std::vector<std::size_t>> as_partition(const std::vector<int>& labels) {
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto l = static_cast<std::size_t>(labels[i]);
        if (groups.size() <= l) groups.resize(l + 1);
        groups[l].push_back(i);
    }
    std::set<std::vector<std::size_t>> out;
    for (auto& g : groups) {
        if (!g.empty()) out.insert(g);
    }
    return out;
}

/// Best total weight over all injective maps from the smaller side into the
/// larger side of a rectangular weight table.
inline std::int64_t brute_force_assignment(const std::vector<std::vector<std::int64_t>>& w) {
    const std::size_t rows = w.size();
    const std::size_t cols = rows ? w[0].size() : 0;
    const std::size_t n = std::max(rows, cols);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::int64_t best = 0;
    do {
        std::int64_t total = 0;
        for (std::size_t i = 0; i < rows; ++i) {
            if (perm[i] < cols) total += w[i][perm[i]];
        }
        best = std::max(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace oracle
