#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "dissimilarity.hpp"
#include "matrix.hpp"

namespace deepvat {

/// Result of the VAT traversal.
///
/// `order[t]` is the original index placed at position t. For t >= 1,
/// `connect_magnitudes[t]` is the weight of the edge that attached `order[t]`
/// to the already selected set and `connect_parent[t]` is the position (< t)
/// of the object it attached to. Position 0 is the seed: magnitude 0 and
/// parent 0. The edges (order[connect_parent[t]], order[t]) form a minimum
/// spanning tree of D.
struct VatOrdering {
    std::vector<std::size_t> order;
    std::vector<double> connect_magnitudes;
    std::vector<std::size_t> connect_parent;

    std::size_t size() const { return order.size(); }
    bool operator==(const VatOrdering&) const = default;
};

enum class Transform { vat, ivat };

struct ReorderedMatrix {
    Matrix values;
    VatOrdering ordering;
    Transform transformed = Transform::vat;
};

/// Modified Prim traversal.
///
/// Starts from the row of the largest dissimilarity (smallest row index, then
/// smallest column, among ties) and repeatedly appends the unselected object
/// closest to the selected set. Ties on the next object go to the smallest
/// original index; ties on the attaching parent keep the earliest position.
inline VatOrdering vat_reorder(const DissimilarityMatrix& d) {
    const std::size_t n = d.size();
    if (n == 0) throw Error("vat: empty dissimilarity matrix");

    std::size_t start = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (d(i, j) > best) {
                best = d(i, j);
                start = i;
            }
        }
    }

    VatOrdering out;
    out.order.reserve(n);
    out.connect_magnitudes.reserve(n);
    out.connect_parent.reserve(n);
    out.order.push_back(start);
    out.connect_magnitudes.push_back(0.0);
    out.connect_parent.push_back(0);

    std::vector<char> selected(n, 0);
    std::vector<double> nearest(n);
    std::vector<std::size_t> nearest_pos(n, 0);
    selected[start] = 1;
    for (std::size_t v = 0; v < n; ++v) nearest[v] = d(start, v);

    for (std::size_t t = 1; t < n; ++t) {
        std::size_t next = n;
        double next_dist = std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < n; ++v) {
            if (!selected[v] && (next == n || nearest[v] < next_dist)) {
                next = v;
                next_dist = nearest[v];
            }
        }
        selected[next] = 1;
        out.order.push_back(next);
        out.connect_magnitudes.push_back(next_dist);
        out.connect_parent.push_back(nearest_pos[next]);
        for (std::size_t v = 0; v < n; ++v) {
            if (!selected[v] && d(next, v) < nearest[v]) {
                nearest[v] = d(next, v);
                nearest_pos[v] = t;
            }
        }
    }
    return out;
}

inline void check_ordering(const DissimilarityMatrix& d, const VatOrdering& ordering) {
    const std::size_t n = d.size();
    if (ordering.order.size() != n || ordering.connect_magnitudes.size() != n || ordering.connect_parent.size() != n) {
        throw Error("vat: ordering of size " + std::to_string(ordering.size()) + " does not match " +
                    std::to_string(n) + "x" + std::to_string(n) + " matrix");
    }
}

/// Plain VAT image: D with rows and columns permuted into VAT order.
inline ReorderedMatrix vat_matrix(const DissimilarityMatrix& d, const VatOrdering& ordering) {
    check_ordering(d, ordering);
    const std::size_t n = d.size();
    Matrix m(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) m(r, c) = d(ordering.order[r], ordering.order[c]);
    }
    return ReorderedMatrix{std::move(m), ordering, Transform::vat};
}

/// iVAT: minimax path distances, in VAT order.
///
/// Object r is a leaf of the spanning tree built over positions 0..r, so its
/// path to any earlier c runs through its parent p:
///   d'(r, p) = w_r,  d'(r, c) = max(w_r, d'(p, c)).
inline ReorderedMatrix ivat_transform(const DissimilarityMatrix& d, const VatOrdering& ordering) {
    check_ordering(d, ordering);
    const std::size_t n = d.size();
    Matrix m(n, n);
    for (std::size_t r = 1; r < n; ++r) {
        const std::size_t p = ordering.connect_parent[r];
        const double w = ordering.connect_magnitudes[r];
        for (std::size_t c = 0; c < r; ++c) {
            const double v = c == p ? w : std::max(w, m(p, c));
            m(r, c) = v;
            m(c, r) = v;
        }
    }
    return ReorderedMatrix{std::move(m), ordering, Transform::ivat};
}

/// Partition obtained by cutting the spanning tree.
struct ClusterEstimate {
    std::size_t k_p = 1;
    std::vector<std::size_t> cut_positions;  // ascending
    Labels labels;                           // original index order
};

/// Cut the k_p - 1 largest connect edges.
///
/// Among equal magnitudes the later position is cut first. With that rule
/// every object after a cut position attaches with a strictly smaller edge,
/// so each cluster is the contiguous run of positions between two cuts and
/// labels increase along the VAT order.
inline ClusterEstimate mst_cut_partition(const VatOrdering& ordering, std::size_t k_p) {
    const std::size_t n = ordering.size();
    if (k_p < 1 || k_p > n) {
        throw Error("mst cut: k_p = " + std::to_string(k_p) + " outside [1, " + std::to_string(n) + "]");
    }
    std::vector<std::size_t> positions(n > 0 ? n - 1 : 0);
    std::iota(positions.begin(), positions.end(), std::size_t{1});
    std::sort(positions.begin(), positions.end(), [&](std::size_t a, std::size_t b) {
        const double wa = ordering.connect_magnitudes[a];
        const double wb = ordering.connect_magnitudes[b];
        return wa != wb ? wa > wb : a > b;
    });
    ClusterEstimate out;
    out.k_p = k_p;
    out.cut_positions.assign(positions.begin(), positions.begin() + static_cast<std::ptrdiff_t>(k_p - 1));
    std::sort(out.cut_positions.begin(), out.cut_positions.end());

    out.labels.assign(n, 0);
    int label = 0;
    std::size_t next_cut = 0;
    for (std::size_t t = 0; t < n; ++t) {
        if (next_cut < out.cut_positions.size() && out.cut_positions[next_cut] == t) {
            ++label;
            ++next_cut;
        }
        out.labels[ordering.order[t]] = label;
    }
    return out;
}

inline constexpr std::size_t kDefaultKMax = 15;

/// Largest-gap rule on the sorted connect magnitudes.
///
/// With e_1 >= e_2 >= ... the sorted magnitudes of positions 1..N-1 and
/// m = min(k_max, N - 1), returns i + 1 for the i < m maximising e_i - e_{i+1}
/// (first i on ties), or 1 when no gap is positive.
inline std::size_t estimate_k(const VatOrdering& ordering, std::size_t k_max = kDefaultKMax) {
    const std::size_t n = ordering.size();
    if (n < 2) throw Error("estimate_k: need at least 2 objects");
    if (k_max < 2) throw Error("estimate_k: k_max must be >= 2");
    std::vector<double> e(ordering.connect_magnitudes.begin() + 1, ordering.connect_magnitudes.end());
    std::sort(e.begin(), e.end(), std::greater<>());
    const std::size_t m = std::min(k_max, n - 1);
    std::size_t best_i = 0;
    double best_gap = 0.0;
    for (std::size_t i = 1; i < m; ++i) {
        const double gap = e[i - 1] - e[i];
        if (gap > best_gap) {
            best_gap = gap;
            best_i = i;
        }
    }
    return best_i == 0 ? 1 : best_i + 1;
}

/// Text form of an ordering: a comment line, then one
/// "position index parent magnitude" line per position (magnitude in %.17g).
inline void save_ordering(const std::filesystem::path& path, const VatOrdering& ordering) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << "# position index parent magnitude\n";
    char buf[32];
    for (std::size_t t = 0; t < ordering.size(); ++t) {
        std::snprintf(buf, sizeof buf, "%.17g", ordering.connect_magnitudes[t]);
        out << t << ' ' << ordering.order[t] << ' ' << ordering.connect_parent[t] << ' ' << buf << '\n';
    }
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

inline VatOrdering load_ordering(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    VatOrdering out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::size_t pos = 0, index = 0, parent = 0;
        std::string magnitude;
        if (!(fields >> pos >> index >> parent >> magnitude) || pos != out.order.size()) {
            throw Error(path.string() + ": malformed ordering line " + std::to_string(line_no));
        }
        out.order.push_back(index);
        out.connect_parent.push_back(parent);
        out.connect_magnitudes.push_back(std::stod(magnitude));
    }
    const std::size_t n = out.order.size();
    if (n == 0) throw Error(path.string() + ": empty ordering");
    std::vector<char> seen(n, 0);
    for (std::size_t t = 0; t < n; ++t) {
        if (out.order[t] >= n || seen[out.order[t]] || (t > 0 && out.connect_parent[t] >= t)) {
            throw Error(path.string() + ": ordering is not a valid permutation/tree");
        }
        seen[out.order[t]] = 1;
    }
    return out;
}

}  // namespace deepvat
