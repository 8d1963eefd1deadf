#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <numeric>

#include "deepvat/data_io.hpp"
#include "deepvat/vat.hpp"
#include "oracles.hpp"

using namespace deepvat;

namespace {

DissimilarityMatrix line_points(const std::vector<double>& coords) {
    Matrix x(coords.size(), 1, coords);
    return pairwise_dissimilarity(x, Metric::euclidean);
}

DissimilarityMatrix random_distinct(std::size_t n, SplitMix64& rng) {
    return as_dissimilarity(oracle::random_distinct_dissimilarity(n, rng));
}

}  // namespace

TEST(VatReorder, HandTracedLine) {
    // o1 = 0, o2 = 10, o3 = 1.
    const auto ordering = vat_reorder(line_points({0, 10, 1}));
    EXPECT_EQ(ordering.order, (std::vector<std::size_t>{0, 2, 1}));
    EXPECT_EQ(ordering.connect_magnitudes, (std::vector<double>{0, 1, 9}));
    EXPECT_EQ(ordering.connect_parent, (std::vector<std::size_t>{0, 0, 1}));
    // Exhaustive check of the three spanning trees on 3 vertices: {1,9},
    // {1,10}, {9,10}; the minimum is 10.
    EXPECT_EQ(oracle::mst_weight(line_points({0, 10, 1}).values), 10.0);
}

TEST(VatReorder, SingleObject) {
    const auto ordering = vat_reorder(as_dissimilarity(Matrix(1, 1, 0.0)));
    EXPECT_EQ(ordering.order, (std::vector<std::size_t>{0}));
    EXPECT_EQ(ordering.connect_magnitudes, (std::vector<double>{0}));
}

TEST(VatReorder, TwoObjectsStartAtLowerIndex) {
    const auto ordering = vat_reorder(as_dissimilarity(Matrix(2, 2, std::vector<double>{0, 3, 3, 0})));
    EXPECT_EQ(ordering.order, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(ordering.connect_magnitudes, (std::vector<double>{0, 3}));
}

TEST(VatReorder, TiesGoToSmallestIndex) {
    // All distances equal: start at 0, then 1, 2, 3.
    Matrix m(4, 4, 1.0);
    for (std::size_t i = 0; i < 4; ++i) m(i, i) = 0.0;
    const auto ordering = vat_reorder(as_dissimilarity(m));
    EXPECT_EQ(ordering.order, (std::vector<std::size_t>{0, 1, 2, 3}));
    EXPECT_EQ(ordering.connect_parent, (std::vector<std::size_t>{0, 0, 0, 0}));
}

TEST(VatReorder, IsPermutationAndSpanningTree) {
    SplitMix64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.below(30);
        const auto d = random_distinct(n, rng);
        const auto o = vat_reorder(d);
        auto sorted = o.order;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(sorted[i], i);
        for (std::size_t t = 1; t < n; ++t) {
            ASSERT_LT(o.connect_parent[t], t);
            EXPECT_EQ(o.connect_magnitudes[t], d(o.order[o.connect_parent[t]], o.order[t]));
        }
    }
}

TEST(VatReorder, MstWeightMatchesKruskal) {
    SplitMix64 rng(22);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(9);
        const auto d = random_distinct(n, rng);
        const auto o = vat_reorder(d);
        auto mine = std::vector<double>(o.connect_magnitudes.begin() + 1, o.connect_magnitudes.end());
        std::vector<double> theirs;
        for (const auto& e : oracle::kruskal_mst(d.values)) theirs.push_back(e.w);
        std::sort(mine.begin(), mine.end());
        std::sort(theirs.begin(), theirs.end());
        EXPECT_EQ(mine, theirs);
    }
}

TEST(VatReorder, PermutationInvariance) {
    SplitMix64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 3 + rng.below(12);
        const auto d = random_distinct(n, rng);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t k = n; k > 1; --k) std::swap(perm[k - 1], perm[rng.below(k)]);
        Matrix pm(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) pm(i, j) = d(perm[i], perm[j]);
        }
        const auto a = vat_reorder(d);
        const auto b = vat_reorder(as_dissimilarity(pm));
        auto ma = a.connect_magnitudes, mb = b.connect_magnitudes;
        std::sort(ma.begin(), ma.end());
        std::sort(mb.begin(), mb.end());
        EXPECT_EQ(ma, mb);
        for (std::size_t k = 1; k <= n; ++k) {
            const auto pa = mst_cut_partition(a, k).labels;
            const auto pb = mst_cut_partition(b, k).labels;
            std::vector<int> pb_original(n);
            for (std::size_t i = 0; i < n; ++i) pb_original[perm[i]] = pb[i];
            EXPECT_EQ(oracle::as_partition(pa), oracle::as_partition(relabel_contiguous(std::span<const int>(pb_original))));
        }
    }
}

TEST(Ivat, TriangleBruteForce) {
    Matrix m(3, 3);
    m(0, 1) = m(1, 0) = 10;
    m(0, 2) = m(2, 0) = 1;
    m(1, 2) = m(2, 1) = 9;
    const auto d = as_dissimilarity(m);
    const auto r = ivat_transform(d, vat_reorder(d));
    // Map back to original indices.
    Matrix back(3, 3);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) back(r.ordering.order[i], r.ordering.order[j]) = r.values(i, j);
    }
    EXPECT_EQ(back(0, 1), 9.0);
    EXPECT_EQ(back(0, 2), 1.0);
    EXPECT_EQ(back(1, 2), 9.0);
    EXPECT_EQ(back, oracle::brute_force_minimax(m));
}

TEST(Ivat, TwoObjectsUnchanged) {
    const auto d = as_dissimilarity(Matrix(2, 2, std::vector<double>{0, 4, 4, 0}));
    EXPECT_EQ(ivat_transform(d, vat_reorder(d)).values, d.values);
}

TEST(Ivat, MatchesMstPathOracle) {
    SplitMix64 rng(24);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.below(63);
        const auto d = random_distinct(n, rng);
        const auto r = ivat_transform(d, vat_reorder(d));
        const auto oracle_values = oracle::mst_path_max(d.values);
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                ASSERT_EQ(r.values(a, b), oracle_values(r.ordering.order[a], r.ordering.order[b]));
            }
        }
    }
}

TEST(Ivat, Ultrametric) {
    SplitMix64 rng(25);
    Matrix x(40, 3);
    for (double& v : x.values()) v = rng.normal();
    const auto d = pairwise_dissimilarity(x, Metric::euclidean);
    const auto r = ivat_transform(d, vat_reorder(d)).values;
    for (std::size_t i = 0; i < 40; ++i) {
        for (std::size_t j = 0; j < 40; ++j) {
            for (std::size_t k = 0; k < 40; ++k) ASSERT_LE(r(i, k), std::max(r(i, j), r(j, k)));
        }
    }
}

TEST(Ivat, SizeMismatch) {
    const auto d = line_points({0, 1, 2});
    const auto o = vat_reorder(line_points({0, 1}));
    EXPECT_THROW(ivat_transform(d, o), Error);
}

TEST(VatMatrix, IsPermutedInput) {
    const auto d = line_points({0, 10, 1});
    const auto r = vat_matrix(d, vat_reorder(d));
    EXPECT_EQ(r.transformed, Transform::vat);
    EXPECT_EQ(r.values(1, 2), d(2, 1));
    EXPECT_EQ(r.values(0, 2), d(0, 1));
}

TEST(MstCut, ContinuesHandTrace) {
    const auto o = vat_reorder(line_points({0, 10, 1}));
    const auto est = mst_cut_partition(o, 2);
    EXPECT_EQ(est.cut_positions, (std::vector<std::size_t>{2}));
    EXPECT_EQ(est.labels, (Labels{0, 1, 0}));
}

TEST(MstCut, ExtremeK) {
    const auto o = vat_reorder(line_points({0, 10, 1, 4}));
    EXPECT_EQ(mst_cut_partition(o, 1).labels, Labels(4, 0));
    const auto all = mst_cut_partition(o, 4).labels;
    EXPECT_EQ(oracle::as_partition(all).size(), 4u);
    EXPECT_THROW(mst_cut_partition(o, 0), Error);
    EXPECT_THROW(mst_cut_partition(o, 5), Error);
}

TEST(MstCut, SingleLinkageEquivalence) {
    SplitMix64 rng(26);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.below(9);
        const auto d = random_distinct(n, rng);
        const auto o = vat_reorder(d);
        for (std::size_t k = 1; k <= n; ++k) {
            const auto est = mst_cut_partition(o, k);
            EXPECT_EQ(oracle::as_partition(est.labels), oracle::single_linkage(d.values, k));
        }
    }
}

TEST(MstCut, BlocksContiguousEvenWithTies) {
    // Integer distances on a line produce many equal connect magnitudes.
    SplitMix64 rng(27);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 3 + rng.below(15);
        std::vector<double> coords(n);
        for (auto& c : coords) c = static_cast<double>(rng.below(6));
        const auto o = vat_reorder(line_points(coords));
        for (std::size_t k = 1; k <= n; ++k) {
            const auto est = mst_cut_partition(o, k);
            for (std::size_t t = 1; t < n; ++t) ASSERT_LE(est.labels[o.order[t - 1]], est.labels[o.order[t]]);
            ASSERT_EQ(static_cast<std::size_t>(est.labels[o.order[n - 1]]) + 1, k);
            // Labels equal tree components after removing the cut edges.
            std::vector<std::size_t> comp(n);
            for (std::size_t t = 0; t < n; ++t) {
                const bool cut = std::binary_search(est.cut_positions.begin(), est.cut_positions.end(), t);
                comp[t] = (t == 0 || cut) ? t : comp[o.connect_parent[t]];
            }
            for (std::size_t t = 1; t < n; ++t) {
                ASSERT_EQ(comp[t] == comp[t - 1], est.labels[o.order[t]] == est.labels[o.order[t - 1]]);
            }
        }
    }
}

TEST(EstimateK, LargestGap) {
    VatOrdering o{{0, 1, 2, 3, 4}, {0, 1, 1, 9, 1}, {0, 0, 1, 2, 3}};
    EXPECT_EQ(estimate_k(o), 2u);
}

TEST(EstimateK, AllEqualGivesOne) {
    VatOrdering o{{0, 1, 2, 3}, {0, 2, 2, 2}, {0, 0, 1, 2}};
    EXPECT_EQ(estimate_k(o), 1u);
    VatOrdering two{{0, 1}, {0, 5}, {0, 0}};
    EXPECT_EQ(estimate_k(two), 1u);
}

TEST(EstimateK, CappedByKmax) {
    // Sorted 10, 9, 8, 1: the 8 -> 1 gap would give k = 4, but kmax = 3
    // leaves only the first two gaps.
    VatOrdering o{{0, 1, 2, 3, 4}, {0, 10, 9, 8, 1}, {0, 0, 1, 2, 3}};
    EXPECT_EQ(estimate_k(o, 15), 4u);
    EXPECT_EQ(estimate_k(o, 3), 2u);
}

TEST(EstimateK, Errors) {
    VatOrdering one{{0}, {0}, {0}};
    EXPECT_THROW(estimate_k(one), Error);
    VatOrdering o{{0, 1, 2}, {0, 1, 2}, {0, 0, 1}};
    EXPECT_THROW(estimate_k(o, 1), Error);
}

TEST(EstimateK, ThreeGaussians) {
    const auto set = generate_gaussian_mixture({3, 100, 334, 20.0, 7});
    const auto d = pairwise_dissimilarity(set.data, Metric::euclidean);
    EXPECT_EQ(estimate_k(vat_reorder(d)), 3u);
}

TEST(Ordering, FileRoundTrip) {
    SplitMix64 rng(28);
    const auto d = random_distinct(12, rng);
    const auto o = vat_reorder(d);
    const auto path = std::filesystem::temp_directory_path() / "deepvat_ordering.txt";
    save_ordering(path, o);
    EXPECT_EQ(load_ordering(path), o);
}
