#include <gtest/gtest.h>

#include "deepvat/evaluation.hpp"
#include "oracles.hpp"

using namespace deepvat;

TEST(PartitionAccuracy, Examples) {
    EXPECT_DOUBLE_EQ(partition_accuracy({0, 1, 2, 1}, {0, 1, 2, 1}), 100.0);
    EXPECT_DOUBLE_EQ(partition_accuracy({0, 0, 1, 1}, {1, 1, 0, 0}), 100.0);
    EXPECT_DOUBLE_EQ(partition_accuracy({0, 0, 1, 2}, {0, 0, 1, 1}), 75.0);
}

TEST(PartitionAccuracy, Errors) {
    EXPECT_THROW(partition_accuracy({0, 1}, {0}), Error);
    EXPECT_THROW(partition_accuracy({}, {}), Error);
}

TEST(PartitionAccuracy, SingleClusterLowerBound) {
    SplitMix64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 5 + rng.below(50);
        Labels truth(n);
        for (auto& t : truth) t = static_cast<int>(rng.below(4));
        std::vector<int> counts(4, 0);
        for (auto t : truth) ++counts[t];
        const double largest = *std::max_element(counts.begin(), counts.end());
        EXPECT_GE(partition_accuracy(Labels(n, 0), truth), 100.0 * largest / n - 1e-12);
    }
}

TEST(Hungarian, MatchesBruteForce) {
    SplitMix64 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t rows = 1 + rng.below(6), cols = 1 + rng.below(6);
        std::vector<std::vector<std::int64_t>> w(rows, std::vector<std::int64_t>(cols));
        for (auto& row : w) {
            for (auto& v : row) v = static_cast<std::int64_t>(rng.below(30));
        }
        const auto best = max_weight_assignment(w);
        EXPECT_EQ(best.weight, oracle::brute_force_assignment(w));
        // The assignment is a permutation of the padded square.
        auto cols_used = best.row_to_col;
        std::sort(cols_used.begin(), cols_used.end());
        for (std::size_t k = 0; k < cols_used.size(); ++k) EXPECT_EQ(cols_used[k], k);
    }
}

TEST(Nmi, Examples) {
    EXPECT_DOUBLE_EQ(nmi({0, 0, 1, 1, 2}, {0, 0, 1, 1, 2}), 1.0);
    EXPECT_NEAR(nmi({0, 0, 1, 1}, {0, 1, 0, 1}), 0.0, 1e-15);
    // 2 I / (H(U) + H(V)) for counts {(0,0):2, (1,0):1, (1,1):1}, evaluated
    // at 40 digits.
    EXPECT_NEAR(nmi({0, 0, 1, 1}, {0, 0, 0, 1}), 0.34371101848545083159, 1e-9);
}

TEST(Nmi, DegenerateEntropies) {
    EXPECT_EQ(nmi({0, 0, 0}, {0, 0, 0}), 1.0);
    EXPECT_EQ(nmi({0, 0, 0}, {0, 1, 1}), 0.0);
    EXPECT_EQ(nmi({0, 1, 1}, {2, 2, 2}), 0.0);
}

TEST(Metrics, PermutationInvarianceAndSymmetry) {
    SplitMix64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 10 + rng.below(40);
        Labels a(n), b(n);
        for (auto& v : a) v = static_cast<int>(rng.below(4));
        for (auto& v : b) v = static_cast<int>(rng.below(3));
        std::vector<int> perm_a{3, 0, 2, 1}, perm_b{2, 0, 1};
        Labels pa(n), pb(n);
        for (std::size_t i = 0; i < n; ++i) {
            pa[i] = perm_a[a[i]];
            pb[i] = perm_b[b[i]];
        }
        EXPECT_DOUBLE_EQ(partition_accuracy(a, b), partition_accuracy(pa, pb));
        EXPECT_NEAR(nmi(a, b), nmi(pa, pb), 1e-12);
        EXPECT_NEAR(nmi(a, b), nmi(b, a), 1e-12);
        const double v = nmi(a, b);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(Contingency, CountsAndTotals) {
    const auto t = contingency({0, 0, 1, 2}, {0, 0, 1, 1});
    EXPECT_EQ(t.k_pred(), 3u);
    EXPECT_EQ(t.k_true(), 2u);
    EXPECT_EQ(t.counts[0][0], 2);
    EXPECT_EQ(t.counts[2][1], 1);
    EXPECT_EQ(t.n_total, 4);
}
