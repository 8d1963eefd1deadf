#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "deepvat/data_io.hpp"
#include "deepvat/tsne.hpp"
#include "oracles.hpp"

using namespace deepvat;

namespace {

/// Central differences of KL(P || Q(y)) with step h.
Matrix finite_difference_gradient(const Matrix& p, Matrix y, double h) {
    Matrix g(y.rows(), y.cols());
    for (std::size_t i = 0; i < y.rows(); ++i) {
        for (std::size_t k = 0; k < y.cols(); ++k) {
            const double orig = y(i, k);
            y(i, k) = orig + h;
            const double up = kl_divergence(p, y);
            y(i, k) = orig - h;
            const double down = kl_divergence(p, y);
            y(i, k) = orig;
            g(i, k) = (up - down) / (2.0 * h);
        }
    }
    return g;
}

}  // namespace

TEST(Tsne, RejectsInfeasiblePerplexity) {
    SplitMix64 rng(1);
    TsneConfig config;
    EXPECT_THROW(run_tsne(oracle::random_points(2, 3, rng), config), Error);
    config.perplexity = 5.0;
    EXPECT_THROW(run_tsne(oracle::random_points(12, 3, rng), config), Error);  // needs < 11/3
    config.perplexity = 3.0;
    config.iterations = 0;
    EXPECT_THROW(run_tsne(oracle::random_points(12, 3, rng), config), Error);
}

TEST(Tsne, EquidistantRowIsUniform) {
    const std::vector<double> row{0, 4, 4, 4, 4, 4};
    const auto c = conditional_probabilities(row, 0, 5.0);
    EXPECT_EQ(c.p[0], 0.0);
    for (std::size_t j = 1; j < row.size(); ++j) EXPECT_NEAR(c.p[j], 0.2, 1e-15);
    EXPECT_NEAR(c.perplexity, 5.0, 1e-12);
}

TEST(Tsne, BandwidthSearchHitsPerplexity) {
    SplitMix64 rng(2);
    const auto x = oracle::random_points(200, 10, rng);
    for (double target : {5.0, 30.0, 50.0}) {
        const auto aff = joint_probabilities(x, target);
        for (double perp : aff.row_perplexity) ASSERT_NEAR(perp, target, 1e-3);
    }
}

TEST(Tsne, BandwidthSearchSurvivesLargeScales) {
    SplitMix64 rng(3);
    const auto x = oracle::random_points(80, 5, rng, 1e4);
    const auto aff = joint_probabilities(x, 20.0);
    for (double perp : aff.row_perplexity) ASSERT_NEAR(perp, 20.0, 1e-3);
}

TEST(Tsne, JointProbabilitiesAreSymmetricAndNormalised) {
    SplitMix64 rng(4);
    const auto x = oracle::random_points(120, 6, rng);
    const auto p = joint_probabilities(x, 25.0).p;
    double total = 0.0;
    for (std::size_t i = 0; i < p.rows(); ++i) {
        EXPECT_EQ(p(i, i), 0.0);
        for (std::size_t j = 0; j < p.cols(); ++j) {
            EXPECT_EQ(p(i, j), p(j, i));
            EXPECT_GE(p(i, j), 0.0);
            total += p(i, j);
        }
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(Tsne, GradientMatchesFiniteDifferences) {
    SplitMix64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        const auto x = oracle::random_points(50, 8, rng);
        const auto p = joint_probabilities(x, 10.0).p;
        const auto y = oracle::random_points(50, 2, rng);
        const auto analytic = kl_gradient(p, y);
        const auto numeric = finite_difference_gradient(p, y, 1e-6);
        double diff = 0.0, norm = 0.0;
        for (std::size_t k = 0; k < analytic.values().size(); ++k) {
            diff += std::pow(analytic.values()[k] - numeric.values()[k], 2);
            norm += std::pow(analytic.values()[k], 2);
        }
        EXPECT_LE(std::sqrt(diff / norm), 1e-4);
    }
}

TEST(Tsne, KlDecreasesAndRunIsDeterministic) {
    SplitMix64 rng(6);
    const auto x = oracle::random_points(60, 5, rng);
    TsneConfig config;
    config.perplexity = 10.0;
    config.iterations = 400;
    config.seed = 42;
    const auto a = run_tsne(x, config);
    EXPECT_LE(a.kl_final, a.kl_initial);
    const auto b = run_tsne(x, config);
    EXPECT_EQ(a.embedding, b.embedding);
    EXPECT_EQ(a.embedding.cols(), 2u);
}

TEST(Tsne, SeparatesGaussianClusters) {
    const auto set = generate_gaussian_mixture({3, 100, 100, 20.0, 7});
    TsneConfig config;
    config.seed = 1;
    const auto y = run_tsne(set.data, config).embedding;
    const auto d = squared_distances(y);
    std::size_t good = 0;
    const std::size_t n = y.rows();
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> idx;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) idx.push_back(j);
        }
        std::partial_sort(idx.begin(), idx.begin() + 5, idx.end(),
                          [&](std::size_t a, std::size_t b) { return d(i, a) < d(i, b); });
        bool all_same = true;
        for (int k = 0; k < 5; ++k) all_same &= (*set.labels)[idx[k]] == (*set.labels)[i];
        good += all_same;
    }
    EXPECT_GE(static_cast<double>(good) / static_cast<double>(n), 0.99);
}
