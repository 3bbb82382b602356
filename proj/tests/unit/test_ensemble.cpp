#include <gtest/gtest.h>

#include "tabgfm/ensemble.hpp"

using namespace tabgfm;

namespace {

Matrix random_probs(Rng& rng, Eigen::Index rows, int cols) {
    Matrix p(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) p(r, c) = rng.uniform01() + 1e-3;
        p.row(r) /= p.row(r).sum();
    }
    return p;
}

Matrix one_hot(const std::vector<int>& labels, int cols) {
    Matrix p = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), cols);
    for (std::size_t r = 0; r < labels.size(); ++r) p(static_cast<Eigen::Index>(r), labels[r]) = 1.0;
    return p;
}

PredictorPool random_pool(Rng& rng, std::size_t members, Eigen::Index rows, int classes) {
    PredictorPool pool;
    pool.num_classes = classes;
    for (Eigen::Index r = 0; r < rows; ++r) pool.holdout_labels.push_back(static_cast<int>(rng.uniform_index(classes)));
    for (std::size_t i = 0; i < members; ++i)
        pool.predictors.push_back({"p" + std::to_string(i), PredictorKind::tfm, "test", random_probs(rng, rows, classes),
                                   random_probs(rng, 5, classes), {}});
    return pool;
}

Matrix weighted_holdout(const PredictorPool& pool, const std::vector<double>& w) {
    Matrix m = Matrix::Zero(pool.predictors[0].holdout_probs.rows(), pool.num_classes);
    for (std::size_t i = 0; i < pool.size(); ++i) m += w[i] * pool.predictors[i].holdout_probs;
    return m;
}

} // namespace

TEST(Accuracy, TiesGoToLowestClass) {
    Matrix p(2, 3);
    p << 0.4, 0.4, 0.2, 0.2, 0.4, 0.4;
    EXPECT_DOUBLE_EQ(accuracy(p, {0, 1}), 1.0);
    EXPECT_DOUBLE_EQ(accuracy(p, {1, 2}), 0.0);
    EXPECT_THROW(accuracy(p, {0}), DimensionError);
}

TEST(GreedySelect, SinglePredictorGetsAllWeight) {
    Rng rng(201);
    const auto pool = random_pool(rng, 1, 20, 3);
    const auto w = greedy_select(pool, 50, 0);
    ASSERT_EQ(w.weights.size(), 1u);
    EXPECT_EQ(w.weights[0], 1.0);
}

TEST(GreedySelect, PerfectBeatsWrong) {
    PredictorPool pool;
    pool.num_classes = 2;
    pool.holdout_labels = {0, 1, 1, 0, 1};
    std::vector<int> flipped;
    for (int y : pool.holdout_labels) flipped.push_back(1 - y);
    pool.predictors.push_back({"wrong", PredictorKind::tfm, "", one_hot(flipped, 2), Matrix::Zero(1, 2), {}});
    pool.predictors.push_back({"right", PredictorKind::tfm, "", one_hot(pool.holdout_labels, 2), Matrix::Zero(1, 2), {}});
    const auto w = greedy_select(pool);
    EXPECT_EQ(w.weights[0], 0.0);
    EXPECT_EQ(w.weights[1], 1.0);
    EXPECT_EQ(w.stop_length, 1u);
}

TEST(GreedySelect, NeverWorseThanBestSingleOnHoldout) {
    Rng rng(202);
    for (int t = 0; t < 200; ++t) {
        const auto pool = random_pool(rng, 2 + rng.uniform_index(10), 10 + static_cast<Eigen::Index>(rng.uniform_index(40)),
                                      2 + static_cast<int>(rng.uniform_index(4)));
        double best_single = 0.0;
        for (const auto& p : pool.predictors) best_single = std::max(best_single, accuracy(p.holdout_probs, pool.holdout_labels));
        const auto w = greedy_select(pool, 50, static_cast<std::uint64_t>(t));
        EXPECT_GE(accuracy(weighted_holdout(pool, w.weights), pool.holdout_labels), best_single) << "pool " << t;
    }
}

TEST(GreedySelect, PrefixIsShortestMaximum) {
    Rng rng(203);
    for (int t = 0; t < 50; ++t) {
        const auto pool = random_pool(rng, 6, 25, 3);
        const auto w = greedy_select(pool, 30, 7);
        ASSERT_EQ(w.scores.size(), 30u);
        const double top = *std::max_element(w.scores.begin(), w.scores.end());
        EXPECT_EQ(w.scores[w.stop_length - 1], top);
        for (std::size_t i = 0; i + 1 < w.stop_length; ++i) EXPECT_LT(w.scores[i], top);
        double sum = 0.0;
        for (double x : w.weights) {
            const double count = x * static_cast<double>(w.stop_length);
            EXPECT_NEAR(count, std::round(count), 1e-12);
            sum += x;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
        // the recorded score is the accuracy of the returned weights
        EXPECT_EQ(accuracy(weighted_holdout(pool, w.weights), pool.holdout_labels), top);
    }
}

TEST(GreedySelect, DeterministicForSeed) {
    Rng rng(204);
    PredictorPool pool = random_pool(rng, 8, 30, 2);
    // duplicates force ties so the tie-break generator is exercised
    pool.predictors.push_back(pool.predictors[0]);
    pool.predictors.push_back(pool.predictors[0]);
    const auto a = greedy_select(pool, 40, 99);
    const auto b = greedy_select(pool, 40, 99);
    EXPECT_EQ(a.chosen, b.chosen);
    EXPECT_EQ(a.weights, b.weights);
}

TEST(GreedySelect, Rejects) {
    PredictorPool empty;
    EXPECT_THROW(greedy_select(empty), Error);
    Rng rng(205);
    EXPECT_THROW(greedy_select(random_pool(rng, 2, 4, 2), 0), ConfigError);
}

TEST(Combine, WeightsSelectMembers) {
    Rng rng(206);
    const auto pool = random_pool(rng, 2, 6, 3);
    EXPECT_EQ(combine({1.0, 0.0}, pool), pool.predictors[0].query_probs);
    PredictorPool same = pool;
    same.predictors[1] = same.predictors[0];
    EXPECT_LE((combine({0.5, 0.5}, same) - pool.predictors[0].query_probs).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_THROW(combine({1.0}, pool), DimensionError);
}

TEST(Uniform, EqualWeights) {
    Rng rng(207);
    const auto w = uniform_weights(random_pool(rng, 4, 3, 2));
    for (double x : w.weights) EXPECT_EQ(x, 0.25);
    EXPECT_THROW(uniform_weights(PredictorPool{}), Error);
}

TEST(PredictorPool, ValidateShapes) {
    Rng rng(208);
    auto pool = random_pool(rng, 2, 4, 2);
    EXPECT_NO_THROW(pool.validate());
    pool.predictors[1].holdout_probs(0, 0) += 0.5;
    EXPECT_THROW(pool.validate(), NumericalError);
    pool.predictors[1].holdout_probs = Matrix::Constant(3, 2, 0.5);
    EXPECT_THROW(pool.validate(), DimensionError);
}
