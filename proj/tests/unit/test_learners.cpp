#include <gtest/gtest.h>

#include "tabgfm/learners.hpp"
#include "tabgfm/oracles.hpp"
#include "tabgfm/predictor.hpp"
#include "tabgfm/rng.hpp"

using namespace tabgfm;

namespace {

Matrix gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal() * scale;
    return m;
}

} // namespace

TEST(LogReg, GradientMatchesFiniteDifferences) {
    Rng rng(101);
    for (int t = 0; t < 20; ++t) {
        const auto n = static_cast<Eigen::Index>(3 + rng.uniform_index(20));
        const auto d = static_cast<Eigen::Index>(1 + rng.uniform_index(6));
        const int c = 2 + static_cast<int>(rng.uniform_index(4));
        const Matrix x = gaussian(rng, n, d);
        std::vector<int> labels;
        for (Eigen::Index i = 0; i < n; ++i) labels.push_back(static_cast<int>(rng.uniform_index(c)));
        LogRegParams p{gaussian(rng, d, c, 0.5), gaussian(rng, c, 1, 0.5).col(0)};
        const double l2 = 1e-2;
        const auto lg = logreg_loss_and_gradient(x, labels, p, l2);
        const double h = 1e-5;
        double worst = 0.0;
        for (Eigen::Index i = 0; i < p.weights.size(); ++i) {
            LogRegParams plus = p, minus = p;
            plus.weights.data()[i] += h;
            minus.weights.data()[i] -= h;
            const double fd = (logreg_loss_and_gradient(x, labels, plus, l2).loss -
                               logreg_loss_and_gradient(x, labels, minus, l2).loss) /
                              (2 * h);
            worst = std::max(worst, std::abs(fd - lg.grad.weights.data()[i]));
        }
        for (Eigen::Index i = 0; i < p.bias.size(); ++i) {
            LogRegParams plus = p, minus = p;
            plus.bias(i) += h;
            minus.bias(i) -= h;
            const double fd = (logreg_loss_and_gradient(x, labels, plus, l2).loss -
                               logreg_loss_and_gradient(x, labels, minus, l2).loss) /
                              (2 * h);
            worst = std::max(worst, std::abs(fd - lg.grad.bias(i)));
        }
        EXPECT_LE(worst, 1e-5) << "instance " << t;
    }
}

TEST(LogReg, SeparableBlobsArePerfect) {
    Rng rng(102);
    const Eigen::Index per = 25;
    Matrix ctx(2 * per, 3), qry(50, 3);
    std::vector<int> labels, truth;
    for (Eigen::Index i = 0; i < 2 * per; ++i) {
        const int y = i < per ? 0 : 1;
        for (Eigen::Index d = 0; d < 3; ++d) ctx(i, d) = rng.normal() + (d == 0 ? (y ? 3.0 : -3.0) : 0.0);
        labels.push_back(y);
    }
    for (Eigen::Index i = 0; i < 50; ++i) {
        const int y = static_cast<int>(i % 2);
        for (Eigen::Index d = 0; d < 3; ++d) qry(i, d) = rng.normal() * 0.5 + (d == 0 ? (y ? 3.0 : -3.0) : 0.0);
        truth.push_back(y);
    }
    LogRegLearner lr;
    const Matrix p = lr.fit_predict({ctx, labels, 2, qry, 0, ""});
    EXPECT_TRUE(rows_stochastic(p, 1e-12));
    for (Eigen::Index i = 0; i < 50; ++i) {
        Eigen::Index best;
        p.row(i).maxCoeff(&best);
        EXPECT_EQ(best, truth[static_cast<std::size_t>(i)]);
    }
}

TEST(LogReg, SingleClassContext) {
    Rng rng(103);
    LogRegLearner lr;
    const Matrix p = lr.fit_predict({gaussian(rng, 5, 2), {2, 2, 2, 2, 2}, 4, gaussian(rng, 3, 2), 0, ""});
    for (Eigen::Index r = 0; r < 3; ++r) {
        EXPECT_EQ(p(r, 2), 1.0);
        EXPECT_EQ(p.row(r).sum(), 1.0);
    }
}

TEST(LogReg, ConstantColumnsAreIgnored) {
    Rng rng(104);
    Matrix ctx = gaussian(rng, 20, 2);
    ctx.col(1).setConstant(7.0);
    std::vector<int> labels;
    for (int i = 0; i < 20; ++i) labels.push_back(ctx(i, 0) > 0 ? 1 : 0);
    LogRegLearner lr;
    const Matrix p = lr.fit_predict({ctx, labels, 2, gaussian(rng, 4, 2), 0, ""});
    EXPECT_TRUE(p.allFinite());
    EXPECT_TRUE(rows_stochastic(p, 1e-12));
}

TEST(LearnerTask, RejectsBadInput) {
    LogRegLearner lr;
    Matrix ctx = Matrix::Ones(2, 2);
    ctx(0, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(lr.fit_predict({ctx, {0, 1}, 2, Matrix::Ones(1, 2), 0, ""}), Error);
    EXPECT_THROW(lr.fit_predict({Matrix::Ones(2, 2), {0, 3}, 2, Matrix::Ones(1, 2), 0, ""}), DimensionError);
    EXPECT_THROW(lr.fit_predict({Matrix::Ones(2, 2), {0, 1}, 2, Matrix::Ones(1, 3), 0, ""}), DimensionError);
}

TEST(Knn, ExactMatchTakesAllWeight) {
    Rng rng(111);
    const Matrix ctx = gaussian(rng, 15, 3);
    std::vector<int> labels;
    for (int i = 0; i < 15; ++i) labels.push_back(i % 3);
    KnnLearner knn;
    const Matrix p = knn.fit_predict({ctx, labels, 3, ctx.row(4), 0, ""});
    EXPECT_EQ(p(0, labels[4]), 1.0);
}

TEST(Knn, SingleContextRowIsNearestLabel) {
    KnnLearner knn;
    Matrix ctx(1, 2);
    ctx << 1, 2;
    const Matrix p = knn.fit_predict({ctx, {1}, 3, Matrix::Zero(4, 2), 0, ""});
    for (Eigen::Index r = 0; r < 4; ++r) EXPECT_EQ(p(r, 1), 1.0);
}

TEST(Knn, MatchesBruteForceExactly) {
    Rng rng(112);
    KnnLearner knn;
    for (int t = 0; t < 50; ++t) {
        const auto n = static_cast<Eigen::Index>(1 + rng.uniform_index(40));
        const auto d = static_cast<Eigen::Index>(1 + rng.uniform_index(5));
        Matrix ctx(n, d), qry(8, d);
        std::vector<int> labels;
        for (Eigen::Index i = 0; i < n; ++i) {
            const int y = static_cast<int>(rng.uniform_index(2));
            labels.push_back(y);
            for (Eigen::Index j = 0; j < d; ++j) ctx(i, j) = rng.normal() + (y ? 2.5 : -2.5);
        }
        for (Eigen::Index i = 0; i < qry.size(); ++i) qry.data()[i] = rng.normal() * 3.0;
        if (t % 5 == 0) qry.row(0) = ctx.row(0); // exercise the exact-match rule
        const Matrix got = knn.fit_predict({ctx, labels, 2, qry, 0, ""});
        const auto want = oracle::knn_probabilities(oracle::to_dense(ctx), labels, 2, oracle::to_dense(qry), 10);
        for (Eigen::Index r = 0; r < got.rows(); ++r)
            for (Eigen::Index c = 0; c < 2; ++c) EXPECT_EQ(got(r, c), want[r][c]) << "fixture " << t;
    }
}

TEST(Standardizer, DropsZeroVarianceColumns) {
    Matrix ctx(3, 3);
    ctx << 1, 5, 2, 2, 5, 4, 3, 5, 6;
    const Standardizer s(ctx);
    EXPECT_EQ(s.kept(), 2u);
    const Matrix z = s.transform(ctx);
    EXPECT_NEAR(z.col(0).mean(), 0.0, 1e-15);
    EXPECT_NEAR(z.col(0).squaredNorm() / 3.0, 1.0, 1e-12);
}
