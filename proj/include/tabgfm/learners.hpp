#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tabgfm/error.hpp"
#include "tabgfm/graph.hpp"

namespace tabgfm {

// One in-context prediction request: labeled context rows + query rows.
struct LearnerTask {
    const Matrix& context;
    const std::vector<int>& labels;
    int num_classes;
    const Matrix& queries;
    std::uint64_t seed = 0;
    std::string request_id;
};

/// fit_predict returns |queries| x num_classes row-stochastic probabilities,
/// deterministic for fixed task and seed.
class TabularLearner {
public:
    virtual ~TabularLearner() = default;
    virtual std::string backend() const = 0;
    virtual Matrix fit_predict(const LearnerTask& task) = 0;
};

inline void check_task(const LearnerTask& t) {
    if (t.context.rows() != static_cast<Eigen::Index>(t.labels.size()))
        throw DimensionError("learner: context rows and labels differ");
    if (t.context.rows() < 1) throw DimensionError("learner: empty context");
    if (t.queries.cols() != t.context.cols()) throw DimensionError("learner: query and context widths differ");
    if (!t.context.allFinite() || !t.queries.allFinite()) throw NumericalError("learner: non-finite inputs");
    for (int y : t.labels)
        if (y < 0 || y >= t.num_classes) throw DimensionError("learner: label out of range");
}

/// Z-scoring with context statistics; zero-variance columns are dropped.
class Standardizer {
public:
    explicit Standardizer(const Matrix& context) {
        const auto n = static_cast<double>(context.rows());
        for (Eigen::Index c = 0; c < context.cols(); ++c) {
            double sum = 0.0;
            for (Eigen::Index r = 0; r < context.rows(); ++r) sum += context(r, c);
            const double mean = sum / n;
            double ss = 0.0;
            for (Eigen::Index r = 0; r < context.rows(); ++r) {
                const double d = context(r, c) - mean;
                ss += d * d;
            }
            const double sd = std::sqrt(ss / n);
            if (sd > 1e-12 * std::max(1.0, std::abs(mean))) {
                kept_.push_back(c);
                mean_.push_back(mean);
                sd_.push_back(sd);
            }
        }
    }

    Matrix transform(const Matrix& x) const {
        Matrix out(x.rows(), static_cast<Eigen::Index>(kept_.size()));
        for (std::size_t k = 0; k < kept_.size(); ++k)
            for (Eigen::Index r = 0; r < x.rows(); ++r)
                out(r, static_cast<Eigen::Index>(k)) = (x(r, kept_[k]) - mean_[k]) / sd_[k];
        return out;
    }

    std::size_t kept() const noexcept { return kept_.size(); }

private:
    std::vector<Eigen::Index> kept_;
    std::vector<double> mean_;
    std::vector<double> sd_;
};

inline Matrix softmax_rows(const Matrix& logits) {
    Matrix p(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const double m = logits.row(r).maxCoeff();
        double s = 0.0;
        for (Eigen::Index c = 0; c < logits.cols(); ++c) {
            p(r, c) = std::exp(logits(r, c) - m);
            s += p(r, c);
        }
        p.row(r) /= s;
    }
    return p;
}

struct LogRegParams {
    Matrix weights; // D x C
    Vector bias;    // C
};

struct LogRegLossGrad {
    double loss = 0.0;
    LogRegParams grad;
};

/// Mean cross-entropy plus (l2 / 2) * ||W||^2 (bias unpenalized), and its gradient.
inline LogRegLossGrad logreg_loss_and_gradient(const Matrix& x, const std::vector<int>& labels,
                                               const LogRegParams& params, double l2) {
    const auto n = static_cast<double>(x.rows());
    Matrix logits = x * params.weights;
    logits.rowwise() += params.bias.transpose();
    const Matrix p = softmax_rows(logits);

    LogRegLossGrad out;
    double nll = 0.0;
    Matrix residual = p;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const int y = labels[static_cast<std::size_t>(r)];
        const double m = logits.row(r).maxCoeff();
        const double lse = m + std::log((logits.row(r).array() - m).exp().sum());
        nll += lse - logits(r, y);
        residual(r, y) -= 1.0;
    }
    out.loss = nll / n + 0.5 * l2 * params.weights.squaredNorm();
    out.grad.weights = x.transpose() * residual / n + l2 * params.weights;
    out.grad.bias = residual.colwise().sum().transpose() / n;
    return out;
}

struct LogRegOptions {
    double l2 = 1e-2;
    int iterations = 500;
    double step = 0.1;
};

/// Multinomial logistic regression, full-batch gradient descent.
class LogRegLearner final : public TabularLearner {
public:
    explicit LogRegLearner(LogRegOptions opt = {}) : opt_(opt) {}

    std::string backend() const override { return "native-logreg"; }

    Matrix fit_predict(const LearnerTask& task) override {
        check_task(task);
        const int c = task.num_classes;
        const int first = task.labels.front();
        if (std::all_of(task.labels.begin(), task.labels.end(), [&](int y) { return y == first; })) {
            Matrix p = Matrix::Zero(task.queries.rows(), c);
            p.col(first).setOnes();
            return p;
        }
        const Standardizer scaler(task.context);
        const Matrix x = scaler.transform(task.context);
        LogRegParams params{Matrix::Zero(x.cols(), c), Vector::Zero(c)};
        for (int it = 0; it < opt_.iterations; ++it) {
            const auto lg = logreg_loss_and_gradient(x, task.labels, params, opt_.l2);
            params.weights -= opt_.step * lg.grad.weights;
            params.bias -= opt_.step * lg.grad.bias;
        }
        Matrix logits = scaler.transform(task.queries) * params.weights;
        logits.rowwise() += params.bias.transpose();
        return softmax_rows(logits);
    }

private:
    LogRegOptions opt_;
};

/// Inverse-distance weighted k nearest neighbors on z-scored columns. Exact
/// matches among the neighbors take all the weight.
class KnnLearner final : public TabularLearner {
public:
    explicit KnnLearner(int k = 10) : k_(k) {}

    std::string backend() const override { return "native-knn"; }

    Matrix fit_predict(const LearnerTask& task) override {
        check_task(task);
        const Standardizer scaler(task.context);
        const Matrix ctx = scaler.transform(task.context);
        const Matrix qry = scaler.transform(task.queries);
        const auto n = static_cast<std::size_t>(ctx.rows());
        const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max(k_, 1)), n);
        Matrix out = Matrix::Zero(qry.rows(), task.num_classes);

        std::vector<std::pair<double, std::size_t>> dist(n);
        for (Eigen::Index q = 0; q < qry.rows(); ++q) {
            for (std::size_t i = 0; i < n; ++i) {
                double s = 0.0;
                for (Eigen::Index d = 0; d < ctx.cols(); ++d) {
                    const double diff = qry(q, d) - ctx(static_cast<Eigen::Index>(i), d);
                    s += diff * diff;
                }
                dist[i] = {std::sqrt(s), i};
            }
            std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
            bool exact = dist.front().first == 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                const auto [d, i] = dist[j];
                if (exact && d != 0.0) break;
                const double w = exact ? 1.0 : 1.0 / d;
                out(q, task.labels[i]) += w;
            }
            double total = 0.0;
            for (Eigen::Index c = 0; c < out.cols(); ++c) total += out(q, c);
            for (Eigen::Index c = 0; c < out.cols(); ++c) out(q, c) /= total;
        }
        return out;
    }

private:
    int k_;
};

} // namespace tabgfm
