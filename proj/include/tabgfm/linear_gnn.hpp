#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "tabgfm/encoders.hpp"
#include "tabgfm/error.hpp"
#include "tabgfm/folds.hpp"
#include "tabgfm/graph.hpp"
#include "tabgfm/node_table.hpp"
#include "tabgfm/predictor.hpp"

namespace tabgfm {

struct RidgeOptions {
    std::optional<double> lambda; // default: 1e-2 * mean diagonal of Z~^T Z~
    bool fit_bias = true;
};

// Closed-form least-squares classifier on one encoding.
struct RidgeClassifier {
    Matrix weights; // (D [+1]) x C, bias last
    double lambda = 0.0;
    std::string block_name;
    bool has_bias = true;

    Matrix logits(const Matrix& z) const {
        const Eigen::Index d = weights.rows() - (has_bias ? 1 : 0);
        if (z.cols() != d) throw DimensionError("ridge logits: expected " + std::to_string(d) + " columns");
        Matrix out = z * weights.topRows(d);
        if (has_bias) out.rowwise() += weights.row(d);
        return out;
    }
};

inline Matrix augment_with_bias(const Matrix& z, bool bias) {
    if (!bias) return z;
    Matrix out(z.rows(), z.cols() + 1);
    out.leftCols(z.cols()) = z;
    out.col(z.cols()).setOnes();
    return out;
}

inline Matrix one_hot(const std::vector<int>& labels, int num_classes) {
    Matrix y = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), num_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
    return y;
}

inline double default_ridge_lambda(const Matrix& z_aug) {
    const double mean_diag = z_aug.cols() == 0 ? 0.0 : z_aug.squaredNorm() / static_cast<double>(z_aug.cols());
    return mean_diag > 0.0 ? 1e-2 * mean_diag : 1e-2;
}

/// Solves (Z~^T Z~ + lambda I) W = Z~^T Y. Uses the dual form
/// W = Z~^T (Z~ Z~^T + lambda I)^-1 Y when there are more columns than rows.
inline RidgeClassifier fit_ridge(const Matrix& z, const Matrix& y, const RidgeOptions& opt = {},
                                 std::string block_name = {}) {
    if (z.rows() < 1) throw DimensionError("fit_ridge: need at least one row");
    if (y.rows() != z.rows()) throw DimensionError("fit_ridge: Z and Y row counts differ");
    if (!z.allFinite() || !y.allFinite()) throw NumericalError("fit_ridge: non-finite inputs");
    const Matrix za = augment_with_bias(z, opt.fit_bias);
    const double lambda = opt.lambda.value_or(default_ridge_lambda(za));
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw NumericalError("fit_ridge: lambda must be positive");

    RidgeClassifier rc;
    rc.lambda = lambda;
    rc.block_name = std::move(block_name);
    rc.has_bias = opt.fit_bias;
    if (za.cols() <= za.rows()) {
        Matrix gram = za.transpose() * za;
        gram.diagonal().array() += lambda;
        Eigen::LLT<Matrix> llt(gram);
        if (llt.info() != Eigen::Success) throw NumericalError("fit_ridge: normal matrix not positive definite");
        rc.weights = llt.solve(za.transpose() * y);
    } else {
        Matrix gram = za * za.transpose();
        gram.diagonal().array() += lambda;
        Eigen::LLT<Matrix> llt(gram);
        if (llt.info() != Eigen::Success) throw NumericalError("fit_ridge: kernel matrix not positive definite");
        rc.weights = za.transpose() * llt.solve(y);
    }
    return rc;
}

/// Proportional scaling: shift so the smallest logit becomes epsilon, then
/// divide by the sum.
inline Vector normalize_logits(const Vector& l, double epsilon = 1e-8) {
    if (l.size() == 0) return l;
    const double lo = l.minCoeff();
    Vector shifted = (l.array() - lo + epsilon).matrix();
    return shifted / shifted.sum();
}

inline Matrix normalize_logit_rows(const Matrix& logits, double epsilon = 1e-8) {
    Matrix out(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r)
        out.row(r) = normalize_logits(logits.row(r).transpose(), epsilon).transpose();
    return out;
}

struct LinearOptions {
    int folds = 5;
    RidgeOptions ridge;
    double epsilon = 1e-8;
};

inline Matrix select_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
    return out;
}

/// Held-out probabilities for the rows of every evaluated fold (ascending
/// labeled-row order), each from a ridge fit on the rows outside its fold.
inline Matrix kfold_predictions(const Matrix& z_labeled, const std::vector<int>& labels, int num_classes,
                                const FoldPlan& plan, const LinearOptions& opt = {}) {
    if (static_cast<std::size_t>(z_labeled.rows()) != labels.size() || plan.assignment.size() != labels.size())
        throw DimensionError("kfold_predictions: rows, labels and fold plan disagree");
    const auto heldout = plan.heldout_rows();
    Matrix out(static_cast<Eigen::Index>(heldout.size()), num_classes);
    std::vector<Eigen::Index> position(labels.size(), -1);
    for (std::size_t i = 0; i < heldout.size(); ++i) position[heldout[i]] = static_cast<Eigen::Index>(i);

    for (int f : plan.evaluated_folds) {
        const auto test_rows = plan.rows_in(f);
        if (test_rows.empty()) continue;
        const auto train_rows = plan.rows_outside(f);
        if (train_rows.empty()) throw DimensionError("kfold_predictions: fold has no training rows");
        std::vector<int> train_labels;
        for (auto r : train_rows) train_labels.push_back(labels[r]);
        const auto model = fit_ridge(select_rows(z_labeled, train_rows), one_hot(train_labels, num_classes), opt.ridge);
        const Matrix probs = normalize_logit_rows(model.logits(select_rows(z_labeled, test_rows)), opt.epsilon);
        for (std::size_t i = 0; i < test_rows.size(); ++i) out.row(position[test_rows[i]]) = probs.row(static_cast<Eigen::Index>(i));
    }
    return out;
}

/// One LinearGNN predictor per encoding block.
inline std::vector<Predictor> make_linear_predictors(const std::vector<EncodingBlock>& blocks, const NodeTable& table,
                                                     const FoldPlan& plan, const LinearOptions& opt = {}) {
    std::vector<Predictor> out;
    for (const auto& b : blocks) {
        const Matrix z_l = select_rows(b.values, table.labeled);
        Predictor p;
        p.id = "linear:" + b.name;
        p.kind = PredictorKind::linear_gnn;
        p.backend = "ridge";
        p.holdout_probs = kfold_predictions(z_l, table.labeled_classes, table.num_classes, plan, opt);
        const auto model =
            fit_ridge(z_l, one_hot(table.labeled_classes, table.num_classes), opt.ridge, b.name);
        p.query_probs = normalize_logit_rows(model.logits(select_rows(b.values, table.query)), opt.epsilon);
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace tabgfm
