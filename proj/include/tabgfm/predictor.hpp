#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tabgfm/error.hpp"
#include "tabgfm/graph.hpp"

namespace tabgfm {

enum class PredictorKind { linear_gnn, tfm };

inline const char* to_string(PredictorKind k) { return k == PredictorKind::linear_gnn ? "linear_gnn" : "tfm"; }

// Table columns fed to the learner in each phase of one subsampled table.
struct ColumnUse {
    std::vector<std::size_t> holdout;
    std::vector<std::size_t> query;
};

// One unit entering ensemble selection.
struct Predictor {
    std::string id;
    PredictorKind kind = PredictorKind::linear_gnn;
    std::string backend;
    Matrix holdout_probs; // |H| x C, H = held-out labeled rows
    Matrix query_probs;   // |Q| x C
    std::vector<ColumnUse> column_uses;
};

inline bool rows_stochastic(const Matrix& p, double tol) {
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
        double s = 0.0;
        for (Eigen::Index c = 0; c < p.cols(); ++c) {
            const double v = p(r, c);
            if (!std::isfinite(v) || v < 0.0) return false;
            s += v;
        }
        if (std::abs(s - 1.0) > tol) return false;
    }
    return true;
}

struct PredictorPool {
    std::vector<Predictor> predictors;
    std::vector<int> holdout_labels; // class of each held-out row
    int num_classes = 0;

    std::size_t size() const noexcept { return predictors.size(); }

    void validate(double tol = 1e-6) const {
        for (const auto& p : predictors) {
            if (p.holdout_probs.rows() != static_cast<Eigen::Index>(holdout_labels.size()) ||
                p.holdout_probs.cols() != num_classes)
                throw DimensionError("predictor " + p.id + ": held-out probabilities have the wrong shape");
            if (p.query_probs.cols() != num_classes ||
                p.query_probs.rows() != predictors.front().query_probs.rows())
                throw DimensionError("predictor " + p.id + ": query probabilities have the wrong shape");
            if (!rows_stochastic(p.holdout_probs, tol) || !rows_stochastic(p.query_probs, tol))
                throw NumericalError("predictor " + p.id + ": probabilities are not row-stochastic");
        }
    }
};

} // namespace tabgfm
