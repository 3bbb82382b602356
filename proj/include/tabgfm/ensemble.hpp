#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tabgfm/error.hpp"
#include "tabgfm/predictor.hpp"
#include "tabgfm/rng.hpp"

namespace tabgfm {

// Row argmax with the lowest class index winning ties.
inline int argmax_row(const Matrix& p, Eigen::Index r) {
    int best = 0;
    for (Eigen::Index c = 1; c < p.cols(); ++c)
        if (p(r, c) > p(r, best)) best = static_cast<int>(c);
    return best;
}

inline double accuracy(const Matrix& probs, const std::vector<int>& labels) {
    if (probs.rows() != static_cast<Eigen::Index>(labels.size()))
        throw DimensionError("accuracy: " + std::to_string(probs.rows()) + " rows vs " + std::to_string(labels.size()) +
                             " labels");
    if (labels.empty()) return 0.0;
    std::size_t hits = 0;
    for (Eigen::Index r = 0; r < probs.rows(); ++r) hits += argmax_row(probs, r) == labels[static_cast<std::size_t>(r)];
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

struct EnsembleWeights {
    std::vector<double> weights;         // one per pool member
    std::vector<std::size_t> chosen;     // full selection trace
    std::vector<double> scores;          // held-out accuracy after each step
    std::size_t stop_length = 0;         // kept prefix length
};

/// Greedy forward selection with replacement. Each step adds the member that
/// maximizes held-out accuracy of the running mean (ties drawn uniformly from
/// the seeded generator); the returned weights are selection counts over the
/// shortest prefix reaching the best score seen.
inline EnsembleWeights greedy_select(const PredictorPool& pool, int max_iters = 50, std::uint64_t seed = 0) {
    if (pool.predictors.empty()) throw Error("greedy_select: empty predictor pool");
    if (max_iters < 1) throw ConfigError("greedy_select: max_iters must be >= 1");
    const auto& labels = pool.holdout_labels;
    const Eigen::Index rows = static_cast<Eigen::Index>(labels.size());
    Rng rng(derive_seed(seed, {0x6EED}));

    EnsembleWeights out;
    Matrix running = Matrix::Zero(rows, pool.num_classes);
    std::vector<std::size_t> tied;
    for (int t = 1; t <= max_iters; ++t) {
        double best = -1.0;
        tied.clear();
        for (std::size_t i = 0; i < pool.size(); ++i) {
            const Matrix mean = (running + pool.predictors[i].holdout_probs) / static_cast<double>(t);
            const double score = accuracy(mean, labels);
            if (score > best) {
                best = score;
                tied.assign(1, i);
            } else if (score == best) {
                tied.push_back(i);
            }
        }
        const std::size_t pick = tied.size() == 1 ? tied.front() : tied[rng.uniform_index(tied.size())];
        running += pool.predictors[pick].holdout_probs;
        out.chosen.push_back(pick);
        out.scores.push_back(best);
    }

    std::size_t best_len = 1;
    for (std::size_t i = 1; i < out.scores.size(); ++i)
        if (out.scores[i] > out.scores[best_len - 1]) best_len = i + 1;
    out.stop_length = best_len;
    out.weights.assign(pool.size(), 0.0);
    for (std::size_t i = 0; i < best_len; ++i) out.weights[out.chosen[i]] += 1.0;
    for (auto& w : out.weights) w /= static_cast<double>(best_len);
    return out;
}

inline EnsembleWeights uniform_weights(const PredictorPool& pool) {
    if (pool.predictors.empty()) throw Error("uniform_weights: empty predictor pool");
    EnsembleWeights out;
    out.weights.assign(pool.size(), 1.0 / static_cast<double>(pool.size()));
    return out;
}

/// Weighted sum of the members' query probabilities.
inline Matrix combine(const std::vector<double>& weights, const PredictorPool& pool) {
    if (weights.size() != pool.size())
        throw DimensionError("combine: " + std::to_string(weights.size()) + " weights for " +
                             std::to_string(pool.size()) + " predictors");
    if (pool.predictors.empty()) return Matrix(0, pool.num_classes);
    Matrix out = Matrix::Zero(pool.predictors.front().query_probs.rows(), pool.num_classes);
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (weights[i] != 0.0) out += weights[i] * pool.predictors[i].query_probs;
    return out;
}

} // namespace tabgfm
