#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "tabgfm/error.hpp"
#include "tabgfm/graph.hpp"
#include "tabgfm/rng.hpp"

namespace tabgfm {

inline constexpr int kEcocBlockSize = 9;

// Classes a subtask predicts individually; everything else collapses into a
// trailing catch-all meta-class.
struct EcocSubtask {
    std::vector<int> owned;
    bool has_catch_all = false;

    int num_meta_classes() const noexcept { return static_cast<int>(owned.size()) + (has_catch_all ? 1 : 0); }

    // class id -> meta-class id
    std::vector<int> meta_labels(const std::vector<int>& labels, int num_classes) const {
        std::vector<int> meta_of(static_cast<std::size_t>(num_classes), static_cast<int>(owned.size()));
        for (std::size_t i = 0; i < owned.size(); ++i) meta_of[static_cast<std::size_t>(owned[i])] = static_cast<int>(i);
        std::vector<int> out;
        out.reserve(labels.size());
        for (int y : labels) out.push_back(meta_of[static_cast<std::size_t>(y)]);
        return out;
    }
};

struct EcocRound {
    std::vector<EcocSubtask> subtasks;
};

struct EcocPlan {
    int num_classes = 0;
    int subtasks_per_round = 1;
    bool refused = false; // C > 10 and B < ceil(C / 9)
    std::vector<EcocRound> rounds;
};

inline int ceil_div(int a, int b) { return (a + b - 1) / b; }

/// C <= 10: B identity rounds. C > 10: floor(B / ceil(C/9)) rounds, each a
/// seeded partition of the classes into ceil(C/9) blocks of at most nine.
inline EcocPlan ecoc_plan(int num_classes, int num_models, std::uint64_t seed) {
    if (num_classes < 2) throw ConfigError("ecoc_plan: need at least 2 classes");
    if (num_models < 0) throw ConfigError("ecoc_plan: B must be >= 0");
    EcocPlan plan;
    plan.num_classes = num_classes;
    if (num_classes <= 10) {
        EcocSubtask identity;
        identity.owned.resize(static_cast<std::size_t>(num_classes));
        std::iota(identity.owned.begin(), identity.owned.end(), 0);
        plan.rounds.assign(static_cast<std::size_t>(num_models), EcocRound{{identity}});
        return plan;
    }
    const int blocks = ceil_div(num_classes, kEcocBlockSize);
    plan.subtasks_per_round = blocks;
    if (num_models < blocks) {
        plan.refused = true;
        return plan;
    }
    const int rounds = num_models / blocks;
    for (int r = 0; r < rounds; ++r) {
        std::vector<int> classes(static_cast<std::size_t>(num_classes));
        std::iota(classes.begin(), classes.end(), 0);
        Rng rng(derive_seed(seed, {0xEC0C, static_cast<std::uint64_t>(r)}));
        rng.shuffle(classes);
        EcocRound round;
        std::size_t pos = 0;
        for (int b = 0; b < blocks; ++b) {
            const int size = num_classes / blocks + (b < num_classes % blocks ? 1 : 0);
            EcocSubtask st;
            st.owned.assign(classes.begin() + static_cast<std::ptrdiff_t>(pos),
                            classes.begin() + static_cast<std::ptrdiff_t>(pos) + size);
            st.has_catch_all = size < num_classes;
            pos += static_cast<std::size_t>(size);
            round.subtasks.push_back(std::move(st));
        }
        plan.rounds.push_back(std::move(round));
    }
    return plan;
}

/// Full-class scores from per-subtask meta-class probabilities: each class
/// takes its singleton probability from the subtask owning it; rows are then
/// renormalized (uniform if every singleton received zero mass).
inline Matrix ecoc_decode(const EcocRound& round, const std::vector<Matrix>& subtask_probs, int num_classes) {
    if (subtask_probs.size() != round.subtasks.size())
        throw DimensionError("ecoc_decode: one probability matrix per subtask required");
    const Eigen::Index rows = subtask_probs.empty() ? 0 : subtask_probs.front().rows();
    Matrix out = Matrix::Zero(rows, num_classes);
    for (std::size_t s = 0; s < round.subtasks.size(); ++s) {
        const auto& st = round.subtasks[s];
        const Matrix& p = subtask_probs[s];
        if (p.rows() != rows || p.cols() != st.num_meta_classes())
            throw DimensionError("ecoc_decode: subtask probability matrix has the wrong shape");
        for (std::size_t i = 0; i < st.owned.size(); ++i) out.col(st.owned[i]) = p.col(static_cast<Eigen::Index>(i));
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double s = out.row(r).sum();
        if (s > 0.0)
            out.row(r) /= s;
        else
            out.row(r).setConstant(1.0 / num_classes);
    }
    return out;
}

} // namespace tabgfm
