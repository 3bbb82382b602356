#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "tabgfm/error.hpp"
#include "tabgfm/rng.hpp"

namespace tabgfm {

// Assignment of labeled rows to cross-validation folds.
struct FoldPlan {
    std::uint64_t seed = 0;
    int num_folds = 0;
    std::vector<int> assignment; // per labeled row
    // Folds whose rows receive held-out predictions (all folds for k-fold CV,
    // only fold 0 for a single hold-out split).
    std::vector<int> evaluated_folds;

    bool is_evaluated(int fold) const {
        return std::find(evaluated_folds.begin(), evaluated_folds.end(), fold) != evaluated_folds.end();
    }

    // Labeled-row positions that receive held-out predictions, ascending.
    std::vector<std::size_t> heldout_rows() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < assignment.size(); ++i)
            if (is_evaluated(assignment[i])) out.push_back(i);
        return out;
    }

    std::vector<std::size_t> rows_in(int fold) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < assignment.size(); ++i)
            if (assignment[i] == fold) out.push_back(i);
        return out;
    }

    std::vector<std::size_t> rows_outside(int fold) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < assignment.size(); ++i)
            if (assignment[i] != fold) out.push_back(i);
        return out;
    }

    friend bool operator==(const FoldPlan&, const FoldPlan&) = default;
};

namespace detail {

inline FoldPlan stratified_assignment(const std::vector<int>& labels, int folds, std::uint64_t seed) {
    FoldPlan plan;
    plan.seed = seed;
    plan.num_folds = folds;
    plan.assignment.assign(labels.size(), -1);
    int max_class = -1;
    for (int y : labels) max_class = std::max(max_class, y);
    // Round-robin over shuffled class members; the fold counter continues
    // across classes so fold sizes stay balanced as well.
    std::size_t cursor = 0;
    for (int c = 0; c <= max_class; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == c) members.push_back(i);
        Rng rng(derive_seed(seed, {0xF01D, static_cast<std::uint64_t>(c)}));
        rng.shuffle(members);
        for (auto m : members) plan.assignment[m] = static_cast<int>(cursor++ % static_cast<std::size_t>(folds));
    }
    for (int f = 0; f < folds; ++f) plan.evaluated_folds.push_back(f);
    return plan;
}

// Every class present in the labeled set must survive in every training fold.
inline bool training_folds_cover_classes(const FoldPlan& plan, const std::vector<int>& labels) {
    int max_class = -1;
    for (int y : labels) max_class = std::max(max_class, y);
    std::vector<std::size_t> total(static_cast<std::size_t>(max_class + 1), 0);
    for (int y : labels) ++total[static_cast<std::size_t>(y)];
    for (int f = 0; f < plan.num_folds; ++f) {
        std::vector<std::size_t> in_fold(total.size(), 0);
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (plan.assignment[i] == f) ++in_fold[static_cast<std::size_t>(labels[i])];
        for (std::size_t c = 0; c < total.size(); ++c)
            if (total[c] > 0 && in_fold[c] == total[c]) return false;
    }
    return true;
}

} // namespace detail

/// Class-stratified k-fold plan. If some class would vanish from a training
/// fold, the fold count is lowered to the largest feasible value (minimum 2)
/// and a warning is appended.
inline FoldPlan make_fold_plan(const std::vector<int>& labels, int folds, std::uint64_t seed,
                               std::vector<std::string>* warnings = nullptr) {
    if (labels.size() < 2) throw ConfigError("cross-validation needs at least 2 labeled rows");
    if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
    const int requested = folds;
    folds = std::min<int>(folds, static_cast<int>(labels.size()));
    FoldPlan plan = detail::stratified_assignment(labels, folds, seed);
    while (folds > 2 && !detail::training_folds_cover_classes(plan, labels)) {
        --folds;
        plan = detail::stratified_assignment(labels, folds, seed);
    }
    if (warnings) {
        if (!detail::training_folds_cover_classes(plan, labels))
            warnings->push_back("fold plan: a class is absent from some training fold even with 2 folds");
        if (folds != requested)
            warnings->push_back("fold plan: reduced from " + std::to_string(requested) + " to " +
                                std::to_string(folds) + " folds");
    }
    return plan;
}

/// Single stratified hold-out split: fold 0 = H (about `fraction` of each
/// class, at least one row when a class has two or more), fold 1 = anchors.
inline FoldPlan make_holdout_plan(const std::vector<int>& labels, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("hold-out fraction must be in (0, 1)");
    FoldPlan plan;
    plan.seed = seed;
    plan.num_folds = 2;
    plan.assignment.assign(labels.size(), 1);
    plan.evaluated_folds = {0};
    int max_class = -1;
    for (int y : labels) max_class = std::max(max_class, y);
    for (int c = 0; c <= max_class; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == c) members.push_back(i);
        if (members.size() < 2) continue;
        Rng rng(derive_seed(seed, {0x401D, static_cast<std::uint64_t>(c)}));
        rng.shuffle(members);
        auto take = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(members.size())));
        take = std::clamp<std::size_t>(take, 1, members.size() - 1);
        for (std::size_t i = 0; i < take; ++i) plan.assignment[members[i]] = 0;
    }
    if (plan.rows_in(0).empty()) throw ConfigError("hold-out split is empty; need a class with >= 2 labeled rows");
    return plan;
}

} // namespace tabgfm
