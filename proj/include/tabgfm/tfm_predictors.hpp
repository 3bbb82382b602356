#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tabgfm/ecoc.hpp"
#include "tabgfm/error.hpp"
#include "tabgfm/folds.hpp"
#include "tabgfm/learners.hpp"
#include "tabgfm/node_table.hpp"
#include "tabgfm/predictor.hpp"

namespace tabgfm {

struct TfmOptions {
    std::size_t row_budget = 2500;
    std::size_t feature_col_budget = 300;
    std::size_t structure_col_budget = 100;
    int folds = 2;
};

struct TfmResult {
    std::vector<Predictor> predictors;
    std::vector<std::string> notices;  // gate refusals, discarded slots
    std::vector<std::string> skipped;  // learner failures
    bool gated = false;
};

namespace detail {

inline void assert_learner_limits(const Matrix& context, int num_classes) {
    if (static_cast<std::size_t>(context.rows()) > kMaxContextRows ||
        static_cast<std::size_t>(context.cols()) > kMaxColumns || num_classes > kMaxLearnerClasses)
        throw std::logic_error("learner size limits violated: " + std::to_string(context.rows()) + " rows, " +
                               std::to_string(context.cols()) + " columns, " + std::to_string(num_classes) +
                               " classes");
}

inline std::vector<std::size_t> nodes_at(const std::vector<std::size_t>& nodes, const std::vector<std::size_t>& pos) {
    std::vector<std::size_t> out;
    out.reserve(pos.size());
    for (auto p : pos) out.push_back(nodes[p]);
    return out;
}

} // namespace detail

/// One predictor per ECOC round (per subsampled table when C <= 10). Each
/// subtask draws its own columns, which stay fixed between the held-out
/// (cross-validated) phase and the query phase; labeled rows are re-drawn
/// class-balanced from each training fold by the same sampler.
inline TfmResult make_tfm_predictors(const NodeTable& table, int num_models, TabularLearner& learner,
                                     std::uint64_t seed, const FoldPlan& plan, const TfmOptions& opt = {}) {
    TfmResult result;
    const int c = table.num_classes;
    const EcocPlan ecoc = ecoc_plan(c, num_models, derive_seed(seed, {0xEC}));
    if (ecoc.refused) {
        result.gated = true;
        result.notices.push_back("TFM predictors disabled: " + std::to_string(c) + " classes need B >= " +
                                 std::to_string(ecoc.subtasks_per_round) + ", got B = " + std::to_string(num_models));
        return result;
    }
    if (c > 10 && num_models % ecoc.subtasks_per_round != 0)
        result.notices.push_back("ECOC: " + std::to_string(num_models % ecoc.subtasks_per_round) +
                                 " leftover model slot(s) discarded");

    const auto heldout = plan.heldout_rows();
    std::vector<Eigen::Index> position(table.labeled.size(), -1);
    for (std::size_t i = 0; i < heldout.size(); ++i) position[heldout[i]] = static_cast<Eigen::Index>(i);
    std::vector<std::size_t> all_labeled(table.labeled.size());
    for (std::size_t i = 0; i < all_labeled.size(); ++i) all_labeled[i] = i;

    for (std::size_t r = 0; r < ecoc.rounds.size(); ++r) {
        const auto& round = ecoc.rounds[r];
        Predictor pred;
        pred.id = "tfm:" + std::to_string(r);
        pred.kind = PredictorKind::tfm;
        pred.backend = learner.backend();
        std::vector<Matrix> holdout_parts, query_parts;
        try {
            for (std::size_t s = 0; s < round.subtasks.size(); ++s) {
                const auto& st = round.subtasks[s];
                const int m = st.num_meta_classes();
                SubsampleSpec spec{derive_seed(seed, {0x7AB, r, s}), opt.row_budget, opt.feature_col_budget,
                                   opt.structure_col_budget};
                spec.validate();
                const std::vector<std::size_t> columns = subsample_columns(table, spec);
                const LabeledRowSampler sampler(derive_seed(spec.seed, {0x20}), spec.row_budget);
                const std::vector<int> meta = st.meta_labels(table.labeled_classes, c);
                const std::string sub_id = pred.id + "/s" + std::to_string(s);
                ColumnUse use;

                Matrix hold(static_cast<Eigen::Index>(heldout.size()), m);
                for (int f : plan.evaluated_folds) {
                    const auto fold_rows = plan.rows_in(f);
                    if (fold_rows.empty()) continue;
                    const auto ctx_pos = sampler.sample(table.labeled_classes, plan.rows_outside(f));
                    std::vector<int> ctx_labels;
                    for (auto p : ctx_pos) ctx_labels.push_back(meta[p]);
                    const Matrix ctx = table.gather(detail::nodes_at(table.labeled, ctx_pos), columns);
                    const Matrix qry = table.gather(detail::nodes_at(table.labeled, fold_rows), columns);
                    detail::assert_learner_limits(ctx, m);
                    use.holdout = columns;
                    const Matrix probs = learner.fit_predict(
                        {ctx, ctx_labels, m, qry, derive_seed(spec.seed, {0xF0, static_cast<std::uint64_t>(f)}),
                         sub_id + "/fold" + std::to_string(f)});
                    for (std::size_t i = 0; i < fold_rows.size(); ++i)
                        hold.row(position[fold_rows[i]]) = probs.row(static_cast<Eigen::Index>(i));
                }
                holdout_parts.push_back(std::move(hold));

                if (table.query.empty()) {
                    query_parts.emplace_back(0, m);
                } else {
                    const auto ctx_pos = sampler.sample(table.labeled_classes, all_labeled);
                    std::vector<int> ctx_labels;
                    for (auto p : ctx_pos) ctx_labels.push_back(meta[p]);
                    const Matrix ctx = table.gather(detail::nodes_at(table.labeled, ctx_pos), columns);
                    const Matrix qry = table.gather(table.query, columns);
                    detail::assert_learner_limits(ctx, m);
                    use.query = columns;
                    query_parts.push_back(learner.fit_predict(
                        {ctx, ctx_labels, m, qry, derive_seed(spec.seed, {0x0E}), sub_id + "/query"}));
                }
                pred.column_uses.push_back(std::move(use));
            }
        } catch (const LearnerError& e) {
            result.skipped.push_back("predictor " + pred.id + " skipped: " + e.what());
            continue;
        }
        pred.holdout_probs = ecoc_decode(round, holdout_parts, c);
        pred.query_probs = ecoc_decode(round, query_parts, c);
        result.predictors.push_back(std::move(pred));
    }
    return result;
}

} // namespace tabgfm
