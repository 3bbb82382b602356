#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "tabgfm/encoders.hpp"
#include "tabgfm/error.hpp"
#include "tabgfm/graph.hpp"
#include "tabgfm/rng.hpp"

namespace tabgfm {

// Learner hard limits per call.
inline constexpr std::size_t kMaxContextRows = 10000;
inline constexpr std::size_t kMaxColumns = 500;
inline constexpr int kMaxLearnerClasses = 10;

struct ColumnMeta {
    std::string block;
    EncodingKind kind = EncodingKind::feature;
};

struct BlockRange {
    std::string name;
    EncodingKind kind = EncodingKind::feature;
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Row features Z plus labels for the labeled set L. Labels never appear as
/// feature columns; query rows are simply absent from the labeled set.
struct NodeTable {
    Matrix z;
    std::vector<ColumnMeta> columns;
    std::vector<BlockRange> blocks;
    std::vector<std::size_t> labeled;  // L (node ids)
    std::vector<int> labeled_classes;  // class per entry of L
    std::vector<std::size_t> query;    // Q (node ids)
    int num_classes = 0;

    std::size_t num_columns() const noexcept { return columns.size(); }

    Matrix gather(const std::vector<std::size_t>& node_rows, const std::vector<std::size_t>& cols) const {
        Matrix out(static_cast<Eigen::Index>(node_rows.size()), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c)
            for (std::size_t r = 0; r < node_rows.size(); ++r)
                out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    z(static_cast<Eigen::Index>(node_rows[r]), static_cast<Eigen::Index>(cols[c]));
        return out;
    }
};

inline NodeTable build_node_table(const std::vector<EncodingBlock>& blocks, const std::vector<int>& node_labels,
                                  const std::vector<std::size_t>& labeled, const std::vector<std::size_t>& query,
                                  int num_classes) {
    if (blocks.empty()) throw DimensionError("build_node_table: no encoding blocks");
    const auto n = blocks.front().values.rows();
    std::size_t width = 0;
    for (const auto& b : blocks) {
        if (b.values.rows() != n)
            throw DimensionError("build_node_table: block '" + b.name + "' has " + std::to_string(b.values.rows()) +
                                 " rows, expected " + std::to_string(n));
        width += b.width();
    }
    if (node_labels.size() != static_cast<std::size_t>(n))
        throw DimensionError("build_node_table: label vector length does not match row count");

    std::vector<char> role(static_cast<std::size_t>(n), 0);
    for (auto v : labeled) {
        if (v >= static_cast<std::size_t>(n)) throw DimensionError("build_node_table: labeled index out of range");
        if (role[v]) throw DimensionError("build_node_table: duplicate labeled index " + std::to_string(v));
        role[v] = 1;
    }
    for (auto v : query) {
        if (v >= static_cast<std::size_t>(n)) throw DimensionError("build_node_table: query index out of range");
        if (role[v] == 1) throw DimensionError("build_node_table: node " + std::to_string(v) + " is in both L and Q");
        if (role[v] == 2) throw DimensionError("build_node_table: duplicate query index " + std::to_string(v));
        role[v] = 2;
    }

    NodeTable t;
    t.num_classes = num_classes;
    t.z.resize(n, static_cast<Eigen::Index>(width));
    std::size_t offset = 0;
    for (const auto& b : blocks) {
        t.z.middleCols(static_cast<Eigen::Index>(offset), b.values.cols()) = b.values;
        t.blocks.push_back({b.name, b.kind, offset, offset + b.width()});
        for (std::size_t c = 0; c < b.width(); ++c) t.columns.push_back({b.name, b.kind});
        offset += b.width();
    }
    t.labeled = labeled;
    t.query = query;
    t.labeled_classes.reserve(labeled.size());
    for (auto v : labeled) {
        const int y = node_labels[v];
        if (y < 0 || y >= num_classes)
            throw DimensionError("build_node_table: labeled node " + std::to_string(v) + " has no valid class");
        t.labeled_classes.push_back(y);
    }
    return t;
}

struct SubsampleSpec {
    std::uint64_t seed = 0;
    std::size_t row_budget = 2500;
    std::size_t feature_col_budget = 300;
    std::size_t structure_col_budget = 100;

    void validate() const {
        if (row_budget < 1 || row_budget > kMaxContextRows)
            throw ConfigError("subsample: row_budget must be in [1, " + std::to_string(kMaxContextRows) + "]");
        if (feature_col_budget + structure_col_budget < 1 ||
            feature_col_budget + structure_col_budget > kMaxColumns)
            throw ConfigError("subsample: column budgets must total between 1 and " + std::to_string(kMaxColumns));
    }
};

/// Uniform draw of min(budget, available) columns per kind, sorted. A kind with
/// fewer columns than its budget does not hand its slack to the other kind.
inline std::vector<std::size_t> subsample_columns(const NodeTable& table, const SubsampleSpec& spec) {
    std::vector<std::size_t> feat, structure;
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        (table.columns[c].kind == EncodingKind::feature ? feat : structure).push_back(c);
    Rng rng_f(derive_seed(spec.seed, {0xC01, 0}));
    Rng rng_s(derive_seed(spec.seed, {0xC01, 1}));
    auto out = rng_f.sample_without_replacement(std::move(feat), spec.feature_col_budget);
    auto more = rng_s.sample_without_replacement(std::move(structure), spec.structure_col_budget);
    out.insert(out.end(), more.begin(), more.end());
    std::sort(out.begin(), out.end());
    return out;
}

/// Per-class row quotas summing to min(budget, total). When the budget covers
/// every present class, each gets one row and the rest is apportioned by
/// largest remainder over the remaining per-class capacity (count - 1);
/// otherwise plain largest remainder over counts. Remainder ties go to the
/// lower class index.
inline std::vector<std::size_t> class_quotas(const std::vector<std::size_t>& counts, std::size_t budget) {
    const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    if (budget >= total) return counts;
    std::vector<std::size_t> quota(counts.size(), 0);
    std::size_t present = 0;
    for (auto c : counts) present += c > 0;

    std::vector<std::size_t> weight = counts;
    std::size_t to_assign = budget;
    if (budget >= present) {
        for (std::size_t c = 0; c < counts.size(); ++c)
            if (counts[c] > 0) {
                quota[c] = 1;
                weight[c] = counts[c] - 1;
            }
        to_assign = budget - present;
    }
    const std::size_t weight_total = std::accumulate(weight.begin(), weight.end(), std::size_t{0});
    if (to_assign == 0 || weight_total == 0) return quota;

    // Exact integer arithmetic: share_c = to_assign * weight_c / weight_total.
    std::vector<std::pair<std::size_t, std::size_t>> remainders; // (remainder numerator, class)
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        const auto num = static_cast<unsigned __int128>(to_assign) * weight[c];
        const auto whole = static_cast<std::size_t>(num / weight_total);
        quota[c] += whole;
        assigned += whole;
        remainders.emplace_back(static_cast<std::size_t>(num % weight_total), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < to_assign; ++i) {
        ++quota[remainders[i].second];
        ++assigned;
    }
    return quota;
}

/// Class-balanced sampler over labeled rows. Re-drawing from a restricted
/// support (e.g. a training fold) uses the same per-class seeds.
class LabeledRowSampler {
public:
    LabeledRowSampler(std::uint64_t seed, std::size_t budget) : seed_(seed), budget_(budget) {
        if (budget_ < 1) throw ConfigError("row sampler budget must be >= 1");
    }

    // Positions into `labels`, drawn only from `support`; sorted ascending.
    std::vector<std::size_t> sample(const std::vector<int>& labels, const std::vector<std::size_t>& support) const {
        int max_class = -1;
        for (auto s : support) max_class = std::max(max_class, labels[s]);
        std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(max_class + 1));
        for (auto s : support) members[static_cast<std::size_t>(labels[s])].push_back(s);
        std::vector<std::size_t> counts(members.size());
        for (std::size_t c = 0; c < members.size(); ++c) {
            std::sort(members[c].begin(), members[c].end());
            counts[c] = members[c].size();
        }
        const auto quota = class_quotas(counts, budget_);
        std::vector<std::size_t> out;
        for (std::size_t c = 0; c < members.size(); ++c) {
            if (quota[c] == 0) continue;
            Rng rng(derive_seed(seed_, {0x5A3, c}));
            auto picked = rng.sample_without_replacement(members[c], quota[c]);
            out.insert(out.end(), picked.begin(), picked.end());
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<std::size_t> sample(const std::vector<int>& labels) const {
        std::vector<std::size_t> all(labels.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        return sample(labels, all);
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t budget() const noexcept { return budget_; }

private:
    std::uint64_t seed_;
    std::size_t budget_;
};

inline std::vector<std::size_t> subsample_labeled_rows(const std::vector<int>& labels, std::size_t budget,
                                                       std::uint64_t seed) {
    return LabeledRowSampler(seed, budget).sample(labels);
}

} // namespace tabgfm
