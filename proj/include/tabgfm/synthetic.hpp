#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tabgfm/dataset_io.hpp"
#include "tabgfm/error.hpp"
#include "tabgfm/graph.hpp"
#include "tabgfm/rng.hpp"

namespace tabgfm {

struct SyntheticParams {
    int blocks = 2;
    std::size_t nodes = 400;
    double p_in = 0.1;
    double p_out = 0.01;
    double shift = 2.0;   // class mean offset along a class-specific axis, in noise units
    double noise = 1.0;   // feature noise standard deviation
    int feature_dim = 16;
    std::uint64_t seed = 0;
    int num_splits = 5;   // seeds 0 .. num_splits-1
    double train_frac = 0.3;
    double val_frac = 0.2;

    void validate() const {
        if (!(p_in >= 0.0 && p_in <= 1.0) || !(p_out >= 0.0 && p_out <= 1.0))
            throw ConfigError("synthetic: p_in and p_out must lie in [0, 1]");
        if (blocks < 2) throw ConfigError("synthetic: need at least 2 blocks");
        if (nodes < static_cast<std::size_t>(blocks) * 4) throw ConfigError("synthetic: too few nodes per block");
        if (feature_dim < 1) throw ConfigError("synthetic: feature_dim must be >= 1");
        if (!(noise > 0.0)) throw ConfigError("synthetic: noise must be positive");
        if (num_splits < 1) throw ConfigError("synthetic: need at least one split");
        if (!(train_frac > 0.0) || !(val_frac >= 0.0) || train_frac + val_frac >= 1.0)
            throw ConfigError("synthetic: invalid split fractions");
    }
};

/// Stochastic block model with contiguous, near-equal blocks and Gaussian
/// features whose mean is `shift` along axis (class mod feature_dim).
/// Splits are stratified per class.
inline Dataset make_synthetic(const SyntheticParams& p) {
    p.validate();
    const std::size_t n = p.nodes;
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i)
        labels[i] = static_cast<int>(i * static_cast<std::size_t>(p.blocks) / n);

    Rng edge_rng(derive_seed(p.seed, {0xED6E}));
    std::vector<Edge> edges;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v)
            if (edge_rng.bernoulli(labels[u] == labels[v] ? p.p_in : p.p_out)) edges.push_back({u, v});

    Rng feat_rng(derive_seed(p.seed, {0xFEA7}));
    Matrix x(static_cast<Eigen::Index>(n), p.feature_dim);
    for (std::size_t i = 0; i < n; ++i)
        for (int d = 0; d < p.feature_dim; ++d) x(static_cast<Eigen::Index>(i), d) = p.noise * feat_rng.normal();
    for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i), labels[i] % p.feature_dim) += p.shift;
    // float32 storage on disk; round here so a save/load round trip is exact.
    x = x.cast<float>().cast<double>();

    Dataset ds;
    ds.name = "synthetic";
    ds.graph = Graph(n, std::move(edges), std::move(x), labels, p.blocks);
    for (int s = 0; s < p.num_splits; ++s) {
        SplitSpec split;
        split.seed = static_cast<std::uint64_t>(s);
        Rng split_rng(derive_seed(p.seed, {0x5B1, static_cast<std::uint64_t>(s)}));
        for (int c = 0; c < p.blocks; ++c) {
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < n; ++i)
                if (labels[i] == c) members.push_back(i);
            split_rng.shuffle(members);
            const auto m = members.size();
            auto n_train = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(p.train_frac * m)));
            auto n_val = static_cast<std::size_t>(std::llround(p.val_frac * m));
            n_val = std::min(n_val, m - n_train);
            for (std::size_t k = 0; k < m; ++k)
                (k < n_train ? split.train : k < n_train + n_val ? split.val : split.test).push_back(members[k]);
        }
        std::sort(split.train.begin(), split.train.end());
        std::sort(split.val.begin(), split.val.end());
        std::sort(split.test.begin(), split.test.end());
        ds.splits.push_back(std::move(split));
    }
    return ds;
}

/// Erdos-Renyi graph with standard normal features and labels i mod num_classes.
inline Graph random_graph(Rng& rng, std::size_t n, double p, int feature_dim, int num_classes = 2) {
    if (n < static_cast<std::size_t>(num_classes)) throw ConfigError("random_graph: fewer nodes than classes");
    std::vector<Edge> edges;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v)
            if (rng.bernoulli(p)) edges.push_back({u, v});
    Matrix x(static_cast<Eigen::Index>(n), feature_dim);
    for (Eigen::Index r = 0; r < x.rows(); ++r)
        for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = rng.normal();
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % static_cast<std::size_t>(num_classes));
    return Graph(n, std::move(edges), std::move(x), std::move(labels), num_classes);
}

/// make_synthetic + save_dataset into `out_dir`.
inline Dataset generate_synthetic(const SyntheticParams& p, const std::filesystem::path& out_dir) {
    Dataset ds = make_synthetic(p);
    save_dataset(out_dir, ds.graph, ds.splits);
    ds.name = std::filesystem::absolute(out_dir).lexically_normal().filename().string();
    return ds;
}

} // namespace tabgfm
