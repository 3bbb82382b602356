#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tabgfm/error.hpp"

namespace tabgfm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr int kUnlabeled = -1;

struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Simple, undirected, unweighted, attributed graph with (partial) labels.
// Immutable after construction; edges are stored once with u < v, sorted.
class Graph {
public:
    Graph() = default;

    Graph(std::size_t num_nodes, std::vector<Edge> edges, Matrix features, std::vector<int> labels,
          int num_classes)
        : num_nodes_(num_nodes), features_(std::move(features)), labels_(std::move(labels)),
          num_classes_(num_classes) {
        if (static_cast<std::size_t>(features_.rows()) != num_nodes_)
            throw DimensionError("feature matrix has " + std::to_string(features_.rows()) +
                                 " rows, expected " + std::to_string(num_nodes_));
        if (labels_.size() != num_nodes_)
            throw DimensionError("label vector has " + std::to_string(labels_.size()) +
                                 " entries, expected " + std::to_string(num_nodes_));
        if (num_classes_ < 1) throw DatasetError("num_classes must be positive");
        if (!features_.allFinite()) throw DatasetError("feature matrix contains non-finite entries");

        for (auto& e : edges) {
            if (e.u >= num_nodes_ || e.v >= num_nodes_)
                throw DatasetError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                                   ") has an endpoint out of range [0, " + std::to_string(num_nodes_) + ")");
            if (e.u == e.v) throw DatasetError("self-loop on node " + std::to_string(e.u));
            if (e.u > e.v) std::swap(e.u, e.v);
        }
        std::sort(edges.begin(), edges.end());
        auto dup = std::adjacent_find(edges.begin(), edges.end());
        if (dup != edges.end())
            throw DatasetError("duplicate edge (" + std::to_string(dup->u) + ", " + std::to_string(dup->v) +
                               ") after canonicalization");
        edges_ = std::move(edges);

        std::vector<bool> seen(static_cast<std::size_t>(num_classes_), false);
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            const int y = labels_[i];
            if (y == kUnlabeled) continue;
            if (y < 0 || y >= num_classes_)
                throw DatasetError("node " + std::to_string(i) + " has unknown class id " + std::to_string(y));
            seen[static_cast<std::size_t>(y)] = true;
        }
        for (int c = 0; c < num_classes_; ++c)
            if (!seen[static_cast<std::size_t>(c)])
                throw DatasetError("class " + std::to_string(c) + " never appears among labeled nodes");

        degrees_.assign(num_nodes_, 0);
        for (const auto& e : edges_) {
            ++degrees_[e.u];
            ++degrees_[e.v];
        }
    }

    std::size_t num_nodes() const noexcept { return num_nodes_; }
    std::size_t num_edges() const noexcept { return edges_.size(); }
    std::size_t num_features() const noexcept { return static_cast<std::size_t>(features_.cols()); }
    int num_classes() const noexcept { return num_classes_; }

    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Matrix& features() const noexcept { return features_; }
    const std::vector<int>& labels() const noexcept { return labels_; }
    const std::vector<std::size_t>& degrees() const noexcept { return degrees_; }

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.num_nodes_ == b.num_nodes_ && a.num_classes_ == b.num_classes_ && a.edges_ == b.edges_ &&
               a.labels_ == b.labels_ && a.features_.rows() == b.features_.rows() &&
               a.features_.cols() == b.features_.cols() && a.features_ == b.features_;
    }

private:
    std::size_t num_nodes_ = 0;
    std::vector<Edge> edges_;
    Matrix features_;
    std::vector<int> labels_;
    int num_classes_ = 0;
    std::vector<std::size_t> degrees_;
};

// Compressed sparse row matrix with strictly increasing column indices per row.
class SparseRowMatrix {
public:
    SparseRowMatrix() = default;

    SparseRowMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> offsets,
                    std::vector<std::size_t> indices, std::vector<double> values)
        : rows_(rows), cols_(cols), offsets_(std::move(offsets)), indices_(std::move(indices)),
          values_(std::move(values)) {
        if (offsets_.size() != rows_ + 1 || offsets_.front() != 0 || offsets_.back() != indices_.size() ||
            indices_.size() != values_.size())
            throw DimensionError("inconsistent CSR layout");
        for (std::size_t r = 0; r < rows_; ++r) {
            if (offsets_[r + 1] < offsets_[r]) throw DimensionError("CSR offsets not monotone");
            for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
                if (indices_[k] >= cols_) throw DimensionError("CSR column index out of bounds");
                if (k > offsets_[r] && indices_[k] <= indices_[k - 1])
                    throw DimensionError("CSR column indices not strictly increasing");
            }
        }
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    std::span<const std::size_t> row_indices(std::size_t r) const {
        return {indices_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
    }
    std::span<const double> row_values(std::size_t r) const {
        return {values_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
    }

    const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }
    const std::vector<std::size_t>& indices() const noexcept { return indices_; }
    const std::vector<double>& values() const noexcept { return values_; }

    double coeff(std::size_t r, std::size_t c) const {
        auto idx = row_indices(r);
        auto it = std::lower_bound(idx.begin(), idx.end(), c);
        if (it == idx.end() || *it != c) return 0.0;
        return values_[offsets_[r] + static_cast<std::size_t>(it - idx.begin())];
    }

    // this * x for a dense x with cols() rows.
    Matrix multiply(const Matrix& x) const {
        if (static_cast<std::size_t>(x.rows()) != cols_)
            throw DimensionError("sparse-dense product: inner dimensions " + std::to_string(cols_) + " vs " +
                                 std::to_string(x.rows()));
        Matrix out(static_cast<Eigen::Index>(rows_), x.cols());
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            const double* xc = x.col(c).data();
            double* oc = out.col(c).data();
            for (std::size_t r = 0; r < rows_; ++r) {
                double acc = 0.0;
                for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) acc += values_[k] * xc[indices_[k]];
                oc[r] = acc;
            }
        }
        return out;
    }

    Matrix to_dense() const {
        Matrix d = Matrix::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k)
                d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(indices_[k])) = values_[k];
        return d;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<std::size_t> indices_;
    std::vector<double> values_;
};

// Train/val/test partition for one seed.
struct SplitSpec {
    std::uint64_t seed = 0;
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;

    void validate(std::size_t num_nodes) const {
        if (train.empty()) throw DatasetError("split seed " + std::to_string(seed) + ": train set is empty");
        std::vector<char> owner(num_nodes, 0);
        auto mark = [&](const std::vector<std::size_t>& idx, char tag, const char* name) {
            for (auto i : idx) {
                if (i >= num_nodes)
                    throw DatasetError("split seed " + std::to_string(seed) + ": " + name + " index " +
                                       std::to_string(i) + " out of range");
                if (owner[i] != 0)
                    throw DatasetError("split seed " + std::to_string(seed) + ": node " + std::to_string(i) +
                                       " appears in more than one split set");
                owner[i] = tag;
            }
        };
        mark(train, 1, "train");
        mark(val, 2, "val");
        mark(test, 3, "test");
    }

    friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

namespace detail {

// Adjacency lists with sorted neighbors, both directions.
inline std::vector<std::vector<std::size_t>> neighbor_lists(const Graph& g) {
    std::vector<std::vector<std::size_t>> nbrs(g.num_nodes());
    for (const auto& e : g.edges()) {
        nbrs[e.u].push_back(e.v);
        nbrs[e.v].push_back(e.u);
    }
    for (auto& n : nbrs) std::sort(n.begin(), n.end());
    return nbrs;
}

} // namespace detail

/// Random-walk normalized adjacency D^-1 A. Isolated nodes get an empty row.
inline SparseRowMatrix normalized_adjacency(const Graph& g) {
    const auto nbrs = detail::neighbor_lists(g);
    std::vector<std::size_t> offsets{0};
    std::vector<std::size_t> indices;
    std::vector<double> values;
    indices.reserve(2 * g.num_edges());
    values.reserve(2 * g.num_edges());
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
        const double inv = nbrs[i].empty() ? 0.0 : 1.0 / static_cast<double>(nbrs[i].size());
        for (auto j : nbrs[i]) {
            indices.push_back(j);
            values.push_back(inv);
        }
        offsets.push_back(indices.size());
    }
    return {g.num_nodes(), g.num_nodes(), std::move(offsets), std::move(indices), std::move(values)};
}

/// Symmetric normalized Laplacian I - D^-1/2 A D^-1/2. The diagonal is 0 for
/// isolated nodes (no entry stored).
inline SparseRowMatrix sym_normalized_laplacian(const Graph& g) {
    const auto nbrs = detail::neighbor_lists(g);
    std::vector<std::size_t> offsets{0};
    std::vector<std::size_t> indices;
    std::vector<double> values;
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
        const double di = static_cast<double>(nbrs[i].size());
        bool diag_done = di == 0.0;
        for (auto j : nbrs[i]) {
            if (!diag_done && j > i) {
                indices.push_back(i);
                values.push_back(1.0);
                diag_done = true;
            }
            const double dj = static_cast<double>(nbrs[j].size());
            indices.push_back(j);
            values.push_back(-1.0 / std::sqrt(di * dj));
        }
        if (!diag_done) {
            indices.push_back(i);
            values.push_back(1.0);
        }
        offsets.push_back(indices.size());
    }
    return {g.num_nodes(), g.num_nodes(), std::move(offsets), std::move(indices), std::move(values)};
}

} // namespace tabgfm
