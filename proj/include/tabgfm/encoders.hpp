#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <json.hpp>

#include "tabgfm/dataset_io.hpp"
#include "tabgfm/error.hpp"
#include "tabgfm/graph.hpp"
#include "tabgfm/rng.hpp"

namespace tabgfm {

enum class EncodingKind { feature, structure };

inline const char* to_string(EncodingKind k) { return k == EncodingKind::feature ? "feature" : "structure"; }

// One named column group of the node table.
struct EncodingBlock {
    std::string name;
    EncodingKind kind = EncodingKind::feature;
    Matrix values; // N x D_block
    nlohmann::json params = nlohmann::json::object();

    std::size_t width() const noexcept { return static_cast<std::size_t>(values.cols()); }
};

struct EncoderConfig {
    std::vector<int> smoothing_orders{1, 2, 3, 4};
    int rwpe_steps = 20;
    int lap_k = 20;
    std::optional<int> pca_dim;
    std::optional<std::filesystem::path> external_embedding_path;
    // Column count of a binary external file; inferred from N when absent.
    std::optional<int> external_embedding_dim;

    void validate() const {
        if (smoothing_orders.empty()) throw ConfigError("encoder: smoothing_orders must be non-empty");
        for (int k : smoothing_orders)
            if (k < 1) throw ConfigError("encoder: smoothing order must be >= 1");
        if (rwpe_steps < 1) throw ConfigError("encoder: rwpe_steps must be >= 1");
        if (lap_k < 1) throw ConfigError("encoder: lap_k must be >= 1");
        if (pca_dim && *pca_dim < 1) throw ConfigError("encoder: pca_dim must be >= 1");
        if (external_embedding_dim && *external_embedding_dim < 1)
            throw ConfigError("encoder: external_embedding_dim must be >= 1");
    }

    nlohmann::json to_json() const {
        nlohmann::json j = {{"smoothing_orders", smoothing_orders}, {"rwpe_steps", rwpe_steps}, {"lap_k", lap_k}};
        j["pca_dim"] = pca_dim ? nlohmann::json(*pca_dim) : nlohmann::json(nullptr);
        j["external_embedding_path"] =
            external_embedding_path ? nlohmann::json(external_embedding_path->string()) : nlohmann::json(nullptr);
        j["external_embedding_dim"] =
            external_embedding_dim ? nlohmann::json(*external_embedding_dim) : nlohmann::json(nullptr);
        return j;
    }
};

/// A_hat^k X by k sparse-dense products.
inline Matrix smooth_features(const SparseRowMatrix& a_hat, const Matrix& x, int k) {
    if (a_hat.rows() != a_hat.cols() || static_cast<std::size_t>(x.rows()) != a_hat.cols())
        throw DimensionError("smooth_features: operator is " + std::to_string(a_hat.rows()) + "x" +
                             std::to_string(a_hat.cols()) + ", features have " + std::to_string(x.rows()) +
                             " rows");
    if (k < 1) throw DimensionError("smooth_features: order must be >= 1");
    Matrix out = a_hat.multiply(x);
    for (int i = 1; i < k; ++i) out = a_hat.multiply(out);
    return out;
}

/// Column (v, k-1) = (A_hat^k)_vv, k = 1..steps. Diagonals are read off by
/// pushing batches of basis vectors through the sparse operator.
inline Matrix random_walk_pe(const SparseRowMatrix& a_hat, int steps, std::size_t batch_size = 512) {
    if (steps < 1) throw DimensionError("random_walk_pe: steps must be >= 1");
    const std::size_t n = a_hat.rows();
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n), steps);
    batch_size = std::max<std::size_t>(1, batch_size);
    for (std::size_t start = 0; start < n; start += batch_size) {
        const std::size_t b = std::min(batch_size, n - start);
        Matrix p = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(b));
        for (std::size_t j = 0; j < b; ++j) p(static_cast<Eigen::Index>(start + j), static_cast<Eigen::Index>(j)) = 1.0;
        for (int s = 0; s < steps; ++s) {
            p = a_hat.multiply(p);
            for (std::size_t j = 0; j < b; ++j) {
                const double v = p(static_cast<Eigen::Index>(start + j), static_cast<Eigen::Index>(j));
                out(static_cast<Eigen::Index>(start + j), s) = std::clamp(v, 0.0, 1.0);
            }
        }
    }
    return out;
}

/// Flips each column so its largest-magnitude entry (lowest index on ties) is positive.
inline void apply_sign_convention(Matrix& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        Eigen::Index best = 0;
        double best_abs = -1.0;
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            const double a = std::abs(m(r, c));
            if (a > best_abs) {
                best_abs = a;
                best = r;
            }
        }
        if (m.rows() > 0 && m(best, c) < 0.0) m.col(c) = -m.col(c);
    }
}

struct LaplacianPeOptions {
    std::size_t dense_threshold = 4096; // dense solver for N <= this
    double tolerance = 1e-9;            // Lanczos convergence threshold
    int max_iterations = 0;             // 0: 10 * k
    std::uint64_t seed = 0x1a9c5e07u;   // Lanczos start vector
};

struct LaplacianPe {
    Matrix embedding;     // N x k, zero-padded
    Vector eigenvalues;   // retained eigenvalues, ascending
    double max_residual = 0.0;
    std::string solver;
};

namespace detail {

// Full-reorthogonalization Lanczos on M = 2I - L for the `want` largest
// eigenpairs of M, i.e. the smallest of L. Returns eigenpairs of L ascending.
inline void lanczos_smallest(const SparseRowMatrix& l, std::size_t want, const LaplacianPeOptions& opt,
                             Vector& evals, Matrix& evecs, double& max_residual) {
    const std::size_t n = l.rows();
    const std::size_t max_iter = std::min<std::size_t>(
        n, opt.max_iterations > 0 ? static_cast<std::size_t>(opt.max_iterations)
                                  : std::max<std::size_t>(10 * (want > 0 ? want - 1 : 1), want + 1));
    const auto N = static_cast<Eigen::Index>(n);

    auto apply_m = [&](const Vector& v) -> Vector {
        Matrix prod = l.multiply(v);
        return 2.0 * v - prod.col(0);
    };

    Rng rng(opt.seed);
    auto random_unit = [&](const Matrix& basis, Eigen::Index used) -> Vector {
        for (int attempt = 0; attempt < 8; ++attempt) {
            Vector v(N);
            for (Eigen::Index i = 0; i < N; ++i) v(i) = rng.normal();
            for (int pass = 0; pass < 2; ++pass)
                if (used > 0) v -= basis.leftCols(used) * (basis.leftCols(used).transpose() * v);
            const double nv = v.norm();
            if (nv > 1e-8) return v / nv;
        }
        return Vector::Zero(N);
    };

    Matrix basis(N, static_cast<Eigen::Index>(max_iter));
    std::vector<double> alpha, beta;
    basis.col(0) = random_unit(basis, 0);

    Eigen::SelfAdjointEigenSolver<Matrix> tri_solver;
    std::size_t m = 0;
    bool converged = false;
    for (std::size_t j = 0; j < max_iter; ++j) {
        const auto J = static_cast<Eigen::Index>(j);
        Vector w = apply_m(basis.col(J));
        const double a = basis.col(J).dot(w);
        alpha.push_back(a);
        w -= a * basis.col(J);
        if (j > 0) w -= beta.back() * basis.col(J - 1);
        for (int pass = 0; pass < 2; ++pass) w -= basis.leftCols(J + 1) * (basis.leftCols(J + 1).transpose() * w);
        double b = w.norm();
        m = j + 1;

        if (m >= want && (m % 5 == 0 || m == max_iter || b < 1e-12)) {
            Matrix t = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
            for (std::size_t i = 0; i < m; ++i) {
                t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = alpha[i];
                if (i + 1 < m) {
                    t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = beta[i];
                    t(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = beta[i];
                }
            }
            tri_solver.compute(t);
            bool ok = true;
            for (std::size_t i = 0; i < want; ++i) {
                const auto col = static_cast<Eigen::Index>(m - 1 - i);
                if (std::abs(b * tri_solver.eigenvectors()(static_cast<Eigen::Index>(m - 1), col)) > opt.tolerance) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                converged = true;
                break;
            }
        }
        if (j + 1 == max_iter) break;
        if (b < 1e-12) {
            // Invariant subspace found; continue from a fresh orthogonal direction.
            basis.col(J + 1) = random_unit(basis, J + 1);
            b = 0.0;
        } else {
            basis.col(J + 1) = w / b;
        }
        beta.push_back(b);
    }

    Matrix t = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = alpha[i];
        if (i + 1 < m) {
            t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = beta[i];
            t(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = beta[i];
        }
    }
    tri_solver.compute(t);
    evals.resize(static_cast<Eigen::Index>(want));
    evecs.resize(N, static_cast<Eigen::Index>(want));
    max_residual = 0.0;
    for (std::size_t i = 0; i < want; ++i) {
        const auto col = static_cast<Eigen::Index>(m - 1 - i);
        Vector y = basis.leftCols(static_cast<Eigen::Index>(m)) * tri_solver.eigenvectors().col(col);
        y.normalize();
        const double lambda = 2.0 - tri_solver.eigenvalues()(col);
        const Vector r = l.multiply(y).col(0) - lambda * y;
        max_residual = std::max(max_residual, r.lpNorm<Eigen::Infinity>());
        evals(static_cast<Eigen::Index>(i)) = lambda;
        evecs.col(static_cast<Eigen::Index>(i)) = y;
    }
    if (!converged || max_residual > 10.0 * opt.tolerance)
        throw NumericalError("Lanczos did not converge after " + std::to_string(m) +
                             " iterations; achieved residual " + std::to_string(max_residual));
}

} // namespace detail

/// Eigenvectors of the k smallest eigenvalues after the first one.
inline LaplacianPe laplacian_pe(const SparseRowMatrix& l_sym, int k, const LaplacianPeOptions& opt = {}) {
    if (k < 1) throw DimensionError("laplacian_pe: k must be >= 1");
    const std::size_t n = l_sym.rows();
    const auto N = static_cast<Eigen::Index>(n);
    const std::size_t keep = n == 0 ? 0 : std::min<std::size_t>(static_cast<std::size_t>(k), n - 1);

    LaplacianPe out;
    out.embedding = Matrix::Zero(N, k);
    out.eigenvalues = Vector::Zero(static_cast<Eigen::Index>(keep));
    if (keep == 0) {
        out.solver = "none";
        return out;
    }

    Vector evals;
    Matrix evecs;
    if (n <= opt.dense_threshold) {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(l_sym.to_dense());
        if (solver.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
        evals = solver.eigenvalues().head(static_cast<Eigen::Index>(keep + 1));
        evecs = solver.eigenvectors().leftCols(static_cast<Eigen::Index>(keep + 1));
        out.solver = "dense";
    } else {
        double residual = 0.0;
        detail::lanczos_smallest(l_sym, keep + 1, opt, evals, evecs, residual);
        out.solver = "lanczos";
    }

    Matrix retained = evecs.rightCols(static_cast<Eigen::Index>(keep));
    apply_sign_convention(retained);
    out.eigenvalues = evals.tail(static_cast<Eigen::Index>(keep));
    out.embedding.leftCols(static_cast<Eigen::Index>(keep)) = retained;
    for (std::size_t i = 0; i < keep; ++i) {
        const auto c = static_cast<Eigen::Index>(i);
        const Vector r = l_sym.multiply(retained.col(c)).col(0) - out.eigenvalues(c) * retained.col(c);
        out.max_residual = std::max(out.max_residual, r.lpNorm<Eigen::Infinity>());
    }
    return out;
}

struct PcaResult {
    Matrix scores;     // N x d
    Matrix components; // F x d, orthonormal columns
    Vector mean;       // F
};

/// Centers columns and projects onto the top-d right singular directions.
inline PcaResult pca_reduce(const Matrix& x, int d) {
    const auto n = x.rows();
    const auto f = x.cols();
    if (d < 1 || d > std::min(n, f))
        throw DimensionError("pca_reduce: target dimension " + std::to_string(d) + " exceeds min(N, F) = " +
                             std::to_string(std::min(n, f)));
    PcaResult out;
    out.mean = x.colwise().mean().transpose();
    const Matrix centered = x.rowwise() - out.mean.transpose();
    Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
    out.components = svd.matrixV().leftCols(d);
    apply_sign_convention(out.components);
    out.scores = centered * out.components;
    return out;
}

/// Loads precomputed per-node embeddings as a structure block named "external".
inline EncodingBlock load_external_embeddings(const std::filesystem::path& path, std::size_t n,
                                              std::optional<int> dim = std::nullopt) {
    Matrix m;
    if (io::is_tsv(path)) {
        m = io::read_matrix_file(path, std::nullopt, std::nullopt);
    } else {
        m = dim ? io::read_matrix_file(path, std::nullopt, static_cast<std::size_t>(*dim))
                : io::read_matrix_file(path, n, std::nullopt);
    }
    if (static_cast<std::size_t>(m.rows()) != n)
        throw DimensionError("external embeddings: " + std::to_string(m.rows()) + " rows, graph has " +
                             std::to_string(n) + " nodes");
    if (m.cols() < 1) throw DimensionError("external embeddings: no columns");
    if (!m.allFinite()) throw NumericalError("external embeddings contain non-finite entries");
    EncodingBlock b{"external", EncodingKind::structure, std::move(m), {{"path", path.string()}}};
    return b;
}

/// Ordered blocks: raw, smoothed (ascending k), RWPE, LapPE, external.
inline std::vector<EncodingBlock> build_encodings(const Graph& g, const EncoderConfig& cfg,
                                                  const LaplacianPeOptions& lap_opt = {}) {
    cfg.validate();
    if (g.num_features() == 0) throw DimensionError("build_encodings: graph has no feature columns");
    std::vector<EncodingBlock> blocks;

    Matrix raw = g.features();
    nlohmann::json raw_params = nlohmann::json::object();
    if (cfg.pca_dim) {
        raw = pca_reduce(raw, *cfg.pca_dim).scores;
        raw_params["pca_dim"] = *cfg.pca_dim;
    }
    const SparseRowMatrix a_hat = normalized_adjacency(g);

    std::vector<int> orders = cfg.smoothing_orders;
    std::sort(orders.begin(), orders.end());
    orders.erase(std::unique(orders.begin(), orders.end()), orders.end());

    blocks.push_back({"raw", EncodingKind::feature, raw, raw_params});
    Matrix current = raw;
    int current_order = 0;
    for (int k : orders) {
        current = smooth_features(a_hat, current, k - current_order);
        current_order = k;
        blocks.push_back({"smooth_" + std::to_string(k), EncodingKind::feature, current, {{"k", k}}});
    }

    blocks.push_back(
        {"rwpe", EncodingKind::structure, random_walk_pe(a_hat, cfg.rwpe_steps), {{"steps", cfg.rwpe_steps}}});

    LaplacianPe lap = laplacian_pe(sym_normalized_laplacian(g), cfg.lap_k, lap_opt);
    blocks.push_back({"lappe", EncodingKind::structure, std::move(lap.embedding),
                      {{"k", cfg.lap_k}, {"solver", lap.solver}}});

    if (cfg.external_embedding_path)
        blocks.push_back(load_external_embeddings(*cfg.external_embedding_path, g.num_nodes(),
                                                  cfg.external_embedding_dim));
    return blocks;
}

} // namespace tabgfm
