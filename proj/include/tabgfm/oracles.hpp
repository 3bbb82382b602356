#pragma once

// Slow reference implementations used by the self-test and the test suite.
// Plain nested vectors and loops only; nothing here calls into Eigen's solvers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "tabgfm/error.hpp"
#include "tabgfm/graph.hpp"

namespace tabgfm::oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense to_dense(const Matrix& m) {
    Dense out(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
    return out;
}

inline Dense identity(std::size_t n) {
    Dense out(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) out[i][i] = 1.0;
    return out;
}

inline Dense matmul(const Dense& a, const Dense& b) {
    const std::size_t n = a.size(), m = b.empty() ? 0 : b[0].size(), k = b.size();
    Dense out(n, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t < k; ++t) s += a[i][t] * b[t][j];
            out[i][j] = s;
        }
    return out;
}

// D^-1 A built by scanning the edge list for every entry.
inline Dense random_walk_matrix(const Graph& g) {
    const std::size_t n = g.num_nodes();
    Dense a(n, std::vector<double>(n, 0.0));
    for (const auto& e : g.edges()) a[e.u][e.v] = a[e.v][e.u] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::accumulate(a[i].begin(), a[i].end(), 0.0);
        if (d > 0.0)
            for (auto& v : a[i]) v /= d;
    }
    return a;
}

inline Dense sym_laplacian(const Graph& g) {
    const std::size_t n = g.num_nodes();
    Dense a(n, std::vector<double>(n, 0.0));
    for (const auto& e : g.edges()) a[e.u][e.v] = a[e.v][e.u] = 1.0;
    std::vector<double> d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i] = std::accumulate(a[i].begin(), a[i].end(), 0.0);
    Dense l(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        l[i][i] = d[i] > 0.0 ? 1.0 : 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (a[i][j] != 0.0) l[i][j] -= 1.0 / std::sqrt(d[i] * d[j]);
    }
    return l;
}

// k rounds of "replace each node's row by the mean of its neighbors' rows".
inline Dense neighbor_average(const Graph& g, const Dense& x, int k) {
    const std::size_t n = g.num_nodes();
    Dense cur = x;
    for (int step = 0; step < k; ++step) {
        Dense next(n, std::vector<double>(x.empty() ? 0 : x[0].size(), 0.0));
        for (std::size_t v = 0; v < n; ++v) {
            std::vector<std::size_t> nbrs;
            for (const auto& e : g.edges()) {
                if (e.u == v) nbrs.push_back(e.v);
                if (e.v == v) nbrs.push_back(e.u);
            }
            if (nbrs.empty()) continue;
            for (std::size_t f = 0; f < next[v].size(); ++f) {
                double s = 0.0;
                for (auto u : nbrs) s += cur[u][f];
                next[v][f] = s / static_cast<double>(nbrs.size());
            }
        }
        cur = std::move(next);
    }
    return cur;
}

// Diagonals of (D^-1 A)^k for k = 1..steps from dense powers.
inline Dense rwpe_dense(const Graph& g, int steps) {
    const std::size_t n = g.num_nodes();
    const Dense p = random_walk_matrix(g);
    Dense power = identity(n);
    Dense out(n, std::vector<double>(static_cast<std::size_t>(steps), 0.0));
    for (int s = 0; s < steps; ++s) {
        power = matmul(power, p);
        for (std::size_t v = 0; v < n; ++v) out[v][s] = power[v][v];
    }
    return out;
}

// Return probability of node v after k steps, by enumerating every walk.
inline double closed_walk_probability(const Graph& g, std::size_t v, int k) {
    std::vector<std::vector<std::size_t>> nbrs(g.num_nodes());
    for (const auto& e : g.edges()) {
        nbrs[e.u].push_back(e.v);
        nbrs[e.v].push_back(e.u);
    }
    double total = 0.0;
    auto walk = [&](auto&& self, std::size_t at, int left, double prob) -> void {
        if (left == 0) {
            if (at == v) total += prob;
            return;
        }
        if (nbrs[at].empty()) return;
        const double step = prob / static_cast<double>(nbrs[at].size());
        for (auto u : nbrs[at]) self(self, u, left - 1, step);
    };
    walk(walk, v, k, 1.0);
    return total;
}

struct EigenPairs {
    std::vector<double> values; // ascending
    Dense vectors;              // vectors[i] is the eigenvector of values[i]
};

// Cyclic Jacobi rotations for a symmetric matrix.
inline EigenPairs jacobi_eigen(Dense a, double tol = 1e-14, int max_sweeps = 100) {
    const std::size_t n = a.size();
    Dense v = identity(n);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (off < tol * tol) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return a[i][i] < a[j][j]; });
    EigenPairs out;
    for (auto i : order) {
        out.values.push_back(a[i][i]);
        std::vector<double> col(n);
        for (std::size_t k = 0; k < n; ++k) col[k] = v[k][i];
        out.vectors.push_back(std::move(col));
    }
    return out;
}

// Gaussian elimination with partial pivoting; b has one column per right-hand side.
inline Dense gauss_solve(Dense a, Dense b) {
    const std::size_t n = a.size();
    const std::size_t m = b.empty() ? 0 : b[0].size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (a[piv][col] == 0.0) throw NumericalError("gauss_solve: singular matrix");
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            for (std::size_t c = 0; c < m; ++c) b[r][c] -= f * b[col][c];
        }
    }
    Dense x(n, std::vector<double>(m, 0.0));
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t c = 0; c < m; ++c) {
            double s = b[i][c];
            for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k][c];
            x[i][c] = s / a[i][i];
        }
    return x;
}

// Ridge weights from the normal equations solved by elimination.
inline Dense ridge_weights(const Dense& z_aug, const Dense& y, double lambda) {
    const std::size_t n = z_aug.size(), d = z_aug.empty() ? 0 : z_aug[0].size();
    const std::size_t c = y.empty() ? 0 : y[0].size();
    Dense g(d, std::vector<double>(d, 0.0)), rhs(d, std::vector<double>(c, 0.0));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t r = 0; r < n; ++r) g[i][j] += z_aug[r][i] * z_aug[r][j];
        g[i][i] += lambda;
        for (std::size_t k = 0; k < c; ++k)
            for (std::size_t r = 0; r < n; ++r) rhs[i][k] += z_aug[r][i] * y[r][k];
    }
    return gauss_solve(std::move(g), std::move(rhs));
}

// Inverse-distance kNN over z-scored columns; full sort of all candidates.
inline Dense knn_probabilities(const Dense& context, const std::vector<int>& labels, int num_classes,
                               const Dense& queries, int k) {
    const std::size_t n = context.size(), dims = n ? context[0].size() : 0;
    std::vector<double> mean(dims, 0.0), sd(dims, 0.0);
    std::vector<std::size_t> kept;
    for (std::size_t d = 0; d < dims; ++d) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += context[r][d];
        mean[d] = s / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) ss += (context[r][d] - mean[d]) * (context[r][d] - mean[d]);
        sd[d] = std::sqrt(ss / static_cast<double>(n));
        if (sd[d] > 1e-12 * std::max(1.0, std::abs(mean[d]))) kept.push_back(d);
    }
    auto z = [&](const std::vector<double>& row) {
        std::vector<double> out;
        for (auto d : kept) out.push_back((row[d] - mean[d]) / sd[d]);
        return out;
    };
    Dense ctx;
    for (const auto& row : context) ctx.push_back(z(row));
    const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 1)), n);
    Dense out;
    for (const auto& qrow : queries) {
        const auto q = z(qrow);
        std::vector<std::pair<double, std::size_t>> cand;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t d = 0; d < q.size(); ++d) s += (q[d] - ctx[i][d]) * (q[d] - ctx[i][d]);
            cand.emplace_back(std::sqrt(s), i);
        }
        std::sort(cand.begin(), cand.end());
        std::vector<double> p(static_cast<std::size_t>(num_classes), 0.0);
        const bool exact = cand.front().first == 0.0;
        for (std::size_t j = 0; j < kk; ++j) {
            if (exact && cand[j].first != 0.0) break;
            p[static_cast<std::size_t>(labels[cand[j].second])] += exact ? 1.0 : 1.0 / cand[j].first;
        }
        double total = 0.0;
        for (double v : p) total += v;
        for (double& v : p) v /= total;
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace tabgfm::oracle
