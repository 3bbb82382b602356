#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tabgfm/encoders.hpp"
#include "tabgfm/ensemble.hpp"
#include "tabgfm/graph.hpp"
#include "tabgfm/learners.hpp"
#include "tabgfm/linear_gnn.hpp"
#include "tabgfm/oracles.hpp"
#include "tabgfm/rng.hpp"
#include "tabgfm/synthetic.hpp"

namespace tabgfm {

struct SuiteResult {
    std::string name;
    bool passed = true;
    std::size_t checks = 0;
    std::string failure; // first failed assertion
    double seconds = 0.0;
};

namespace selftest_detail {

class Checker {
public:
    void expect(bool ok, const std::string& assertion) {
        ++checks;
        if (!ok && failure.empty()) failure = assertion;
    }
    void near(double got, double want, double tol, const std::string& assertion) {
        expect(std::abs(got - want) <= tol, assertion + " (got " + fmt(got) + ", want " + fmt(want) + ")");
    }
    std::size_t checks = 0;
    std::string failure;

private:
    static std::string fmt(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }
};

inline Graph k3() {
    return Graph(3, {{0, 1}, {1, 2}, {0, 2}}, Matrix::Identity(3, 3), {0, 1, 0}, 2);
}

inline Graph c4() {
    return Graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, Matrix::Identity(4, 4), {0, 1, 0, 1}, 2);
}

inline Matrix random_stochastic(Rng& rng, Eigen::Index rows, int cols) {
    Matrix p(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        double s = 0.0;
        for (int c = 0; c < cols; ++c) s += p(r, c) = rng.uniform01() + 1e-3;
        p.row(r) /= s;
    }
    return p;
}

inline PredictorPool random_pool(Rng& rng, std::size_t members, std::size_t rows, int classes) {
    PredictorPool pool;
    pool.num_classes = classes;
    for (std::size_t i = 0; i < rows; ++i) pool.holdout_labels.push_back(static_cast<int>(rng.uniform_index(classes)));
    for (std::size_t m = 0; m < members; ++m) {
        Predictor p;
        p.id = "p" + std::to_string(m);
        p.holdout_probs = random_stochastic(rng, static_cast<Eigen::Index>(rows), classes);
        p.query_probs = random_stochastic(rng, 4, classes);
        pool.predictors.push_back(std::move(p));
    }
    return pool;
}

inline void smoothing_suite(Checker& ck, bool corrupt) {
    Rng rng(0x5300);
    for (int t = 0; t < 20; ++t) {
        const auto n = 2 + rng.uniform_index(29);
        const Graph g = random_graph(rng, n, 0.2, 3);
        const auto a_hat = normalized_adjacency(g);
        auto x = oracle::to_dense(g.features());
        if (corrupt) x[0][0] += 1.0;
        for (int k = 1; k <= 4; ++k) {
            const Matrix got = smooth_features(a_hat, g.features(), k);
            const auto want = oracle::neighbor_average(g, x, k);
            double err = 0.0;
            for (Eigen::Index r = 0; r < got.rows(); ++r)
                for (Eigen::Index c = 0; c < got.cols(); ++c) err = std::max(err, std::abs(got(r, c) - want[r][c]));
            ck.expect(err <= 1e-10, "smoothed features match neighbor averaging (graph " + std::to_string(t) +
                                        ", k=" + std::to_string(k) + ")");
        }
    }
}

inline void walk_suite(Checker& ck, bool corrupt) {
    const Graph tri = k3();
    const Matrix pe = random_walk_pe(normalized_adjacency(tri), 3);
    const double want[3] = {0.0, 0.5, corrupt ? 0.3 : 0.25};
    for (Eigen::Index v = 0; v < 3; ++v)
        for (int k = 0; k < 3; ++k) ck.near(pe(v, k), want[k], 1e-12, "K3 return probabilities");

    Rng rng(0x3A1C);
    for (int t = 0; t < 20; ++t) {
        const auto n = 2 + rng.uniform_index(7);
        const Graph g = random_graph(rng, n, 0.4, 1);
        const Matrix got = random_walk_pe(normalized_adjacency(g), 5);
        const auto dense = oracle::rwpe_dense(g, 5);
        for (std::size_t v = 0; v < n; ++v)
            for (int k = 0; k < 5; ++k) {
                const auto r = static_cast<Eigen::Index>(v);
                ck.near(got(r, k), dense[v][k], 1e-9, "RWPE matches dense matrix powers");
                ck.near(got(r, k), oracle::closed_walk_probability(g, v, k + 1), 1e-9,
                        "RWPE matches closed-walk enumeration");
            }
    }
}

inline void eigen_suite(Checker& ck, bool corrupt) {
    {
        const auto spectrum = oracle::jacobi_eigen(oracle::sym_laplacian(c4())).values;
        const double want[4] = {0.0, 1.0, 1.0, corrupt ? 2.5 : 2.0};
        for (int i = 0; i < 4; ++i) ck.near(spectrum[i], want[i], 1e-9, "C4 Laplacian spectrum");
        const auto pe = laplacian_pe(sym_normalized_laplacian(c4()), 3);
        for (int i = 0; i < 3; ++i) ck.near(pe.eigenvalues(i), want[i + 1], 1e-9, "C4 retained eigenvalues");
    }
    Rng rng(0xE16E);
    for (int t = 0; t < 20; ++t) {
        const auto n = 3 + rng.uniform_index(18);
        const Graph g = random_graph(rng, n, 0.3, 1);
        const auto l = sym_normalized_laplacian(g);
        const int k = 4;
        const auto pe = laplacian_pe(l, k);
        const auto ref = oracle::jacobi_eigen(oracle::to_dense(l.to_dense()));
        for (Eigen::Index i = 0; i < pe.eigenvalues.size(); ++i)
            ck.near(pe.eigenvalues(i), ref.values[static_cast<std::size_t>(i) + 1], 1e-9,
                    "LapPE eigenvalues match Jacobi");
        ck.expect(pe.max_residual <= 1e-8, "LapPE eigen-residual");
        const auto kept = pe.eigenvalues.size();
        const Matrix v = pe.embedding.leftCols(kept);
        const double gram_dev = (v.transpose() * v - Matrix::Identity(kept, kept)).cwiseAbs().maxCoeff();
        ck.expect(kept == 0 || gram_dev <= 1e-8, "LapPE Gram deviation");
    }
}

inline void ridge_suite(Checker& ck, bool corrupt) {
    Rng rng(0x41D6);
    for (int t = 0; t < 20; ++t) {
        const auto n = static_cast<Eigen::Index>(3 + rng.uniform_index(30));
        const auto d = static_cast<Eigen::Index>(1 + rng.uniform_index(8));
        const int c = 2 + static_cast<int>(rng.uniform_index(3));
        Matrix z(n, d);
        for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = rng.normal();
        std::vector<int> labels;
        for (Eigen::Index i = 0; i < n; ++i) labels.push_back(static_cast<int>(rng.uniform_index(c)));
        const Matrix y = one_hot(labels, c);
        const auto rc = fit_ridge(z, y);
        auto y_ref = oracle::to_dense(y);
        if (corrupt) y_ref[0][0] += 1.0;
        const auto w_ref = oracle::ridge_weights(oracle::to_dense(augment_with_bias(z, true)), y_ref, rc.lambda);
        double err = 0.0;
        for (Eigen::Index i = 0; i < rc.weights.rows(); ++i)
            for (Eigen::Index j = 0; j < rc.weights.cols(); ++j)
                err = std::max(err, std::abs(rc.weights(i, j) - w_ref[i][j]));
        ck.expect(err <= 1e-8, "ridge weights match Gaussian elimination (instance " + std::to_string(t) + ")");
    }
}

inline void greedy_suite(Checker& ck, bool corrupt) {
    Rng rng(0x6E3D);
    for (int t = 0; t < 20; ++t) {
        PredictorPool pool = random_pool(rng, 1 + rng.uniform_index(8), 30, 3);
        const auto w1 = greedy_select(pool, 50, static_cast<std::uint64_t>(t));
        if (corrupt && t == 0) {
            const auto j = static_cast<std::size_t>(
                std::min_element(w1.weights.begin(), w1.weights.end()) - w1.weights.begin());
            pool.predictors[j].holdout_probs = one_hot(pool.holdout_labels, pool.num_classes);
            pool.predictors.push_back(pool.predictors[j]);
        }
        const auto w2 = greedy_select(pool, 50, static_cast<std::uint64_t>(t));
        ck.expect(w1.weights == w2.weights && w1.chosen == w2.chosen, "greedy trace is deterministic");
        if (w1.weights.size() != pool.size()) continue;
        double best_prefix = 0.0;
        for (double s : w1.scores) best_prefix = std::max(best_prefix, s);
        ck.expect(w1.scores[w1.stop_length - 1] == best_prefix, "stopped prefix reaches the best score");
        double best_single = 0.0;
        for (const auto& p : pool.predictors) best_single = std::max(best_single, accuracy(p.holdout_probs, pool.holdout_labels));
        Matrix held = Matrix::Zero(30, 3);
        for (std::size_t i = 0; i < pool.size(); ++i) held += w1.weights[i] * pool.predictors[i].holdout_probs;
        ck.expect(accuracy(held, pool.holdout_labels) >= best_single, "ensemble is at least the best single");
    }
    PredictorPool single = random_pool(rng, 1, 10, 2);
    ck.expect(greedy_select(single).weights == std::vector<double>{1.0}, "single predictor gets weight 1");
}

inline void knn_suite(Checker& ck, bool corrupt) {
    Rng rng(0x4A11);
    KnnLearner knn;
    for (int t = 0; t < 20; ++t) {
        const auto n = static_cast<Eigen::Index>(2 + rng.uniform_index(25));
        const auto d = static_cast<Eigen::Index>(1 + rng.uniform_index(4));
        Matrix ctx(n, d), qry(5, d);
        for (Eigen::Index i = 0; i < ctx.size(); ++i) ctx.data()[i] = std::round(rng.normal() * 2.0);
        for (Eigen::Index i = 0; i < qry.size(); ++i) qry.data()[i] = std::round(rng.normal() * 2.0);
        std::vector<int> labels;
        for (Eigen::Index i = 0; i < n; ++i) labels.push_back(static_cast<int>(rng.uniform_index(3)));
        const Matrix got = knn.fit_predict({ctx, labels, 3, qry, 0, "selftest"});
        auto q_ref = oracle::to_dense(qry);
        if (corrupt) q_ref[0][0] += 3.0;
        const auto want = oracle::knn_probabilities(oracle::to_dense(ctx), labels, 3, q_ref, 10);
        bool same = true;
        for (Eigen::Index r = 0; r < got.rows(); ++r)
            for (Eigen::Index c = 0; c < 3; ++c) same = same && got(r, c) == want[r][c];
        ck.expect(same, "kNN matches brute force exactly (fixture " + std::to_string(t) + ")");
    }
}

struct Suite {
    const char* name;
    void (*body)(Checker&, bool);
};

inline const std::vector<Suite>& suites() {
    static const std::vector<Suite> all = {
        {"smoothing", smoothing_suite},        {"walk-enumeration", walk_suite}, {"dense-eigensolver", eigen_suite},
        {"normal-equations", ridge_suite},     {"greedy-traces", greedy_suite},  {"knn-brute-force", knn_suite},
    };
    return all;
}

} // namespace selftest_detail

inline std::vector<std::string> selftest_suite_names() {
    std::vector<std::string> out;
    for (const auto& s : selftest_detail::suites()) out.emplace_back(s.name);
    return out;
}

/// Runs every oracle suite; `corrupt` names a suite whose fixture is perturbed.
inline std::vector<SuiteResult> run_selftest(const std::optional<std::string>& corrupt = std::nullopt) {
    if (corrupt) {
        const auto names = selftest_suite_names();
        if (std::find(names.begin(), names.end(), *corrupt) == names.end())
            throw ConfigError("selftest: unknown suite '" + *corrupt + "'");
    }
    std::vector<SuiteResult> out;
    for (const auto& s : selftest_detail::suites()) {
        const auto start = std::chrono::steady_clock::now();
        selftest_detail::Checker ck;
        SuiteResult r;
        r.name = s.name;
        try {
            s.body(ck, corrupt && *corrupt == s.name);
        } catch (const std::exception& e) {
            if (ck.failure.empty()) ck.failure = std::string("exception: ") + e.what();
        }
        r.checks = ck.checks;
        r.failure = ck.failure;
        r.passed = ck.failure.empty();
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.push_back(std::move(r));
    }
    return out;
}

inline void print_selftest(const std::vector<SuiteResult>& results, std::ostream& os) {
    char line[256];
    std::snprintf(line, sizeof line, "%-20s %8s %6s %9s\n", "suite", "checks", "status", "seconds");
    os << line;
    for (const auto& r : results) {
        std::snprintf(line, sizeof line, "%-20s %8zu %6s %9.3f\n", r.name.c_str(), r.checks, r.passed ? "PASS" : "FAIL",
                      r.seconds);
        os << line;
        if (!r.passed) os << "  failed: " << r.failure << "\n";
    }
}

} // namespace tabgfm
