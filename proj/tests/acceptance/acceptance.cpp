// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "tabgfm/tabgfm.hpp"

using namespace tabgfm;

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double max_diff(const Matrix& got, const oracle::Dense& want) {
    double err = 0.0;
    for (Eigen::Index r = 0; r < got.rows(); ++r)
        for (Eigen::Index c = 0; c < got.cols(); ++c) err = std::max(err, std::abs(got(r, c) - want[r][c]));
    return err;
}

Graph k3() { return Graph(3, {{0, 1}, {1, 2}, {0, 2}}, Matrix::Ones(3, 1), {0, 1, 0}, 2); }
Graph c4() { return Graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, Matrix::Ones(4, 1), {0, 1, 0, 1}, 2); }

// ---- encoders ----

Outcome encoder_suite() {
    const auto t0 = Clock::now();
    Rng rng(1001);
    double smooth_err = 0.0, rwpe_err = 0.0, resid = 0.0, gram = 0.0, lap_vs_oracle = 0.0;
    for (int t = 0; t < 100; ++t) {
        const Graph g = random_graph(rng, 2 + rng.uniform_index(49), 0.05 + 0.3 * rng.uniform01(), 3);
        const auto a = normalized_adjacency(g);
        for (int k = 1; k <= 3; ++k)
            smooth_err = std::max(smooth_err, max_diff(smooth_features(a, g.features(), k),
                                                       oracle::neighbor_average(g, oracle::to_dense(g.features()), k)));
        const auto l = sym_normalized_laplacian(g);
        const auto pe = laplacian_pe(l, 8);
        const auto kept = pe.eigenvalues.size();
        const Matrix v = pe.embedding.leftCols(kept);
        gram = std::max(gram, (v.transpose() * v - Matrix::Identity(kept, kept)).cwiseAbs().maxCoeff());
        const Matrix ld = l.to_dense();
        for (Eigen::Index i = 0; i < kept; ++i)
            resid = std::max(resid, (ld * v.col(i) - pe.eigenvalues(i) * v.col(i)).norm());
        if (g.num_nodes() <= 30) {
            const auto ref = oracle::jacobi_eigen(oracle::to_dense(ld));
            for (Eigen::Index i = 0; i < kept; ++i)
                lap_vs_oracle = std::max(lap_vs_oracle, std::abs(pe.eigenvalues(i) - ref.values[i + 1]));
        }
    }
    for (int t = 0; t < 100; ++t) {
        const Graph g = random_graph(rng, 2 + rng.uniform_index(11), 0.2 + 0.4 * rng.uniform01(), 1);
        rwpe_err = std::max(rwpe_err, max_diff(random_walk_pe(normalized_adjacency(g), 8), oracle::rwpe_dense(g, 8)));
    }
    const Matrix tri = random_walk_pe(normalized_adjacency(k3()), 3);
    double k3_err = 0.0;
    for (Eigen::Index v = 0; v < 3; ++v)
        k3_err = std::max({k3_err, std::abs(tri(v, 0)), std::abs(tri(v, 1) - 0.5), std::abs(tri(v, 2) - 0.25)});

    const auto c4_ref = oracle::jacobi_eigen(oracle::to_dense(sym_normalized_laplacian(c4()).to_dense()));
    const auto c4_pe = laplacian_pe(sym_normalized_laplacian(c4()), 3);
    const double want[] = {0.0, 1.0, 1.0, 2.0};
    double c4_err = 0.0;
    for (int i = 0; i < 4; ++i) c4_err = std::max(c4_err, std::abs(c4_ref.values[i] - want[i]));
    for (int i = 0; i < 3; ++i) c4_err = std::max(c4_err, std::abs(c4_pe.eigenvalues(i) - c4_ref.values[i + 1]));

    const double secs = seconds_since(t0);
    Outcome o;
    o.passed = smooth_err <= 1e-10 && rwpe_err <= 1e-9 && k3_err <= 1e-12 && resid <= 1e-8 && gram <= 1e-8 &&
               lap_vs_oracle <= 1e-9 && c4_err <= 1e-9 && secs < 30.0;
    o.detail = "smooth " + fmt("%.1e", smooth_err) + ", rwpe " + fmt("%.1e", rwpe_err) + ", K3 " + fmt("%.1e", k3_err) +
               ", lap residual " + fmt("%.1e", resid) + " gram " + fmt("%.1e", gram) + " vs jacobi " +
               fmt("%.1e", lap_vs_oracle) + ", C4 " + fmt("%.1e", c4_err) + ", " + fmt("%.2f s", secs);
    return o;
}

// ---- ridge and normalization ----

Outcome ridge_suite() {
    Rng rng(1002);
    double worst_ratio = 0.0;
    for (int t = 0; t < 100; ++t) {
        const auto n = static_cast<Eigen::Index>(1 + rng.uniform_index(80));
        const auto d = static_cast<Eigen::Index>(1 + rng.uniform_index(30));
        const int c = 2 + static_cast<int>(rng.uniform_index(6));
        Matrix z(n, d);
        const double scale = std::exp(rng.normal() * 2.0);
        for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = rng.normal() * scale;
        std::vector<int> labels;
        for (Eigen::Index i = 0; i < n; ++i) labels.push_back(static_cast<int>(rng.uniform_index(c)));
        const Matrix y = one_hot(labels, c);
        RidgeOptions opt;
        if (t % 2) opt.lambda = std::exp(rng.normal() * 3.0);
        const auto rc = fit_ridge(z, y, opt);
        const Matrix za = augment_with_bias(z, true);
        Matrix g = za.transpose() * za;
        g.diagonal().array() += rc.lambda;
        const Matrix rhs = za.transpose() * y;
        worst_ratio = std::max(worst_ratio, (g * rc.weights - rhs).cwiseAbs().maxCoeff() /
                                                (1e-8 * (1.0 + rhs.cwiseAbs().maxCoeff())));
    }
    std::size_t rank_violations = 0;
    double simplex_err = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const auto c = static_cast<Eigen::Index>(2 + rng.uniform_index(15));
        Vector l(c);
        for (Eigen::Index i = 0; i < c; ++i)
            l(i) = t % 4 == 0 ? std::round(rng.normal() * 2.0) : rng.normal() * std::exp(rng.normal() * 2.0);
        const Vector p = normalize_logits(l);
        simplex_err = std::max(simplex_err, std::abs(p.sum() - 1.0));
        if (p.minCoeff() < 0.0) ++rank_violations;
        for (Eigen::Index i = 0; i < c; ++i)
            for (Eigen::Index j = 0; j < c; ++j)
                if ((l(i) < l(j)) != (p(i) < p(j)) || (l(i) == l(j)) != (p(i) == p(j))) ++rank_violations;
    }
    Outcome o;
    o.passed = worst_ratio <= 1.0 && rank_violations == 0 && simplex_err <= 1e-12;
    o.detail = "residual/bound max " + fmt("%.2e", worst_ratio) + ", rank violations " +
               std::to_string(rank_violations) + ", simplex " + fmt("%.1e", simplex_err);
    return o;
}

// ---- selection ----

Matrix random_probs(Rng& rng, Eigen::Index rows, int cols) {
    Matrix p(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) p(r, c) = rng.uniform01() + 1e-3;
        p.row(r) /= p.row(r).sum();
    }
    return p;
}

PredictorPool random_pool(Rng& rng) {
    PredictorPool pool;
    pool.num_classes = 2 + static_cast<int>(rng.uniform_index(4));
    const auto rows = static_cast<Eigen::Index>(10 + rng.uniform_index(50));
    for (Eigen::Index r = 0; r < rows; ++r)
        pool.holdout_labels.push_back(static_cast<int>(rng.uniform_index(pool.num_classes)));
    const auto members = 1 + rng.uniform_index(12);
    for (std::size_t i = 0; i < members; ++i)
        pool.predictors.push_back({"p" + std::to_string(i), PredictorKind::tfm, "", random_probs(rng, rows, pool.num_classes),
                                   random_probs(rng, 3, pool.num_classes), {}});
    if (rng.bernoulli(0.3)) pool.predictors.push_back(pool.predictors.front()); // force ties
    return pool;
}

Outcome selection_suite() {
    Rng rng(1003);
    Outcome o;
    std::size_t below_best = 0, nondeterministic = 0, bad_prefix = 0;
    PredictorPool single;
    single.num_classes = 3;
    single.holdout_labels = {0, 1, 2, 1};
    single.predictors.push_back({"only", PredictorKind::tfm, "", random_probs(rng, 4, 3), random_probs(rng, 2, 3), {}});
    const bool single_ok = greedy_select(single, 50, 0).weights == std::vector<double>{1.0};
    for (int t = 0; t < 200; ++t) {
        const PredictorPool pool = random_pool(rng);
        const auto w = greedy_select(pool, 50, static_cast<std::uint64_t>(t));
        const auto again = greedy_select(pool, 50, static_cast<std::uint64_t>(t));
        if (w.chosen != again.chosen || w.weights != again.weights) ++nondeterministic;
        double best_single = 0.0;
        for (const auto& p : pool.predictors)
            best_single = std::max(best_single, accuracy(p.holdout_probs, pool.holdout_labels));
        Matrix mix = Matrix::Zero(pool.predictors[0].holdout_probs.rows(), pool.num_classes);
        for (std::size_t i = 0; i < pool.size(); ++i) mix += w.weights[i] * pool.predictors[i].holdout_probs;
        const double ens = accuracy(mix, pool.holdout_labels);
        if (ens < best_single) ++below_best;
        // prefix scores recomputed from the trace
        Matrix running = Matrix::Zero(mix.rows(), pool.num_classes);
        double top = -1.0;
        for (std::size_t i = 0; i < w.chosen.size(); ++i) {
            running += pool.predictors[w.chosen[i]].holdout_probs;
            top = std::max(top, accuracy(running / static_cast<double>(i + 1), pool.holdout_labels));
        }
        if (ens != top) ++bad_prefix;
    }
    o.passed = single_ok && below_best == 0 && nondeterministic == 0 && bad_prefix == 0;
    o.detail = std::string("single weight ") + (single_ok ? "1" : "!=1") + ", below best " + std::to_string(below_best) +
               "/200, nondeterministic " + std::to_string(nondeterministic) + ", prefix mismatches " +
               std::to_string(bad_prefix);
    return o;
}

// ---- subsampling and ECOC ----

// Decodes column identities from cell values (1000 * column + row) and records them per subtask.
class ColumnSpy final : public TabularLearner {
public:
    std::string backend() const override { return "spy"; }
    Matrix fit_predict(const LearnerTask& t) override {
        check_task(t);
        std::vector<long> cols;
        for (Eigen::Index c = 0; c < t.context.cols(); ++c) {
            const long ctx_col = std::lround(std::floor(t.context(0, c) / 1000.0));
            const long qry_col = std::lround(std::floor(t.queries(0, c) / 1000.0));
            if (ctx_col != qry_col) mismatched = true;
            cols.push_back(ctx_col);
        }
        const std::string sub = t.request_id.substr(0, t.request_id.rfind('/'));
        seen[sub].insert(cols);
        ++calls;
        return Matrix::Constant(t.queries.rows(), t.num_classes, 1.0 / t.num_classes);
    }
    std::map<std::string, std::set<std::vector<long>>> seen;
    bool mismatched = false;
    std::size_t calls = 0;
};

NodeTable labeled_table(int classes, int per_class, Eigen::Index feat, Eigen::Index structure, bool coded) {
    const auto n = static_cast<Eigen::Index>(classes * per_class + 12);
    Rng rng(77);
    Matrix f(n, feat), s(n, structure);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < feat; ++c) f(r, c) = coded ? 1000.0 * static_cast<double>(c) + static_cast<double>(r) : rng.normal();
        for (Eigen::Index c = 0; c < structure; ++c)
            s(r, c) = coded ? 1000.0 * static_cast<double>(feat + c) + static_cast<double>(r) : rng.normal();
    }
    std::vector<int> labels(static_cast<std::size_t>(n), kUnlabeled);
    std::vector<std::size_t> labeled, query;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i < classes * per_class) {
            labels[static_cast<std::size_t>(i)] = static_cast<int>(i % classes);
            labeled.push_back(static_cast<std::size_t>(i));
        } else {
            query.push_back(static_cast<std::size_t>(i));
        }
    }
    return build_node_table({{"f", EncodingKind::feature, f, {}}, {"s", EncodingKind::structure, s, {}}}, labels,
                            labeled, query, classes);
}

Outcome subsampling_suite() {
    Rng rng(1004);
    std::size_t quota_violations = 0;
    for (int t = 0; t < 100; ++t) {
        const auto classes = 2 + rng.uniform_index(15);
        std::vector<std::size_t> counts;
        for (std::size_t c = 0; c < classes; ++c)
            counts.push_back(rng.bernoulli(0.1) ? 0 : 1 + rng.uniform_index(t % 3 == 0 ? 4 : 3000));
        const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
        if (total == 0) {
            counts[0] = 1;
        }
        const std::size_t n = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
        std::size_t present = 0;
        for (auto c : counts) present += c > 0;
        const std::size_t budget = 1 + rng.uniform_index(n + 3);
        const auto q = class_quotas(counts, budget);
        if (std::accumulate(q.begin(), q.end(), std::size_t{0}) != std::min(budget, n)) ++quota_violations;
        for (std::size_t c = 0; c < classes; ++c) {
            double exact;
            if (budget >= n) {
                exact = static_cast<double>(counts[c]);
            } else if (budget >= present) {
                if (counts[c] > 0 && q[c] < 1) ++quota_violations;
                exact = counts[c] == 0 ? 0.0
                                       : 1.0 + static_cast<double>(budget - present) * static_cast<double>(counts[c] - 1) /
                                                   static_cast<double>(n - present);
            } else {
                exact = static_cast<double>(budget) * static_cast<double>(counts[c]) / static_cast<double>(n);
            }
            if (q[c] > counts[c] || std::abs(static_cast<double>(q[c]) - exact) >= 1.0) ++quota_violations;
        }
    }

    const NodeTable coded = labeled_table(5, 30, 420, 160, true);
    ColumnSpy spy;
    make_tfm_predictors(coded, 6, spy, 9, make_fold_plan(coded.labeled_classes, 2, 9), {40, 300, 100, 2});
    bool frozen = !spy.mismatched && spy.seen.size() == 6 && spy.calls == 18;
    for (const auto& [sub, sets] : spy.seen) frozen = frozen && sets.size() == 1 && sets.begin()->size() == 400;

    const NodeTable forty = labeled_table(40, 4, 20, 8, false);
    const auto plan = make_fold_plan(forty.labeled_classes, 2, 0);
    std::string gate;
    bool gate_ok = true;
    for (const auto& [b, want] : {std::pair{4, 0u}, std::pair{5, 1u}, std::pair{10, 2u}}) {
        LogRegLearner lr;
        const auto r = make_tfm_predictors(forty, b, lr, 1, plan, {200, 300, 100, 2});
        gate += (gate.empty() ? "" : " ") + std::to_string(b) + "->" + std::to_string(r.predictors.size());
        gate_ok = gate_ok && r.predictors.size() == want;
    }

    bool decode_ok = true;
    for (int c : {11, 40, 90}) {
        const auto ep = ecoc_plan(c, ceil_div(c, 9), 17);
        std::vector<int> truth;
        for (int i = 0; i < 4 * c; ++i) truth.push_back((i * 13) % c);
        std::vector<Matrix> parts;
        for (const auto& st : ep.rounds.at(0).subtasks) {
            const auto meta = st.meta_labels(truth, c);
            Matrix p = Matrix::Zero(static_cast<Eigen::Index>(truth.size()), st.num_meta_classes());
            for (std::size_t i = 0; i < truth.size(); ++i) p(static_cast<Eigen::Index>(i), meta[i]) = 1.0;
            parts.push_back(p);
        }
        const Matrix d = ecoc_decode(ep.rounds[0], parts, c);
        for (std::size_t i = 0; i < truth.size(); ++i) {
            Matrix want = Matrix::Zero(1, c);
            want(0, truth[i]) = 1.0;
            if (d.row(static_cast<Eigen::Index>(i)) != want) decode_ok = false;
        }
    }
    Outcome o;
    o.passed = quota_violations == 0 && frozen && gate_ok && decode_ok;
    o.detail = "quota violations " + std::to_string(quota_violations) + ", frozen columns " + (frozen ? "yes" : "no") +
               ", C=40 gate " + gate + ", ECOC decode " + (decode_ok ? "exact" : "wrong");
    return o;
}

// ---- native learners ----

Outcome learner_suite() {
    Rng rng(1005);
    double fd_err = 0.0;
    for (int t = 0; t < 20; ++t) {
        const auto n = static_cast<Eigen::Index>(3 + rng.uniform_index(25));
        const auto d = static_cast<Eigen::Index>(1 + rng.uniform_index(6));
        const int c = 2 + static_cast<int>(rng.uniform_index(4));
        Matrix x(n, d);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
        std::vector<int> y;
        for (Eigen::Index i = 0; i < n; ++i) y.push_back(static_cast<int>(rng.uniform_index(c)));
        LogRegParams p{Matrix(d, c), Vector(c)};
        for (Eigen::Index i = 0; i < p.weights.size(); ++i) p.weights.data()[i] = 0.5 * rng.normal();
        for (Eigen::Index i = 0; i < c; ++i) p.bias(i) = 0.5 * rng.normal();
        const auto lg = logreg_loss_and_gradient(x, y, p, 1e-2);
        const double h = 1e-5;
        auto loss_at = [&](const LogRegParams& q) { return logreg_loss_and_gradient(x, y, q, 1e-2).loss; };
        for (Eigen::Index i = 0; i < p.weights.size(); ++i) {
            LogRegParams a = p, b = p;
            a.weights.data()[i] += h;
            b.weights.data()[i] -= h;
            fd_err = std::max(fd_err, std::abs((loss_at(a) - loss_at(b)) / (2 * h) - lg.grad.weights.data()[i]));
        }
        for (Eigen::Index i = 0; i < c; ++i) {
            LogRegParams a = p, b = p;
            a.bias(i) += h;
            b.bias(i) -= h;
            fd_err = std::max(fd_err, std::abs((loss_at(a) - loss_at(b)) / (2 * h) - lg.grad.bias(i)));
        }
    }
    std::size_t knn_mismatch = 0;
    KnnLearner knn;
    for (int t = 0; t < 50; ++t) {
        const auto n = static_cast<Eigen::Index>(1 + rng.uniform_index(60));
        const auto d = static_cast<Eigen::Index>(1 + rng.uniform_index(5));
        Matrix ctx(n, d), qry(10, d);
        std::vector<int> y;
        for (Eigen::Index i = 0; i < n; ++i) {
            const int cls = static_cast<int>(rng.uniform_index(2));
            y.push_back(cls);
            for (Eigen::Index j = 0; j < d; ++j) ctx(i, j) = rng.normal() + (cls ? 2.0 : -2.0);
        }
        for (Eigen::Index i = 0; i < qry.size(); ++i) qry.data()[i] = 3.0 * rng.normal();
        if (t % 4 == 0) qry.row(0) = ctx.row(n - 1);
        const Matrix got = knn.fit_predict({ctx, y, 2, qry, 0, ""});
        const auto want = oracle::knn_probabilities(oracle::to_dense(ctx), y, 2, oracle::to_dense(qry), 10);
        for (Eigen::Index r = 0; r < got.rows(); ++r)
            for (Eigen::Index c = 0; c < 2; ++c) knn_mismatch += got(r, c) != want[r][c];
    }
    Outcome o;
    o.passed = fd_err <= 1e-5 && knn_mismatch == 0;
    o.detail = "gradient vs central FD " + fmt("%.1e", fd_err) + ", kNN mismatched entries " + std::to_string(knn_mismatch);
    return o;
}

// ---- end to end ----

struct EvalResult {
    double accuracy = 0.0;
    double seconds = 0.0;
};

RunConfig base_config() {
    RunConfig c;
    c.dataset = "in-memory";
    c.seeds = {0};
    return c;
}

EvalResult run_one(const RunConfig& cfg, const Dataset& ds, const std::vector<EncodingBlock>& blocks, std::uint64_t seed) {
    const auto t0 = Clock::now();
    LogRegLearner lr;
    std::map<std::string, double> timings;
    const SeedResult r = run_seed(cfg, ds, blocks, seed, lr, timings);
    return {r.test_accuracy, seconds_since(t0)};
}

// Plain logistic regression on the propagated features, same splits.
double smoothed_logreg_accuracy(const Dataset& ds, std::uint64_t seed) {
    const Matrix ax = smooth_features(normalized_adjacency(ds.graph), ds.graph.features(), 1);
    const auto& split = ds.split_for_seed(seed);
    Matrix ctx(static_cast<Eigen::Index>(split.train.size()), ax.cols());
    Matrix qry(static_cast<Eigen::Index>(split.test.size()), ax.cols());
    std::vector<int> y, truth;
    for (std::size_t i = 0; i < split.train.size(); ++i) {
        ctx.row(static_cast<Eigen::Index>(i)) = ax.row(static_cast<Eigen::Index>(split.train[i]));
        y.push_back(ds.graph.labels()[split.train[i]]);
    }
    for (std::size_t i = 0; i < split.test.size(); ++i) {
        qry.row(static_cast<Eigen::Index>(i)) = ax.row(static_cast<Eigen::Index>(split.test[i]));
        truth.push_back(ds.graph.labels()[split.test[i]]);
    }
    LogRegLearner lr;
    return accuracy(lr.fit_predict({ctx, y, ds.graph.num_classes(), qry, 0, ""}), truth);
}

Outcome end_to_end() {
    SyntheticParams p; // 2 blocks, N=400, p_in 0.1, p_out 0.01, shift 2
    const Dataset ds = make_synthetic(p);
    const auto blocks = build_encodings(ds.graph, EncoderConfig{});
    RunConfig cfg = base_config();
    cfg.num_models = 4;
    double oracle_mean = 0.0, mean = 0.0, slowest = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        oracle_mean += smoothed_logreg_accuracy(ds, seed) / 5.0;
        const auto r = run_one(cfg, ds, blocks, seed);
        mean += r.accuracy / 5.0;
        slowest = std::max(slowest, r.seconds);
    }
    Outcome o;
    o.passed = oracle_mean >= 0.97 && mean >= 0.95 && slowest < 60.0;
    o.detail = "reference LR on smoothed features " + fmt("%.4f", oracle_mean) + ", pipeline mean " + fmt("%.4f", mean) +
               ", slowest seed " + fmt("%.2f s", slowest);
    return o;
}

// 20 SBM tasks whose feature noise, class count and density differ per task.
struct Task {
    Dataset ds;
    std::vector<EncodingBlock> blocks;
};

const std::vector<Task>& task_suite() {
    static const std::vector<Task> tasks = [] {
        std::vector<Task> out;
        Rng rng(2024);
        for (int t = 0; t < 20; ++t) {
            SyntheticParams p;
            p.seed = 100 + static_cast<std::uint64_t>(t);
            p.blocks = 2 + static_cast<int>(rng.uniform_index(4));
            p.nodes = 300;
            p.p_in = 0.04 + 0.06 * rng.uniform01();
            p.p_out = 0.01 + 0.02 * rng.uniform01();
            p.noise = 1.0 + 2.5 * rng.uniform01();
            p.shift = 2.0;
            p.num_splits = 1;
            Dataset ds = make_synthetic(p);
            auto blocks = build_encodings(ds.graph, EncoderConfig{});
            out.push_back({std::move(ds), std::move(blocks)});
        }
        return out;
    }();
    return tasks;
}

struct SuiteStats {
    double mean = 0.0;
    double std_error = 0.0;
};

SuiteStats run_suite(const RunConfig& cfg) {
    std::vector<double> acc;
    for (const auto& t : task_suite()) acc.push_back(run_one(cfg, t.ds, t.blocks, 0).accuracy);
    SuiteStats s;
    const auto n = static_cast<double>(acc.size());
    s.mean = std::accumulate(acc.begin(), acc.end(), 0.0) / n;
    double ss = 0.0;
    for (double a : acc) ss += (a - s.mean) * (a - s.mean);
    s.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    return s;
}

Outcome scaling() {
    const auto t0 = Clock::now();
    RunConfig cfg = base_config();
    cfg.num_models = 1;
    const SuiteStats b1 = run_suite(cfg);
    cfg.num_models = 8;
    const SuiteStats b8 = run_suite(cfg);
    const double secs = seconds_since(t0);
    Outcome o;
    o.passed = b8.mean >= b1.mean - b1.std_error && secs < 600.0;
    o.detail = "B=1 " + fmt("%.4f", b1.mean) + " (se " + fmt("%.4f", b1.std_error) + "), B=8 " + fmt("%.4f", b8.mean) +
               " (se " + fmt("%.4f", b8.std_error) + "), " + fmt("%.1f s", secs);
    return o;
}

Outcome ablation() {
    RunConfig cfg = base_config();
    cfg.num_models = 8;
    const SuiteStats full = run_suite(cfg);
    cfg.ensemble_mode = EnsembleMode::uniform;
    const SuiteStats uniform = run_suite(cfg);
    cfg.ensemble_mode = EnsembleMode::selected;
    cfg.no_linear_gnn = true;
    const SuiteStats no_linear = run_suite(cfg);
    Outcome o;
    o.passed = full.mean >= uniform.mean - uniform.std_error && full.mean >= no_linear.mean - no_linear.std_error;
    o.detail = "full " + fmt("%.4f", full.mean) + ", uniform " + fmt("%.4f", uniform.mean) + " (se " +
               fmt("%.4f", uniform.std_error) + "), no linear " + fmt("%.4f", no_linear.mean) + " (se " +
               fmt("%.4f", no_linear.std_error) + ")";
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"encoder oracle suite", encoder_suite},
        {"ridge and normalization suite", ridge_suite},
        {"selection suite", selection_suite},
        {"subsampling and ECOC suite", subsampling_suite},
        {"native learner suite", learner_suite},
        {"end-to-end synthetic SBM", end_to_end},
        {"scaling B=8 vs B=1", scaling},
        {"ablation ordering", ablation},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.passed;
        std::printf("%s  %-30s  %s\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
