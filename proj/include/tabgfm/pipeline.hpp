#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabgfm/dataset_io.hpp"
#include "tabgfm/encoders.hpp"
#include "tabgfm/ensemble.hpp"
#include "tabgfm/error.hpp"
#include "tabgfm/external_learner.hpp"
#include "tabgfm/folds.hpp"
#include "tabgfm/learners.hpp"
#include "tabgfm/linear_gnn.hpp"
#include "tabgfm/node_table.hpp"
#include "tabgfm/tfm_predictors.hpp"

namespace tabgfm {

enum class BackendKind { native_logreg, native_knn, external };
enum class EnsembleMode { selected, uniform };
enum class HoldoutMode { kfold, single };

// PCA target dimensions of the high-dimensional benchmark graphs.
inline std::optional<int> default_pca_dim(const std::string& dataset_name) {
    static const std::map<std::string, int> dims = {
        {"full-cora", 2048}, {"full_cora", 2048}, {"co-cs", 2048}, {"co_cs", 2048},
        {"co-physics", 1024}, {"co_physics", 1024}};
    if (auto it = dims.find(dataset_name); it != dims.end()) return it->second;
    return std::nullopt;
}

struct RunConfig {
    std::filesystem::path dataset;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    int num_models = 10; // B
    BackendKind backend = BackendKind::native_logreg;
    std::string endpoint;
    double timeout_s = 300.0;
    EncoderConfig encoder;
    bool pca_auto = false;
    bool include_val_in_context = false;
    EnsembleMode ensemble_mode = EnsembleMode::selected;
    bool no_linear_gnn = false;
    bool no_tfm = false;
    std::optional<std::filesystem::path> output;
    int max_iters = 50;
    TfmOptions tfm;
    LinearOptions linear;
    HoldoutMode holdout_mode = HoldoutMode::kfold;
    double holdout_fraction = 0.2;

    void validate() const {
        if (dataset.empty()) throw ConfigError("config: 'dataset' is required");
        if (seeds.empty()) throw ConfigError("config: 'seeds' must be non-empty");
        if (num_models < 0) throw ConfigError("config: 'B' must be >= 0");
        if (backend == BackendKind::external && endpoint.empty())
            throw ConfigError("config: external backend needs an endpoint (or TABGFM_ENDPOINT)");
        if (!(timeout_s > 0.0)) throw ConfigError("config: timeout_s must be positive");
        if (max_iters < 1) throw ConfigError("config: selection.max_iters must be >= 1");
        if (tfm.folds < 2) throw ConfigError("config: tfm_folds must be >= 2");
        if (linear.folds < 2) throw ConfigError("config: linear.folds must be >= 2");
        if (!(linear.epsilon > 0.0)) throw ConfigError("config: linear.epsilon must be positive");
        if (linear.ridge.lambda && !(*linear.ridge.lambda > 0.0)) throw ConfigError("config: linear.lambda must be positive");
        if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
            throw ConfigError("config: holdout.fraction must be in (0, 1)");
        SubsampleSpec{0, tfm.row_budget, tfm.feature_col_budget, tfm.structure_col_budget}.validate();
        encoder.validate();
    }

    nlohmann::json to_json() const {
        using nlohmann::json;
        json j;
        j["dataset"] = dataset.string();
        j["seeds"] = seeds;
        j["B"] = num_models;
        j["backend"] = {{"kind", backend == BackendKind::native_logreg ? "native-logreg"
                                 : backend == BackendKind::native_knn  ? "native-knn"
                                                                       : "external"},
                        {"endpoint", endpoint},
                        {"timeout_s", timeout_s}};
        json enc = encoder.to_json();
        enc.erase("pca_dim");
        j["encoder"] = enc;
        j["pca_dim"] = pca_auto ? json("auto") : encoder.pca_dim ? json(*encoder.pca_dim) : json(nullptr);
        j["include_val_in_context"] = include_val_in_context;
        j["ensemble_mode"] = ensemble_mode == EnsembleMode::selected ? "selected" : "uniform";
        j["ablation"] = {{"no_linear_gnn", no_linear_gnn}, {"no_tfm", no_tfm}};
        j["output"] = output ? json(output->string()) : json(nullptr);
        j["selection"] = {{"max_iters", max_iters}};
        j["subsample"] = {{"row_budget", tfm.row_budget},
                          {"feature_col_budget", tfm.feature_col_budget},
                          {"structure_col_budget", tfm.structure_col_budget}};
        j["tfm_folds"] = tfm.folds;
        j["linear"] = {{"folds", linear.folds},
                       {"lambda", linear.ridge.lambda ? json(*linear.ridge.lambda) : json(nullptr)},
                       {"epsilon", linear.epsilon}};
        j["holdout"] = {{"mode", holdout_mode == HoldoutMode::kfold ? "kfold" : "single"},
                        {"fraction", holdout_fraction}};
        return j;
    }

    /// Strict parse: unknown keys and wrongly typed values are ConfigErrors.
    /// Relative paths resolve against `base_dir`.
    static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
        using nlohmann::json;
        auto require_object = [](const json& o, const std::string& where) {
            if (!o.is_object()) throw ConfigError("config: '" + where + "' must be an object");
        };
        auto check_keys = [](const json& o, const std::set<std::string>& allowed, const std::string& where) {
            for (const auto& [k, v] : o.items())
                if (!allowed.count(k)) throw ConfigError("config: unknown key '" + where + k + "'");
        };
        auto get_int = [](const json& v, const std::string& key) -> long long {
            if (!v.is_number_integer()) throw ConfigError("config: '" + key + "' must be an integer");
            return v.get<long long>();
        };
        auto get_num = [](const json& v, const std::string& key) -> double {
            if (!v.is_number()) throw ConfigError("config: '" + key + "' must be a number");
            return v.get<double>();
        };
        auto get_bool = [](const json& v, const std::string& key) -> bool {
            if (!v.is_boolean()) throw ConfigError("config: '" + key + "' must be a boolean");
            return v.get<bool>();
        };
        auto get_str = [](const json& v, const std::string& key) -> std::string {
            if (!v.is_string()) throw ConfigError("config: '" + key + "' must be a string");
            return v.get<std::string>();
        };
        auto resolve = [&](const std::string& p) {
            std::filesystem::path path(p);
            return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
        };

        require_object(j, "<root>");
        check_keys(j,
                   {"dataset", "seeds", "B", "backend", "encoder", "pca_dim", "include_val_in_context", "ensemble_mode",
                    "ablation", "output", "selection", "subsample", "tfm_folds", "linear", "holdout"},
                   "");
        RunConfig c;
        if (!j.contains("dataset")) throw ConfigError("config: 'dataset' is required");
        c.dataset = resolve(get_str(j.at("dataset"), "dataset"));
        if (j.contains("seeds")) {
            if (!j.at("seeds").is_array()) throw ConfigError("config: 'seeds' must be an array");
            c.seeds.clear();
            for (const auto& s : j.at("seeds")) {
                const auto v = get_int(s, "seeds[]");
                if (v < 0) throw ConfigError("config: seeds must be non-negative");
                c.seeds.push_back(static_cast<std::uint64_t>(v));
            }
        }
        if (j.contains("B")) c.num_models = static_cast<int>(get_int(j.at("B"), "B"));
        if (j.contains("backend")) {
            const auto& b = j.at("backend");
            require_object(b, "backend");
            check_keys(b, {"kind", "endpoint", "timeout_s"}, "backend.");
            if (b.contains("kind")) {
                const auto kind = get_str(b.at("kind"), "backend.kind");
                if (kind == "native-logreg") c.backend = BackendKind::native_logreg;
                else if (kind == "native-knn") c.backend = BackendKind::native_knn;
                else if (kind == "external") c.backend = BackendKind::external;
                else throw ConfigError("config: unknown backend kind '" + kind + "'");
            }
            if (b.contains("endpoint")) c.endpoint = get_str(b.at("endpoint"), "backend.endpoint");
            if (b.contains("timeout_s")) c.timeout_s = get_num(b.at("timeout_s"), "backend.timeout_s");
        }
        if (j.contains("encoder")) {
            const auto& e = j.at("encoder");
            require_object(e, "encoder");
            check_keys(e, {"smoothing_orders", "rwpe_steps", "lap_k", "external_embedding_path", "external_embedding_dim"},
                       "encoder.");
            if (e.contains("smoothing_orders")) {
                if (!e.at("smoothing_orders").is_array()) throw ConfigError("config: smoothing_orders must be an array");
                c.encoder.smoothing_orders.clear();
                for (const auto& k : e.at("smoothing_orders"))
                    c.encoder.smoothing_orders.push_back(static_cast<int>(get_int(k, "smoothing_orders[]")));
            }
            if (e.contains("rwpe_steps")) c.encoder.rwpe_steps = static_cast<int>(get_int(e.at("rwpe_steps"), "rwpe_steps"));
            if (e.contains("lap_k")) c.encoder.lap_k = static_cast<int>(get_int(e.at("lap_k"), "lap_k"));
            if (e.contains("external_embedding_path") && !e.at("external_embedding_path").is_null())
                c.encoder.external_embedding_path =
                    resolve(get_str(e.at("external_embedding_path"), "external_embedding_path"));
            if (e.contains("external_embedding_dim") && !e.at("external_embedding_dim").is_null())
                c.encoder.external_embedding_dim =
                    static_cast<int>(get_int(e.at("external_embedding_dim"), "external_embedding_dim"));
        }
        if (j.contains("pca_dim") && !j.at("pca_dim").is_null()) {
            const auto& p = j.at("pca_dim");
            if (p.is_string() && p.get<std::string>() == "auto") c.pca_auto = true;
            else c.encoder.pca_dim = static_cast<int>(get_int(p, "pca_dim"));
        }
        if (j.contains("include_val_in_context"))
            c.include_val_in_context = get_bool(j.at("include_val_in_context"), "include_val_in_context");
        if (j.contains("ensemble_mode")) {
            const auto m = get_str(j.at("ensemble_mode"), "ensemble_mode");
            if (m == "selected") c.ensemble_mode = EnsembleMode::selected;
            else if (m == "uniform") c.ensemble_mode = EnsembleMode::uniform;
            else throw ConfigError("config: ensemble_mode must be 'selected' or 'uniform'");
        }
        if (j.contains("ablation")) {
            const auto& a = j.at("ablation");
            require_object(a, "ablation");
            check_keys(a, {"no_linear_gnn", "no_tfm"}, "ablation.");
            if (a.contains("no_linear_gnn")) c.no_linear_gnn = get_bool(a.at("no_linear_gnn"), "ablation.no_linear_gnn");
            if (a.contains("no_tfm")) c.no_tfm = get_bool(a.at("no_tfm"), "ablation.no_tfm");
        }
        if (j.contains("output") && !j.at("output").is_null()) c.output = resolve(get_str(j.at("output"), "output"));
        if (j.contains("selection")) {
            const auto& s = j.at("selection");
            require_object(s, "selection");
            check_keys(s, {"max_iters"}, "selection.");
            if (s.contains("max_iters")) c.max_iters = static_cast<int>(get_int(s.at("max_iters"), "selection.max_iters"));
        }
        if (j.contains("subsample")) {
            const auto& s = j.at("subsample");
            require_object(s, "subsample");
            check_keys(s, {"row_budget", "feature_col_budget", "structure_col_budget"}, "subsample.");
            auto nonneg = [&](const char* key) {
                const auto v = get_int(s.at(key), std::string("subsample.") + key);
                if (v < 0) throw ConfigError(std::string("config: subsample.") + key + " must be >= 0");
                return static_cast<std::size_t>(v);
            };
            if (s.contains("row_budget")) c.tfm.row_budget = nonneg("row_budget");
            if (s.contains("feature_col_budget")) c.tfm.feature_col_budget = nonneg("feature_col_budget");
            if (s.contains("structure_col_budget")) c.tfm.structure_col_budget = nonneg("structure_col_budget");
        }
        if (j.contains("tfm_folds")) c.tfm.folds = static_cast<int>(get_int(j.at("tfm_folds"), "tfm_folds"));
        if (j.contains("linear")) {
            const auto& l = j.at("linear");
            require_object(l, "linear");
            check_keys(l, {"folds", "lambda", "epsilon"}, "linear.");
            if (l.contains("folds")) c.linear.folds = static_cast<int>(get_int(l.at("folds"), "linear.folds"));
            if (l.contains("lambda") && !l.at("lambda").is_null()) c.linear.ridge.lambda = get_num(l.at("lambda"), "linear.lambda");
            if (l.contains("epsilon")) c.linear.epsilon = get_num(l.at("epsilon"), "linear.epsilon");
        }
        if (j.contains("holdout")) {
            const auto& h = j.at("holdout");
            require_object(h, "holdout");
            check_keys(h, {"mode", "fraction"}, "holdout.");
            if (h.contains("mode")) {
                const auto m = get_str(h.at("mode"), "holdout.mode");
                if (m == "kfold") c.holdout_mode = HoldoutMode::kfold;
                else if (m == "single") c.holdout_mode = HoldoutMode::single;
                else throw ConfigError("config: holdout.mode must be 'kfold' or 'single'");
            }
            if (h.contains("fraction")) c.holdout_fraction = get_num(h.at("fraction"), "holdout.fraction");
        }
        c.validate();
        return c;
    }

    static RunConfig load(const std::filesystem::path& path) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(io::read_text(path));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(path.string() + ": " + e.what());
        } catch (const DatasetError& e) {
            throw ConfigError(e.what());
        }
        return from_json(j, path.parent_path());
    }

    // TABGFM_ENDPOINT overrides the configured endpoint.
    void apply_environment() {
        if (const char* ep = std::getenv("TABGFM_ENDPOINT"); ep && *ep) endpoint = ep;
    }
};

struct SeedResult {
    std::uint64_t seed = 0;
    double test_accuracy = 0.0;
    double holdout_accuracy = 0.0;
    std::size_t num_tfm = 0;
    std::size_t num_linear = 0;
    std::vector<std::pair<std::string, double>> weights; // nonzero only
    std::vector<std::string> warnings;

    friend bool operator==(const SeedResult&, const SeedResult&) = default;
};

struct MetricsReport {
    nlohmann::json config;
    int num_models = 0;
    std::vector<SeedResult> per_seed;
    double mean = 0.0;
    double std = 0.0;       // sample standard deviation (0 for one seed)
    double std_error = 0.0; // std / sqrt(#seeds)
    std::vector<std::string> warnings;
    std::map<std::string, double> timings; // seconds per stage

    void finalize() {
        const auto n = static_cast<double>(per_seed.size());
        mean = 0.0;
        for (const auto& s : per_seed) mean += s.test_accuracy;
        mean /= n;
        double ss = 0.0;
        for (const auto& s : per_seed) ss += (s.test_accuracy - mean) * (s.test_accuracy - mean);
        std = per_seed.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        std_error = std / std::sqrt(n);
    }

    /// JSON document; timings are omitted when `with_timings` is false so two
    /// identical runs serialize to identical bytes.
    nlohmann::json to_json(bool with_timings = true) const {
        using nlohmann::json;
        json seeds = json::array();
        for (const auto& s : per_seed) {
            json w = json::object();
            for (const auto& [id, v] : s.weights) w[id] = v;
            seeds.push_back({{"seed", s.seed},
                             {"test_accuracy", s.test_accuracy},
                             {"holdout_accuracy", s.holdout_accuracy},
                             {"num_tfm_predictors", s.num_tfm},
                             {"num_linear_predictors", s.num_linear},
                             {"weights", w},
                             {"warnings", s.warnings}});
        }
        json j = {{"config", config}, {"B", num_models},     {"per_seed", seeds},     {"mean", mean},
                  {"std", std},       {"std_error", std_error}, {"warnings", warnings}};
        if (with_timings) j["timings"] = timings;
        return j;
    }

    std::string to_csv() const {
        std::ostringstream out;
        out.precision(17);
        out << "seed,B,test_accuracy,holdout_accuracy,num_tfm_predictors,num_linear_predictors\n";
        for (const auto& s : per_seed)
            out << s.seed << ',' << num_models << ',' << s.test_accuracy << ',' << s.holdout_accuracy << ','
                << s.num_tfm << ',' << s.num_linear << '\n';
        return out.str();
    }
};

inline void write_report(const MetricsReport& r, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    io::write_text(path, r.to_json().dump(2) + "\n");
    auto csv = path;
    csv.replace_extension(".csv");
    io::write_text(csv, r.to_csv());
}

namespace detail {

inline std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

/// Encodings memoized by a content hash of (graph structure, features, encoder config).
class EncodingCache {
public:
    std::shared_ptr<const std::vector<EncodingBlock>> get(const Graph& g, const EncoderConfig& cfg) {
        const auto key = content_key(g, cfg);
        if (auto it = entries_.find(key); it != entries_.end()) {
            ++hits_;
            return it->second;
        }
        auto blocks = std::make_shared<const std::vector<EncodingBlock>>(build_encodings(g, cfg));
        entries_.emplace(key, blocks);
        return blocks;
    }

    static std::uint64_t content_key(const Graph& g, const EncoderConfig& cfg) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        const std::size_t n = g.num_nodes();
        h = detail::fnv1a(h, &n, sizeof n);
        for (const auto& e : g.edges()) h = detail::fnv1a(h, &e, sizeof e);
        const Matrix& x = g.features();
        const auto rows = x.rows(), cols = x.cols();
        h = detail::fnv1a(h, &rows, sizeof rows);
        h = detail::fnv1a(h, &cols, sizeof cols);
        h = detail::fnv1a(h, x.data(), static_cast<std::size_t>(x.size()) * sizeof(double));
        const std::string c = cfg.to_json().dump();
        return detail::fnv1a(h, c.data(), c.size());
    }

    std::size_t hits() const noexcept { return hits_; }
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::map<std::uint64_t, std::shared_ptr<const std::vector<EncodingBlock>>> entries_;
    std::size_t hits_ = 0;
};

inline std::unique_ptr<TabularLearner> make_learner(const RunConfig& cfg) {
    switch (cfg.backend) {
        case BackendKind::native_logreg: return std::make_unique<LogRegLearner>();
        case BackendKind::native_knn: return std::make_unique<KnnLearner>();
        case BackendKind::external:
            return std::make_unique<ExternalLearner>(
                cfg.endpoint, std::chrono::milliseconds(static_cast<long long>(cfg.timeout_s * 1000.0)));
    }
    throw ConfigError("unknown backend");
}

/// Encoder settings with "auto" PCA resolved against the dataset name.
inline EncoderConfig resolved_encoder(const RunConfig& cfg, const Dataset& ds) {
    EncoderConfig enc = cfg.encoder;
    if (cfg.pca_auto) enc.pca_dim = default_pca_dim(ds.name);
    return enc;
}

namespace detail {

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - start).count();
        start = now;
        return s;
    }
};

} // namespace detail

/// One seed: split -> table -> predictor pool -> selection -> test accuracy.
inline SeedResult run_seed(const RunConfig& cfg, const Dataset& ds, const std::vector<EncodingBlock>& blocks,
                           std::uint64_t seed, TabularLearner& learner, std::map<std::string, double>& timings) {
    detail::Stopwatch watch;
    SeedResult result;
    result.seed = seed;
    const Graph& g = ds.graph;
    const SplitSpec& split = ds.split_for_seed(seed);

    std::vector<std::size_t> labeled = split.train;
    if (cfg.include_val_in_context) labeled.insert(labeled.end(), split.val.begin(), split.val.end());
    std::sort(labeled.begin(), labeled.end());
    const NodeTable table = build_node_table(blocks, g.labels(), labeled, split.test, g.num_classes());
    timings["table"] += watch.lap();

    FoldPlan linear_plan, tfm_plan;
    if (cfg.holdout_mode == HoldoutMode::kfold) {
        linear_plan = make_fold_plan(table.labeled_classes, cfg.linear.folds, derive_seed(seed, {0x11AE}), &result.warnings);
        tfm_plan = make_fold_plan(table.labeled_classes, cfg.tfm.folds, derive_seed(seed, {0x7F0}), &result.warnings);
    } else {
        linear_plan = make_holdout_plan(table.labeled_classes, cfg.holdout_fraction, derive_seed(seed, {0x401D}));
        tfm_plan = linear_plan;
    }

    PredictorPool pool;
    pool.num_classes = g.num_classes();
    for (auto r : linear_plan.heldout_rows()) pool.holdout_labels.push_back(table.labeled_classes[r]);

    if (!cfg.no_tfm && cfg.num_models > 0) {
        TfmResult tfm = make_tfm_predictors(table, cfg.num_models, learner, derive_seed(seed, {0x7F3}), tfm_plan, cfg.tfm);
        result.num_tfm = tfm.predictors.size();
        for (auto& n : tfm.notices) result.warnings.push_back(std::move(n));
        for (auto& s : tfm.skipped) result.warnings.push_back(std::move(s));
        for (auto& p : tfm.predictors) pool.predictors.push_back(std::move(p));
    }
    timings["tfm_predictors"] += watch.lap();

    if (!cfg.no_linear_gnn) {
        auto linear = make_linear_predictors(blocks, table, linear_plan, cfg.linear);
        result.num_linear = linear.size();
        for (auto& p : linear) pool.predictors.push_back(std::move(p));
    }
    timings["linear_predictors"] += watch.lap();

    if (pool.predictors.empty())
        throw Error("seed " + std::to_string(seed) + ": predictor pool is empty (all predictors failed or disabled)");
    pool.validate();

    const EnsembleWeights w = cfg.ensemble_mode == EnsembleMode::selected
                                  ? greedy_select(pool, cfg.max_iters, derive_seed(seed, {0x5E1}))
                                  : uniform_weights(pool);
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (w.weights[i] != 0.0) result.weights.emplace_back(pool.predictors[i].id, w.weights[i]);
    Matrix held = Matrix::Zero(static_cast<Eigen::Index>(pool.holdout_labels.size()), pool.num_classes);
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (w.weights[i] != 0.0) held += w.weights[i] * pool.predictors[i].holdout_probs;
    result.holdout_accuracy = accuracy(held, pool.holdout_labels);

    const Matrix combined = combine(w.weights, pool);
    std::vector<int> test_labels;
    for (auto v : split.test) test_labels.push_back(g.labels()[v]);
    result.test_accuracy = accuracy(combined, test_labels);
    timings["selection"] += watch.lap();
    return result;
}

/// Runs every configured seed; writes the report when an output path is set.
inline MetricsReport run(const RunConfig& cfg, EncodingCache* cache = nullptr) {
    cfg.validate();
    detail::Stopwatch watch;
    MetricsReport report;
    report.config = cfg.to_json();
    report.num_models = cfg.num_models;

    const Dataset ds = load_dataset(cfg.dataset);
    report.timings["load"] = watch.lap();
    EncodingCache local;
    EncodingCache& enc_cache = cache ? *cache : local;
    const auto blocks = enc_cache.get(ds.graph, resolved_encoder(cfg, ds));
    report.timings["encode"] = watch.lap();

    auto learner = make_learner(cfg);
    for (auto seed : cfg.seeds) {
        SeedResult r = run_seed(cfg, ds, *blocks, seed, *learner, report.timings);
        for (const auto& w : r.warnings) report.warnings.push_back("seed " + std::to_string(seed) + ": " + w);
        report.per_seed.push_back(std::move(r));
    }
    report.finalize();
    if (cfg.output) write_report(report, *cfg.output);
    return report;
}

/// One run per B; encodings are shared through the cache.
inline std::vector<MetricsReport> sweep_b(RunConfig cfg, const std::vector<int>& b_values, EncodingCache* cache = nullptr) {
    if (b_values.empty()) throw ConfigError("sweep-b: need at least one B value");
    EncodingCache local;
    EncodingCache& enc_cache = cache ? *cache : local;
    const auto base_output = cfg.output;
    std::vector<MetricsReport> out;
    for (int b : b_values) {
        cfg.num_models = b;
        if (base_output) {
            auto p = *base_output;
            p.replace_filename(p.stem().string() + "_B" + std::to_string(b) + p.extension().string());
            cfg.output = p;
        }
        out.push_back(run(cfg, &enc_cache));
    }
    return out;
}

/// Dumps the node table (all N rows) in the dataset container convention,
/// plus columns.json describing each column's block and kind.
inline void encode_to_dir(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    const Dataset ds = load_dataset(cfg.dataset);
    const auto blocks = build_encodings(ds.graph, resolved_encoder(cfg, ds));
    std::vector<std::size_t> all(ds.graph.num_nodes());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    std::vector<std::size_t> labeled;
    for (auto i : all)
        if (ds.graph.labels()[i] != kUnlabeled) labeled.push_back(i);
    const NodeTable table = build_node_table(blocks, ds.graph.labels(), labeled, {}, ds.graph.num_classes());

    Graph encoded(ds.graph.num_nodes(), ds.graph.edges(), table.z, ds.graph.labels(), ds.graph.num_classes());
    save_dataset(out_dir, encoded, ds.splits);
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& b : table.blocks)
        cols.push_back({{"block", b.name}, {"kind", to_string(b.kind)}, {"begin", b.begin}, {"end", b.end}});
    io::write_text(out_dir / "columns.json", cols.dump(2) + "\n");
}

} // namespace tabgfm
