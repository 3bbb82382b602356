#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabgfm/error.hpp"
#include "tabgfm/graph.hpp"

namespace tabgfm {

namespace fs = std::filesystem;

struct Dataset {
    std::string name; // directory basename
    Graph graph;
    std::vector<SplitSpec> splits; // sorted by seed

    const SplitSpec& split_for_seed(std::uint64_t seed) const {
        for (const auto& s : splits)
            if (s.seed == seed) return s;
        throw DatasetError("dataset '" + name + "' has no split file for seed " + std::to_string(seed));
    }
};

namespace io {

inline std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DatasetError("missing file: " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        start = end + 1;
    }
    while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string::npos) lines.pop_back();
    return lines;
}

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i >= line.size()) break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <class T>
T parse_number(const std::string& s, const std::string& where) {
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw DatasetError(where + ": cannot parse number '" + s + "'");
    return value;
}

inline bool is_tsv(const fs::path& p) { return p.extension() == ".tsv"; }

/// Reads a dense real matrix stored either as row-major little-endian float32
/// (.bin) or one whitespace-separated row per line (.tsv).
/// For .bin files without a known column count, cols = bytes / (4 * rows).
inline Matrix read_matrix_file(const fs::path& path, std::optional<std::size_t> rows,
                               std::optional<std::size_t> cols) {
    if (!fs::exists(path)) throw DatasetError("missing file: " + path.string());
    if (is_tsv(path)) {
        const auto lines = split_lines(read_text(path));
        if (rows && lines.size() != *rows)
            throw DatasetError(path.string() + ": expected " + std::to_string(*rows) + " rows, found " +
                               std::to_string(lines.size()));
        std::size_t width = cols.value_or(lines.empty() ? 0 : split_fields(lines.front()).size());
        Matrix m(static_cast<Eigen::Index>(lines.size()), static_cast<Eigen::Index>(width));
        for (std::size_t r = 0; r < lines.size(); ++r) {
            const auto fields = split_fields(lines[r]);
            if (fields.size() != width)
                throw DatasetError(path.string() + ": row " + std::to_string(r) + " has " +
                                   std::to_string(fields.size()) + " values, expected " + std::to_string(width));
            for (std::size_t c = 0; c < width; ++c)
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    parse_number<double>(fields[c], path.string());
        }
        return m;
    }

    const std::string bytes = read_text(path);
    if (bytes.size() % 4 != 0) throw DatasetError(path.string() + ": size is not a multiple of 4 bytes");
    const std::size_t count = bytes.size() / 4;
    std::size_t r = 0, c = 0;
    if (rows && cols) {
        r = *rows;
        c = *cols;
    } else if (rows) {
        r = *rows;
        if (r == 0 || count % r != 0)
            throw DatasetError(path.string() + ": " + std::to_string(count) + " values do not form " +
                               std::to_string(r) + " rows");
        c = count / r;
    } else if (cols) {
        c = *cols;
        if (c == 0 || count % c != 0)
            throw DatasetError(path.string() + ": " + std::to_string(count) + " values do not form rows of width " +
                               std::to_string(c));
        r = count / c;
    } else {
        throw DatasetError(path.string() + ": binary matrix needs a known row or column count");
    }
    if (r * c != count)
        throw DatasetError(path.string() + ": holds " + std::to_string(count) + " values, expected " +
                           std::to_string(r) + "x" + std::to_string(c));
    Matrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (std::size_t i = 0; i < count; ++i) {
        std::uint32_t bits;
        std::memcpy(&bits, bytes.data() + 4 * i, 4);
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
        float f;
        std::memcpy(&f, &bits, 4);
        m(static_cast<Eigen::Index>(i / c), static_cast<Eigen::Index>(i % c)) = static_cast<double>(f);
    }
    return m;
}

inline void write_matrix_bin(const fs::path& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const float f = static_cast<float>(m(r, c));
            std::uint32_t bits;
            std::memcpy(&bits, &f, 4);
            if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
            out.write(reinterpret_cast<const char*>(&bits), 4);
        }
}

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

inline std::vector<std::size_t> json_index_list(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_array()) throw DatasetError(where + ": missing array '" + key + "'");
    std::vector<std::size_t> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw DatasetError(where + ": '" + key + "' must contain non-negative integers");
        out.push_back(v.get<std::size_t>());
    }
    return out;
}

} // namespace io

/// Loads and validates a dataset container directory.
inline Dataset load_dataset(const fs::path& dir) {
    using nlohmann::json;
    const fs::path manifest_path = dir / "manifest.json";
    json manifest;
    try {
        manifest = json::parse(io::read_text(manifest_path));
    } catch (const json::exception& e) {
        throw DatasetError(manifest_path.string() + ": " + e.what());
    }
    auto get_int = [&](const char* key) -> long long {
        if (!manifest.contains(key) || !manifest.at(key).is_number_integer())
            throw DatasetError("manifest: missing integer '" + std::string(key) + "'");
        return manifest.at(key).get<long long>();
    };
    auto get_str = [&](const char* key) -> std::string {
        if (!manifest.contains(key) || !manifest.at(key).is_string())
            throw DatasetError("manifest: missing string '" + std::string(key) + "'");
        return manifest.at(key).get<std::string>();
    };
    const long long n = get_int("num_nodes");
    const long long f = get_int("num_features");
    const long long c = get_int("num_classes");
    if (n < 0 || f < 0 || c < 1) throw DatasetError("manifest: invalid dimensions");
    const auto N = static_cast<std::size_t>(n);

    Matrix features = io::read_matrix_file(dir / get_str("feature_file"), N, static_cast<std::size_t>(f));

    const fs::path edge_path = dir / get_str("edge_file");
    std::vector<Edge> edges;
    {
        const auto lines = io::split_lines(io::read_text(edge_path));
        for (std::size_t i = 0; i < lines.size(); ++i) {
            const auto fields = io::split_fields(lines[i]);
            if (fields.empty()) continue;
            const std::string where = edge_path.string() + ":" + std::to_string(i + 1);
            if (fields.size() != 2) throw DatasetError(where + ": expected 'u<TAB>v'");
            const auto u = io::parse_number<long long>(fields[0], where);
            const auto v = io::parse_number<long long>(fields[1], where);
            if (u < 0 || v < 0 || u >= n || v >= n)
                throw DatasetError(where + ": edge (" + fields[0] + ", " + fields[1] +
                                   ") has an endpoint out of range [0, " + std::to_string(n) + ")");
            edges.push_back({static_cast<std::size_t>(u), static_cast<std::size_t>(v)});
        }
    }

    const fs::path label_path = dir / get_str("label_file");
    std::vector<int> labels;
    {
        const auto lines = io::split_lines(io::read_text(label_path));
        if (lines.size() != N)
            throw DatasetError(label_path.string() + ": expected " + std::to_string(N) + " labels, found " +
                               std::to_string(lines.size()));
        labels.reserve(N);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            const auto fields = io::split_fields(lines[i]);
            const std::string where = label_path.string() + ":" + std::to_string(i + 1);
            if (fields.size() != 1) throw DatasetError(where + ": expected one class id");
            const int y = io::parse_number<int>(fields[0], where);
            if (y != kUnlabeled && (y < 0 || y >= c))
                throw DatasetError(where + ": unknown class id " + std::to_string(y));
            labels.push_back(y);
        }
    }

    Dataset ds;
    ds.name = fs::absolute(dir).lexically_normal().filename().string();
    if (ds.name.empty()) ds.name = fs::absolute(dir).lexically_normal().parent_path().filename().string();
    ds.graph = Graph(N, std::move(edges), std::move(features), std::move(labels), static_cast<int>(c));

    const fs::path split_dir = dir / get_str("split_dir");
    if (!fs::is_directory(split_dir)) throw DatasetError("missing split directory: " + split_dir.string());
    static const std::regex seed_re(R"(seed_(\d+)\.json)");
    for (const auto& entry : fs::directory_iterator(split_dir)) {
        std::smatch m;
        const std::string fname = entry.path().filename().string();
        if (!std::regex_match(fname, m, seed_re)) continue;
        json sj;
        try {
            sj = json::parse(io::read_text(entry.path()));
        } catch (const json::exception& e) {
            throw DatasetError(entry.path().string() + ": " + e.what());
        }
        SplitSpec s;
        s.seed = std::stoull(m[1].str());
        s.train = io::json_index_list(sj, "train", entry.path().string());
        s.val = io::json_index_list(sj, "val", entry.path().string());
        s.test = io::json_index_list(sj, "test", entry.path().string());
        s.validate(N);
        for (const auto* set : {&s.train, &s.val, &s.test})
            for (auto i : *set)
                if (ds.graph.labels()[i] == kUnlabeled)
                    throw DatasetError(entry.path().string() + ": node " + std::to_string(i) +
                                       " is in a split but unlabeled");
        ds.splits.push_back(std::move(s));
    }
    std::sort(ds.splits.begin(), ds.splits.end(), [](const auto& a, const auto& b) { return a.seed < b.seed; });
    return ds;
}

/// Writes a dataset container (binary features) that load_dataset reads back
/// to an identical Graph whenever the features are float32-representable.
inline void save_dataset(const fs::path& dir, const Graph& g, const std::vector<SplitSpec>& splits) {
    using nlohmann::json;
    fs::create_directories(dir / "splits");
    json manifest = {{"num_nodes", g.num_nodes()},      {"num_features", g.num_features()},
                     {"num_classes", g.num_classes()},  {"feature_file", "features.bin"},
                     {"edge_file", "edges.tsv"},        {"label_file", "labels.tsv"},
                     {"split_dir", "splits"}};
    io::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    io::write_matrix_bin(dir / "features.bin", g.features());

    std::string edges;
    for (const auto& e : g.edges()) edges += std::to_string(e.u) + "\t" + std::to_string(e.v) + "\n";
    io::write_text(dir / "edges.tsv", edges);

    std::string labels;
    for (int y : g.labels()) labels += std::to_string(y) + "\n";
    io::write_text(dir / "labels.tsv", labels);

    for (const auto& s : splits) {
        json sj = {{"train", s.train}, {"val", s.val}, {"test", s.test}};
        io::write_text(dir / "splits" / ("seed_" + std::to_string(s.seed) + ".json"), sj.dump() + "\n");
    }
}

} // namespace tabgfm
