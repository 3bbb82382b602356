#pragma once

#include <atomic>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "tabgfm/graph.hpp"

namespace testutil {

inline tabgfm::Graph path3() {
    return tabgfm::Graph(3, {{0, 1}, {1, 2}}, tabgfm::Matrix::Ones(3, 1), {0, 1, 0}, 2);
}

inline tabgfm::Graph triangle() {
    return tabgfm::Graph(3, {{0, 1}, {1, 2}, {0, 2}}, tabgfm::Matrix::Ones(3, 1), {0, 1, 0}, 2);
}

inline tabgfm::Graph cycle4() {
    return tabgfm::Graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}, tabgfm::Matrix::Ones(4, 1), {0, 1, 0, 1}, 2);
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("tabgfm_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace testutil
