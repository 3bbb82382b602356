#pragma once

#include <chrono>
#include <cmath>
#include <csignal>
#include <cstring>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

// Eigen before httplib: <resolv.h> defines a macro named _res.
#include "tabgfm/error.hpp"
#include "tabgfm/learners.hpp"

#include <httplib.h>
#include <json.hpp>

extern char** environ;

namespace tabgfm {

namespace protocol {

/// {"id", "seed", "num_classes", "context": {"rows", "labels"}, "query": {"rows"}} on one line.
inline std::string encode_request(const LearnerTask& task, const std::string& id) {
    using nlohmann::json;
    auto rows_of = [](const Matrix& m) {
        json rows = json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
            rows.push_back(std::move(row));
        }
        return rows;
    };
    json j = {{"id", id},
              {"seed", task.seed},
              {"num_classes", task.num_classes},
              {"context", {{"rows", rows_of(task.context)}, {"labels", task.labels}}},
              {"query", {{"rows", rows_of(task.queries)}}}};
    return j.dump();
}

struct Response {
    std::string id;
    std::optional<std::string> error;
    Matrix probs;
};

/// Parses a response line. Throws LearnerError(malformed) on bad JSON or shape.
inline Response decode_response(const std::string& line, const std::string& expected_id) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw LearnerError(LearnerError::Kind::malformed, expected_id, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.at("id").is_string())
        throw LearnerError(LearnerError::Kind::malformed, expected_id, "response lacks a string id");
    Response r;
    r.id = j.at("id").get<std::string>();
    if (j.contains("error")) {
        r.error = j.at("error").is_string() ? j.at("error").get<std::string>() : j.at("error").dump();
        return r;
    }
    if (!j.contains("probs") || !j.at("probs").is_array())
        throw LearnerError(LearnerError::Kind::malformed, expected_id, "response lacks 'probs'");
    const auto& rows = j.at("probs");
    const std::size_t width = rows.empty() ? 0 : (rows.front().is_array() ? rows.front().size() : 0);
    r.probs.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].is_array() || rows[i].size() != width)
            throw LearnerError(LearnerError::Kind::malformed, expected_id, "ragged 'probs' rows");
        for (std::size_t c = 0; c < width; ++c) {
            if (!rows[i][c].is_number())
                throw LearnerError(LearnerError::Kind::malformed, expected_id, "non-numeric probability");
            r.probs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c].get<double>();
        }
    }
    return r;
}

/// Checks shape and sign, then renormalizes each row to sum 1.
inline Matrix checked_probabilities(const Response& r, const std::string& id, Eigen::Index rows, int num_classes) {
    if (r.id != id) throw LearnerError(LearnerError::Kind::malformed, id, "response id '" + r.id + "' does not match");
    if (r.error) throw LearnerError(LearnerError::Kind::remote, id, *r.error);
    if (r.probs.rows() != rows || (rows > 0 && r.probs.cols() != num_classes))
        throw LearnerError(LearnerError::Kind::malformed, id,
                           "expected " + std::to_string(rows) + "x" + std::to_string(num_classes) + " probabilities, got " +
                               std::to_string(r.probs.rows()) + "x" + std::to_string(r.probs.cols()));
    Matrix p = rows > 0 ? r.probs : Matrix(0, num_classes);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        double s = 0.0;
        for (Eigen::Index c = 0; c < p.cols(); ++c) {
            if (!std::isfinite(p(i, c)) || p(i, c) < 0.0)
                throw LearnerError(LearnerError::Kind::malformed, id, "negative or non-finite probability");
            s += p(i, c);
        }
        if (!(s > 0.0)) throw LearnerError(LearnerError::Kind::malformed, id, "probability row sums to zero");
        p.row(i) /= s;
    }
    return p;
}

} // namespace protocol

class Transport {
public:
    virtual ~Transport() = default;
    // Sends one request line and returns the response line carrying `id`.
    virtual std::string exchange(const std::string& id, const std::string& line, std::chrono::milliseconds timeout) = 0;
};

/// Newline-delimited JSON over a child process's stdin/stdout. Responses that
/// arrive for other ids are parked until requested.
class StdioTransport final : public Transport {
public:
    explicit StdioTransport(const std::string& command) {
        std::signal(SIGPIPE, SIG_IGN);
        int in_pipe[2], out_pipe[2];
        if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
            throw LearnerError(LearnerError::Kind::transport, "stdio", "pipe() failed");
        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
        posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
        posix_spawn_file_actions_addclose(&actions, in_pipe[1]);
        posix_spawn_file_actions_addclose(&actions, out_pipe[0]);
        std::string sh = "/bin/sh", dash_c = "-c", cmd = command;
        char* argv[] = {sh.data(), dash_c.data(), cmd.data(), nullptr};
        const int rc = posix_spawn(&pid_, "/bin/sh", &actions, nullptr, argv, environ);
        posix_spawn_file_actions_destroy(&actions);
        close(in_pipe[0]);
        close(out_pipe[1]);
        if (rc != 0) {
            close(in_pipe[1]);
            close(out_pipe[0]);
            throw LearnerError(LearnerError::Kind::transport, "stdio", "cannot spawn '" + command + "'");
        }
        to_child_ = in_pipe[1];
        from_child_ = out_pipe[0];
        fcntl(to_child_, F_SETFD, FD_CLOEXEC);
        fcntl(from_child_, F_SETFD, FD_CLOEXEC);
    }

    StdioTransport(const StdioTransport&) = delete;
    StdioTransport& operator=(const StdioTransport&) = delete;

    ~StdioTransport() override {
        if (to_child_ >= 0) close(to_child_);
        if (from_child_ >= 0) close(from_child_);
        if (pid_ > 0) {
            int status = 0;
            for (int i = 0; i < 50; ++i) {
                if (waitpid(pid_, &status, WNOHANG) == pid_) return;
                usleep(10000);
            }
            kill(pid_, SIGKILL);
            waitpid(pid_, &status, 0);
        }
    }

    std::string exchange(const std::string& id, const std::string& line, std::chrono::milliseconds timeout) override {
        const std::string payload = line + "\n";
        std::size_t written = 0;
        while (written < payload.size()) {
            const ssize_t w = write(to_child_, payload.data() + written, payload.size() - written);
            if (w < 0) {
                if (errno == EINTR) continue;
                throw LearnerError(LearnerError::Kind::transport, id, std::string("write failed: ") + std::strerror(errno));
            }
            written += static_cast<std::size_t>(w);
        }
        const auto deadline = std::chrono::steady_clock::now() + timeout;
        while (true) {
            if (auto it = parked_.find(id); it != parked_.end()) {
                std::string out = std::move(it->second);
                parked_.erase(it);
                return out;
            }
            const std::size_t nl = buffer_.find('\n');
            if (nl != std::string::npos) {
                std::string resp = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                std::string resp_id;
                try {
                    const auto j = nlohmann::json::parse(resp);
                    if (j.is_object() && j.contains("id") && j.at("id").is_string()) resp_id = j.at("id").get<std::string>();
                } catch (const nlohmann::json::exception&) {
                }
                if (resp_id.empty() || resp_id == id) return resp;
                parked_[resp_id] = std::move(resp);
                continue;
            }
            const auto remaining =
                std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
            if (remaining.count() <= 0) throw LearnerError(LearnerError::Kind::timeout, id, "no response within timeout");
            pollfd pfd{from_child_, POLLIN, 0};
            const int pr = poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining.count(), 1 << 30)));
            if (pr < 0 && errno != EINTR)
                throw LearnerError(LearnerError::Kind::transport, id, "poll failed");
            if (pr <= 0) continue;
            char chunk[65536];
            const ssize_t r = read(from_child_, chunk, sizeof chunk);
            if (r == 0) throw LearnerError(LearnerError::Kind::transport, id, "learner process closed its output");
            if (r < 0) {
                if (errno == EINTR) continue;
                throw LearnerError(LearnerError::Kind::transport, id, "read failed");
            }
            buffer_.append(chunk, static_cast<std::size_t>(r));
        }
    }

private:
    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    std::map<std::string, std::string> parked_;
};

/// HTTP POST of the request body to <endpoint>/predict.
class HttpTransport final : public Transport {
public:
    explicit HttpTransport(const std::string& endpoint) {
        const auto scheme_end = endpoint.find("://");
        const auto path_start = endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
        host_ = path_start == std::string::npos ? endpoint : endpoint.substr(0, path_start);
        base_path_ = path_start == std::string::npos ? "" : endpoint.substr(path_start);
        while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
    }

    std::string exchange(const std::string& id, const std::string& line, std::chrono::milliseconds timeout) override {
        httplib::Client cli(host_);
        if (!cli.is_valid()) throw LearnerError(LearnerError::Kind::transport, id, "invalid endpoint " + host_);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout).count();
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout).count() % 1000000;
        cli.set_connection_timeout(std::min<time_t>(secs, 10), secs < 10 ? usecs : 0);
        cli.set_read_timeout(secs, usecs);
        cli.set_write_timeout(secs, usecs);
        auto res = cli.Post(base_path_ + "/predict", line, "application/json");
        if (!res) {
            const auto err = res.error();
            const auto kind = err == httplib::Error::Read && timeout.count() > 0 ? LearnerError::Kind::timeout
                                                                                : LearnerError::Kind::transport;
            throw LearnerError(kind, id, "HTTP request to " + host_ + " failed: " + httplib::to_string(err));
        }
        if (res->status != 200) {
            try {
                const auto j = nlohmann::json::parse(res->body);
                if (j.is_object() && j.contains("error")) return res->body;
            } catch (const nlohmann::json::exception&) {
            }
            throw LearnerError(LearnerError::Kind::transport, id, "HTTP status " + std::to_string(res->status));
        }
        return res->body;
    }

private:
    std::string host_;
    std::string base_path_;
};

/// Endpoint forms: "http://host:port[/prefix]" or "stdio:<shell command>".
inline std::unique_ptr<Transport> make_transport(const std::string& endpoint) {
    if (endpoint.rfind("http://", 0) == 0) return std::make_unique<HttpTransport>(endpoint);
    if (endpoint.rfind("stdio:", 0) == 0) return std::make_unique<StdioTransport>(endpoint.substr(6));
    throw ConfigError("unsupported learner endpoint '" + endpoint + "' (use http://... or stdio:<command>)");
}

/// Learner reached over the tabular-learner wire protocol.
class ExternalLearner final : public TabularLearner {
public:
    ExternalLearner(std::string endpoint, std::chrono::milliseconds timeout = std::chrono::seconds(300))
        : endpoint_(std::move(endpoint)), timeout_(timeout) {
        if (endpoint_.rfind("http://", 0) != 0 && endpoint_.rfind("stdio:", 0) != 0)
            throw ConfigError("unsupported learner endpoint '" + endpoint_ + "' (use http://... or stdio:<command>)");
    }

    std::string backend() const override { return "external"; }

    Matrix fit_predict(const LearnerTask& task) override {
        check_task(task);
        const std::string id = task.request_id.empty() ? "req-" + std::to_string(counter_++) : task.request_id;
        if (!transport_) {
            try {
                transport_ = make_transport(endpoint_);
            } catch (const LearnerError& e) {
                throw LearnerError(LearnerError::Kind::transport, id, e.what());
            }
        }
        const std::string line = protocol::encode_request(task, id);
        std::string reply;
        try {
            reply = transport_->exchange(id, line, timeout_);
        } catch (const LearnerError& e) {
            // A broken stdio child cannot be reused.
            if (e.kind() == LearnerError::Kind::transport || e.kind() == LearnerError::Kind::timeout) transport_.reset();
            throw;
        }
        const auto resp = protocol::decode_response(reply, id);
        return protocol::checked_probabilities(resp, id, task.queries.rows(), task.num_classes);
    }

private:
    std::string endpoint_;
    std::chrono::milliseconds timeout_;
    std::unique_ptr<Transport> transport_;
    std::uint64_t counter_ = 0;
};

} // namespace tabgfm
