#pragma once

#include <stdexcept>
#include <string>

namespace tabgfm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent dataset container contents.
struct DatasetError : Error {
    using Error::Error;
};

// Invalid run configuration (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

struct DimensionError : Error {
    using Error::Error;
};

// Non-finite inputs, eigensolver non-convergence.
struct NumericalError : Error {
    using Error::Error;
};

// Failure of a tabular learner call. Carries the predictor id so the
// pipeline can skip that predictor and record why.
class LearnerError : public Error {
public:
    enum class Kind { transport, malformed, remote, timeout };

    LearnerError(Kind kind, std::string predictor_id, const std::string& what)
        : Error(std::string(kind_name(kind)) + " [" + predictor_id + "]: " + what),
          kind_(kind), predictor_id_(std::move(predictor_id)) {}

    Kind kind() const noexcept { return kind_; }
    const std::string& predictor_id() const noexcept { return predictor_id_; }

    static const char* kind_name(Kind k) noexcept {
        switch (k) {
            case Kind::transport: return "transport failure";
            case Kind::malformed: return "malformed response";
            case Kind::remote: return "error response";
            case Kind::timeout: return "timeout";
        }
        return "unknown";
    }

private:
    Kind kind_;
    std::string predictor_id_;
};

} // namespace tabgfm
