#pragma once

#include <stdexcept>
#include <string>

namespace colmaps {

// Error taxonomy; the C API maps these onto numeric codes and the CLI onto
// exit codes (validation -> 2, numeric -> 3).

struct ValidationError : std::runtime_error {
    std::string field;
    ValidationError(std::string f, const std::string& msg)
        : std::runtime_error(f + ": " + msg), field(std::move(f)) {}
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BranchBoundaryError : NumericError {
    explicit BranchBoundaryError(const std::string& msg = "orbit touched a branch endpoint")
        : NumericError(msg) {}
};

struct NoConvergenceError : NumericError {
    using NumericError::NumericError;
};

struct OverflowError : NumericError {
    using NumericError::NumericError;
};

struct InsufficientDataError : NumericError {
    using NumericError::NumericError;
};

struct TooCensoredError : NumericError {
    using NumericError::NumericError;
};

struct TooLargeError : NumericError {
    using NumericError::NumericError;
};

struct SchemaMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace colmaps
