#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace genmetrics {

enum class ErrorCode {
    format,               // bad magic, version or unparsable text
    truncation,           // declared size disagrees with payload
    io,                   // open/read/write failure
    validation,           // invariant or precondition violated
    dimension,            // incompatible feature dimensions
    insufficient_samples, // pool too small for the request
    domain,               // argument outside the function's domain
    solver_failure,       // optimizer did not converge within its cap
    unsupported,          // input outside what the routine handles
    config,               // bad experiment/CLI configuration
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-readable code so the
/// command-line layer can map it onto a stable exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace genmetrics
