#include "genmetrics/error.hpp"

namespace genmetrics {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::format: return "format error";
        case ErrorCode::truncation: return "truncation error";
        case ErrorCode::io: return "I/O error";
        case ErrorCode::validation: return "validation error";
        case ErrorCode::dimension: return "dimension error";
        case ErrorCode::insufficient_samples: return "insufficient-samples error";
        case ErrorCode::domain: return "domain error";
        case ErrorCode::solver_failure: return "solver failure";
        case ErrorCode::unsupported: return "unsupported input";
        case ErrorCode::config: return "config error";
    }
    return "error";
}

}  // namespace genmetrics
