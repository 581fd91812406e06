#pragma once

#include <stdexcept>
#include <string>

namespace ehd {

// Machine-readable failure categories. The CLI prints the short code of the
// active category on stderr so callers can branch without parsing prose.
enum class ErrorCode {
    domain_error,       // input outside an operation's mathematical domain
    insufficient_data,  // too few samples to run a fit / statistic
    degenerate_data,    // samples carry no usable signal (e.g. all-zero current)
    nonphysical_fit,    // fit converged to a parameter outside its invariant
    all_below_onset,    // no sample lies above the corona onset voltage
    parse_error,
    unit_error,
    empty_file,
    io_error,
    version_mismatch,
    schema_error,
    numerical_divergence,
    power_unreachable,
    usage_error,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::domain_error: return "domain_error";
        case ErrorCode::insufficient_data: return "insufficient_data";
        case ErrorCode::degenerate_data: return "degenerate_data";
        case ErrorCode::nonphysical_fit: return "nonphysical_fit";
        case ErrorCode::all_below_onset: return "all_below_onset";
        case ErrorCode::parse_error: return "parse_error";
        case ErrorCode::unit_error: return "unit_error";
        case ErrorCode::empty_file: return "empty_file";
        case ErrorCode::io_error: return "io_error";
        case ErrorCode::version_mismatch: return "version_mismatch";
        case ErrorCode::schema_error: return "schema_error";
        case ErrorCode::numerical_divergence: return "numerical_divergence";
        case ErrorCode::power_unreachable: return "power_unreachable";
        case ErrorCode::usage_error: return "usage_error";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace ehd
