#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace league {

// Failure classes surfaced across the pipeline. Each maps onto one
// operation-level error contract; the CLI maps a subset onto exit codes.
enum class ErrorCode {
    precondition,
    source_unreachable,
    malformed_response,
    archive_unavailable,
    archive_not_latex,
    no_sections,
    unbalanced_environment,
    provider_error,
    script_miss,
    context_overflow,
    no_json_found,
    missing_keys,
    schema_violation,
    no_main_result_table,
    alignment_error,
    empty_input,
    conflicting_values,
    unknown_metric,
    zero_total,
    degenerate_input,
    zero_filtered,
    empty_set,
    integrity_error,
    io_error,
    config_error,
    no_papers_survived,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) raise(code, message);
}

}  // namespace league
