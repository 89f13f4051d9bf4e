#include "league/errors.hpp"

namespace league {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::precondition: return "Precondition";
        case ErrorCode::source_unreachable: return "SourceUnreachable";
        case ErrorCode::malformed_response: return "MalformedResponse";
        case ErrorCode::archive_unavailable: return "ArchiveUnavailable";
        case ErrorCode::archive_not_latex: return "ArchiveNotLatex";
        case ErrorCode::no_sections: return "NoSections";
        case ErrorCode::unbalanced_environment: return "UnbalancedEnvironment";
        case ErrorCode::provider_error: return "ProviderError";
        case ErrorCode::script_miss: return "ScriptMiss";
        case ErrorCode::context_overflow: return "ContextOverflow";
        case ErrorCode::no_json_found: return "NoJsonFound";
        case ErrorCode::missing_keys: return "MissingKeys";
        case ErrorCode::schema_violation: return "SchemaViolation";
        case ErrorCode::no_main_result_table: return "NoMainResultTable";
        case ErrorCode::alignment_error: return "AlignmentError";
        case ErrorCode::empty_input: return "EmptyInput";
        case ErrorCode::conflicting_values: return "ConflictingValues";
        case ErrorCode::unknown_metric: return "UnknownMetric";
        case ErrorCode::zero_total: return "ZeroTotal";
        case ErrorCode::degenerate_input: return "DegenerateInput";
        case ErrorCode::zero_filtered: return "ZeroFiltered";
        case ErrorCode::empty_set: return "EmptySet";
        case ErrorCode::integrity_error: return "IntegrityError";
        case ErrorCode::io_error: return "IoError";
        case ErrorCode::config_error: return "ConfigError";
        case ErrorCode::no_papers_survived: return "NoPapersSurvived";
    }
    return "UnknownError";
}

}  // namespace league
