#ifndef SEMGUIDE_ERRORS_HPP
#define SEMGUIDE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace semguide {

// Stable machine-readable error codes. The CLI maps these to JSON; tests
// assert on them instead of matching message text.
enum class ErrorCode {
    RoleWordNotFound,
    AmbiguousRoleWord,
    RoleOverlap,
    EmptyResult,
    NoAttentionSites,
    AllTokensSpecial,
    DegenerateAttentionRow,
    MissingArchiveEntry,
    EmptyTokenSet,
    MissingMiddleBlockMask,
    ZeroTargetDimension,
    NonPositiveNTar,
    ShapeMismatch,
    TargetIndexOutOfRange,
    ValueOutOfRange,
    InvalidConfig,
    InvalidJobFile,
    InvalidInput,
    EmptyResults,
    IoError,
    NotConfigured,
    StageFailure,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace semguide

#endif
