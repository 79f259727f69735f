#include "semguide/errors.hpp"

namespace semguide {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::RoleWordNotFound: return "RoleWordNotFound";
        case ErrorCode::AmbiguousRoleWord: return "AmbiguousRoleWord";
        case ErrorCode::RoleOverlap: return "RoleOverlap";
        case ErrorCode::EmptyResult: return "EmptyResult";
        case ErrorCode::NoAttentionSites: return "NoAttentionSites";
        case ErrorCode::AllTokensSpecial: return "AllTokensSpecial";
        case ErrorCode::DegenerateAttentionRow: return "DegenerateAttentionRow";
        case ErrorCode::MissingArchiveEntry: return "MissingArchiveEntry";
        case ErrorCode::EmptyTokenSet: return "EmptyTokenSet";
        case ErrorCode::MissingMiddleBlockMask: return "MissingMiddleBlockMask";
        case ErrorCode::ZeroTargetDimension: return "ZeroTargetDimension";
        case ErrorCode::NonPositiveNTar: return "NonPositiveNTar";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::TargetIndexOutOfRange: return "TargetIndexOutOfRange";
        case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InvalidJobFile: return "InvalidJobFile";
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::EmptyResults: return "EmptyResults";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::NotConfigured: return "NotConfigured";
        case ErrorCode::StageFailure: return "StageFailure";
    }
    return "UnknownError";
}

} // namespace semguide
