#include "scalex/errors.hpp"

namespace scalex {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidPrompt: return "InvalidPrompt";
        case ErrorCode::BackendUnavailable: return "BackendUnavailable";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::NonFiniteActivation: return "NonFiniteActivation";
        case ErrorCode::EmptyBatch: return "EmptyBatch";
        case ErrorCode::UnknownModel: return "UnknownModel";
        case ErrorCode::IncompatibleArchitecture: return "IncompatibleArchitecture";
        case ErrorCode::StorageFull: return "StorageFull";
        case ErrorCode::ManifestCorrupt: return "ManifestCorrupt";
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::AlreadyNormalized: return "AlreadyNormalized";
        case ErrorCode::NotNormalized: return "NotNormalized";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::BadM: return "BadM";
        case ErrorCode::BadIndex: return "BadIndex";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::MissingVariant: return "MissingVariant";
        case ErrorCode::EndpointUnavailable: return "EndpointUnavailable";
        case ErrorCode::Timeout: return "Timeout";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::SingleCluster: return "SingleCluster";
        case ErrorCode::UnknownId: return "UnknownId";
        case ErrorCode::InjectionUnsupported: return "InjectionUnsupported";
        case ErrorCode::UndecodableImage: return "UndecodableImage";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::MissingAnalysis: return "MissingAnalysis";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

}  // namespace scalex
