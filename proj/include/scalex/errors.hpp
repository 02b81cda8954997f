#pragma once

#include <stdexcept>
#include <string>

namespace scalex {

// Stable machine-readable error codes. The CLI prints these as JSON on
// stderr, so renaming a code is a breaking interface change.
enum class ErrorCode {
    InvalidPrompt,
    BackendUnavailable,
    ShapeMismatch,
    NonFiniteActivation,
    EmptyBatch,
    UnknownModel,
    IncompatibleArchitecture,
    StorageFull,
    ManifestCorrupt,
    ZeroVector,
    AlreadyNormalized,
    NotNormalized,
    ZeroVariance,
    RankDeficient,
    BadM,
    BadIndex,
    DegenerateInput,
    MissingVariant,
    EndpointUnavailable,
    Timeout,
    TooFewPoints,
    LengthMismatch,
    SingleCluster,
    UnknownId,
    InjectionUnsupported,
    UndecodableImage,
    EmptyInput,
    MissingAnalysis,
    ConfigError,
    IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace scalex
