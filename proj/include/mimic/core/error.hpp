#pragma once

#include <stdexcept>
#include <string>

namespace mimic {

// Error identities used across modules. Tests match on the code, not the text.
enum class ErrorCode {
    NoFaceDetected,
    BackendUnavailable,
    BackendNotTunable,
    BackendShapeMismatch,
    IndexOutOfRange,
    ShapeMismatch,
    DimensionMismatch,
    DegenerateRegion,
    RegionMismatch,
    InvalidCount,
    InvalidIndices,
    InstanceTooLarge,
    DegenerateSum,
    NonFiniteLoss,
    TooFewFrames,
    TooFewTrainImages,
    LengthMismatch,
    MissingArtifact,
    EmptyInput,
    IOFailure,
    ConfigInvalid,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

} // namespace mimic
