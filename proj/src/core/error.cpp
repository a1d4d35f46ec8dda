#include "mimic/core/error.hpp"

namespace mimic {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NoFaceDetected: return "NoFaceDetected";
        case ErrorCode::BackendUnavailable: return "BackendUnavailable";
        case ErrorCode::BackendNotTunable: return "BackendNotTunable";
        case ErrorCode::BackendShapeMismatch: return "BackendShapeMismatch";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::DegenerateRegion: return "DegenerateRegion";
        case ErrorCode::RegionMismatch: return "RegionMismatch";
        case ErrorCode::InvalidCount: return "InvalidCount";
        case ErrorCode::InvalidIndices: return "InvalidIndices";
        case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
        case ErrorCode::DegenerateSum: return "DegenerateSum";
        case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorCode::TooFewFrames: return "TooFewFrames";
        case ErrorCode::TooFewTrainImages: return "TooFewTrainImages";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::MissingArtifact: return "MissingArtifact";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::IOFailure: return "IOFailure";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    }
    return "UnknownError";
}

} // namespace mimic
