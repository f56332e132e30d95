#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace centerdepth {

enum class Errc {
    // camera-geometry
    BehindCamera,
    NonPositiveDepth,
    FullyBehindCamera,
    DegenerateProjection,
    // scene-synthesis / dataset I/O
    PlacementExhausted,
    IoFailure,
    ManifestMissing,
    ChecksumMismatch,
    MalformedRaster,
    // heatmap-decoder
    CenterOutOfBounds,
    // center-crf
    LengthMismatch,
    EmptyRegion,
    UnarySourceMissing,
    // evaluation
    EmptyInput,
    OutOfBounds,
    EmptyMask,
    // bev-planner
    Unreachable,
    InvalidEndpoint,
    // configuration
    MalformedConfig,
    UnknownField,
    ValidationFailure,
    InvalidArgument,
};

constexpr std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::BehindCamera: return "BehindCamera";
        case Errc::NonPositiveDepth: return "NonPositiveDepth";
        case Errc::FullyBehindCamera: return "FullyBehindCamera";
        case Errc::DegenerateProjection: return "DegenerateProjection";
        case Errc::PlacementExhausted: return "PlacementExhausted";
        case Errc::IoFailure: return "IoFailure";
        case Errc::ManifestMissing: return "ManifestMissing";
        case Errc::ChecksumMismatch: return "ChecksumMismatch";
        case Errc::MalformedRaster: return "MalformedRaster";
        case Errc::CenterOutOfBounds: return "CenterOutOfBounds";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::EmptyRegion: return "EmptyRegion";
        case Errc::UnarySourceMissing: return "UnarySourceMissing";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::OutOfBounds: return "OutOfBounds";
        case Errc::EmptyMask: return "EmptyMask";
        case Errc::Unreachable: return "Unreachable";
        case Errc::InvalidEndpoint: return "InvalidEndpoint";
        case Errc::MalformedConfig: return "MalformedConfig";
        case Errc::UnknownField: return "UnknownField";
        case Errc::ValidationFailure: return "ValidationFailure";
        case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace centerdepth
