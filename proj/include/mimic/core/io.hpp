#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mimic/core/error.hpp"
#include "mimic/core/image.hpp"

namespace mimic {

using json = nlohmann::ordered_json;

// FNV-1a 64-bit over raw bytes; manifests record it as 16 hex digits.
uint64_t fnv1a64(const void* data, size_t size);
std::string fnv1a64_hex(const void* data, size_t size);
std::string fnv1a64_hex(const std::vector<float>& values);

// Raw little-endian float32 blobs, the binary half of every artifact.
void write_f32_blob(const std::filesystem::path& path, const std::vector<float>& values);
std::vector<float> read_f32_blob(const std::filesystem::path& path);

// Manifest JSON. `schema_version` is mandatory on read and is checked
// against the expected artifact kind.
void write_manifest(const std::filesystem::path& path, const json& manifest);
json read_manifest(const std::filesystem::path& path, const std::string& expected_kind);

// Uncompressed video container: a one-line JSON header followed by f32le
// pixel payload. Lossless round-trip is part of the contract. A generator
// tag shared by all frames (synthetic clips) is carried in the header,
// per-frame parameter rows in a trailing blob.
struct VideoClip {
    std::vector<Image> frames;
    double fps = 25.0;
};

void write_video(const std::filesystem::path& path, const VideoClip& clip);
VideoClip read_video(const std::filesystem::path& path);

} // namespace mimic
