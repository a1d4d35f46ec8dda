#include "mimic/core/io.hpp"

#include <fstream>

namespace mimic {

uint64_t fnv1a64(const void* data, size_t size) {
    const auto* bytes = static_cast<const uint8_t*>(data);
    uint64_t h = 0xCBF29CE484222325ull;
    for (size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 0x100000001B3ull;
    }
    return h;
}

std::string fnv1a64_hex(const void* data, size_t size) {
    static const char* digits = "0123456789abcdef";
    uint64_t h = fnv1a64(data, size);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

std::string fnv1a64_hex(const std::vector<float>& values) {
    return fnv1a64_hex(values.data(), values.size() * sizeof(float));
}

void write_f32_blob(const std::filesystem::path& path, const std::vector<float>& values) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::IOFailure, "cannot open for write: " + path.string());
    // Build targets little-endian platforms; assert rather than byte-swap.
    static_assert(sizeof(float) == 4);
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(float)));
    if (!out) raise(ErrorCode::IOFailure, "short write: " + path.string());
}

std::vector<float> read_f32_blob(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) raise(ErrorCode::IOFailure, "cannot open for read: " + path.string());
    const std::streamsize size = in.tellg();
    if (size % 4 != 0) raise(ErrorCode::IOFailure, "f32 blob size not a multiple of 4: " + path.string());
    in.seekg(0);
    std::vector<float> values(static_cast<size_t>(size) / 4);
    in.read(reinterpret_cast<char*>(values.data()), size);
    if (!in) raise(ErrorCode::IOFailure, "short read: " + path.string());
    return values;
}

void write_manifest(const std::filesystem::path& path, const json& manifest) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::IOFailure, "cannot open for write: " + path.string());
    out << manifest.dump(2) << '\n';
    if (!out) raise(ErrorCode::IOFailure, "short write: " + path.string());
}

json read_manifest(const std::filesystem::path& path, const std::string& expected_kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::MissingArtifact, "missing manifest: " + path.string());
    json manifest;
    try {
        manifest = json::parse(in);
    } catch (const std::exception& e) {
        raise(ErrorCode::IOFailure, "manifest parse failure: " + std::string(e.what()));
    }
    if (!manifest.contains("schema_version"))
        raise(ErrorCode::IOFailure, "manifest missing schema_version: " + path.string());
    if (!expected_kind.empty() && manifest.value("kind", "") != expected_kind)
        raise(ErrorCode::IOFailure, "manifest kind mismatch: expected " + expected_kind + " in " + path.string());
    return manifest;
}

void write_video(const std::filesystem::path& path, const VideoClip& clip) {
    if (clip.frames.empty()) raise(ErrorCode::EmptyInput, "write_video with no frames");
    const Image& first = clip.frames.front();
    for (const Image& f : clip.frames)
        if (!f.same_shape(first)) raise(ErrorCode::ShapeMismatch, "write_video frames differ in shape");

    json header;
    header["magic"] = "mimicvid";
    header["schema_version"] = 1;
    header["width"] = first.width;
    header["height"] = first.height;
    header["frames"] = clip.frames.size();
    header["fps"] = clip.fps;
    header["format"] = "f32le_rgb";
    const bool tagged = first.tag.has_value();
    if (tagged) {
        header["gen_id"] = first.tag->backend_id;
        header["gen_param_count"] = first.tag->params.size();
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::IOFailure, "cannot open for write: " + path.string());
    out << header.dump() << '\n';
    for (const Image& f : clip.frames)
        out.write(reinterpret_cast<const char*>(f.px.data()),
                  static_cast<std::streamsize>(f.px.size() * sizeof(float)));
    if (tagged) {
        for (const Image& f : clip.frames) {
            if (!f.tag || f.tag->params.size() != first.tag->params.size())
                raise(ErrorCode::ShapeMismatch, "inconsistent frame tags in clip");
            std::vector<float> row;
            row.reserve(f.tag->params.size() + 4);
            for (double p : f.tag->params) row.push_back(static_cast<float>(p));
            row.push_back(static_cast<float>(f.tag->transform.a));
            row.push_back(static_cast<float>(f.tag->transform.b));
            row.push_back(static_cast<float>(f.tag->transform.tx));
            row.push_back(static_cast<float>(f.tag->transform.ty));
            out.write(reinterpret_cast<const char*>(row.data()),
                      static_cast<std::streamsize>(row.size() * sizeof(float)));
        }
    }
    if (!out) raise(ErrorCode::IOFailure, "short write: " + path.string());
}

VideoClip read_video(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::MissingArtifact, "missing video: " + path.string());
    std::string header_line;
    if (!std::getline(in, header_line)) raise(ErrorCode::IOFailure, "truncated video header");
    json header;
    try {
        header = json::parse(header_line);
    } catch (const std::exception& e) {
        raise(ErrorCode::IOFailure, "video header parse failure: " + std::string(e.what()));
    }
    if (header.value("magic", "") != "mimicvid")
        raise(ErrorCode::IOFailure, "not a mimic video: " + path.string());

    const int w = header.at("width").get<int>();
    const int h = header.at("height").get<int>();
    const size_t n = header.at("frames").get<size_t>();
    VideoClip clip;
    clip.fps = header.at("fps").get<double>();
    clip.frames.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        Image f(w, h);
        in.read(reinterpret_cast<char*>(f.px.data()),
                static_cast<std::streamsize>(f.px.size() * sizeof(float)));
        if (!in) raise(ErrorCode::IOFailure, "truncated video payload: " + path.string());
        clip.frames.push_back(std::move(f));
    }
    if (header.contains("gen_id")) {
        const size_t pc = header.at("gen_param_count").get<size_t>();
        for (size_t i = 0; i < n; ++i) {
            std::vector<float> row(pc + 4);
            in.read(reinterpret_cast<char*>(row.data()),
                    static_cast<std::streamsize>(row.size() * sizeof(float)));
            if (!in) raise(ErrorCode::IOFailure, "truncated tag payload: " + path.string());
            GenTag tag;
            tag.backend_id = header.at("gen_id").get<std::string>();
            tag.params.assign(row.begin(), row.begin() + static_cast<long>(pc));
            tag.transform.a = row[pc];
            tag.transform.b = row[pc + 1];
            tag.transform.tx = row[pc + 2];
            tag.transform.ty = row[pc + 3];
            clip.frames[i].tag = std::move(tag);
        }
    }
    return clip;
}

} // namespace mimic
