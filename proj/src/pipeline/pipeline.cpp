#include "mimic/pipeline/pipeline.hpp"

#include <cmath>
#include <numbers>

#include "mimic/core/rng.hpp"

namespace mimic::pipeline {

namespace {

struct Anchor2 {
    double x = 0, y = 0;
};

struct FrameAnchors {
    Anchor2 eye_l, eye_r, mouth;
    bool detected = false;
};

template <size_t N>
Anchor2 group_mean(const std::array<facekit::Point3, N>& pts) {
    Anchor2 m;
    for (const auto& p : pts) {
        m.x += p.x;
        m.y += p.y;
    }
    m.x /= N;
    m.y /= N;
    return m;
}

// In-place Gaussian low-pass over a scalar series, difference form, reflect
// boundaries; shared by alignment and kept consistent with the trajectory
// filter.
void smooth_series(std::vector<double>& xs, double sigma) {
    const int n = static_cast<int>(xs.size());
    const int radius = static_cast<int>(std::floor(4.0 * sigma));
    if (radius == 0 || n <= 1) return;
    std::vector<double> kernel(2 * radius + 1);
    double total = 0.0;
    for (int j = -radius; j <= radius; ++j) {
        kernel[j + radius] = std::exp(-0.5 * (j / sigma) * (j / sigma));
        total += kernel[j + radius];
    }
    for (double& k : kernel) k /= total;
    auto reflect = [n](int idx) {
        while (idx < 0 || idx >= n) {
            if (idx < 0) idx = -idx - 1;
            if (idx >= n) idx = 2 * n - 1 - idx;
        }
        return idx;
    };
    std::vector<double> out(n);
    for (int t = 0; t < n; ++t) {
        double acc = xs[t];
        for (int j = -radius; j <= radius; ++j) acc += kernel[j + radius] * (xs[reflect(t + j)] - xs[t]);
        out[t] = acc;
    }
    xs = std::move(out);
}

} // namespace

AlignResult align_video(const std::vector<Image>& frames,
                        const facekit::KeypointBackend& kp_backend,
                        const facekit::KeypointIndexTable& table, double sigma_align,
                        const AlignmentConfig& cfg, int canonical_resolution) {
    if (frames.empty()) raise(ErrorCode::EmptyInput, "align_video with no frames");

    const int n = static_cast<int>(frames.size());
    std::vector<FrameAnchors> anchors(n);
    int gap = 0;
    bool any_detected = false;
    for (int t = 0; t < n; ++t) {
        try {
            const auto gk = facekit::select_subset(facekit::extract_keypoints(frames[t], kp_backend), table);
            anchors[t].eye_l = group_mean(gk.left_eyelid);
            anchors[t].eye_r = group_mean(gk.right_eyelid);
            anchors[t].mouth = group_mean(gk.mouth);
            anchors[t].detected = true;
            any_detected = true;
            gap = 0;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoFaceDetected) throw;
            if (++gap > cfg.max_gap)
                raise(ErrorCode::NoFaceDetected,
                      "detection gap exceeds " + std::to_string(cfg.max_gap) + " frames at frame " +
                          std::to_string(t));
        }
    }
    if (!any_detected) raise(ErrorCode::NoFaceDetected, "no frame yielded keypoints");

    // Bridge gaps: linear interpolation between detected neighbors, clamped
    // at the clip edges.
    for (int t = 0; t < n; ++t) {
        if (anchors[t].detected) continue;
        int prev = t - 1;
        while (prev >= 0 && !anchors[prev].detected) --prev;
        int next = t + 1;
        while (next < n && !anchors[next].detected) ++next;
        if (prev < 0) {
            anchors[t] = anchors[next];
        } else if (next >= n) {
            anchors[t] = anchors[prev];
        } else {
            const double w = static_cast<double>(t - prev) / (next - prev);
            auto lerp = [w](const Anchor2& a, const Anchor2& b) {
                return Anchor2{a.x + w * (b.x - a.x), a.y + w * (b.y - a.y)};
            };
            anchors[t].eye_l = lerp(anchors[prev].eye_l, anchors[next].eye_l);
            anchors[t].eye_r = lerp(anchors[prev].eye_r, anchors[next].eye_r);
            anchors[t].mouth = lerp(anchors[prev].mouth, anchors[next].mouth);
        }
        anchors[t].detected = true;
    }

    // Smooth the anchor keypoint series before fitting any transform.
    if (sigma_align > 0) {
        std::array<std::vector<double>, 6> series;
        for (auto& s : series) s.resize(n);
        for (int t = 0; t < n; ++t) {
            series[0][t] = anchors[t].eye_l.x;
            series[1][t] = anchors[t].eye_l.y;
            series[2][t] = anchors[t].eye_r.x;
            series[3][t] = anchors[t].eye_r.y;
            series[4][t] = anchors[t].mouth.x;
            series[5][t] = anchors[t].mouth.y;
        }
        for (auto& s : series) smooth_series(s, sigma_align);
        for (int t = 0; t < n; ++t) {
            anchors[t].eye_l = {series[0][t], series[1][t]};
            anchors[t].eye_r = {series[2][t], series[3][t]};
            anchors[t].mouth = {series[4][t], series[5][t]};
        }
    }

    AlignResult result;
    result.params.sigma = sigma_align;
    result.params.transforms.reserve(n);
    result.frames.reserve(n);
    const double S = canonical_resolution;

    for (int t = 0; t < n; ++t) {
        const Anchor2& el = anchors[t].eye_l;
        const Anchor2& er = anchors[t].eye_r;
        const Anchor2& mo = anchors[t].mouth;
        const double eye_avg_x = 0.5 * (el.x + er.x);
        const double eye_avg_y = 0.5 * (el.y + er.y);
        const double e2e_x = er.x - el.x;
        const double e2e_y = er.y - el.y;
        const double e2m_x = mo.x - eye_avg_x;
        const double e2m_y = mo.y - eye_avg_y;

        // Horizontal quad axis: eye line blended with the rotated eye-mouth
        // axis, scaled by whichever feature extent dominates.
        double xv_x = e2e_x + e2m_y;
        double xv_y = e2e_y - e2m_x;
        const double xv_norm = std::hypot(xv_x, xv_y);
        const double e2e_len = std::hypot(e2e_x, e2e_y);
        const double e2m_len = std::hypot(e2m_x, e2m_y);
        if (xv_norm < 1e-9 || e2e_len < 1e-9)
            raise(ErrorCode::NoFaceDetected, "degenerate anchor geometry at frame " + std::to_string(t));
        const double half_extent =
            0.5 * std::max(e2e_len * cfg.eye_extent, e2m_len * cfg.mouth_extent);
        xv_x *= half_extent / xv_norm;
        xv_y *= half_extent / xv_norm;

        const double cx = eye_avg_x + cfg.center_shift * e2m_x;
        const double cy = eye_avg_y + cfg.center_shift * e2m_y;

        // Map c -> canvas center, c + x -> right edge midpoint.
        const double theta = std::atan2(xv_y, xv_x);
        const double scale = S / (2.0 * half_extent);
        Similarity T;
        T.a = scale * std::cos(theta);
        T.b = -scale * std::sin(theta);
        double ocx, ocy;
        T.tx = 0;
        T.ty = 0;
        T.apply(cx, cy, ocx, ocy);
        T.tx = S / 2.0 - ocx;
        T.ty = S / 2.0 - ocy;

        result.params.transforms.push_back(T);
        result.frames.push_back(warp_similarity(frames[t], T, canonical_resolution, canonical_resolution));
    }

    for (int t = 1; t < n; ++t) {
        const double jump = std::abs(result.params.transforms[t].rotation() -
                                     result.params.transforms[t - 1].rotation());
        if (jump > cfg.max_rotation_jump)
            raise(ErrorCode::ConfigInvalid,
                  "rotation jump " + std::to_string(jump) + " at frame " + std::to_string(t) +
                      " exceeds the configured bound");
    }
    return result;
}

TrainingSetResult build_training_set(const std::filesystem::path& video_path, const RunConfig& cfg) {
    const VideoClip clip = read_video(video_path);
    const int total = static_cast<int>(clip.frames.size());
    if (total < cfg.scan_select.n)
        raise(ErrorCode::TooFewFrames, "scan has " + std::to_string(total) + " frames, need " +
                                           std::to_string(cfg.scan_select.n));

    const auto kp_backend = genbackend::make_keypoint_backend(cfg.backends.keypoints);
    const auto table = cfg.resolved_table();
    AlignResult aligned = align_video(clip.frames, *kp_backend, table, cfg.alignment.sigma,
                                      cfg.alignment, cfg.canonical_resolution);

    TrainingSetResult result;
    result.alignment = aligned.params;
    result.decimation_stride = 1;
    if (total > cfg.scan_select.decimation_threshold) {
        result.decimation_stride =
            (total + cfg.scan_select.decimation_threshold - 1) / cfg.scan_select.decimation_threshold;
    }
    for (int i = 0; i < total; i += result.decimation_stride) {
        result.aligned_frames.push_back(std::move(aligned.frames[i]));
        result.source_indices.push_back(i);
    }
    if (static_cast<int>(result.aligned_frames.size()) < cfg.scan_select.n)
        raise(ErrorCode::TooFewFrames, "decimated scan shorter than the subset size");

    const auto metric = scanselect::make_distance_backend(cfg.backends.distance);
    const scanselect::DistanceMatrix dm = scanselect::pairwise_distances(result.aligned_frames, *metric);
    result.selection = scanselect::greedy_diverse_subset(dm, cfg.scan_select.n);
    return result;
}

void EditDirection::save(const std::filesystem::path& manifest_path) const {
    std::vector<float> blob;
    blob.reserve(static_cast<size_t>(vectors.size()));
    for (Eigen::Index l = 0; l < vectors.rows(); ++l)
        for (Eigen::Index d = 0; d < vectors.cols(); ++d)
            blob.push_back(static_cast<float>(vectors(l, d)));
    const std::filesystem::path blob_path = manifest_path.string() + ".f32";
    write_f32_blob(blob_path, blob);
    json m;
    m["schema_version"] = 1;
    m["kind"] = "edit_direction";
    m["name"] = name;
    m["layers"] = vectors.rows();
    m["dim"] = vectors.cols();
    m["step_range"] = {step_lo, step_hi};
    m["blob"] = blob_path.filename().string();
    m["blob_hash"] = fnv1a64_hex(blob);
    write_manifest(manifest_path, m);
}

EditDirection EditDirection::load(const std::filesystem::path& manifest_path) {
    const json m = read_manifest(manifest_path, "edit_direction");
    EditDirection dir;
    dir.name = m.at("name").get<std::string>();
    const auto range = m.at("step_range").get<std::vector<double>>();
    if (range.size() == 2) {
        dir.step_lo = range[0];
        dir.step_hi = range[1];
    }
    const long layers = m.at("layers").get<long>();
    const long dim = m.at("dim").get<long>();
    const std::vector<float> blob =
        read_f32_blob(manifest_path.parent_path() / m.at("blob").get<std::string>());
    if (static_cast<long>(blob.size()) != layers * dim)
        raise(ErrorCode::ShapeMismatch, "edit direction blob size mismatch");
    dir.vectors.resize(layers, dim);
    size_t k = 0;
    for (long l = 0; l < layers; ++l)
        for (long d = 0; d < dim; ++d) dir.vectors(l, d) = blob[k++];
    return dir;
}

std::vector<latentspace::NativeLatentStack> edit_trajectory(const reenact::LatentTrajectory& traj,
                                                            const latentspace::PersonalizedSpace& space,
                                                            const EditDirection& direction,
                                                            double step) {
    if (direction.vectors.cols() != space.dim() || direction.vectors.rows() != space.layers)
        raise(ErrorCode::DimensionMismatch, "edit direction does not match the space");
    std::vector<latentspace::NativeLatentStack> out;
    out.reserve(traj.latents.size());
    for (const auto& pl : traj.latents) {
        latentspace::NativeLatentStack stack = latentspace::to_native(pl, space);
        stack.codes += step * direction.vectors;
        out.push_back(std::move(stack));
    }
    return out;
}

std::vector<Image> stylize_trajectory(const reenact::LatentTrajectory& traj,
                                      const latentspace::PersonalizedSpace& space,
                                      const genbackend::GeneratorBackend& alt_backend) {
    if (alt_backend.layers() != space.layers || alt_backend.latent_dim() != space.dim())
        raise(ErrorCode::BackendShapeMismatch,
              "alternate backend is " + std::to_string(alt_backend.layers()) + "x" +
                  std::to_string(alt_backend.latent_dim()) + ", space needs " +
                  std::to_string(space.layers) + "x" + std::to_string(space.dim()));
    std::vector<Image> out;
    out.reserve(traj.latents.size());
    for (const auto& pl : traj.latents)
        out.push_back(alt_backend.generate(latentspace::to_native(pl, space)));
    return out;
}

void assemble_video(const std::vector<Image>& rasters, double fps,
                    const std::filesystem::path& path) {
    if (rasters.empty()) raise(ErrorCode::EmptyInput, "assemble_video with no frames");
    VideoClip clip;
    clip.frames = rasters;
    clip.fps = fps;
    write_video(path, clip);

    std::vector<float> payload;
    for (const Image& f : rasters) payload.insert(payload.end(), f.px.begin(), f.px.end());
    json m;
    m["schema_version"] = 1;
    m["kind"] = "video_sidecar";
    m["frames"] = rasters.size();
    m["fps"] = fps;
    m["width"] = rasters.front().width;
    m["height"] = rasters.front().height;
    m["format"] = "f32le_rgb";
    m["content_hash"] = fnv1a64_hex(payload);
    write_manifest(path.string() + ".manifest.json", m);
}

VideoClip synthesize_scan(const genbackend::ToyBackend& backend, int frame_count, uint64_t seed,
                          double amplitude, double fps) {
    if (frame_count < 1) raise(ErrorCode::InvalidCount, "frame count must be positive");
    Rng rng(seed);
    const int dim = backend.latent_dim();

    // Random slow sinusoid per code coordinate: w_d(t) = A_d sin(2 pi f_d t + phase).
    std::vector<double> amp(dim), freq(dim), phase(dim);
    for (int d = 0; d < dim; ++d) {
        amp[d] = amplitude * rng.uniform(0.3, 1.0);
        freq[d] = rng.uniform(0.5, 2.0);
        phase[d] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }

    VideoClip clip;
    clip.fps = fps;
    clip.frames.reserve(frame_count);
    Eigen::VectorXd w(dim);
    for (int t = 0; t < frame_count; ++t) {
        const double u = frame_count > 1 ? static_cast<double>(t) / (frame_count - 1) : 0.0;
        for (int d = 0; d < dim; ++d)
            w(d) = amp[d] * std::sin(2.0 * std::numbers::pi * freq[d] * u + phase[d]);
        clip.frames.push_back(backend.generate(backend.broadcast(w)));
    }
    return clip;
}

} // namespace mimic::pipeline
