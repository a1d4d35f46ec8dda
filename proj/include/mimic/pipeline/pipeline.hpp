#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mimic/evalkit/evalkit.hpp"
#include "mimic/reenact/reenact.hpp"
#include "mimic/scanselect/scanselect.hpp"

namespace mimic::pipeline {

// ---- configuration ----------------------------------------------------------

struct BackendSelection {
    std::string generator = "toy";
    std::string keypoints = "toy";
    std::string distance = "pixel_l2";
    std::string features = "toy_params";
    std::string embeddings = "toy_params";
};

struct ScanSelectConfig {
    int n = 250;
    // Scans longer than this are pre-decimated by a uniform stride before
    // the O(n^2) distance matrix; the stride lands in the run manifest.
    int decimation_threshold = 2000;
};

struct AlignmentConfig {
    double sigma = 3.0;  // frames
    int max_gap = 5;     // consecutive undetected frames bridged by interpolation
    double max_rotation_jump = 0.5; // radians, post-smoothing invariant
    // Canonical quad constants, calibrated so the neutral analytic face maps
    // to the identity transform at the canonical resolution.
    double eye_extent = 2.6455026455026452;
    double mouth_extent = 2.380952380952381;
    double center_shift = 0.35714285714285715;
};

struct SpaceConfig {
    double beta = 0.02;
    double sharpness = 100.0;
};

struct PersonalizeConfig {
    int steps = 200;
    double step_size = 0.05;
    int inversion_steps = 80;
    double inversion_step_size = 0.1;
};

struct RunConfig {
    uint64_t seed = 1;
    int canonical_resolution = 64;
    std::string cache_root; // empty: $REENACT_CACHE, then ./reenact_cache
    std::string keypoint_table_path; // empty: built-in default table
    BackendSelection backends;
    ScanSelectConfig scan_select;
    AlignmentConfig alignment;
    SpaceConfig space;
    PersonalizeConfig personalize;
    reenact::ReenactmentConfig reenact;
    double fps = 25.0;
    int eval_top_k = 5;

    json to_json() const;
    // Strict: unknown keys anywhere in the document are rejected.
    static RunConfig from_json(const json& j);
    static RunConfig load(const std::filesystem::path& path);

    std::filesystem::path resolved_cache_root() const;
    facekit::KeypointIndexTable resolved_table() const;
};

// ---- alignment ---------------------------------------------------------------

struct AlignmentParams {
    std::vector<Similarity> transforms; // source -> canonical, one per frame
    double sigma = 0.0;
};

struct AlignResult {
    std::vector<Image> frames;
    AlignmentParams params;
};

// Smoothly aligned canonical crops: anchor keypoints (eye centers, mouth
// center) are low-pass filtered over time before the similarity fit.
// Detection gaps up to cfg.max_gap are bridged by linear interpolation.
AlignResult align_video(const std::vector<Image>& frames,
                        const facekit::KeypointBackend& kp_backend,
                        const facekit::KeypointIndexTable& table, double sigma_align,
                        const AlignmentConfig& cfg, int canonical_resolution);

// ---- training-set construction ------------------------------------------------

struct TrainingSetResult {
    std::vector<Image> aligned_frames;    // full aligned scan (post-decimation)
    std::vector<int> source_indices;      // original frame index per aligned frame
    scanselect::SubsetSelection selection; // indices into aligned_frames
    int decimation_stride = 1;
    AlignmentParams alignment;
};

TrainingSetResult build_training_set(const std::filesystem::path& video_path, const RunConfig& cfg);

// ---- post-process -------------------------------------------------------------

struct EditDirection {
    std::string name;
    Eigen::MatrixXd vectors; // L x D, zero rows on inactive layers
    double step_lo = -1.0;
    double step_hi = 1.0;

    void save(const std::filesystem::path& manifest_path) const;
    static EditDirection load(const std::filesystem::path& manifest_path);
};

std::vector<latentspace::NativeLatentStack> edit_trajectory(const reenact::LatentTrajectory& traj,
                                                            const latentspace::PersonalizedSpace& space,
                                                            const EditDirection& direction,
                                                            double step);

std::vector<Image> stylize_trajectory(const reenact::LatentTrajectory& traj,
                                      const latentspace::PersonalizedSpace& space,
                                      const genbackend::GeneratorBackend& alt_backend);

// Lossless container plus a sidecar manifest recording frame count, fps and
// the payload hash.
void assemble_video(const std::vector<Image>& rasters, double fps,
                    const std::filesystem::path& path);

// ---- synthetic scans -----------------------------------------------------------

// Smooth latent-space excursion rendered through the backend; the standard
// way to produce desk-scale scans and driving clips.
VideoClip synthesize_scan(const genbackend::ToyBackend& backend, int frame_count, uint64_t seed,
                          double amplitude = 1.0, double fps = 25.0);

// ---- persisted space ------------------------------------------------------------

struct SpaceArtifacts {
    latentspace::PersonalizedSpace space;
    genbackend::ToyBackend backend;

    void save(const std::filesystem::path& dir) const;
    static SpaceArtifacts load(const std::filesystem::path& dir);
};

// ---- CLI-facing stages -----------------------------------------------------------

struct ScanSelectStage {
    std::filesystem::path subset_manifest;
    std::filesystem::path selected_video;
};
ScanSelectStage run_scan_select(const RunConfig& cfg, const std::filesystem::path& video,
                                const std::filesystem::path& out_dir);

struct PersonalizeStage {
    std::filesystem::path space_dir;
    double initial_loss = 0.0;
    double final_loss = 0.0;
};
PersonalizeStage run_personalize(const RunConfig& cfg, const std::filesystem::path& video,
                                 const std::filesystem::path& out_dir);

struct ReenactStage {
    std::filesystem::path trajectory_manifest;
    std::filesystem::path output_video;
};
ReenactStage run_reenact(const RunConfig& cfg, const std::filesystem::path& space_dir,
                         const std::filesystem::path& driving_video,
                         const std::filesystem::path& out_dir,
                         const std::optional<std::filesystem::path>& resume = std::nullopt);

std::filesystem::path run_edit(const RunConfig& cfg, const std::filesystem::path& space_dir,
                               const std::filesystem::path& trajectory_manifest,
                               const std::filesystem::path& direction_manifest, double step,
                               const std::filesystem::path& out_dir);

std::filesystem::path run_stylize(const RunConfig& cfg, const std::filesystem::path& space_dir,
                                  const std::filesystem::path& trajectory_manifest,
                                  const std::string& alt_backend,
                                  const std::filesystem::path& out_dir);

struct EvaluateStage {
    std::filesystem::path report_json;
    std::filesystem::path report_csv;
    evalkit::EvalReport report;
};
EvaluateStage run_evaluate(const RunConfig& cfg, const std::filesystem::path& generated_video,
                           const std::filesystem::path& driving_video,
                           const std::filesystem::path& training_video,
                           const std::filesystem::path& out_dir);

} // namespace mimic::pipeline
