#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "mimic/genbackend/backend.hpp"

namespace mimic::reenact {

using latentspace::PersonalizedLatent;
using latentspace::PersonalizedSpace;

struct ReenactmentConfig {
    double lambda_mouth = 1.0;
    double lambda_eyes = 1.0;
    double lambda_delta = 10.0;
    double lambda_sum = 10.0;
    int steps = 150;
    double step_size = 0.02;
    double sigma_init = 0.05; // warm-start noise
    double sigma_traj = 2.0;  // trajectory low-pass
    uint64_t seed = 0;
    // Ablation switch: penalize raw keypoint coordinates instead of the
    // part-normalized descriptor.
    bool absolute_keypoints = false;

    void validate() const;
    json to_json() const;
    static ReenactmentConfig from_json(const json& j);
};

// Everything the per-frame objective reads besides the latent itself.
struct FrameObjectiveInputs {
    facekit::NormalizedKeypointDescriptor driving_descriptor;
    facekit::GroupedKeypoints driving_grouped;
    Image driving;
    Image identity_reference; // I_c
    facekit::GroupedKeypoints reference_grouped;
};

FrameObjectiveInputs make_frame_inputs(const Image& driving, const Image& identity_reference,
                                       const facekit::KeypointBackend& kp_backend,
                                       const facekit::KeypointIndexTable& table);

// Unweighted term values; `total` carries the lambda weighting.
struct FullLossResult {
    double total = 0.0;
    double key = 0.0;
    double mouth = 0.0;
    double eyes = 0.0;
    double delta = 0.0;
    double sum = 0.0;
};

FullLossResult full_loss(const PersonalizedLatent& pl, const FrameObjectiveInputs& inputs,
                         const PersonalizedSpace& space, const genbackend::GeneratorBackend& backend,
                         const ReenactmentConfig& cfg);

// Loss plus analytic gradient with respect to the raw coefficients and the
// per-layer offsets.
struct FullLossGradient {
    FullLossResult loss;
    Eigen::VectorXd d_alpha;  // N
    Eigen::MatrixXd d_deltas; // L x N
};

FullLossGradient full_loss_with_grad(const PersonalizedLatent& pl,
                                     const FrameObjectiveInputs& inputs,
                                     const PersonalizedSpace& space,
                                     const genbackend::GeneratorBackend& backend,
                                     const ReenactmentConfig& cfg);

struct OptimizeOutcome {
    PersonalizedLatent latent; // finalized
    double initial_loss = 0.0;
    double final_loss = 0.0; // best raw-path loss observed
    FullLossResult final_breakdown; // recomputed at the finalized latent
    bool no_progress = false; // reduction < 1e-12: warning, not an error
};

OptimizeOutcome optimize_frame(const FrameObjectiveInputs& inputs, const PersonalizedSpace& space,
                               const genbackend::GeneratorBackend& backend,
                               const ReenactmentConfig& cfg, const PersonalizedLatent& init);

// Previous frame's coefficients with i.i.d. Gaussian noise on alpha; the
// offsets are copied untouched. sigma_init == 0 returns `prev` verbatim.
PersonalizedLatent noisy_init(const PersonalizedLatent& prev, double sigma_init, uint64_t seed);

struct LatentTrajectory {
    std::vector<PersonalizedLatent> latents;
    ReenactmentConfig config;
    std::vector<double> final_losses;
    std::string space_hash;

    void save(const std::filesystem::path& manifest_path) const;
    static LatentTrajectory load(const std::filesystem::path& manifest_path);
};

// Per-coefficient Gaussian low-pass over the frame index. Kernel truncated
// at 4 sigma and renormalized; evaluated in difference form so constant
// series are exact fixed points. Reflect boundary handling.
LatentTrajectory smooth_trajectory(const LatentTrajectory& traj, double sigma_traj);

struct ReenactVideoOptions {
    // When set, the raw per-frame trajectory is persisted after every frame
    // and optimization resumes from it if it already holds frames.
    std::optional<std::filesystem::path> checkpoint;
};

struct ReenactVideoResult {
    LatentTrajectory raw;      // per-frame optimizer outputs
    LatentTrajectory smoothed; // what the rasters are generated from
    std::vector<Image> rasters;
    int warnings_no_progress = 0;
};

ReenactVideoResult reenact_video(const std::vector<Image>& driving_frames,
                                 const PersonalizedSpace& space,
                                 const genbackend::GeneratorBackend& backend,
                                 const ReenactmentConfig& cfg,
                                 const facekit::KeypointBackend& kp_backend,
                                 const facekit::KeypointIndexTable& table,
                                 const ReenactVideoOptions& options = {});

} // namespace mimic::reenact
