#include "mimic/pipeline/pipeline.hpp"

namespace mimic::pipeline {

void SpaceArtifacts::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    space.anchor_set.save(dir / "anchors.json");
    backend.save(dir / "backend.json");
    json m;
    m["schema_version"] = 1;
    m["kind"] = "personalized_space";
    m["beta"] = space.beta;
    m["sharpness"] = space.sharpness;
    m["layers"] = space.layers;
    m["anchors"] = "anchors.json";
    m["backend"] = "backend.json";
    m["content_hash"] = space.content_hash();
    write_manifest(dir / "space.json", m);
}

SpaceArtifacts SpaceArtifacts::load(const std::filesystem::path& dir) {
    const json m = read_manifest(dir / "space.json", "personalized_space");
    SpaceArtifacts art;
    art.space.anchor_set = latentspace::AnchorSet::load(dir / m.at("anchors").get<std::string>());
    art.space.beta = m.at("beta").get<double>();
    art.space.sharpness = m.at("sharpness").get<double>();
    art.space.layers = m.at("layers").get<int>();
    art.backend = genbackend::ToyBackend::load(dir / m.at("backend").get<std::string>());
    art.space.validate();
    if (m.at("content_hash").get<std::string>() != art.space.content_hash())
        raise(ErrorCode::IOFailure, "space content hash mismatch in " + dir.string());
    return art;
}

ScanSelectStage run_scan_select(const RunConfig& cfg, const std::filesystem::path& video,
                                const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const TrainingSetResult ts = build_training_set(video, cfg);

    ScanSelectStage stage;
    stage.selected_video = out_dir / "selected.vid";
    VideoClip selected;
    selected.fps = cfg.fps;
    for (int idx : ts.selection.indices) selected.frames.push_back(ts.aligned_frames[idx]);
    write_video(stage.selected_video, selected);

    json m;
    m["schema_version"] = 1;
    m["kind"] = "scan_subset";
    m["source_video"] = video.filename().string();
    m["decimation_stride"] = ts.decimation_stride;
    m["metric_id"] = cfg.backends.distance;
    // selection indices reported in original frame numbering
    std::vector<int> original;
    original.reserve(ts.selection.indices.size());
    for (int idx : ts.selection.indices) original.push_back(ts.source_indices[idx]);
    m["indices"] = original;
    m["min_pairwise"] = ts.selection.min_pairwise;
    m["avg_pairwise"] = ts.selection.avg_pairwise;
    m["selected_video"] = stage.selected_video.filename().string();
    m["config"] = cfg.to_json();
    stage.subset_manifest = out_dir / "subset.json";
    write_manifest(stage.subset_manifest, m);
    return stage;
}

PersonalizeStage run_personalize(const RunConfig& cfg, const std::filesystem::path& video,
                                 const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const TrainingSetResult ts = build_training_set(video, cfg);

    if (cfg.backends.generator != "toy")
        raise(ErrorCode::BackendUnavailable,
              "personalization runs on the toy backend; got " + cfg.backends.generator);
    genbackend::ToyBackend pretrained;

    // Anchors by direct latent optimization against the selected frames.
    genbackend::InversionConfig inv;
    inv.steps = cfg.personalize.inversion_steps;
    inv.step_size = cfg.personalize.inversion_step_size;

    std::vector<genbackend::TrainingPair> pairs;
    Eigen::MatrixXd anchors(cfg.scan_select.n, pretrained.latent_dim());
    for (int i = 0; i < cfg.scan_select.n; ++i) {
        const Image& target = ts.aligned_frames[ts.selection.indices[i]];
        const Eigen::VectorXd w = genbackend::invert_to_anchor(pretrained, target, inv);
        anchors.row(i) = w.transpose();
        pairs.push_back({w, target});
    }

    const genbackend::DifferentiablePixelL2 perceptual;
    genbackend::PersonalizeResult tuned = genbackend::personalize(
        pretrained, pairs, cfg.personalize.steps, cfg.personalize.step_size, perceptual, cfg.seed);

    SpaceArtifacts art;
    art.space.anchor_set.anchors = anchors;
    art.space.beta = cfg.space.beta;
    art.space.sharpness = cfg.space.sharpness;
    art.space.layers = tuned.backend->layers();
    art.backend = dynamic_cast<const genbackend::ToyBackend&>(*tuned.backend);
    art.save(out_dir);

    json m;
    m["schema_version"] = 1;
    m["kind"] = "personalize_run";
    m["initial_loss"] = tuned.initial_loss;
    m["final_loss"] = tuned.final_loss;
    m["anchor_count"] = cfg.scan_select.n;
    m["config"] = cfg.to_json();
    write_manifest(out_dir / "personalize.json", m);

    PersonalizeStage stage;
    stage.space_dir = out_dir;
    stage.initial_loss = tuned.initial_loss;
    stage.final_loss = tuned.final_loss;
    return stage;
}

ReenactStage run_reenact(const RunConfig& cfg, const std::filesystem::path& space_dir,
                         const std::filesystem::path& driving_video,
                         const std::filesystem::path& out_dir,
                         const std::optional<std::filesystem::path>& resume) {
    std::filesystem::create_directories(out_dir);
    const SpaceArtifacts art = SpaceArtifacts::load(space_dir);
    const VideoClip driving = read_video(driving_video);

    const auto kp_backend = genbackend::make_keypoint_backend(cfg.backends.keypoints);
    const auto table = cfg.resolved_table();
    const AlignResult aligned = align_video(driving.frames, *kp_backend, table,
                                            cfg.alignment.sigma, cfg.alignment,
                                            cfg.canonical_resolution);

    reenact::ReenactVideoOptions options;
    options.checkpoint = resume ? *resume : out_dir / "trajectory_raw.json";
    const reenact::ReenactVideoResult result = reenact::reenact_video(
        aligned.frames, art.space, art.backend, cfg.reenact, *kp_backend, table, options);

    ReenactStage stage;
    stage.trajectory_manifest = out_dir / "trajectory.json";
    result.smoothed.save(stage.trajectory_manifest);
    stage.output_video = out_dir / "reenacted.vid";
    assemble_video(result.rasters, driving.fps, stage.output_video);

    json m;
    m["schema_version"] = 1;
    m["kind"] = "reenact_run";
    m["frames"] = result.rasters.size();
    m["space_hash"] = art.space.content_hash();
    m["no_progress_warnings"] = result.warnings_no_progress;
    m["config"] = cfg.to_json();
    write_manifest(out_dir / "reenact.json", m);
    return stage;
}

std::filesystem::path run_edit(const RunConfig& cfg, const std::filesystem::path& space_dir,
                               const std::filesystem::path& trajectory_manifest,
                               const std::filesystem::path& direction_manifest, double step,
                               const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const SpaceArtifacts art = SpaceArtifacts::load(space_dir);
    const reenact::LatentTrajectory traj = reenact::LatentTrajectory::load(trajectory_manifest);
    const EditDirection dir = EditDirection::load(direction_manifest);

    const auto codes = edit_trajectory(traj, art.space, dir, step);
    std::vector<Image> rasters;
    rasters.reserve(codes.size());
    for (const auto& stack : codes) rasters.push_back(art.backend.generate(stack));
    const std::filesystem::path out = out_dir / ("edited_" + dir.name + ".vid");
    assemble_video(rasters, cfg.fps, out);
    return out;
}

std::filesystem::path run_stylize(const RunConfig& cfg, const std::filesystem::path& space_dir,
                                  const std::filesystem::path& trajectory_manifest,
                                  const std::string& alt_backend,
                                  const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const SpaceArtifacts art = SpaceArtifacts::load(space_dir);
    const reenact::LatentTrajectory traj = reenact::LatentTrajectory::load(trajectory_manifest);

    std::unique_ptr<genbackend::GeneratorBackend> backend;
    if (alt_backend == "toy_inverted") {
        // Styled variant of the tuned generator, not of the pretrained one.
        backend = art.backend.with_inverted_colors().clone();
    } else {
        backend = genbackend::make_generator_backend(alt_backend);
    }
    const std::vector<Image> rasters = stylize_trajectory(traj, art.space, *backend);
    const std::filesystem::path out = out_dir / ("stylized_" + alt_backend + ".vid");
    assemble_video(rasters, cfg.fps, out);
    return out;
}

EvaluateStage run_evaluate(const RunConfig& cfg, const std::filesystem::path& generated_video,
                           const std::filesystem::path& driving_video,
                           const std::filesystem::path& training_video,
                           const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    evalkit::ReportInputs inputs;
    inputs.generated_video = generated_video;
    inputs.driving_video = driving_video;
    inputs.training_video = training_video;
    inputs.feature_backend = cfg.backends.features;
    inputs.embedding_backend = cfg.backends.embeddings;
    inputs.top_k = cfg.eval_top_k;
    inputs.config_echo = cfg.to_json();

    EvaluateStage stage;
    stage.report = evalkit::make_report(inputs);
    stage.report_json = out_dir / "report.json";
    stage.report_csv = out_dir / "report.csv";
    evalkit::write_report(stage.report, stage.report_json, stage.report_csv);
    return stage;
}

} // namespace mimic::pipeline
