#include "mimic/reenact/reenact.hpp"

#include <algorithm>
#include <cmath>

#include "mimic/core/adam.hpp"
#include "mimic/core/io.hpp"
#include "mimic/core/rng.hpp"

namespace mimic::reenact {

using facekit::GroupedKeypoints;
using facekit::Point3;
using genbackend::Dual16;
using genbackend::kToyParamCount;
using genbackend::ToyBackend;
using genbackend::ToyFaceParams;

void ReenactmentConfig::validate() const {
    if (lambda_mouth < 0 || lambda_eyes < 0 || lambda_delta < 0 || lambda_sum < 0)
        raise(ErrorCode::ConfigInvalid, "loss weights must be nonnegative");
    if (sigma_init < 0 || sigma_traj < 0)
        raise(ErrorCode::ConfigInvalid, "noise and smoothing sigmas must be nonnegative");
    if (steps < 0 || step_size <= 0) raise(ErrorCode::ConfigInvalid, "bad optimizer settings");
}

json ReenactmentConfig::to_json() const {
    json j;
    j["lambda_mouth"] = lambda_mouth;
    j["lambda_eyes"] = lambda_eyes;
    j["lambda_delta"] = lambda_delta;
    j["lambda_sum"] = lambda_sum;
    j["steps"] = steps;
    j["step_size"] = step_size;
    j["sigma_init"] = sigma_init;
    j["sigma_traj"] = sigma_traj;
    j["seed"] = seed;
    j["absolute_keypoints"] = absolute_keypoints;
    return j;
}

ReenactmentConfig ReenactmentConfig::from_json(const json& j) {
    ReenactmentConfig c;
    c.lambda_mouth = j.at("lambda_mouth").get<double>();
    c.lambda_eyes = j.at("lambda_eyes").get<double>();
    c.lambda_delta = j.at("lambda_delta").get<double>();
    c.lambda_sum = j.at("lambda_sum").get<double>();
    c.steps = j.at("steps").get<int>();
    c.step_size = j.at("step_size").get<double>();
    c.sigma_init = j.at("sigma_init").get<double>();
    c.sigma_traj = j.at("sigma_traj").get<double>();
    c.seed = j.at("seed").get<uint64_t>();
    c.absolute_keypoints = j.at("absolute_keypoints").get<bool>();
    c.validate();
    return c;
}

FrameObjectiveInputs make_frame_inputs(const Image& driving, const Image& identity_reference,
                                       const facekit::KeypointBackend& kp_backend,
                                       const facekit::KeypointIndexTable& table) {
    FrameObjectiveInputs inputs;
    inputs.driving = driving;
    inputs.identity_reference = identity_reference;
    inputs.driving_grouped = facekit::select_subset(facekit::extract_keypoints(driving, kp_backend), table);
    inputs.driving_descriptor = facekit::normalize_groups(inputs.driving_grouped);
    inputs.reference_grouped =
        facekit::select_subset(facekit::extract_keypoints(identity_reference, kp_backend), table);
    return inputs;
}

namespace {

struct IntRect {
    int x0, y0, x1, y1;
    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
};

IntRect generated_region_rect(const GroupedKeypoints& gen, facekit::Region region, int canvas) {
    double mnx, mny, mxx, mxy;
    facekit::region_bounds(gen, region, mnx, mny, mxx, mxy);
    IntRect r;
    r.x0 = std::clamp(static_cast<int>(std::floor(mnx)), 0, canvas);
    r.y0 = std::clamp(static_cast<int>(std::floor(mny)), 0, canvas);
    r.x1 = std::clamp(static_cast<int>(std::ceil(mxx)), 0, canvas);
    r.y1 = std::clamp(static_cast<int>(std::ceil(mxy)), 0, canvas);
    if (r.x1 <= r.x0 || r.y1 <= r.y0)
        raise(ErrorCode::DegenerateRegion,
              std::string(facekit::region_name(region)) + " region collapsed on the generated frame");
    return r;
}

GroupedKeypoints grouped_from_values(const genbackend::ToyKeypoints66<double>& kp) {
    GroupedKeypoints gk;
    int k = 0;
    auto take = [&](Point3& dst) {
        dst = {kp.pts[k][0], kp.pts[k][1], kp.pts[k][2]};
        ++k;
    };
    for (auto& q : gk.left_eyelid) take(q);
    for (auto& q : gk.right_eyelid) take(q);
    for (auto& q : gk.left_iris) take(q);
    for (auto& q : gk.right_iris) take(q);
    for (auto& q : gk.mouth) take(q);
    for (auto& q : gk.head_frame) take(q);
    return gk;
}

GroupedKeypoints grouped_from_duals(const genbackend::ToyKeypoints66<Dual16>& kp) {
    genbackend::ToyKeypoints66<double> vals;
    for (int i = 0; i < 66; ++i)
        for (int a = 0; a < 3; ++a) vals.pts[i][a] = kp.pts[i][a].v;
    return grouped_from_values(vals);
}

// Pixel L2 between a generated region (double buffer over `rect`) and a
// reference crop, after center-cropping both to the common extent. When
// gradients are requested the cotangents are contracted with the generated
// pixels' parameter tangents in the same pass structure.
struct RegionTerm {
    double loss = 0.0;
};

template <typename GenReader, typename TangentReader>
RegionTerm region_term(const IntRect& gen_rect, const facekit::RegionCrop& ref,
                       GenReader&& gen_at, bool with_grad, TangentReader&& tan_at,
                       std::array<double, kToyParamCount>* g_params) {
    const int w = std::min(gen_rect.width(), ref.pixels.width);
    const int h = std::min(gen_rect.height(), ref.pixels.height);
    const int gox = (gen_rect.width() - w) / 2;
    const int goy = (gen_rect.height() - h) / 2;
    const int rox = (ref.pixels.width - w) / 2;
    const int roy = (ref.pixels.height - h) / 2;

    double acc = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) {
                const double d = gen_at(gox + x, goy + y, c) - ref.pixels.at(rox + x, roy + y, c);
                acc += d * d;
            }
    RegionTerm term;
    term.loss = std::sqrt(acc);

    if (with_grad && term.loss > 1e-15) {
        const double inv = 1.0 / term.loss;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                for (int c = 0; c < 3; ++c) {
                    const double d =
                        gen_at(gox + x, goy + y, c) - ref.pixels.at(rox + x, roy + y, c);
                    const double cot = d * inv;
                    const auto& t = tan_at(gox + x, goy + y, c);
                    for (int j = 0; j < kToyParamCount; ++j) (*g_params)[j] += cot * t[j];
                }
    }
    return term;
}

struct EvalOutput {
    FullLossResult loss;
    std::array<double, kToyParamCount> g_params{}; // image/keypoint terms only
    latentspace::NativeLatentStack codes;
    Eigen::VectorXd alpha_eff;
};

// Shared evaluation core for the value and gradient paths. The generated
// side is rendered only on the region rectangles; rectangle bounds are
// treated as constants of the differentiation.
EvalOutput eval_terms(const PersonalizedLatent& pl, const FrameObjectiveInputs& inputs,
                      const PersonalizedSpace& space, const genbackend::GeneratorBackend& backend,
                      const ReenactmentConfig& cfg, bool with_grad) {
    const auto* toy = dynamic_cast<const ToyBackend*>(&backend);
    if (!toy)
        raise(ErrorCode::BackendUnavailable,
              "frame objective requires an analytic backend: " + backend.id());

    EvalOutput out;
    out.codes = latentspace::to_native(pl, space);
    out.alpha_eff = pl.finalized ? pl.alpha : latentspace::reparametrize(pl.alpha, space);
    const ToyFaceParams params = toy->params_from_codes(out.codes);
    const bool inverted = toy->inverted_colors();
    const int canvas = toy->resolution();

    // generated keypoints (values always; tangents only when differentiating)
    GroupedKeypoints gen_grouped;
    genbackend::ToyKeypoints66<Dual16> kp_dual;
    if (with_grad) {
        kp_dual = genbackend::toy_keypoints66(genbackend::seed_params(params));
        gen_grouped = grouped_from_duals(kp_dual);
    } else {
        gen_grouped = grouped_from_values(genbackend::toy_keypoints66(params.v));
    }

    // keypoint term
    std::array<Point3, 66> kp_cot{};
    if (cfg.absolute_keypoints) {
        out.loss.key = facekit::absolute_keypoint_loss(inputs.driving_grouped, gen_grouped);
        if (with_grad)
            kp_cot = facekit::absolute_keypoint_loss_grad_wrt_second(inputs.driving_grouped,
                                                                     gen_grouped);
    } else {
        out.loss.key =
            facekit::keypoint_loss(inputs.driving_descriptor, facekit::normalize_groups(gen_grouped));
        if (with_grad)
            kp_cot = facekit::keypoint_loss_grad_wrt_second(inputs.driving_descriptor, gen_grouped);
    }
    if (with_grad) {
        for (int i = 0; i < 66; ++i) {
            const double cot[3] = {kp_cot[i].x, kp_cot[i].y, kp_cot[i].z};
            for (int a = 0; a < 3; ++a) {
                if (cot[a] == 0.0) continue;
                const auto& t = kp_dual.pts[i][a].d;
                for (int j = 0; j < kToyParamCount; ++j) out.g_params[j] += cot[a] * t[j];
            }
        }
    }

    // pixel terms: mouth against the driving frame, eyes against I_c
    auto run_region = [&](facekit::Region region, const Image& ref_image,
                          const GroupedKeypoints& ref_grouped) {
        const facekit::RegionCrop ref_crop = facekit::crop_region(ref_image, ref_grouped, region);
        const IntRect rect = generated_region_rect(gen_grouped, region, canvas);
        if (with_grad) {
            const genbackend::DualPatchRender buf =
                genbackend::toy_render_patch_dual(params, rect.x0, rect.y0, rect.x1, rect.y1, inverted);
            auto gen_at = [&](int x, int y, int c) {
                return buf.value[(static_cast<size_t>(y) * buf.width + x) * 3 + c];
            };
            auto tan_at = [&](int x, int y, int c) -> const std::array<double, kToyParamCount>& {
                return buf.tangent[(static_cast<size_t>(y) * buf.width + x) * 3 + c];
            };
            return region_term(rect, ref_crop, gen_at, true, tan_at, &out.g_params).loss;
        }
        const std::vector<double> buf =
            genbackend::toy_render_patch(params, rect.x0, rect.y0, rect.x1, rect.y1, inverted);
        auto gen_at = [&](int x, int y, int c) {
            return buf[(static_cast<size_t>(y) * rect.width() + x) * 3 + c];
        };
        auto tan_null = [&](int, int, int) -> const std::array<double, kToyParamCount>& {
            static const std::array<double, kToyParamCount> zero{};
            return zero;
        };
        return region_term(rect, ref_crop, gen_at, false, tan_null, nullptr).loss;
    };

    out.loss.mouth = run_region(facekit::Region::mouth, inputs.driving, inputs.driving_grouped);
    out.loss.eyes = run_region(facekit::Region::left_eye, inputs.identity_reference,
                               inputs.reference_grouped) +
                    run_region(facekit::Region::right_eye, inputs.identity_reference,
                               inputs.reference_grouped);

    out.loss.sum = latentspace::sum_regularizer(out.alpha_eff);
    out.loss.delta = latentspace::delta_regularizer(pl.deltas);
    out.loss.total = out.loss.key + cfg.lambda_mouth * out.loss.mouth +
                     cfg.lambda_eyes * out.loss.eyes + cfg.lambda_delta * out.loss.delta +
                     cfg.lambda_sum * out.loss.sum;
    if (!std::isfinite(out.loss.total))
        raise(ErrorCode::NonFiniteLoss, "frame objective is not finite");
    return out;
}

} // namespace

FullLossResult full_loss(const PersonalizedLatent& pl, const FrameObjectiveInputs& inputs,
                         const PersonalizedSpace& space, const genbackend::GeneratorBackend& backend,
                         const ReenactmentConfig& cfg) {
    return eval_terms(pl, inputs, space, backend, cfg, /*with_grad=*/false).loss;
}

FullLossGradient full_loss_with_grad(const PersonalizedLatent& pl,
                                     const FrameObjectiveInputs& inputs,
                                     const PersonalizedSpace& space,
                                     const genbackend::GeneratorBackend& backend,
                                     const ReenactmentConfig& cfg) {
    const auto* toy = dynamic_cast<const ToyBackend*>(&backend);
    EvalOutput ev = eval_terms(pl, inputs, space, backend, cfg, /*with_grad=*/true);

    const int n = space.count();
    const int layers = space.layers;

    // image/keypoint gradient: params -> codes -> per-layer coefficients
    const Eigen::MatrixXd jac = toy->params_jacobian(ev.codes); // 16 x D
    Eigen::MatrixXd g_codes = Eigen::MatrixXd::Zero(layers, space.dim());
    for (int j = 0; j < kToyParamCount; ++j)
        g_codes.row(genbackend::toy_param_layer(j)) += ev.g_params[j] * jac.row(j);

    Eigen::MatrixXd g_eff(layers, n); // d loss / d (alpha~ + delta_l)
    for (int l = 0; l < layers; ++l)
        g_eff.row(l) = (space.anchor_set.anchors * g_codes.row(l).transpose()).transpose();

    FullLossGradient out;
    out.loss = ev.loss;

    // per-layer offsets: shared term plus the L2-norm regularizer pull
    out.d_deltas = g_eff;
    for (int l = 0; l < layers; ++l) {
        const double norm = pl.deltas.row(l).norm();
        if (norm > 1e-15) out.d_deltas.row(l) += (cfg.lambda_delta / norm) * pl.deltas.row(l);
    }

    // base coefficients: all layers plus the sum regularizer, pulled through
    // the softplus when the latent is a raw optimization variable
    Eigen::VectorXd g_alpha_eff = g_eff.colwise().sum().transpose();
    g_alpha_eff.array() += cfg.lambda_sum * 2.0 * (ev.alpha_eff.sum() - 1.0);
    if (pl.finalized) {
        out.d_alpha = g_alpha_eff;
    } else {
        out.d_alpha = g_alpha_eff.cwiseProduct(latentspace::reparametrize_derivative(pl.alpha, space));
    }
    return out;
}

OptimizeOutcome optimize_frame(const FrameObjectiveInputs& inputs, const PersonalizedSpace& space,
                               const genbackend::GeneratorBackend& backend,
                               const ReenactmentConfig& cfg, const PersonalizedLatent& init) {
    cfg.validate();
    if (init.count() != space.count() || init.layers() != space.layers)
        raise(ErrorCode::DimensionMismatch, "init latent does not match space");

    OptimizeOutcome outcome;
    if (cfg.steps == 0) {
        outcome.latent = latentspace::finalize(init, space);
        outcome.initial_loss = full_loss(init, inputs, space, backend, cfg).total;
        outcome.final_loss = outcome.initial_loss;
        outcome.final_breakdown = full_loss(outcome.latent, inputs, space, backend, cfg);
        outcome.no_progress = true;
        return outcome;
    }

    const int n = space.count();
    const int layers = space.layers;

    // Raw optimization variables: base coefficients then offsets, flattened.
    Eigen::VectorXd theta(n + layers * n);
    theta.head(n) = init.alpha;
    for (int l = 0; l < layers; ++l) theta.segment(n + l * n, n) = init.deltas.row(l).transpose();

    auto unpack = [&](const Eigen::VectorXd& t) {
        PersonalizedLatent pl;
        pl.alpha = t.head(n);
        pl.deltas.resize(layers, n);
        for (int l = 0; l < layers; ++l) pl.deltas.row(l) = t.segment(n + l * n, n).transpose();
        pl.finalized = false;
        return pl;
    };

    Adam opt(theta.size(), cfg.step_size);
    double best_loss = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_theta = theta;

    for (int step = 0; step < cfg.steps; ++step) {
        const PersonalizedLatent cur = unpack(theta);
        const FullLossGradient g = full_loss_with_grad(cur, inputs, space, backend, cfg);
        if (step == 0) outcome.initial_loss = g.loss.total;
        if (g.loss.total < best_loss) {
            best_loss = g.loss.total;
            best_theta = theta;
        }
        Eigen::VectorXd grad(theta.size());
        grad.head(n) = g.d_alpha;
        for (int l = 0; l < layers; ++l) grad.segment(n + l * n, n) = g.d_deltas.row(l).transpose();
        if (!grad.allFinite()) raise(ErrorCode::NonFiniteLoss, "gradient is not finite");
        opt.step(theta, grad);
    }
    // the post-step point may beat everything seen during the loop
    const double last = full_loss(unpack(theta), inputs, space, backend, cfg).total;
    if (last < best_loss) {
        best_loss = last;
        best_theta = theta;
    }

    outcome.final_loss = best_loss;
    outcome.no_progress = (outcome.initial_loss - best_loss) < 1e-12;
    outcome.latent = latentspace::finalize(unpack(best_theta), space);
    outcome.final_breakdown = full_loss(outcome.latent, inputs, space, backend, cfg);
    return outcome;
}

PersonalizedLatent noisy_init(const PersonalizedLatent& prev, double sigma_init, uint64_t seed) {
    if (sigma_init == 0.0) return prev;
    Rng rng(seed);
    PersonalizedLatent out = prev;
    for (Eigen::Index i = 0; i < out.alpha.size(); ++i)
        out.alpha(i) += rng.gaussian(0.0, sigma_init);
    out.finalized = false; // noise voids the hull guarantees
    return out;
}

void LatentTrajectory::save(const std::filesystem::path& manifest_path) const {
    if (latents.empty()) raise(ErrorCode::EmptyInput, "empty trajectory");
    const int n = latents.front().count();
    const int layers = latents.front().layers();
    std::vector<float> blob;
    blob.reserve(latents.size() * static_cast<size_t>(n) * (layers + 1));
    for (const PersonalizedLatent& pl : latents) {
        if (pl.count() != n || pl.layers() != layers)
            raise(ErrorCode::ShapeMismatch, "inconsistent trajectory latents");
        for (int i = 0; i < n; ++i) blob.push_back(static_cast<float>(pl.alpha(i)));
        for (int l = 0; l < layers; ++l)
            for (int i = 0; i < n; ++i) blob.push_back(static_cast<float>(pl.deltas(l, i)));
    }
    const std::filesystem::path blob_path = manifest_path.string() + ".f32";
    write_f32_blob(blob_path, blob);
    json m;
    m["schema_version"] = 1;
    m["kind"] = "latent_trajectory";
    m["frames"] = latents.size();
    m["count"] = n;
    m["layers"] = layers;
    m["finalized"] = latents.front().finalized;
    m["space_hash"] = space_hash;
    m["config"] = config.to_json();
    m["final_losses"] = final_losses;
    m["blob"] = blob_path.filename().string();
    m["blob_hash"] = fnv1a64_hex(blob);
    write_manifest(manifest_path, m);
}

LatentTrajectory LatentTrajectory::load(const std::filesystem::path& manifest_path) {
    const json m = read_manifest(manifest_path, "latent_trajectory");
    const size_t frames = m.at("frames").get<size_t>();
    const int n = m.at("count").get<int>();
    const int layers = m.at("layers").get<int>();
    const bool finalized = m.at("finalized").get<bool>();
    const std::vector<float> blob =
        read_f32_blob(manifest_path.parent_path() / m.at("blob").get<std::string>());
    const size_t per_frame = static_cast<size_t>(n) * (layers + 1);
    if (blob.size() != frames * per_frame)
        raise(ErrorCode::ShapeMismatch, "trajectory blob size mismatch");

    LatentTrajectory traj;
    traj.space_hash = m.at("space_hash").get<std::string>();
    traj.config = ReenactmentConfig::from_json(m.at("config"));
    traj.final_losses = m.at("final_losses").get<std::vector<double>>();
    traj.latents.reserve(frames);
    size_t k = 0;
    for (size_t f = 0; f < frames; ++f) {
        PersonalizedLatent pl;
        pl.alpha.resize(n);
        pl.deltas.resize(layers, n);
        for (int i = 0; i < n; ++i) pl.alpha(i) = blob[k++];
        for (int l = 0; l < layers; ++l)
            for (int i = 0; i < n; ++i) pl.deltas(l, i) = blob[k++];
        pl.finalized = finalized;
        traj.latents.push_back(std::move(pl));
    }
    return traj;
}

LatentTrajectory smooth_trajectory(const LatentTrajectory& traj, double sigma_traj) {
    if (sigma_traj < 0) raise(ErrorCode::ConfigInvalid, "negative smoothing sigma");
    const int radius = static_cast<int>(std::floor(4.0 * sigma_traj));
    const int frames = static_cast<int>(traj.latents.size());
    if (radius == 0 || frames <= 1) return traj;

    std::vector<double> kernel(2 * radius + 1);
    double total = 0.0;
    for (int j = -radius; j <= radius; ++j) {
        kernel[j + radius] = std::exp(-0.5 * (j / sigma_traj) * (j / sigma_traj));
        total += kernel[j + radius];
    }
    for (double& k : kernel) k /= total;

    auto reflect = [frames](int idx) {
        while (idx < 0 || idx >= frames) {
            if (idx < 0) idx = -idx - 1;
            if (idx >= frames) idx = 2 * frames - 1 - idx;
        }
        return idx;
    };

    const int n = traj.latents.front().count();
    const int layers = traj.latents.front().layers();
    LatentTrajectory out = traj;
    for (int t = 0; t < frames; ++t) {
        // Difference form: x_t + sum_j k_j (x_{t+j} - x_t). Constant series
        // pass through bit-exactly regardless of kernel rounding.
        PersonalizedLatent& dst = out.latents[t];
        const PersonalizedLatent& base = traj.latents[t];
        dst = base;
        for (int j = -radius; j <= radius; ++j) {
            const PersonalizedLatent& src = traj.latents[reflect(t + j)];
            const double w = kernel[j + radius];
            for (int i = 0; i < n; ++i) dst.alpha(i) += w * (src.alpha(i) - base.alpha(i));
            for (int l = 0; l < layers; ++l)
                for (int i = 0; i < n; ++i)
                    dst.deltas(l, i) += w * (src.deltas(l, i) - base.deltas(l, i));
        }
    }
    return out;
}

ReenactVideoResult reenact_video(const std::vector<Image>& driving_frames,
                                 const PersonalizedSpace& space,
                                 const genbackend::GeneratorBackend& backend,
                                 const ReenactmentConfig& cfg,
                                 const facekit::KeypointBackend& kp_backend,
                                 const facekit::KeypointIndexTable& table,
                                 const ReenactVideoOptions& options) {
    cfg.validate();
    if (driving_frames.empty()) raise(ErrorCode::EmptyInput, "no driving frames");

    ReenactVideoResult result;
    result.raw.config = cfg;
    result.raw.space_hash = space.content_hash();

    // identity reference: the subspace center, generated once
    const PersonalizedLatent center = latentspace::center(space);
    const Image identity_reference = backend.generate(latentspace::to_native(center, space));

    size_t start = 0;
    if (options.checkpoint && std::filesystem::exists(*options.checkpoint)) {
        LatentTrajectory partial = LatentTrajectory::load(*options.checkpoint);
        if (partial.space_hash != result.raw.space_hash)
            raise(ErrorCode::ConfigInvalid, "checkpoint belongs to a different space");
        if (partial.config.to_json() != cfg.to_json())
            raise(ErrorCode::ConfigInvalid, "checkpoint was produced with a different config");
        if (partial.latents.size() > driving_frames.size())
            raise(ErrorCode::ConfigInvalid, "checkpoint longer than the driving clip");
        result.raw.latents = std::move(partial.latents);
        result.raw.final_losses = std::move(partial.final_losses);
        start = result.raw.latents.size();
    }

    for (size_t t = start; t < driving_frames.size(); ++t) {
        const FrameObjectiveInputs inputs =
            make_frame_inputs(driving_frames[t], identity_reference, kp_backend, table);
        // Per-frame noise stream independent of optimization history, so a
        // resumed run reproduces the uninterrupted one exactly.
        const uint64_t frame_seed = cfg.seed * 0x9E3779B97F4A7C15ull + t * 0xD1B54A32D192ED03ull;
        const PersonalizedLatent init =
            t == 0 ? center
                   : noisy_init(result.raw.latents[t - 1], cfg.sigma_init, frame_seed);
        const OptimizeOutcome outcome = optimize_frame(inputs, space, backend, cfg, init);
        if (outcome.no_progress) ++result.warnings_no_progress;
        result.raw.latents.push_back(outcome.latent);
        result.raw.final_losses.push_back(outcome.final_breakdown.total);
        if (options.checkpoint) result.raw.save(*options.checkpoint);
    }

    result.smoothed = smooth_trajectory(result.raw, cfg.sigma_traj);
    result.rasters.reserve(driving_frames.size());
    for (const PersonalizedLatent& pl : result.smoothed.latents)
        result.rasters.push_back(backend.generate(latentspace::to_native(pl, space)));
    return result;
}

} // namespace mimic::reenact
