#include "mimic/genbackend/backend.hpp"

#include <cmath>

#include "mimic/core/adam.hpp"
#include "mimic/core/io.hpp"
#include "mimic/core/rng.hpp"

namespace mimic::genbackend {

double DifferentiablePixelL2::operator()(const Image& a, const Image& b) const {
    return pixel_l2_distance(a, b);
}

std::vector<double> DifferentiablePixelL2::distance_grad_wrt_first(const Image& a,
                                                                   const Image& b) const {
    if (!a.same_shape(b)) raise(ErrorCode::ShapeMismatch, "distance gradient on unequal shapes");
    const double n = pixel_l2_distance(a, b);
    std::vector<double> grad(a.px.size(), 0.0);
    if (n <= 1e-15) return grad;
    for (size_t i = 0; i < grad.size(); ++i)
        grad[i] = (static_cast<double>(a.px[i]) - b.px[i]) / n;
    return grad;
}

ToyBackend::ToyBackend() {
    // Fixed "pretrained" affine map; rows drawn once from a seeded stream.
    weights_.resize(kToyParamCount, dim_);
    biases_ = Eigen::VectorXd::Zero(kToyParamCount);
    Rng rng(0xC0FFEE);
    const double sigma = 1.0 / std::sqrt(static_cast<double>(dim_));
    for (int j = 0; j < kToyParamCount; ++j)
        for (int d = 0; d < dim_; ++d) weights_(j, d) = rng.gaussian(0.0, sigma);
}

ToyBackend ToyBackend::with_inverted_colors() const {
    ToyBackend out = *this;
    out.invert_colors_ = true;
    return out;
}

void ToyBackend::set_weights(const Eigen::MatrixXd& w, const Eigen::VectorXd& b) {
    if (w.rows() != kToyParamCount || w.cols() != dim_ || b.size() != kToyParamCount)
        raise(ErrorCode::DimensionMismatch, "toy affine map has wrong shape");
    weights_ = w;
    biases_ = b;
}

void ToyBackend::perturb_weights(double magnitude, uint64_t seed) {
    Rng rng(seed);
    for (int j = 0; j < kToyParamCount; ++j) {
        for (int d = 0; d < dim_; ++d) weights_(j, d) += rng.gaussian(0.0, magnitude);
        biases_(j) += rng.gaussian(0.0, magnitude);
    }
}

namespace {

void check_codes(const ToyBackend& backend, const NativeLatentStack& codes) {
    if (codes.codes.rows() != backend.layers() || codes.codes.cols() != backend.latent_dim())
        raise(ErrorCode::DimensionMismatch,
              "codes are " + std::to_string(codes.codes.rows()) + "x" +
                  std::to_string(codes.codes.cols()) + ", backend expects " +
                  std::to_string(backend.layers()) + "x" + std::to_string(backend.latent_dim()));
}

} // namespace

ToyFaceParams ToyBackend::params_from_codes(const NativeLatentStack& codes) const {
    check_codes(*this, codes);
    ToyFaceParams p;
    const auto& ranges = toy_param_ranges();
    for (int j = 0; j < kToyParamCount; ++j) {
        const int layer = toy_param_layer(j);
        const double u = weights_.row(j).dot(codes.codes.row(layer)) + biases_(j);
        p.v[j] = ranges[j].mid() + ranges[j].half() * std::tanh(u);
    }
    return p;
}

Eigen::MatrixXd ToyBackend::params_jacobian(const NativeLatentStack& codes) const {
    check_codes(*this, codes);
    Eigen::MatrixXd jac(kToyParamCount, dim_);
    const auto& ranges = toy_param_ranges();
    for (int j = 0; j < kToyParamCount; ++j) {
        const int layer = toy_param_layer(j);
        const double u = weights_.row(j).dot(codes.codes.row(layer)) + biases_(j);
        const double t = std::tanh(u);
        jac.row(j) = ranges[j].half() * (1.0 - t * t) * weights_.row(j);
    }
    return jac;
}

Eigen::VectorXd ToyBackend::param_axis(int param) const {
    if (param < 0 || param >= kToyParamCount) raise(ErrorCode::IndexOutOfRange, "toy param index");
    return weights_.row(param).normalized().transpose();
}

NativeLatentStack ToyBackend::broadcast(const Eigen::VectorXd& w) const {
    if (w.size() != dim_) raise(ErrorCode::DimensionMismatch, "anchor dimension mismatch");
    NativeLatentStack stack;
    stack.codes.resize(kToyLayers, dim_);
    for (int l = 0; l < kToyLayers; ++l) stack.codes.row(l) = w.transpose();
    return stack;
}

Image ToyBackend::generate(const NativeLatentStack& codes) const {
    const ToyFaceParams p = params_from_codes(codes);
    return toy_render(p, invert_colors_, /*tag_output=*/true, id());
}

void ToyBackend::save(const std::filesystem::path& manifest_path) const {
    std::vector<float> blob;
    blob.reserve(static_cast<size_t>(weights_.size() + biases_.size()));
    for (int j = 0; j < kToyParamCount; ++j)
        for (int d = 0; d < dim_; ++d) blob.push_back(static_cast<float>(weights_(j, d)));
    for (int j = 0; j < kToyParamCount; ++j) blob.push_back(static_cast<float>(biases_(j)));
    const std::filesystem::path blob_path = manifest_path.string() + ".f32";
    write_f32_blob(blob_path, blob);
    json m;
    m["schema_version"] = 1;
    m["kind"] = "toy_backend";
    m["id"] = id();
    m["latent_dim"] = dim_;
    m["param_count"] = kToyParamCount;
    m["invert_colors"] = invert_colors_;
    m["blob"] = blob_path.filename().string();
    m["blob_hash"] = fnv1a64_hex(blob);
    write_manifest(manifest_path, m);
}

ToyBackend ToyBackend::load(const std::filesystem::path& manifest_path) {
    const json m = read_manifest(manifest_path, "toy_backend");
    ToyBackend b;
    b.dim_ = m.at("latent_dim").get<int>();
    b.invert_colors_ = m.value("invert_colors", false);
    const std::vector<float> blob =
        read_f32_blob(manifest_path.parent_path() / m.at("blob").get<std::string>());
    if (blob.size() != static_cast<size_t>(kToyParamCount) * (b.dim_ + 1))
        raise(ErrorCode::ShapeMismatch, "toy backend blob size mismatch");
    b.weights_.resize(kToyParamCount, b.dim_);
    b.biases_.resize(kToyParamCount);
    size_t k = 0;
    for (int j = 0; j < kToyParamCount; ++j)
        for (int d = 0; d < b.dim_; ++d) b.weights_(j, d) = blob[k++];
    for (int j = 0; j < kToyParamCount; ++j) b.biases_(j) = blob[k++];
    return b;
}

std::unique_ptr<GeneratorBackend> make_generator_backend(const std::string& name) {
    if (name == "toy") return std::make_unique<ToyBackend>();
    if (name == "toy_inverted") return std::make_unique<ToyBackend>(ToyBackend().with_inverted_colors());
    raise(ErrorCode::BackendUnavailable, "generator backend not installed: " + name);
}

facekit::KeypointFrame ToyKeypointBackend::extract(const Image& image) const {
    if (!image.tag || image.tag->params.size() != kToyParamCount ||
        image.tag->backend_id.rfind("toy", 0) != 0)
        raise(ErrorCode::NoFaceDetected, "no analytic face in image");

    ToyFaceParams p;
    for (int i = 0; i < kToyParamCount; ++i) p.v[i] = image.tag->params[i];
    facekit::KeypointFrame frame = toy_mesh_frame(p);

    // Map canvas-space points into this raster's coordinates; z scales with
    // the transform (keypoints are backend-scaled in z).
    const Similarity& t = image.tag->transform;
    const double s = t.scale();
    for (auto& pt : frame.points) {
        double ox, oy;
        t.apply(pt.x, pt.y, ox, oy);
        pt = {ox, oy, pt.z * s};
    }
    frame.image_width = image.width;
    frame.image_height = image.height;
    // Alignment can legitimately push mesh points past the crop edge.
    for (int i = 0; i < facekit::kMeshPointCount; ++i) {
        const auto& pt = frame.points[i];
        if (pt.x < 0 || pt.x >= frame.image_width || pt.y < 0 || pt.y >= frame.image_height)
            frame.off_image.push_back(i);
    }
    return frame;
}

std::unique_ptr<facekit::KeypointBackend> make_keypoint_backend(const std::string& name) {
    if (name == "toy") return std::make_unique<ToyKeypointBackend>();
    raise(ErrorCode::BackendUnavailable, "keypoint backend not installed: " + name);
}

double personalization_loss(const GeneratorBackend& backend, const std::vector<TrainingPair>& pairs,
                            const scanselect::ImageDistance& perceptual) {
    if (!backend.tunable()) raise(ErrorCode::BackendNotTunable, backend.id());
    const auto* toy = dynamic_cast<const ToyBackend*>(&backend);
    if (!toy) raise(ErrorCode::BackendNotTunable, "only the toy backend tunes in-process");
    double total = 0.0;
    for (const TrainingPair& pair : pairs) {
        if (pair.target.width != backend.resolution() || pair.target.height != backend.resolution())
            raise(ErrorCode::ShapeMismatch, "target resolution differs from backend resolution");
        const NativeLatentStack codes = toy->broadcast(pair.anchor);
        const Image gen = backend.generate(codes);
        total += perceptual(gen, pair.target) + kLambdaPixel * pixel_l2_distance(gen, pair.target);
    }
    if (!std::isfinite(total)) raise(ErrorCode::NonFiniteLoss, "personalization loss not finite");
    return total;
}

namespace {

// Gradient of the tuning loss with respect to the flattened affine map
// (weights row-major, then biases).
Eigen::VectorXd tuning_gradient(const ToyBackend& backend, const std::vector<TrainingPair>& pairs,
                                const scanselect::ImageDistance& perceptual, double& loss_out) {
    const auto* dist_grad = dynamic_cast<const DifferentiableDistance*>(&perceptual);
    if (!dist_grad)
        raise(ErrorCode::BackendUnavailable,
              "distance backend has no gradient: " + perceptual.id());

    const int dim = backend.latent_dim();
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(kToyParamCount * (dim + 1));
    loss_out = 0.0;
    const auto& ranges = toy_param_ranges();

    for (const TrainingPair& pair : pairs) {
        const NativeLatentStack codes = backend.broadcast(pair.anchor);
        const ToyFaceParams p = backend.params_from_codes(codes);
        const DualPatchRender render = toy_render_patch_dual(p, 0, 0, backend.resolution(),
                                                             backend.resolution());
        Image gen(backend.resolution(), backend.resolution());
        for (size_t i = 0; i < render.value.size(); ++i)
            gen.px[i] = static_cast<float>(render.value[i]);

        const double pixel_term = pixel_l2_distance(gen, pair.target);
        loss_out += perceptual(gen, pair.target) + kLambdaPixel * pixel_term;

        // d loss / d pixel, assembled in double
        std::vector<double> g_img = dist_grad->distance_grad_wrt_first(gen, pair.target);
        if (pixel_term > 1e-15)
            for (size_t i = 0; i < g_img.size(); ++i)
                g_img[i] += kLambdaPixel * (static_cast<double>(gen.px[i]) - pair.target.px[i]) /
                            pixel_term;

        // contract with the per-pixel parameter tangents
        std::array<double, kToyParamCount> g_params{};
        for (size_t i = 0; i < g_img.size(); ++i) {
            const auto& t = render.tangent[i];
            const double gi = g_img[i];
            for (int j = 0; j < kToyParamCount; ++j) g_params[j] += gi * t[j];
        }

        // chain through p_j = mid + half * tanh(w_j . x + b_j)
        for (int j = 0; j < kToyParamCount; ++j) {
            const int layer = toy_param_layer(j);
            const double u = backend.weights().row(j).dot(codes.codes.row(layer)) +
                             backend.biases()(j);
            const double th = std::tanh(u);
            const double g_u = g_params[j] * ranges[j].half() * (1.0 - th * th);
            grad.segment(j * dim, dim) += g_u * codes.codes.row(layer).transpose();
            grad(kToyParamCount * dim + j) += g_u;
        }
    }
    if (!std::isfinite(loss_out)) raise(ErrorCode::NonFiniteLoss, "personalization loss not finite");
    return grad;
}

} // namespace

PersonalizeResult personalize(const GeneratorBackend& backend, const std::vector<TrainingPair>& pairs,
                              int steps, double step_size,
                              const scanselect::ImageDistance& perceptual, uint64_t /*seed*/) {
    if (!backend.tunable()) raise(ErrorCode::BackendNotTunable, backend.id());
    if (!backend.differentiable()) raise(ErrorCode::BackendNotTunable, "backend not differentiable");
    const auto* toy = dynamic_cast<const ToyBackend*>(&backend);
    if (!toy) raise(ErrorCode::BackendNotTunable, "only the toy backend tunes in-process");

    PersonalizeResult result;
    result.initial_loss = personalization_loss(backend, pairs, perceptual);
    ToyBackend current = *toy;
    if (steps <= 0) {
        result.final_loss = result.initial_loss;
        result.backend = current.clone();
        return result;
    }

    const int dim = current.latent_dim();
    Eigen::VectorXd theta(kToyParamCount * (dim + 1));
    for (int j = 0; j < kToyParamCount; ++j)
        theta.segment(j * dim, dim) = current.weights().row(j).transpose();
    theta.tail(kToyParamCount) = current.biases();

    Adam opt(theta.size(), step_size);
    double best_loss = result.initial_loss;
    Eigen::VectorXd best_theta = theta;

    auto unpack = [&](const Eigen::VectorXd& t, ToyBackend& b) {
        Eigen::MatrixXd w(kToyParamCount, dim);
        for (int j = 0; j < kToyParamCount; ++j) w.row(j) = t.segment(j * dim, dim).transpose();
        b.set_weights(w, t.tail(kToyParamCount));
    };

    for (int step = 0; step < steps; ++step) {
        double loss = 0.0;
        const Eigen::VectorXd grad = tuning_gradient(current, pairs, perceptual, loss);
        if (loss < best_loss) {
            best_loss = loss;
            best_theta = theta;
        }
        opt.step(theta, grad);
        unpack(theta, current);
    }

    const double last_loss = personalization_loss(current, pairs, perceptual);
    if (last_loss < best_loss) {
        best_loss = last_loss;
    } else {
        unpack(best_theta, current);
    }
    result.final_loss = best_loss;
    result.backend = current.clone();
    return result;
}

Eigen::VectorXd invert_to_anchor(const ToyBackend& backend, const Image& target,
                                 const InversionConfig& cfg) {
    if (target.width != backend.resolution() || target.height != backend.resolution())
        raise(ErrorCode::ShapeMismatch, "inversion target resolution mismatch");

    const int dim = backend.latent_dim();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
    Adam opt(dim, cfg.step_size);
    double best_loss = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_w = w;

    for (int step = 0; step < cfg.steps; ++step) {
        const NativeLatentStack codes = backend.broadcast(w);
        const ToyFaceParams p = backend.params_from_codes(codes);
        const DualPatchRender render =
            toy_render_patch_dual(p, 0, 0, backend.resolution(), backend.resolution());
        Image gen(backend.resolution(), backend.resolution());
        for (size_t i = 0; i < render.value.size(); ++i)
            gen.px[i] = static_cast<float>(render.value[i]);
        const double loss = pixel_l2_distance(gen, target);
        if (loss < best_loss) {
            best_loss = loss;
            best_w = w;
        }

        std::array<double, kToyParamCount> g_params{};
        if (loss > 1e-15) {
            for (size_t i = 0; i < render.value.size(); ++i) {
                const double gi = (static_cast<double>(gen.px[i]) - target.px[i]) / loss;
                const auto& t = render.tangent[i];
                for (int j = 0; j < kToyParamCount; ++j) g_params[j] += gi * t[j];
            }
        }

        const Eigen::MatrixXd jac = backend.params_jacobian(codes); // 16 x D
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim);
        for (int j = 0; j < kToyParamCount; ++j) grad += g_params[j] * jac.row(j).transpose();

        opt.step(w, grad);
    }

    const NativeLatentStack codes = backend.broadcast(w);
    if (pixel_l2_distance(backend.generate(codes), target) > best_loss) w = best_w;
    return w;
}

} // namespace mimic::genbackend
