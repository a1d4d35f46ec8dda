#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "mimic/facekit/facekit.hpp"
#include "mimic/genbackend/toyface.hpp"
#include "mimic/latentspace/latentspace.hpp"
#include "mimic/scanselect/scanselect.hpp"

namespace mimic::genbackend {

using latentspace::NativeLatentStack;

// Image distance that can also provide the gradient of d(a, b) with respect
// to a's pixels; required by the tuning and inversion loops.
class DifferentiableDistance {
public:
    virtual ~DifferentiableDistance() = default;
    virtual std::vector<double> distance_grad_wrt_first(const Image& a, const Image& b) const = 0;
};

// Pixel L2 with the analytic gradient (a - b) / ||a - b||.
class DifferentiablePixelL2 final : public scanselect::ImageDistance,
                                    public DifferentiableDistance {
public:
    std::string id() const override { return "pixel_l2"; }
    double operator()(const Image& a, const Image& b) const override;
    std::vector<double> distance_grad_wrt_first(const Image& a, const Image& b) const override;
};

class GeneratorBackend {
public:
    virtual ~GeneratorBackend() = default;
    virtual std::string id() const = 0;
    virtual int layers() const = 0;
    virtual int latent_dim() const = 0;
    virtual int resolution() const = 0;
    virtual bool differentiable() const = 0;
    virtual bool tunable() const = 0;
    // Deterministic: identical codes yield bit-identical rasters.
    virtual Image generate(const NativeLatentStack& codes) const = 0;
    virtual std::unique_ptr<GeneratorBackend> clone() const = 0;
};

struct TrainingPair {
    Eigen::VectorXd anchor; // native latent w_i
    Image target;
};

// Anchor inversion settings for the toy backend (direct latent optimization).
struct InversionConfig {
    int steps = 80;
    double step_size = 0.1;
};

// The analytic desk-scale generator: a per-layer affine map from native
// codes to face parameters, squashed into the documented ranges, rendered
// with smooth ellipse masks. Fully differentiable in codes and weights.
class ToyBackend final : public GeneratorBackend {
public:
    ToyBackend();

    std::string id() const override { return invert_colors_ ? "toy_inverted" : "toy"; }
    int layers() const override { return kToyLayers; }
    int latent_dim() const override { return dim_; }
    int resolution() const override { return kToyCanvas; }
    bool differentiable() const override { return true; }
    bool tunable() const override { return !invert_colors_; }
    Image generate(const NativeLatentStack& codes) const override;
    std::unique_ptr<GeneratorBackend> clone() const override {
        return std::make_unique<ToyBackend>(*this);
    }

    // Stylization variant: complemented colors, frozen weights.
    ToyBackend with_inverted_colors() const;

    ToyFaceParams params_from_codes(const NativeLatentStack& codes) const;
    // d(param j) / d(code of its layer); rows follow the parameter order.
    Eigen::MatrixXd params_jacobian(const NativeLatentStack& codes) const; // 16 x D

    // Semantic axis in code space that increases parameter `param` on its
    // layer (the affine row, unit-normalized).
    Eigen::VectorXd param_axis(int param) const;
    bool inverted_colors() const { return invert_colors_; }

    NativeLatentStack broadcast(const Eigen::VectorXd& w) const;

    const Eigen::MatrixXd& weights() const { return weights_; }
    const Eigen::VectorXd& biases() const { return biases_; }
    void set_weights(const Eigen::MatrixXd& w, const Eigen::VectorXd& b);
    // Deterministically perturb the affine map (for tuning experiments).
    void perturb_weights(double magnitude, uint64_t seed);

    void save(const std::filesystem::path& manifest_path) const;
    static ToyBackend load(const std::filesystem::path& manifest_path);

private:
    int dim_ = 8;
    Eigen::MatrixXd weights_; // 16 x D, row j applies to layer j/4's code
    Eigen::VectorXd biases_;  // 16
    bool invert_colors_ = false;
};

// Named backend factory; unknown names raise BackendUnavailable.
std::unique_ptr<GeneratorBackend> make_generator_backend(const std::string& name);

// Keypoint backend that reconstitutes the analytic mesh from a raster's
// generator tag (and its alignment transform). Untagged images have no
// recoverable face.
class ToyKeypointBackend final : public facekit::KeypointBackend {
public:
    std::string id() const override { return "toy"; }
    bool shareable() const override { return true; } // stateless
    facekit::KeypointFrame extract(const Image& image) const override;
};

std::unique_ptr<facekit::KeypointBackend> make_keypoint_backend(const std::string& name);

// Eq.-style tuning objective: sum of perceptual plus lambda_pixel * L2
// reconstruction over the training pairs.
inline constexpr double kLambdaPixel = 10.0;

double personalization_loss(const GeneratorBackend& backend, const std::vector<TrainingPair>& pairs,
                            const scanselect::ImageDistance& perceptual);

struct PersonalizeResult {
    std::unique_ptr<GeneratorBackend> backend;
    double initial_loss = 0.0;
    double final_loss = 0.0;
};

// Full-batch adaptive gradient descent on the toy affine map. Tracks the
// best iterate, so the returned backend never scores worse than the input.
PersonalizeResult personalize(const GeneratorBackend& backend, const std::vector<TrainingPair>& pairs,
                              int steps, double step_size,
                              const scanselect::ImageDistance& perceptual, uint64_t seed = 0);

// Direct latent optimization of a single anchor against a target frame,
// from the zero (neutral) code.
Eigen::VectorXd invert_to_anchor(const ToyBackend& backend, const Image& target,
                                 const InversionConfig& cfg);

} // namespace mimic::genbackend
