#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "mimic/core/error.hpp"

namespace mimic::latentspace {

// N anchor latents spanning the personalized region of the generator's
// native latent space. Rows are anchors.
struct AnchorSet {
    Eigen::MatrixXd anchors; // N x D

    int count() const { return static_cast<int>(anchors.rows()); }
    int dim() const { return static_cast<int>(anchors.cols()); }

    void validate() const;

    void save(const std::filesystem::path& manifest_path) const;
    static AnchorSet load(const std::filesystem::path& manifest_path);
};

// The dilated convex hull of the anchors plus its layer-extended form:
// per-layer coefficient vectors alpha + delta_l, each required to stay
// above -beta and sum to one once finalized.
struct PersonalizedSpace {
    AnchorSet anchor_set;
    double beta = 0.02;
    int layers = 1;
    double sharpness = 100.0;

    int count() const { return anchor_set.count(); }
    int dim() const { return anchor_set.dim(); }

    void validate() const;
    // Stable identity of the space (anchors + hyperparameters), recorded in
    // downstream manifests so trajectories can refuse a mismatched space.
    std::string content_hash() const;
};

// Coefficient-space coordinate: base coefficients plus one offset row per
// generator layer. `finalized` distinguishes the optimization variable
// (unconstrained) from an effective coordinate whose per-layer coefficients
// already satisfy the hull constraints; finalized coordinates feed the
// generator as-is, raw ones pass through the softplus reparametrization.
struct PersonalizedLatent {
    Eigen::VectorXd alpha;  // N
    Eigen::MatrixXd deltas; // L x N
    bool finalized = false;

    int count() const { return static_cast<int>(alpha.size()); }
    int layers() const { return static_cast<int>(deltas.rows()); }

    void save(const std::filesystem::path& manifest_path) const;
    static PersonalizedLatent load(const std::filesystem::path& manifest_path);
};

// One native code per generator layer.
struct NativeLatentStack {
    Eigen::MatrixXd codes; // L x D
};

// Shifted softplus, elementwise: (1/s) log(1 + exp(s (a + beta))) - beta.
// Output exceeds -beta; the linear branch takes over at s (a + beta) > 30.
Eigen::VectorXd reparametrize(const Eigen::VectorXd& alpha_raw, const PersonalizedSpace& space);
double reparametrize_scalar(double a, double beta, double sharpness);
// Elementwise derivative (the logistic), for chain-rule callers.
Eigen::VectorXd reparametrize_derivative(const Eigen::VectorXd& alpha_raw,
                                         const PersonalizedSpace& space);

// (sum alpha~ - 1)^2
double sum_regularizer(const Eigen::VectorXd& alpha_tilde);

// sum_l ||delta_l||_2
double delta_regularizer(const Eigen::MatrixXd& deltas);

NativeLatentStack to_native(const PersonalizedLatent& pl, const PersonalizedSpace& space);

// Per-layer effective coefficients (alpha~ + delta_l) rescaled to unit sum.
// A coefficient that still falls below -beta after rescaling is clamped to
// the hull bound and the layer renormalized, so finalized latents always
// satisfy contains(). Idempotent: a finalized latent is returned unchanged.
PersonalizedLatent finalize(const PersonalizedLatent& pl, const PersonalizedSpace& space);

// Uniform barycentric center with zero offsets (already an effective
// coordinate: to_native(center) is exactly the anchor mean).
PersonalizedLatent center(const PersonalizedSpace& space);

// Hull membership of the effective per-layer coefficients, read from the
// latent verbatim: every entry of alpha + delta_l >= -beta - tol and each
// layer sum within tol of one.
bool contains(const PersonalizedSpace& space, const PersonalizedLatent& pl, double tol);

} // namespace mimic::latentspace
