#include "mimic/latentspace/latentspace.hpp"

#include <cmath>

#include "mimic/core/io.hpp"

namespace mimic::latentspace {

void AnchorSet::validate() const {
    if (count() < 2) raise(ErrorCode::InvalidCount, "anchor set needs at least 2 anchors");
    if (!anchors.allFinite()) raise(ErrorCode::ShapeMismatch, "anchor set contains non-finite values");
    for (int i = 0; i < count(); ++i)
        for (int j = i + 1; j < count(); ++j)
            if (anchors.row(i) == anchors.row(j))
                raise(ErrorCode::InvalidIndices,
                      "anchors " + std::to_string(i) + " and " + std::to_string(j) + " are identical");
}

void PersonalizedSpace::validate() const {
    anchor_set.validate();
    if (beta < 0) raise(ErrorCode::ConfigInvalid, "beta must be nonnegative");
    if (layers < 1) raise(ErrorCode::ConfigInvalid, "layers must be >= 1");
    if (sharpness <= 0) raise(ErrorCode::ConfigInvalid, "sharpness must be positive");
}

namespace {

std::vector<float> matrix_to_f32(const Eigen::MatrixXd& m) {
    std::vector<float> out;
    out.reserve(static_cast<size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(static_cast<float>(m(r, c)));
    return out;
}

Eigen::MatrixXd matrix_from_f32(const std::vector<float>& v, Eigen::Index rows, Eigen::Index cols) {
    if (static_cast<Eigen::Index>(v.size()) != rows * cols)
        raise(ErrorCode::ShapeMismatch, "blob size does not match manifest dimensions");
    Eigen::MatrixXd m(rows, cols);
    size_t k = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = v[k++];
    return m;
}

} // namespace

std::string PersonalizedSpace::content_hash() const {
    const std::vector<float> a = matrix_to_f32(anchor_set.anchors);
    std::vector<float> all = a;
    all.push_back(static_cast<float>(beta));
    all.push_back(static_cast<float>(layers));
    all.push_back(static_cast<float>(sharpness));
    return fnv1a64_hex(all);
}

void AnchorSet::save(const std::filesystem::path& manifest_path) const {
    validate();
    const std::vector<float> blob = matrix_to_f32(anchors);
    const std::filesystem::path blob_path = manifest_path.string() + ".f32";
    write_f32_blob(blob_path, blob);
    json m;
    m["schema_version"] = 1;
    m["kind"] = "anchor_set";
    m["count"] = count();
    m["dim"] = dim();
    m["blob"] = blob_path.filename().string();
    m["blob_hash"] = fnv1a64_hex(blob);
    write_manifest(manifest_path, m);
}

AnchorSet AnchorSet::load(const std::filesystem::path& manifest_path) {
    const json m = read_manifest(manifest_path, "anchor_set");
    const auto blob_path = manifest_path.parent_path() / m.at("blob").get<std::string>();
    const std::vector<float> blob = read_f32_blob(blob_path);
    if (m.contains("blob_hash") && m.at("blob_hash").get<std::string>() != fnv1a64_hex(blob))
        raise(ErrorCode::IOFailure, "anchor blob hash mismatch: " + blob_path.string());
    AnchorSet s;
    s.anchors = matrix_from_f32(blob, m.at("count").get<int>(), m.at("dim").get<int>());
    s.validate();
    return s;
}

void PersonalizedLatent::save(const std::filesystem::path& manifest_path) const {
    std::vector<float> blob;
    blob.reserve(static_cast<size_t>(alpha.size() + deltas.size()));
    for (Eigen::Index i = 0; i < alpha.size(); ++i) blob.push_back(static_cast<float>(alpha(i)));
    const std::vector<float> d = matrix_to_f32(deltas);
    blob.insert(blob.end(), d.begin(), d.end());
    const std::filesystem::path blob_path = manifest_path.string() + ".f32";
    write_f32_blob(blob_path, blob);
    json m;
    m["schema_version"] = 1;
    m["kind"] = "personalized_latent";
    m["count"] = count();
    m["layers"] = layers();
    m["finalized"] = finalized;
    m["blob"] = blob_path.filename().string();
    m["blob_hash"] = fnv1a64_hex(blob);
    write_manifest(manifest_path, m);
}

PersonalizedLatent PersonalizedLatent::load(const std::filesystem::path& manifest_path) {
    const json m = read_manifest(manifest_path, "personalized_latent");
    const int n = m.at("count").get<int>();
    const int l = m.at("layers").get<int>();
    const std::vector<float> blob = read_f32_blob(manifest_path.parent_path() / m.at("blob").get<std::string>());
    if (static_cast<int>(blob.size()) != n + l * n)
        raise(ErrorCode::ShapeMismatch, "latent blob size mismatch");
    PersonalizedLatent pl;
    pl.alpha.resize(n);
    for (int i = 0; i < n; ++i) pl.alpha(i) = blob[static_cast<size_t>(i)];
    pl.deltas = matrix_from_f32(std::vector<float>(blob.begin() + n, blob.end()), l, n);
    pl.finalized = m.at("finalized").get<bool>();
    return pl;
}

double reparametrize_scalar(double a, double beta, double sharpness) {
    const double u = sharpness * (a + beta);
    if (u > 30.0) {
        // Asymptotic branch: softplus(u) = u + log1p(exp(-u)).
        return a + std::log1p(std::exp(-u)) / sharpness;
    }
    return std::log1p(std::exp(u)) / sharpness - beta;
}

Eigen::VectorXd reparametrize(const Eigen::VectorXd& alpha_raw, const PersonalizedSpace& space) {
    if (!alpha_raw.allFinite()) raise(ErrorCode::NonFiniteLoss, "reparametrize on non-finite input");
    Eigen::VectorXd out(alpha_raw.size());
    for (Eigen::Index i = 0; i < alpha_raw.size(); ++i)
        out(i) = reparametrize_scalar(alpha_raw(i), space.beta, space.sharpness);
    return out;
}

Eigen::VectorXd reparametrize_derivative(const Eigen::VectorXd& alpha_raw,
                                         const PersonalizedSpace& space) {
    Eigen::VectorXd out(alpha_raw.size());
    for (Eigen::Index i = 0; i < alpha_raw.size(); ++i) {
        const double u = space.sharpness * (alpha_raw(i) + space.beta);
        // Logistic, evaluated from the non-overflowing side.
        out(i) = u >= 0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
    }
    return out;
}

double sum_regularizer(const Eigen::VectorXd& alpha_tilde) {
    const double d = alpha_tilde.sum() - 1.0;
    return d * d;
}

double delta_regularizer(const Eigen::MatrixXd& deltas) {
    double total = 0.0;
    for (Eigen::Index l = 0; l < deltas.rows(); ++l) total += deltas.row(l).norm();
    return total;
}

NativeLatentStack to_native(const PersonalizedLatent& pl, const PersonalizedSpace& space) {
    if (pl.count() != space.count() || pl.layers() != space.layers)
        raise(ErrorCode::DimensionMismatch, "latent does not match space dimensions");
    const Eigen::VectorXd base = pl.finalized ? pl.alpha : reparametrize(pl.alpha, space);
    NativeLatentStack stack;
    stack.codes.resize(space.layers, space.dim());
    for (int l = 0; l < space.layers; ++l) {
        const Eigen::VectorXd coeff = base + pl.deltas.row(l).transpose();
        stack.codes.row(l) = coeff.transpose() * space.anchor_set.anchors;
    }
    return stack;
}

PersonalizedLatent finalize(const PersonalizedLatent& pl, const PersonalizedSpace& space) {
    if (pl.count() != space.count() || pl.layers() != space.layers)
        raise(ErrorCode::DimensionMismatch, "latent does not match space dimensions");
    if (pl.finalized) return pl;

    const Eigen::VectorXd base = reparametrize(pl.alpha, space);
    const double base_sum = base.sum();
    if (std::abs(base_sum) < 1e-6) raise(ErrorCode::DegenerateSum, "coefficient sum near zero");

    PersonalizedLatent out;
    out.alpha = base / base_sum;
    out.deltas.resize(pl.layers(), pl.count());
    for (int l = 0; l < space.layers; ++l) {
        Eigen::VectorXd eff = base + pl.deltas.row(l).transpose();
        const double s = eff.sum();
        if (std::abs(s) < 1e-6)
            raise(ErrorCode::DegenerateSum, "layer " + std::to_string(l) + " coefficient sum near zero");
        eff /= s;
        // Offsets can drag a rescaled coefficient below the hull bound; clamp
        // and renormalize until the layer is feasible (terminates quickly
        // because each pass only shrinks the violation).
        for (int pass = 0; pass < 16 && eff.minCoeff() < -space.beta; ++pass) {
            eff = eff.cwiseMax(-space.beta);
            eff /= eff.sum();
        }
        out.deltas.row(l) = (eff - out.alpha).transpose();
    }
    out.finalized = true;
    return out;
}

PersonalizedLatent center(const PersonalizedSpace& space) {
    PersonalizedLatent pl;
    pl.alpha = Eigen::VectorXd::Constant(space.count(), 1.0 / space.count());
    pl.deltas = Eigen::MatrixXd::Zero(space.layers, space.count());
    pl.finalized = true;
    return pl;
}

bool contains(const PersonalizedSpace& space, const PersonalizedLatent& pl, double tol) {
    if (pl.count() != space.count() || pl.layers() != space.layers) return false;
    auto layer_ok = [&](const Eigen::VectorXd& coeff) {
        return coeff.minCoeff() >= -space.beta - tol && std::abs(coeff.sum() - 1.0) <= tol;
    };
    for (int l = 0; l < space.layers; ++l)
        if (!layer_ok(pl.alpha + pl.deltas.row(l).transpose())) return false;
    return true;
}

} // namespace mimic::latentspace
