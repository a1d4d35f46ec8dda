#include "mimic/evalkit/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mimic/genbackend/toyface.hpp"

namespace mimic::evalkit {

void EmbeddingSet::validate() const {
    for (int i = 0; i < count(); ++i) {
        const double n = vectors.row(i).norm();
        if (std::abs(n - 1.0) > 1e-6)
            raise(ErrorCode::ShapeMismatch,
                  "embedding " + std::to_string(i) + " not unit norm (" + std::to_string(n) + ")");
    }
}

namespace {

genbackend::ToyFaceParams params_from_tag(const Image& frame) {
    if (!frame.tag || frame.tag->params.size() != genbackend::kToyParamCount)
        raise(ErrorCode::BackendUnavailable, "frame carries no analytic parameters");
    genbackend::ToyFaceParams p;
    for (int i = 0; i < genbackend::kToyParamCount; ++i) p.v[i] = frame.tag->params[i];
    return p;
}

double range_normalized(const genbackend::ToyFaceParams& p, int idx) {
    const auto& r = genbackend::toy_param_ranges()[idx];
    return (p.v[idx] - r.lo) / r.span();
}

constexpr int kPoseParams[] = {genbackend::kHeadX, genbackend::kHeadY, genbackend::kHeadScale,
                               genbackend::kYaw};
constexpr int kExprParams[] = {genbackend::kEyeOpenL, genbackend::kEyeOpenR,
                               genbackend::kMouthOpen, genbackend::kMouthWidth,
                               genbackend::kIrisDxL,  genbackend::kIrisDyL,
                               genbackend::kIrisDxR,  genbackend::kIrisDyR};

class ToyParamFeatures final : public FeatureBackend {
public:
    std::string id() const override { return "toy_params"; }
    Eigen::VectorXd pose_features(const Image& frame) const override {
        const auto p = params_from_tag(frame);
        Eigen::VectorXd out(std::size(kPoseParams));
        for (size_t i = 0; i < std::size(kPoseParams); ++i) out(i) = range_normalized(p, kPoseParams[i]);
        return out;
    }
    Eigen::VectorXd expression_features(const Image& frame) const override {
        const auto p = params_from_tag(frame);
        Eigen::VectorXd out(std::size(kExprParams));
        for (size_t i = 0; i < std::size(kExprParams); ++i) out(i) = range_normalized(p, kExprParams[i]);
        return out;
    }
};

class ToyParamEmbedding final : public EmbeddingBackend {
public:
    std::string id() const override { return "toy_params"; }
    Eigen::VectorXd embed(const Image& frame) const override {
        const auto p = params_from_tag(frame);
        Eigen::VectorXd out(genbackend::kToyParamCount);
        for (int i = 0; i < genbackend::kToyParamCount; ++i) out(i) = range_normalized(p, i);
        const double n = out.norm();
        if (n < 1e-12) raise(ErrorCode::ShapeMismatch, "degenerate embedding");
        return out / n;
    }
};

} // namespace

std::unique_ptr<FeatureBackend> make_feature_backend(const std::string& name) {
    if (name == "toy_params") return std::make_unique<ToyParamFeatures>();
    raise(ErrorCode::BackendUnavailable, "feature backend not installed: " + name);
}

std::unique_ptr<EmbeddingBackend> make_embedding_backend(const std::string& name) {
    if (name == "toy_params") return std::make_unique<ToyParamEmbedding>();
    raise(ErrorCode::BackendUnavailable, "embedding backend not installed: " + name);
}

EmbeddingSet embed_frames(const std::vector<Image>& frames, const EmbeddingBackend& backend) {
    if (frames.empty()) raise(ErrorCode::EmptyInput, "no frames to embed");
    EmbeddingSet set;
    set.backend_id = backend.id();
    const Eigen::VectorXd first = backend.embed(frames[0]);
    set.vectors.resize(static_cast<long>(frames.size()), first.size());
    set.vectors.row(0) = first.transpose();
    for (size_t i = 1; i < frames.size(); ++i) set.vectors.row(static_cast<long>(i)) = backend.embed(frames[i]).transpose();
    return set;
}

std::vector<double> id_score_series(const EmbeddingSet& generated, const EmbeddingSet& train,
                                    int top_k) {
    if (top_k < 1) raise(ErrorCode::InvalidCount, "top_k must be positive");
    if (train.count() < top_k)
        raise(ErrorCode::TooFewTrainImages,
              "need at least " + std::to_string(top_k) + " training embeddings");
    if (generated.vectors.cols() != train.vectors.cols())
        raise(ErrorCode::ShapeMismatch, "embedding dimensions differ");
    generated.validate();
    train.validate();

    std::vector<double> series(generated.count());
    std::vector<double> sims(train.count());
    for (int i = 0; i < generated.count(); ++i) {
        for (int j = 0; j < train.count(); ++j)
            sims[j] = generated.vectors.row(i).dot(train.vectors.row(j));
        std::partial_sort(sims.begin(), sims.begin() + top_k, sims.end(), std::greater<double>());
        double acc = 0.0;
        for (int k = 0; k < top_k; ++k) acc += sims[k];
        series[i] = acc / top_k;
    }
    return series;
}

double id_score(const EmbeddingSet& generated, const EmbeddingSet& train, int top_k) {
    const std::vector<double> series = id_score_series(generated, train, top_k);
    double acc = 0.0;
    for (double v : series) acc += v;
    return acc / static_cast<double>(series.size());
}

std::pair<double, double> pose_expression_distance(const std::vector<Image>& generated,
                                                   const std::vector<Image>& driving,
                                                   const FeatureBackend& backend) {
    if (generated.size() != driving.size())
        raise(ErrorCode::LengthMismatch, "frame counts differ: " + std::to_string(generated.size()) +
                                             " vs " + std::to_string(driving.size()));
    if (generated.empty()) raise(ErrorCode::EmptyInput, "no frames");

    double apd = 0.0, aed = 0.0;
    for (size_t i = 0; i < generated.size(); ++i) {
        apd += (backend.pose_features(generated[i]) - backend.pose_features(driving[i]))
                   .squaredNorm() /
               backend.pose_features(driving[i]).size();
        aed += (backend.expression_features(generated[i]) - backend.expression_features(driving[i]))
                   .squaredNorm() /
               backend.expression_features(driving[i]).size();
    }
    const double n = static_cast<double>(generated.size());
    return {apd / n, aed / n};
}

json EvalReport::to_json() const {
    json j;
    j["schema_version"] = 1;
    j["kind"] = "eval_report";
    j["id"] = id;
    j["apd"] = apd;
    j["aed"] = aed;
    j["niqe"] = nullptr; // slot for an externally computed value
    j["frames"] = id_series.size();
    j["per_frame"]["id"] = id_series;
    j["per_frame"]["pose"] = pose_series;
    j["per_frame"]["expr"] = expr_series;
    j["config"] = config_echo;
    return j;
}

std::string EvalReport::to_csv() const {
    std::ostringstream out;
    out << "frame_index,id_sim,pose_dist,expr_dist\n";
    out.precision(17);
    for (size_t i = 0; i < id_series.size(); ++i)
        out << i << ',' << id_series[i] << ',' << pose_series[i] << ',' << expr_series[i] << '\n';
    return out.str();
}

EvalReport make_report(const ReportInputs& inputs) {
    for (const auto& p : {inputs.generated_video, inputs.driving_video, inputs.training_video})
        if (!std::filesystem::exists(p))
            raise(ErrorCode::MissingArtifact, "missing run artifact: " + p.string());

    const VideoClip generated = read_video(inputs.generated_video);
    const VideoClip driving = read_video(inputs.driving_video);
    const VideoClip training = read_video(inputs.training_video);

    const auto features = make_feature_backend(inputs.feature_backend);
    const auto embedder = make_embedding_backend(inputs.embedding_backend);

    if (generated.frames.size() != driving.frames.size())
        raise(ErrorCode::LengthMismatch, "generated and driving clips differ in length");

    EvalReport report;
    report.config_echo = inputs.config_echo;

    const EmbeddingSet gen_emb = embed_frames(generated.frames, *embedder);
    const EmbeddingSet train_emb = embed_frames(training.frames, *embedder);
    report.id_series = id_score_series(gen_emb, train_emb, inputs.top_k);

    report.pose_series.resize(generated.frames.size());
    report.expr_series.resize(generated.frames.size());
    for (size_t i = 0; i < generated.frames.size(); ++i) {
        const Eigen::VectorXd pg = features->pose_features(generated.frames[i]);
        const Eigen::VectorXd pd = features->pose_features(driving.frames[i]);
        const Eigen::VectorXd eg = features->expression_features(generated.frames[i]);
        const Eigen::VectorXd ed = features->expression_features(driving.frames[i]);
        report.pose_series[i] = (pg - pd).squaredNorm() / pd.size();
        report.expr_series[i] = (eg - ed).squaredNorm() / ed.size();
    }

    auto mean = [](const std::vector<double>& v) {
        double acc = 0.0;
        for (double x : v) acc += x;
        return acc / static_cast<double>(v.size());
    };
    report.id = mean(report.id_series);
    report.apd = mean(report.pose_series);
    report.aed = mean(report.expr_series);
    return report;
}

void write_report(const EvalReport& report, const std::filesystem::path& json_path,
                  const std::filesystem::path& csv_path) {
    write_manifest(json_path, report.to_json());
    std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
    if (!csv) raise(ErrorCode::IOFailure, "cannot open for write: " + csv_path.string());
    csv << report.to_csv();
    if (!csv) raise(ErrorCode::IOFailure, "short write: " + csv_path.string());
}

} // namespace mimic::evalkit
