#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mimic/core/image.hpp"
#include "mimic/core/io.hpp"

namespace mimic::evalkit {

// Unit-norm feature vectors, one per image.
struct EmbeddingSet {
    Eigen::MatrixXd vectors; // rows are embeddings
    std::string backend_id;

    int count() const { return static_cast<int>(vectors.rows()); }
    void validate() const; // every row L2-normalized within 1e-6
};

// Per-frame pose and expression feature extractor. The toy backend reads
// the analytic parameters off the raster tag and partitions them: pose is
// (head_x, head_y, scale, yaw), expression is (eye openness, iris offsets,
// mouth openness/width), each normalized to its documented range.
class FeatureBackend {
public:
    virtual ~FeatureBackend() = default;
    virtual std::string id() const = 0;
    virtual Eigen::VectorXd pose_features(const Image& frame) const = 0;
    virtual Eigen::VectorXd expression_features(const Image& frame) const = 0;
};

std::unique_ptr<FeatureBackend> make_feature_backend(const std::string& name);

// Unit-norm embedding backend over the full range-normalized toy parameter
// vector; a desk-scale stand-in for a face-recognition feature extractor.
class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;
    virtual std::string id() const = 0;
    virtual Eigen::VectorXd embed(const Image& frame) const = 0;
};

std::unique_ptr<EmbeddingBackend> make_embedding_backend(const std::string& name);

EmbeddingSet embed_frames(const std::vector<Image>& frames, const EmbeddingBackend& backend);

// Mean over generated frames of the mean cosine similarity to the top-k
// most similar training embeddings (k defaults to 5).
double id_score(const EmbeddingSet& generated, const EmbeddingSet& train, int top_k = 5);
std::vector<double> id_score_series(const EmbeddingSet& generated, const EmbeddingSet& train,
                                    int top_k = 5);

// (APD, AED): mean squared error of pose / expression features, averaged
// over frames.
std::pair<double, double> pose_expression_distance(const std::vector<Image>& generated,
                                                   const std::vector<Image>& driving,
                                                   const FeatureBackend& backend);

struct EvalReport {
    double id = 0.0;
    double apd = 0.0;
    double aed = 0.0;
    std::vector<double> id_series;
    std::vector<double> pose_series;
    std::vector<double> expr_series;
    json config_echo;

    json to_json() const; // reserves an optional externally-computed "niqe"
    std::string to_csv() const;
};

// Aggregates a finished run: generated clip, driving clip, training-set clip.
struct ReportInputs {
    std::filesystem::path generated_video;
    std::filesystem::path driving_video;
    std::filesystem::path training_video;
    json config_echo;
    std::string feature_backend = "toy_params";
    std::string embedding_backend = "toy_params";
    int top_k = 5;
};

EvalReport make_report(const ReportInputs& inputs);
void write_report(const EvalReport& report, const std::filesystem::path& json_path,
                  const std::filesystem::path& csv_path);

} // namespace mimic::evalkit
