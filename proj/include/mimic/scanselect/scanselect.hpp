#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mimic/core/error.hpp"
#include "mimic/core/image.hpp"

namespace mimic::scanselect {

// Pairwise image distance backend. The shipped default is plain pixel L2 so
// selection runs without any learned model; perceptual metrics plug in
// behind the same interface.
class ImageDistance {
public:
    virtual ~ImageDistance() = default;
    virtual std::string id() const = 0;
    virtual double operator()(const Image& a, const Image& b) const = 0;
};

class PixelL2Distance final : public ImageDistance {
public:
    std::string id() const override { return "pixel_l2"; }
    double operator()(const Image& a, const Image& b) const override;
};

// Throws BackendUnavailable if the name has no registered implementation
// (e.g. "perceptual" without the adapter installed).
std::unique_ptr<ImageDistance> make_distance_backend(const std::string& name);

struct DistanceMatrix {
    Eigen::MatrixXd d; // n x n, symmetric, zero diagonal
    std::string metric_id;

    int size() const { return static_cast<int>(d.rows()); }
    void validate() const;

    void save(const std::filesystem::path& manifest_path) const;
    static DistanceMatrix load(const std::filesystem::path& manifest_path);
};

struct SubsetSelection {
    std::vector<int> indices; // in selection order
    double min_pairwise = 0.0;
    double avg_pairwise = 0.0;
};

DistanceMatrix pairwise_distances(const std::vector<Image>& frames, const ImageDistance& metric);

// Greedy max-min dispersion: seed with the farthest pair (lexicographically
// smallest pair on ties), then repeatedly add the index maximizing the
// minimum distance to the current selection (smallest index on ties).
SubsetSelection greedy_diverse_subset(const DistanceMatrix& dm, int n);

// Exhaustive max-min optimum for small instances; ties broken by larger
// average pairwise distance, then lexicographically. Refuses instances with
// more than 10^6 candidate subsets.
SubsetSelection brute_force_diverse_subset(const DistanceMatrix& dm, int n);

// (min, mean) over the unordered pairs of `indices`.
std::pair<double, double> set_diversity(const DistanceMatrix& dm, const std::vector<int>& indices);

// Baseline used by the ablation experiments: frame i of n picks source
// index floor(i * n_total / n).
std::vector<int> evenly_spaced_indices(int n_total, int n);

} // namespace mimic::scanselect
