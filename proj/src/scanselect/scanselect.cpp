#include "mimic/scanselect/scanselect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mimic/core/io.hpp"

namespace mimic::scanselect {

double PixelL2Distance::operator()(const Image& a, const Image& b) const {
    return pixel_l2_distance(a, b);
}

std::unique_ptr<ImageDistance> make_distance_backend(const std::string& name) {
    if (name == "pixel_l2") return std::make_unique<PixelL2Distance>();
    raise(ErrorCode::BackendUnavailable, "distance backend not installed: " + name);
}

void DistanceMatrix::validate() const {
    const int n = size();
    if (d.cols() != n) raise(ErrorCode::ShapeMismatch, "distance matrix not square");
    for (int i = 0; i < n; ++i) {
        if (d(i, i) != 0.0) raise(ErrorCode::ShapeMismatch, "nonzero diagonal entry");
        for (int j = i + 1; j < n; ++j) {
            if (d(i, j) < 0) raise(ErrorCode::ShapeMismatch, "negative distance");
            if (std::abs(d(i, j) - d(j, i)) > 1e-9)
                raise(ErrorCode::ShapeMismatch, "asymmetric distance matrix");
        }
    }
}

DistanceMatrix pairwise_distances(const std::vector<Image>& frames, const ImageDistance& metric) {
    if (frames.size() < 2) raise(ErrorCode::InvalidCount, "need at least 2 frames");
    for (size_t i = 1; i < frames.size(); ++i)
        if (!frames[i].same_shape(frames[0]))
            raise(ErrorCode::ShapeMismatch, "frame " + std::to_string(i) + " shape differs");

    const int n = static_cast<int>(frames.size());
    DistanceMatrix dm;
    dm.metric_id = metric.id();
    dm.d = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = metric(frames[i], frames[j]);
            dm.d(i, j) = v;
            dm.d(j, i) = v;
        }
    return dm;
}

namespace {

std::pair<double, double> diversity_of(const Eigen::MatrixXd& d, const std::vector<int>& idx) {
    double mn = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    size_t pairs = 0;
    for (size_t a = 0; a < idx.size(); ++a)
        for (size_t b = a + 1; b < idx.size(); ++b) {
            const double v = d(idx[a], idx[b]);
            mn = std::min(mn, v);
            sum += v;
            ++pairs;
        }
    return {mn, sum / static_cast<double>(pairs)};
}

} // namespace

SubsetSelection greedy_diverse_subset(const DistanceMatrix& dm, int n) {
    const int total = dm.size();
    if (n < 2 || n > total)
        raise(ErrorCode::InvalidCount,
              "subset size " + std::to_string(n) + " outside [2, " + std::to_string(total) + "]");

    // Farthest pair; ties resolve to the lexicographically smallest (i, j).
    int bi = 0, bj = 1;
    double best = -1.0;
    for (int i = 0; i < total; ++i)
        for (int j = i + 1; j < total; ++j)
            if (dm.d(i, j) > best) {
                best = dm.d(i, j);
                bi = i;
                bj = j;
            }

    SubsetSelection sel;
    sel.indices = {bi, bj};
    std::vector<char> chosen(total, 0);
    chosen[bi] = chosen[bj] = 1;
    // min distance from each candidate to the current selection
    std::vector<double> min_dist(total);
    for (int i = 0; i < total; ++i) min_dist[i] = std::min(dm.d(i, bi), dm.d(i, bj));

    while (static_cast<int>(sel.indices.size()) < n) {
        int next = -1;
        double next_score = -1.0;
        for (int i = 0; i < total; ++i) {
            if (chosen[i]) continue;
            if (min_dist[i] > next_score) { // strict: ties keep the smallest index
                next_score = min_dist[i];
                next = i;
            }
        }
        chosen[next] = 1;
        sel.indices.push_back(next);
        for (int i = 0; i < total; ++i) min_dist[i] = std::min(min_dist[i], dm.d(i, next));
    }

    std::tie(sel.min_pairwise, sel.avg_pairwise) = diversity_of(dm.d, sel.indices);
    return sel;
}

SubsetSelection brute_force_diverse_subset(const DistanceMatrix& dm, int n) {
    const int total = dm.size();
    if (n < 2 || n > total) raise(ErrorCode::InvalidCount, "subset size outside [2, n]");

    double combos = 1.0;
    for (int k = 0; k < n; ++k) combos = combos * (total - k) / (k + 1);
    if (combos > 1e6)
        raise(ErrorCode::InstanceTooLarge, "C(" + std::to_string(total) + ", " + std::to_string(n) +
                                               ") exceeds the enumeration budget");

    std::vector<int> idx(n);
    for (int k = 0; k < n; ++k) idx[k] = k;

    SubsetSelection best;
    best.min_pairwise = -1.0;
    best.avg_pairwise = -1.0;

    // Lexicographic combination order; strict improvement keeps the first
    // (lexicographically smallest) among exact ties.
    while (true) {
        const auto [mn, avg] = diversity_of(dm.d, idx);
        if (mn > best.min_pairwise ||
            (mn == best.min_pairwise && avg > best.avg_pairwise)) {
            best.indices = idx;
            best.min_pairwise = mn;
            best.avg_pairwise = avg;
        }
        int pos = n - 1;
        while (pos >= 0 && idx[pos] == total - n + pos) --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (int k = pos + 1; k < n; ++k) idx[k] = idx[k - 1] + 1;
    }
    return best;
}

std::pair<double, double> set_diversity(const DistanceMatrix& dm, const std::vector<int>& indices) {
    if (indices.size() < 2) raise(ErrorCode::InvalidIndices, "need at least 2 indices");
    std::vector<int> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] < 0 || sorted[i] >= dm.size())
            raise(ErrorCode::InvalidIndices, "index out of range: " + std::to_string(sorted[i]));
        if (i > 0 && sorted[i] == sorted[i - 1])
            raise(ErrorCode::InvalidIndices, "duplicate index: " + std::to_string(sorted[i]));
    }
    return diversity_of(dm.d, indices);
}

std::vector<int> evenly_spaced_indices(int n_total, int n) {
    if (n < 1 || n > n_total) raise(ErrorCode::InvalidCount, "evenly_spaced_indices count out of range");
    std::vector<int> out(n);
    for (int i = 0; i < n; ++i)
        out[i] = static_cast<int>(static_cast<int64_t>(i) * n_total / n);
    return out;
}

void DistanceMatrix::save(const std::filesystem::path& manifest_path) const {
    validate();
    // Strict lower triangle, row-major: d(1,0), d(2,0), d(2,1), ...
    std::vector<float> blob;
    const int n = size();
    blob.reserve(static_cast<size_t>(n) * (n - 1) / 2);
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) blob.push_back(static_cast<float>(d(i, j)));
    const std::filesystem::path blob_path = manifest_path.string() + ".f32";
    write_f32_blob(blob_path, blob);
    json m;
    m["schema_version"] = 1;
    m["kind"] = "distance_matrix";
    m["count"] = n;
    m["metric_id"] = metric_id;
    m["layout"] = "lower_triangle_row_major";
    m["blob"] = blob_path.filename().string();
    m["blob_hash"] = fnv1a64_hex(blob);
    write_manifest(manifest_path, m);
}

DistanceMatrix DistanceMatrix::load(const std::filesystem::path& manifest_path) {
    const json m = read_manifest(manifest_path, "distance_matrix");
    const int n = m.at("count").get<int>();
    const std::vector<float> blob = read_f32_blob(manifest_path.parent_path() / m.at("blob").get<std::string>());
    if (blob.size() != static_cast<size_t>(n) * (n - 1) / 2)
        raise(ErrorCode::ShapeMismatch, "distance blob size mismatch");
    DistanceMatrix dm;
    dm.metric_id = m.at("metric_id").get<std::string>();
    dm.d = Eigen::MatrixXd::Zero(n, n);
    size_t k = 0;
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            dm.d(i, j) = blob[k];
            dm.d(j, i) = blob[k];
            ++k;
        }
    dm.validate();
    return dm;
}

} // namespace mimic::scanselect
