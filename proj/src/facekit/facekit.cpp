#include "mimic/facekit/facekit.hpp"

#include <algorithm>
#include <cmath>

namespace mimic::facekit {

KeypointFrame extract_keypoints(const Image& image, const KeypointBackend& backend) {
    if (image.width <= 0 || image.height <= 0 || image.px.size() != image.value_count())
        raise(ErrorCode::ShapeMismatch, "extract_keypoints on malformed image");
    return backend.extract(image);
}

namespace {

template <size_t N>
void gather(const KeypointFrame& kf, const std::array<int, N>& idx, std::array<Point3, N>& out) {
    for (size_t k = 0; k < N; ++k) {
        const int i = idx[k];
        if (i < 0 || i >= kMeshPointCount)
            raise(ErrorCode::IndexOutOfRange, "keypoint index " + std::to_string(i));
        out[k] = kf.points[i];
    }
}

template <size_t N>
void center(const std::array<Point3, N>& in, std::array<Point3, N>& out) {
    Point3 mean;
    for (const Point3& p : in) {
        mean.x += p.x;
        mean.y += p.y;
        mean.z += p.z;
    }
    mean.x /= N;
    mean.y /= N;
    mean.z /= N;
    for (size_t k = 0; k < N; ++k) out[k] = in[k] - mean;
}

double norm3(const Point3& p) { return std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z); }

} // namespace

GroupedKeypoints select_subset(const KeypointFrame& kf, const KeypointIndexTable& table) {
    table.validate();
    GroupedKeypoints gk;
    gather(kf, table.left_eyelid, gk.left_eyelid);
    gather(kf, table.right_eyelid, gk.right_eyelid);
    gather(kf, table.left_iris, gk.left_iris);
    gather(kf, table.right_iris, gk.right_iris);
    gather(kf, table.mouth, gk.mouth);
    gather(kf, table.head_frame, gk.head_frame);
    return gk;
}

NormalizedKeypointDescriptor normalize_groups(const GroupedKeypoints& gk) {
    NormalizedKeypointDescriptor d;
    center(gk.left_eyelid, d.left_eyelid);
    center(gk.right_eyelid, d.right_eyelid);
    center(gk.left_iris, d.left_iris);
    center(gk.right_iris, d.right_iris);
    center(gk.mouth, d.mouth);
    d.head_frame = gk.head_frame; // absolute by design
    return d;
}

double keypoint_loss(const NormalizedKeypointDescriptor& d, const NormalizedKeypointDescriptor& g) {
    const auto a = d.flatten();
    const auto b = g.flatten();
    double total = 0.0;
    for (size_t i = 0; i < a.size(); ++i) total += norm3(a[i] - b[i]);
    return total;
}

void region_bounds(const GroupedKeypoints& gk, Region region, double& min_x, double& min_y,
                   double& max_x, double& max_y) {
    const Point3* pts = nullptr;
    size_t n = 0;
    switch (region) {
        case Region::mouth:
            pts = gk.mouth.data();
            n = gk.mouth.size();
            break;
        case Region::left_eye:
            pts = gk.left_iris.data();
            n = gk.left_iris.size();
            break;
        case Region::right_eye:
            pts = gk.right_iris.data();
            n = gk.right_iris.size();
            break;
    }
    min_x = min_y = std::numeric_limits<double>::infinity();
    max_x = max_y = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i) {
        min_x = std::min(min_x, pts[i].x);
        max_x = std::max(max_x, pts[i].x);
        min_y = std::min(min_y, pts[i].y);
        max_y = std::max(max_y, pts[i].y);
    }
}

RegionCrop crop_region(const Image& image, const GroupedKeypoints& gk, Region region) {
    double min_x, min_y, max_x, max_y;
    region_bounds(gk, region, min_x, min_y, max_x, max_y);

    RegionCrop crop;
    crop.region = region;
    crop.x0 = std::clamp(static_cast<int>(std::floor(min_x)), 0, image.width);
    crop.y0 = std::clamp(static_cast<int>(std::floor(min_y)), 0, image.height);
    crop.x1 = std::clamp(static_cast<int>(std::ceil(max_x)), 0, image.width);
    crop.y1 = std::clamp(static_cast<int>(std::ceil(max_y)), 0, image.height);
    if (crop.x1 <= crop.x0 || crop.y1 <= crop.y0)
        raise(ErrorCode::DegenerateRegion,
              std::string(region_name(region)) + " bounding box has zero area");

    crop.pixels = Patch(crop.x1 - crop.x0, crop.y1 - crop.y0, 3);
    for (int y = crop.y0; y < crop.y1; ++y)
        for (int x = crop.x0; x < crop.x1; ++x)
            for (int c = 0; c < 3; ++c)
                crop.pixels.at(x - crop.x0, y - crop.y0, c) = image.at(x, y, c);
    return crop;
}

namespace {

Patch center_crop(const Patch& p, int w, int h) {
    // Odd surplus discards the extra pixel on the high side.
    const int x_off = (p.width - w) / 2;
    const int y_off = (p.height - h) / 2;
    Patch out(w, h, p.channels);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < p.channels; ++c) out.at(x, y, c) = p.at(x + x_off, y + y_off, c);
    return out;
}

} // namespace

std::pair<Patch, Patch> harmonize_crops(const RegionCrop& a, const RegionCrop& b) {
    if (a.region != b.region)
        raise(ErrorCode::RegionMismatch, std::string(region_name(a.region)) + " vs " + region_name(b.region));
    const int w = std::min(a.pixels.width, b.pixels.width);
    const int h = std::min(a.pixels.height, b.pixels.height);
    return {center_crop(a.pixels, w, h), center_crop(b.pixels, w, h)};
}

double region_pixel_loss(const Patch& pa, const Patch& pb) {
    if (!pa.same_shape(pb)) raise(ErrorCode::ShapeMismatch, "region_pixel_loss on unequal patches");
    double acc = 0.0;
    for (size_t i = 0; i < pa.px.size(); ++i) {
        const double d = static_cast<double>(pa.px[i]) - static_cast<double>(pb.px[i]);
        acc += d * d;
    }
    return std::sqrt(acc);
}

std::array<Point3, 66> keypoint_loss_grad_wrt_second(const NormalizedKeypointDescriptor& d,
                                                     const GroupedKeypoints& g_grouped) {
    const NormalizedKeypointDescriptor g = normalize_groups(g_grouped);
    const auto a = d.flatten();
    const auto b = g.flatten();

    // d/db of sum ||a_i - b_i||: unit vector toward b, zero at coincidence.
    std::array<Point3, 66> grad{};
    for (size_t i = 0; i < 66; ++i) {
        const Point3 diff = b[i] - a[i];
        const double n = norm3(diff);
        if (n > 1e-15) grad[i] = {diff.x / n, diff.y / n, diff.z / n};
    }

    // Pull back through the per-group centering: g_j = x_j - mean(x), so the
    // cotangent of x is grad - groupmean(grad). Head frame passes through.
    size_t offset = 0;
    auto center_pullback = [&grad](size_t begin, size_t count) {
        Point3 mean;
        for (size_t i = begin; i < begin + count; ++i) {
            mean.x += grad[i].x;
            mean.y += grad[i].y;
            mean.z += grad[i].z;
        }
        mean.x /= static_cast<double>(count);
        mean.y /= static_cast<double>(count);
        mean.z /= static_cast<double>(count);
        for (size_t i = begin; i < begin + count; ++i) grad[i] = grad[i] - mean;
    };
    for (size_t count : {16u, 16u, 5u, 5u, 20u}) {
        center_pullback(offset, count);
        offset += count;
    }
    return grad;
}

double absolute_keypoint_loss(const GroupedKeypoints& a, const GroupedKeypoints& b) {
    const auto fa = a.flatten();
    const auto fb = b.flatten();
    double total = 0.0;
    for (size_t i = 0; i < fa.size(); ++i) total += norm3(fa[i] - fb[i]);
    return total;
}

std::array<Point3, 66> absolute_keypoint_loss_grad_wrt_second(const GroupedKeypoints& a,
                                                              const GroupedKeypoints& b) {
    const auto fa = a.flatten();
    const auto fb = b.flatten();
    std::array<Point3, 66> grad{};
    for (size_t i = 0; i < 66; ++i) {
        const Point3 diff = fb[i] - fa[i];
        const double n = norm3(diff);
        if (n > 1e-15) grad[i] = {diff.x / n, diff.y / n, diff.z / n};
    }
    return grad;
}

Patch region_pixel_loss_grad_wrt_first(const Patch& pa, const Patch& pb) {
    if (!pa.same_shape(pb)) raise(ErrorCode::ShapeMismatch, "gradient on unequal patches");
    Patch grad(pa.width, pa.height, pa.channels);
    const double n = region_pixel_loss(pa, pb);
    if (n <= 1e-15) return grad;
    for (size_t i = 0; i < pa.px.size(); ++i)
        grad.px[i] = static_cast<float>((static_cast<double>(pa.px[i]) - pb.px[i]) / n);
    return grad;
}

} // namespace mimic::facekit
