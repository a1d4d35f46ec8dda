#pragma once

#include <memory>

#include "mimic/facekit/types.hpp"

namespace mimic::facekit {

// Keypoint estimation backend. The toy backend is analytic and stateless;
// real detectors plug in behind this interface.
class KeypointBackend {
public:
    virtual ~KeypointBackend() = default;
    virtual std::string id() const = 0;
    // Whether one handle may be used from several threads at once.
    virtual bool shareable() const = 0;
    virtual KeypointFrame extract(const Image& image) const = 0;
};

KeypointFrame extract_keypoints(const Image& image, const KeypointBackend& backend);

GroupedKeypoints select_subset(const KeypointFrame& kf, const KeypointIndexTable& table);

NormalizedKeypointDescriptor normalize_groups(const GroupedKeypoints& gk);

// Sum over the 66 points of the Euclidean distance between corresponding
// descriptor entries.
double keypoint_loss(const NormalizedKeypointDescriptor& d, const NormalizedKeypointDescriptor& g);

RegionCrop crop_region(const Image& image, const GroupedKeypoints& gk, Region region);

// Center-crop the larger rect to the smaller one's extent per axis;
// an odd surplus discards the extra pixel on the high side.
std::pair<Patch, Patch> harmonize_crops(const RegionCrop& a, const RegionCrop& b);

double region_pixel_loss(const Patch& pa, const Patch& pb);

// --- gradient helpers (derivatives of the losses above) ---------------------

// d keypoint_loss / d (g points), laid out in canonical 66-point order,
// accounting for the per-group centering in normalize_groups. `g_grouped`
// are the raw grouped points of the differentiated side.
std::array<Point3, 66> keypoint_loss_grad_wrt_second(const NormalizedKeypointDescriptor& d,
                                                     const GroupedKeypoints& g_grouped);

// Absolute-coordinate variant (ablation): sum of distances over raw grouped
// points without per-part normalization.
double absolute_keypoint_loss(const GroupedKeypoints& a, const GroupedKeypoints& b);
std::array<Point3, 66> absolute_keypoint_loss_grad_wrt_second(const GroupedKeypoints& a,
                                                              const GroupedKeypoints& b);

// d region_pixel_loss / d pa. Zero when the patches coincide.
Patch region_pixel_loss_grad_wrt_first(const Patch& pa, const Patch& pb);

// Bounding rectangle used by crop_region: (floor(min), ceil(max)) per axis,
// clamped to the image. Exposed for callers that render the region directly.
void region_bounds(const GroupedKeypoints& gk, Region region, double& min_x, double& min_y,
                   double& max_x, double& max_y);

} // namespace mimic::facekit
