#pragma once

#include <array>
#include <string>

#include "mimic/facekit/types.hpp"
#include "mimic/genbackend/dual.hpp"

namespace mimic::genbackend {

// Analytic face parameters. The canvas is fixed at 64x64; positions and
// radii are in pixels of that canvas.
inline constexpr int kToyCanvas = 64;
inline constexpr int kToyParamCount = 16;
inline constexpr int kToyLayers = 4;
inline constexpr int kToyParamsPerLayer = kToyParamCount / kToyLayers;
inline constexpr double kToyEdgeSharpness = 20.0;

enum ToyParam : int {
    kHeadX = 0,
    kHeadY = 1,
    kHeadScale = 2,
    kYaw = 3,
    kEyeOpenL = 4,
    kEyeOpenR = 5,
    kMouthOpen = 6,
    kMouthWidth = 7,
    kIrisDxL = 8,
    kIrisDyL = 9,
    kIrisDxR = 10,
    kIrisDyR = 11,
    kIrisR = 12,
    kIrisG = 13,
    kIrisB = 14,
    kCavity = 15,
};

const char* toy_param_name(int p);

struct ParamRange {
    double lo, hi;
    double mid() const { return 0.5 * (lo + hi); }
    double half() const { return 0.5 * (hi - lo); }
    double span() const { return hi - lo; }
};

// Documented ranges; the squashing map in the backend keeps every parameter
// inside its range. Layer assignment is param_index / 4: pose on layer 0,
// core expression on layer 1, gaze on layer 2, appearance on layer 3.
const std::array<ParamRange, kToyParamCount>& toy_param_ranges();
inline int toy_param_layer(int param) { return param / kToyParamsPerLayer; }

struct ToyFaceParams {
    std::array<double, kToyParamCount> v{};

    static ToyFaceParams neutral(); // every parameter at its range midpoint
    double operator[](int i) const { return v[i]; }
    double& operator[](int i) { return v[i]; }
};

using Dual16 = Dual<kToyParamCount>;
using DualParams = std::array<Dual16, kToyParamCount>;

// Parameters with identity tangent seeding, for Jacobian evaluation.
DualParams seed_params(const ToyFaceParams& p);

// --- geometry ---------------------------------------------------------------

// Derived ellipse geometry shared by the renderer and the keypoint layout.
template <typename S>
struct ToyGeometry {
    S head_x, head_y, head_rx, head_ry;
    S eye_lx, eye_ly, eye_rx_c, eye_ry_c; // eye centers (left, right)
    S eye_rad_x, eye_rad_y_l, eye_rad_y_r;
    S iris_lx, iris_ly, iris_rx, iris_ry;
    S iris_rad;
    S mouth_x, mouth_y, mouth_rad_x, mouth_rad_y;
    S cavity_rad_x, cavity_rad_y;
    S iris_col[3];
    S cavity_col;
};

template <typename S>
ToyGeometry<S> toy_geometry(const std::array<S, kToyParamCount>& p);

// 66 descriptor points in the fixed group layout (eyelid boundary samples,
// iris center + cardinals, mouth boundary samples, head bounding box).
template <typename S>
struct ToyKeypoints66 {
    std::array<std::array<S, 3>, 66> pts;
};

template <typename S>
ToyKeypoints66<S> toy_keypoints66(const std::array<S, kToyParamCount>& p);

facekit::GroupedKeypoints toy_keypoints_grouped(const ToyFaceParams& p);

// Full 468-point mesh: the 66 descriptor points first (matching
// facekit::default_index_table()), filler points on interior rings after.
facekit::KeypointFrame toy_mesh_frame(const ToyFaceParams& p);

// --- rendering --------------------------------------------------------------

// Shade one pixel (center coordinates) in scalar type S.
template <typename S>
void toy_shade(const ToyGeometry<S>& g, double px, double py, S out[3]);

Image toy_render(const ToyFaceParams& p, bool invert_colors = false, bool tag_output = true,
                 const std::string& tag_id = "toy");

// Rendered patch plus per-pixel parameter tangents, RGB interleaved.
struct DualPatchRender {
    int x0 = 0, y0 = 0, width = 0, height = 0;
    std::vector<double> value;                              // w*h*3
    std::vector<std::array<double, kToyParamCount>> tangent; // w*h*3
};

DualPatchRender toy_render_patch_dual(const ToyFaceParams& p, int x0, int y0, int x1, int y1,
                                      bool invert_colors = false);

std::vector<double> toy_render_patch(const ToyFaceParams& p, int x0, int y0, int x1, int y1,
                                     bool invert_colors = false);

} // namespace mimic::genbackend
