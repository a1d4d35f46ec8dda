#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mimic/core/error.hpp"

namespace mimic {

// 2D similarity transform: p' = sR p + t, stored as (a, b, tx, ty) with
// sR = [a -b; b a]. Composable and invertible while a^2 + b^2 > 0.
struct Similarity {
    double a = 1.0, b = 0.0, tx = 0.0, ty = 0.0;

    static Similarity identity() { return {}; }

    void apply(double x, double y, double& ox, double& oy) const {
        ox = a * x - b * y + tx;
        oy = b * x + a * y + ty;
    }

    double scale() const;
    double rotation() const;
    Similarity inverse() const;
    // this ∘ other: applies `other` first, then this.
    Similarity compose(const Similarity& other) const;
};

// Provenance stamp on synthetically generated rasters. Analytic keypoint
// backends use it to reconstitute the generating parameters; real images
// never carry one. `transform` maps generator-canvas coordinates to this
// raster's coordinates (identity for a raw render, non-trivial after
// alignment/resampling).
struct GenTag {
    std::string backend_id;
    std::vector<double> params;
    Similarity transform = Similarity::identity();
};

// Dense float raster, RGB interleaved, values nominally in [0, 1].
struct Image {
    int width = 0;
    int height = 0;
    std::vector<float> px; // size = width * height * 3
    std::optional<GenTag> tag;

    Image() = default;
    Image(int w, int h, float fill = 0.0f)
        : width(w), height(h), px(static_cast<size_t>(w) * h * 3, fill) {}

    float& at(int x, int y, int c) { return px[(static_cast<size_t>(y) * width + x) * 3 + c]; }
    float at(int x, int y, int c) const { return px[(static_cast<size_t>(y) * width + x) * 3 + c]; }

    size_t value_count() const { return px.size(); }
    bool same_shape(const Image& o) const { return width == o.width && height == o.height; }
};

// Small pixel patch with arbitrary channel count. Crops of RGB images have
// channels = 3; tests may build single-channel patches directly.
struct Patch {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<float> px;

    Patch() = default;
    Patch(int w, int h, int c, float fill = 0.0f)
        : width(w), height(h), channels(c), px(static_cast<size_t>(w) * h * c, fill) {}

    float& at(int x, int y, int c) {
        return px[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    float at(int x, int y, int c) const {
        return px[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    bool same_shape(const Patch& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

// Euclidean norm of the elementwise difference, accumulated in double.
double pixel_l2_distance(const Image& a, const Image& b);

// Inverse-warp resampling: out(x, y) = in(T^-1 (x, y)) with bilinear
// interpolation, out-of-bounds reads clamped to the edge.
Image warp_similarity(const Image& src, const Similarity& to_canvas, int out_w, int out_h);

Image downscale2x(const Image& src);

} // namespace mimic
