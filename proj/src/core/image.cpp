#include "mimic/core/image.hpp"

#include <algorithm>
#include <cmath>

namespace mimic {

double Similarity::scale() const { return std::sqrt(a * a + b * b); }

double Similarity::rotation() const { return std::atan2(b, a); }

Similarity Similarity::inverse() const {
    const double s2 = a * a + b * b;
    Similarity inv;
    inv.a = a / s2;
    inv.b = -b / s2;
    inv.tx = -(inv.a * tx - inv.b * ty);
    inv.ty = -(inv.b * tx + inv.a * ty);
    return inv;
}

Similarity Similarity::compose(const Similarity& other) const {
    Similarity out;
    out.a = a * other.a - b * other.b;
    out.b = b * other.a + a * other.b;
    apply(other.tx, other.ty, out.tx, out.ty);
    return out;
}

double pixel_l2_distance(const Image& a, const Image& b) {
    if (!a.same_shape(b)) raise(ErrorCode::ShapeMismatch, "pixel_l2_distance on unequal shapes");
    double acc = 0.0;
    for (size_t i = 0; i < a.px.size(); ++i) {
        const double d = static_cast<double>(a.px[i]) - static_cast<double>(b.px[i]);
        acc += d * d;
    }
    return std::sqrt(acc);
}

Image warp_similarity(const Image& src, const Similarity& to_canvas, int out_w, int out_h) {
    Image out(out_w, out_h);
    const Similarity from_canvas = to_canvas.inverse();
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            double sx, sy;
            from_canvas.apply(x + 0.5, y + 0.5, sx, sy);
            sx -= 0.5;
            sy -= 0.5;
            const double cx = std::clamp(sx, 0.0, static_cast<double>(src.width - 1));
            const double cy = std::clamp(sy, 0.0, static_cast<double>(src.height - 1));
            const int x0 = static_cast<int>(std::floor(cx));
            const int y0 = static_cast<int>(std::floor(cy));
            const int x1 = std::min(x0 + 1, src.width - 1);
            const int y1 = std::min(y0 + 1, src.height - 1);
            const double fx = cx - x0;
            const double fy = cy - y0;
            for (int c = 0; c < 3; ++c) {
                const double v = (1 - fy) * ((1 - fx) * src.at(x0, y0, c) + fx * src.at(x1, y0, c)) +
                                 fy * ((1 - fx) * src.at(x0, y1, c) + fx * src.at(x1, y1, c));
                out.at(x, y, c) = static_cast<float>(v);
            }
        }
    }
    if (src.tag) {
        GenTag tag = *src.tag;
        tag.transform = to_canvas.compose(tag.transform);
        out.tag = tag;
    }
    return out;
}

Image downscale2x(const Image& src) {
    Image out(src.width / 2, src.height / 2);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            for (int c = 0; c < 3; ++c)
                out.at(x, y, c) = 0.25f * (src.at(2 * x, 2 * y, c) + src.at(2 * x + 1, 2 * y, c) +
                                           src.at(2 * x, 2 * y + 1, c) + src.at(2 * x + 1, 2 * y + 1, c));
    return out;
}

} // namespace mimic
