#include "mimic/genbackend/toyface.hpp"

#include <cmath>
#include <numbers>

namespace mimic::genbackend {

const char* toy_param_name(int p) {
    static const char* names[kToyParamCount] = {
        "head_x", "head_y", "head_scale", "yaw",
        "eye_open_l", "eye_open_r", "mouth_open", "mouth_width",
        "iris_dx_l", "iris_dy_l", "iris_dx_r", "iris_dy_r",
        "iris_r", "iris_g", "iris_b", "cavity"};
    return p >= 0 && p < kToyParamCount ? names[p] : "?";
}

const std::array<ParamRange, kToyParamCount>& toy_param_ranges() {
    static const std::array<ParamRange, kToyParamCount> ranges = {{
        {26.0, 38.0},  // head_x
        {26.0, 38.0},  // head_y
        {14.0, 22.0},  // head_scale
        {-0.35, 0.35}, // yaw
        {0.0, 1.0},    // eye_open_l
        {0.0, 1.0},    // eye_open_r
        {0.0, 1.0},    // mouth_open
        {0.30, 0.55},  // mouth_width (fraction of head rx)
        {-1.5, 1.5},   // iris_dx_l
        {-1.5, 1.5},   // iris_dy_l
        {-1.5, 1.5},   // iris_dx_r
        {-1.5, 1.5},   // iris_dy_r
        {0.0, 1.0},    // iris_r
        {0.0, 1.0},    // iris_g
        {0.0, 1.0},    // iris_b
        {0.0, 1.0},    // cavity
    }};
    return ranges;
}

ToyFaceParams ToyFaceParams::neutral() {
    ToyFaceParams p;
    for (int i = 0; i < kToyParamCount; ++i) p.v[i] = toy_param_ranges()[i].mid();
    return p;
}

DualParams seed_params(const ToyFaceParams& p) {
    DualParams out;
    for (int i = 0; i < kToyParamCount; ++i) out[i] = Dual16::seeded(p.v[i], i);
    return out;
}

template <typename S>
ToyGeometry<S> toy_geometry(const std::array<S, kToyParamCount>& p) {
    ToyGeometry<S> g;
    g.head_x = p[kHeadX];
    g.head_y = p[kHeadY];
    g.head_ry = p[kHeadScale];
    g.head_rx = S(0.80) * p[kHeadScale];

    // Yaw shears every feature sideways and narrows the horizontal spread.
    const S shift = p[kYaw] * S(0.5) * g.head_rx;
    const S squeeze = S(1.0) - S(0.3) * p[kYaw] * p[kYaw];
    auto feature_x = [&](const S& rel) { return g.head_x + shift + rel * squeeze; };

    const S eye_off_x = S(0.42) * g.head_rx;
    const S eye_off_y = S(-0.25) * g.head_ry;
    g.eye_lx = feature_x(-eye_off_x);
    g.eye_rx_c = feature_x(eye_off_x);
    g.eye_ly = g.head_y + eye_off_y;
    g.eye_ry_c = g.eye_ly;

    g.eye_rad_x = S(0.22) * g.head_rx;
    const S eye_rad_y_full = S(0.16) * g.head_ry;
    g.eye_rad_y_l = eye_rad_y_full * (S(0.10) + S(0.90) * p[kEyeOpenL]);
    g.eye_rad_y_r = eye_rad_y_full * (S(0.10) + S(0.90) * p[kEyeOpenR]);

    g.iris_rad = S(0.55) * g.eye_rad_x;
    g.iris_lx = g.eye_lx + p[kIrisDxL];
    g.iris_ly = g.eye_ly + p[kIrisDyL];
    g.iris_rx = g.eye_rx_c + p[kIrisDxR];
    g.iris_ry = g.eye_ry_c + p[kIrisDyR];

    g.mouth_x = feature_x(S(0.0));
    g.mouth_y = g.head_y + S(0.45) * g.head_ry;
    g.mouth_rad_x = p[kMouthWidth] * g.head_rx;
    g.mouth_rad_y = (S(0.05) + S(0.22) * p[kMouthOpen]) * g.head_ry;
    g.cavity_rad_x = S(0.75) * g.mouth_rad_x;
    // Keeps a positive radius at zero openness so the quadratic form stays
    // defined; the resulting sliver is far below mask resolution.
    g.cavity_rad_y = (S(0.02) + S(0.73) * p[kMouthOpen]) * g.mouth_rad_y;

    g.iris_col[0] = p[kIrisR];
    g.iris_col[1] = p[kIrisG];
    g.iris_col[2] = p[kIrisB];
    g.cavity_col = p[kCavity];
    return g;
}

namespace {

template <typename S>
S ellipse_mask(const S& cx, const S& cy, const S& rx, const S& ry, double px, double py) {
    const S dx = (S(px) - cx) / rx;
    const S dy = (S(py) - cy) / ry;
    const S q = dx * dx + dy * dy;
    return sigmoid(S(kToyEdgeSharpness) * (S(1.0) - q));
}

template <typename S>
void lerp3(S c[3], const S& m, const S& r, const S& g, const S& b) {
    c[0] = c[0] + m * (r - c[0]);
    c[1] = c[1] + m * (g - c[1]);
    c[2] = c[2] + m * (b - c[2]);
}

constexpr double kBg[3] = {0.10, 0.11, 0.13};
constexpr double kSkin[3] = {0.80, 0.64, 0.52};
constexpr double kSclera[3] = {0.94, 0.94, 0.95};
constexpr double kLips[3] = {0.56, 0.22, 0.24};

} // namespace

template <typename S>
void toy_shade(const ToyGeometry<S>& g, double px, double py, S out[3]) {
    out[0] = S(kBg[0]);
    out[1] = S(kBg[1]);
    out[2] = S(kBg[2]);

    const S m_head = ellipse_mask(g.head_x, g.head_y, g.head_rx, g.head_ry, px, py);
    lerp3(out, m_head, S(kSkin[0]), S(kSkin[1]), S(kSkin[2]));

    const S m_eye_l = ellipse_mask(g.eye_lx, g.eye_ly, g.eye_rad_x, g.eye_rad_y_l, px, py);
    const S m_eye_r = ellipse_mask(g.eye_rx_c, g.eye_ry_c, g.eye_rad_x, g.eye_rad_y_r, px, py);
    lerp3(out, m_eye_l, S(kSclera[0]), S(kSclera[1]), S(kSclera[2]));
    lerp3(out, m_eye_r, S(kSclera[0]), S(kSclera[1]), S(kSclera[2]));

    // Irises show only through the open lid aperture.
    const S m_iris_l = ellipse_mask(g.iris_lx, g.iris_ly, g.iris_rad, g.iris_rad, px, py) * m_eye_l;
    const S m_iris_r = ellipse_mask(g.iris_rx, g.iris_ry, g.iris_rad, g.iris_rad, px, py) * m_eye_r;
    lerp3(out, m_iris_l, g.iris_col[0], g.iris_col[1], g.iris_col[2]);
    lerp3(out, m_iris_r, g.iris_col[0], g.iris_col[1], g.iris_col[2]);

    const S m_mouth = ellipse_mask(g.mouth_x, g.mouth_y, g.mouth_rad_x, g.mouth_rad_y, px, py);
    lerp3(out, m_mouth, S(kLips[0]), S(kLips[1]), S(kLips[2]));

    const S m_cavity =
        ellipse_mask(g.mouth_x, g.mouth_y, g.cavity_rad_x, g.cavity_rad_y, px, py) * m_mouth;
    lerp3(out, m_cavity, g.cavity_col, g.cavity_col, g.cavity_col);
}

template <typename S>
ToyKeypoints66<S> toy_keypoints66(const std::array<S, kToyParamCount>& p) {
    const ToyGeometry<S> g = toy_geometry(p);
    ToyKeypoints66<S> out;
    int k = 0;
    auto put = [&](const S& x, const S& y) {
        out.pts[k][0] = x;
        out.pts[k][1] = y;
        out.pts[k][2] = S(0.0);
        ++k;
    };
    auto boundary = [&](const S& cx, const S& cy, const S& rx, const S& ry, int n) {
        for (int j = 0; j < n; ++j) {
            const double th = 2.0 * std::numbers::pi * j / n;
            put(cx + rx * S(std::cos(th)), cy + ry * S(std::sin(th)));
        }
    };
    auto iris5 = [&](const S& cx, const S& cy) {
        put(cx, cy);
        put(cx + g.iris_rad, cy);
        put(cx, cy + g.iris_rad);
        put(cx - g.iris_rad, cy);
        put(cx, cy - g.iris_rad);
    };

    boundary(g.eye_lx, g.eye_ly, g.eye_rad_x, g.eye_rad_y_l, 16);
    boundary(g.eye_rx_c, g.eye_ry_c, g.eye_rad_x, g.eye_rad_y_r, 16);
    iris5(g.iris_lx, g.iris_ly);
    iris5(g.iris_rx, g.iris_ry);
    boundary(g.mouth_x, g.mouth_y, g.mouth_rad_x, g.mouth_rad_y, 20);
    // Head frame: bounding box corners of the head ellipse.
    put(g.head_x - g.head_rx, g.head_y - g.head_ry);
    put(g.head_x + g.head_rx, g.head_y - g.head_ry);
    put(g.head_x - g.head_rx, g.head_y + g.head_ry);
    put(g.head_x + g.head_rx, g.head_y + g.head_ry);
    return out;
}

facekit::GroupedKeypoints toy_keypoints_grouped(const ToyFaceParams& p) {
    const ToyKeypoints66<double> kp = toy_keypoints66(p.v);
    facekit::GroupedKeypoints gk;
    int k = 0;
    auto take = [&](facekit::Point3& dst) {
        dst = {kp.pts[k][0], kp.pts[k][1], kp.pts[k][2]};
        ++k;
    };
    for (auto& q : gk.left_eyelid) take(q);
    for (auto& q : gk.right_eyelid) take(q);
    for (auto& q : gk.left_iris) take(q);
    for (auto& q : gk.right_iris) take(q);
    for (auto& q : gk.mouth) take(q);
    for (auto& q : gk.head_frame) take(q);
    return gk;
}

facekit::KeypointFrame toy_mesh_frame(const ToyFaceParams& p) {
    facekit::KeypointFrame frame;
    frame.image_width = kToyCanvas;
    frame.image_height = kToyCanvas;

    const ToyKeypoints66<double> kp = toy_keypoints66(p.v);
    for (int i = 0; i < 66; ++i) frame.points[i] = {kp.pts[i][0], kp.pts[i][1], kp.pts[i][2]};

    // Filler mesh: quasirandom rings inside the head ellipse, deterministic
    // and smooth in the parameters.
    const ToyGeometry<double> g = toy_geometry(p.v);
    for (int i = 66; i < facekit::kMeshPointCount; ++i) {
        const int m = i - 66;
        const double rho = 0.25 + 0.70 * std::fmod(m * 0.6180339887498949, 1.0);
        const double phi = 2.0 * std::numbers::pi * std::fmod(m * 0.7548776662466927, 1.0);
        frame.points[i] = {g.head_x + g.head_rx * rho * std::cos(phi),
                           g.head_y + g.head_ry * rho * std::sin(phi), 0.0};
    }
    return frame;
}

Image toy_render(const ToyFaceParams& p, bool invert_colors, bool tag_output,
                 const std::string& tag_id) {
    const ToyGeometry<double> g = toy_geometry(p.v);
    Image img(kToyCanvas, kToyCanvas);
    for (int y = 0; y < kToyCanvas; ++y)
        for (int x = 0; x < kToyCanvas; ++x) {
            double c[3];
            toy_shade(g, x + 0.5, y + 0.5, c);
            for (int ch = 0; ch < 3; ++ch) {
                const double v = invert_colors ? 1.0 - c[ch] : c[ch];
                img.at(x, y, ch) = static_cast<float>(v);
            }
        }
    if (tag_output) {
        GenTag tag;
        tag.backend_id = tag_id;
        tag.params.assign(p.v.begin(), p.v.end());
        img.tag = tag;
    }
    return img;
}

std::vector<double> toy_render_patch(const ToyFaceParams& p, int x0, int y0, int x1, int y1,
                                     bool invert_colors) {
    const ToyGeometry<double> g = toy_geometry(p.v);
    std::vector<double> out;
    out.reserve(static_cast<size_t>(x1 - x0) * (y1 - y0) * 3);
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) {
            double c[3];
            toy_shade(g, x + 0.5, y + 0.5, c);
            for (int ch = 0; ch < 3; ++ch) out.push_back(invert_colors ? 1.0 - c[ch] : c[ch]);
        }
    return out;
}

DualPatchRender toy_render_patch_dual(const ToyFaceParams& p, int x0, int y0, int x1, int y1,
                                      bool invert_colors) {
    const DualParams dp = seed_params(p);
    const ToyGeometry<Dual16> g = toy_geometry(dp);
    DualPatchRender out;
    out.x0 = x0;
    out.y0 = y0;
    out.width = x1 - x0;
    out.height = y1 - y0;
    const size_t n = static_cast<size_t>(out.width) * out.height * 3;
    out.value.reserve(n);
    out.tangent.reserve(n);
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) {
            Dual16 c[3];
            toy_shade(g, x + 0.5, y + 0.5, c);
            for (int ch = 0; ch < 3; ++ch) {
                if (invert_colors) {
                    out.value.push_back(1.0 - c[ch].v);
                    std::array<double, kToyParamCount> t = c[ch].d;
                    for (double& ti : t) ti = -ti;
                    out.tangent.push_back(t);
                } else {
                    out.value.push_back(c[ch].v);
                    out.tangent.push_back(c[ch].d);
                }
            }
        }
    return out;
}

template ToyGeometry<double> toy_geometry(const std::array<double, kToyParamCount>&);
template ToyGeometry<Dual16> toy_geometry(const std::array<Dual16, kToyParamCount>&);
template ToyKeypoints66<double> toy_keypoints66(const std::array<double, kToyParamCount>&);
template ToyKeypoints66<Dual16> toy_keypoints66(const std::array<Dual16, kToyParamCount>&);
template void toy_shade(const ToyGeometry<double>&, double, double, double[3]);
template void toy_shade(const ToyGeometry<Dual16>&, double, double, Dual16[3]);

} // namespace mimic::genbackend
