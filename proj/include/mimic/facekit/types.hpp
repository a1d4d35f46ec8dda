#pragma once

#include <array>
#include <string>
#include <vector>

#include "mimic/core/error.hpp"
#include "mimic/core/image.hpp"

namespace mimic::facekit {

inline constexpr int kMeshPointCount = 468;

struct Point3 {
    double x = 0, y = 0, z = 0;
};

inline Point3 operator-(const Point3& a, const Point3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Point3 operator+(const Point3& a, const Point3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }

// Raw mesh keypoints for one image. x, y in image pixels, z backend-scaled.
// Points allowed outside the image must be flagged in `off_image`.
struct KeypointFrame {
    std::array<Point3, kMeshPointCount> points{};
    int image_width = 0;
    int image_height = 0;
    std::vector<int> off_image; // indices exempt from the in-bounds invariant

    void validate() const;
};

// Index map from the 468-point mesh to the 66-point descriptor.
// The five relative groups plus the absolute head frame; sizes fixed.
struct KeypointIndexTable {
    std::array<int, 16> left_eyelid{};
    std::array<int, 16> right_eyelid{};
    std::array<int, 5> left_iris{};
    std::array<int, 5> right_iris{};
    std::array<int, 20> mouth{};
    std::array<int, 4> head_frame{};
    // Outer-lip variant kept alongside the mouth group; loaded and saved but
    // not consumed by default (crops follow the configured mouth group).
    std::vector<int> mouth_outer;

    void validate() const;

    std::string to_json() const;
    static KeypointIndexTable from_json(const std::string& text);
};

// The shipped default table: the toy mesh places the 66 descriptor points
// at the head of the mesh in group order.
const KeypointIndexTable& default_index_table();

enum class Region { mouth, left_eye, right_eye };
const char* region_name(Region r);

// The 66 selected points, one list per facial part, image-pixel coordinates.
struct GroupedKeypoints {
    std::array<Point3, 16> left_eyelid{};
    std::array<Point3, 16> right_eyelid{};
    std::array<Point3, 5> left_iris{};
    std::array<Point3, 5> right_iris{};
    std::array<Point3, 20> mouth{};
    std::array<Point3, 4> head_frame{};

    // Flattened view in canonical group order (66 points).
    std::array<Point3, 66> flatten() const;
};

// Per-part zero-mean coordinates for the five relative groups; the head
// frame keeps its absolute coordinates.
struct NormalizedKeypointDescriptor {
    std::array<Point3, 16> left_eyelid{};
    std::array<Point3, 16> right_eyelid{};
    std::array<Point3, 5> left_iris{};
    std::array<Point3, 5> right_iris{};
    std::array<Point3, 20> mouth{};
    std::array<Point3, 4> head_frame{};

    std::array<Point3, 66> flatten() const;
};

struct RegionCrop {
    Region region = Region::mouth;
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0; // half-open pixel bounds
    Patch pixels;
};

} // namespace mimic::facekit
