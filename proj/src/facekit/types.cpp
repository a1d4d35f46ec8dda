#include "mimic/facekit/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

namespace mimic::facekit {

void KeypointFrame::validate() const {
    std::set<int> exempt(off_image.begin(), off_image.end());
    for (int i = 0; i < kMeshPointCount; ++i) {
        const Point3& p = points[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            raise(ErrorCode::ShapeMismatch, "non-finite keypoint " + std::to_string(i));
        if (exempt.count(i)) continue;
        if (p.x < 0 || p.x >= image_width || p.y < 0 || p.y >= image_height)
            raise(ErrorCode::ShapeMismatch,
                  "keypoint " + std::to_string(i) + " off image and not flagged");
    }
}

namespace {

template <size_t N>
void collect(const std::array<int, N>& group, const char* name, std::set<int>& seen) {
    for (int idx : group) {
        if (idx < 0 || idx >= kMeshPointCount)
            raise(ErrorCode::IndexOutOfRange,
                  std::string(name) + " index " + std::to_string(idx) + " outside [0, 468)");
        if (!seen.insert(idx).second)
            raise(ErrorCode::InvalidIndices,
                  std::string(name) + " index " + std::to_string(idx) + " repeats across groups");
    }
}

json table_groups_to_json(const KeypointIndexTable& t) {
    json j;
    j["left_eyelid"] = t.left_eyelid;
    j["right_eyelid"] = t.right_eyelid;
    j["left_iris"] = t.left_iris;
    j["right_iris"] = t.right_iris;
    j["mouth"] = t.mouth;
    j["head_frame"] = t.head_frame;
    if (!t.mouth_outer.empty()) j["mouth_outer"] = t.mouth_outer;
    return j;
}

} // namespace

void KeypointIndexTable::validate() const {
    std::set<int> seen;
    collect(left_eyelid, "left_eyelid", seen);
    collect(right_eyelid, "right_eyelid", seen);
    collect(left_iris, "left_iris", seen);
    collect(right_iris, "right_iris", seen);
    collect(mouth, "mouth", seen);
    collect(head_frame, "head_frame", seen);
    // 16+16+5+5+20+4 = 66, disjointness enforced above.
    for (int idx : mouth_outer)
        if (idx < 0 || idx >= kMeshPointCount)
            raise(ErrorCode::IndexOutOfRange, "mouth_outer index outside [0, 468)");
}

std::string KeypointIndexTable::to_json() const {
    json j;
    j["schema_version"] = 1;
    j["kind"] = "keypoint_index_table";
    j["groups"] = table_groups_to_json(*this);
    return j.dump(2);
}

KeypointIndexTable KeypointIndexTable::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        raise(ErrorCode::ConfigInvalid, "keypoint table parse failure: " + std::string(e.what()));
    }
    if (!j.contains("schema_version"))
        raise(ErrorCode::ConfigInvalid, "keypoint table missing schema_version");
    const json& g = j.at("groups");
    KeypointIndexTable t;
    auto fill = [&](const char* name, auto& arr) {
        const auto vec = g.at(name).get<std::vector<int>>();
        if (vec.size() != arr.size())
            raise(ErrorCode::ConfigInvalid,
                  std::string(name) + " must hold " + std::to_string(arr.size()) + " indices");
        std::copy(vec.begin(), vec.end(), arr.begin());
    };
    fill("left_eyelid", t.left_eyelid);
    fill("right_eyelid", t.right_eyelid);
    fill("left_iris", t.left_iris);
    fill("right_iris", t.right_iris);
    fill("mouth", t.mouth);
    fill("head_frame", t.head_frame);
    if (g.contains("mouth_outer")) t.mouth_outer = g.at("mouth_outer").get<std::vector<int>>();
    t.validate();
    return t;
}

const KeypointIndexTable& default_index_table() {
    static const KeypointIndexTable table = [] {
        KeypointIndexTable t;
        int next = 0;
        for (auto& i : t.left_eyelid) i = next++;
        for (auto& i : t.right_eyelid) i = next++;
        for (auto& i : t.left_iris) i = next++;
        for (auto& i : t.right_iris) i = next++;
        for (auto& i : t.mouth) i = next++;
        for (auto& i : t.head_frame) i = next++;
        t.mouth_outer.assign(t.mouth.begin(), t.mouth.end());
        t.validate();
        return t;
    }();
    return table;
}

const char* region_name(Region r) {
    switch (r) {
        case Region::mouth: return "mouth";
        case Region::left_eye: return "left_eye";
        case Region::right_eye: return "right_eye";
    }
    return "?";
}

namespace {

template <typename Desc>
std::array<Point3, 66> flatten_impl(const Desc& d) {
    std::array<Point3, 66> out;
    size_t k = 0;
    for (const auto& p : d.left_eyelid) out[k++] = p;
    for (const auto& p : d.right_eyelid) out[k++] = p;
    for (const auto& p : d.left_iris) out[k++] = p;
    for (const auto& p : d.right_iris) out[k++] = p;
    for (const auto& p : d.mouth) out[k++] = p;
    for (const auto& p : d.head_frame) out[k++] = p;
    return out;
}

} // namespace

std::array<Point3, 66> GroupedKeypoints::flatten() const { return flatten_impl(*this); }
std::array<Point3, 66> NormalizedKeypointDescriptor::flatten() const { return flatten_impl(*this); }

} // namespace mimic::facekit
