#include "mimic/pipeline/pipeline.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

namespace mimic::pipeline {

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key))
            raise(ErrorCode::ConfigInvalid, "unknown config key '" + key + "' in " + where);
}

} // namespace

json RunConfig::to_json() const {
    json j;
    j["schema_version"] = 1;
    j["seed"] = seed;
    j["canonical_resolution"] = canonical_resolution;
    j["cache_root"] = cache_root;
    j["keypoint_table"] = keypoint_table_path;
    j["backends"] = {{"generator", backends.generator},
                     {"keypoints", backends.keypoints},
                     {"distance", backends.distance},
                     {"features", backends.features},
                     {"embeddings", backends.embeddings}};
    j["scan_select"] = {{"n", scan_select.n},
                        {"decimation_threshold", scan_select.decimation_threshold}};
    j["alignment"] = {{"sigma", alignment.sigma},
                      {"max_gap", alignment.max_gap},
                      {"max_rotation_jump", alignment.max_rotation_jump},
                      {"eye_extent", alignment.eye_extent},
                      {"mouth_extent", alignment.mouth_extent},
                      {"center_shift", alignment.center_shift}};
    j["space"] = {{"beta", space.beta}, {"sharpness", space.sharpness}};
    j["personalize"] = {{"steps", personalize.steps},
                        {"step_size", personalize.step_size},
                        {"inversion_steps", personalize.inversion_steps},
                        {"inversion_step_size", personalize.inversion_step_size}};
    j["reenact"] = reenact.to_json();
    j["video"] = {{"fps", fps}};
    j["evaluate"] = {{"top_k", eval_top_k}};
    return j;
}

RunConfig RunConfig::from_json(const json& j) {
    reject_unknown(j, {"schema_version", "seed", "canonical_resolution", "cache_root",
                       "keypoint_table", "backends", "scan_select", "alignment", "space",
                       "personalize", "reenact", "video", "evaluate"},
                   "config root");
    if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1)
        raise(ErrorCode::ConfigInvalid, "config schema_version must be 1");

    RunConfig c;
    c.seed = j.value("seed", c.seed);
    c.canonical_resolution = j.value("canonical_resolution", c.canonical_resolution);
    c.cache_root = j.value("cache_root", c.cache_root);
    c.keypoint_table_path = j.value("keypoint_table", c.keypoint_table_path);

    if (j.contains("backends")) {
        const json& b = j.at("backends");
        reject_unknown(b, {"generator", "keypoints", "distance", "features", "embeddings"},
                       "backends");
        c.backends.generator = b.value("generator", c.backends.generator);
        c.backends.keypoints = b.value("keypoints", c.backends.keypoints);
        c.backends.distance = b.value("distance", c.backends.distance);
        c.backends.features = b.value("features", c.backends.features);
        c.backends.embeddings = b.value("embeddings", c.backends.embeddings);
    }
    if (j.contains("scan_select")) {
        const json& s = j.at("scan_select");
        reject_unknown(s, {"n", "decimation_threshold"}, "scan_select");
        c.scan_select.n = s.value("n", c.scan_select.n);
        c.scan_select.decimation_threshold =
            s.value("decimation_threshold", c.scan_select.decimation_threshold);
    }
    if (j.contains("alignment")) {
        const json& a = j.at("alignment");
        reject_unknown(a, {"sigma", "max_gap", "max_rotation_jump", "eye_extent", "mouth_extent",
                           "center_shift"},
                       "alignment");
        c.alignment.sigma = a.value("sigma", c.alignment.sigma);
        c.alignment.max_gap = a.value("max_gap", c.alignment.max_gap);
        c.alignment.max_rotation_jump = a.value("max_rotation_jump", c.alignment.max_rotation_jump);
        c.alignment.eye_extent = a.value("eye_extent", c.alignment.eye_extent);
        c.alignment.mouth_extent = a.value("mouth_extent", c.alignment.mouth_extent);
        c.alignment.center_shift = a.value("center_shift", c.alignment.center_shift);
    }
    if (j.contains("space")) {
        const json& s = j.at("space");
        reject_unknown(s, {"beta", "sharpness"}, "space");
        c.space.beta = s.value("beta", c.space.beta);
        c.space.sharpness = s.value("sharpness", c.space.sharpness);
    }
    if (j.contains("personalize")) {
        const json& p = j.at("personalize");
        reject_unknown(p, {"steps", "step_size", "inversion_steps", "inversion_step_size"},
                       "personalize");
        c.personalize.steps = p.value("steps", c.personalize.steps);
        c.personalize.step_size = p.value("step_size", c.personalize.step_size);
        c.personalize.inversion_steps = p.value("inversion_steps", c.personalize.inversion_steps);
        c.personalize.inversion_step_size =
            p.value("inversion_step_size", c.personalize.inversion_step_size);
    }
    if (j.contains("reenact")) {
        const json& r = j.at("reenact");
        reject_unknown(r, {"lambda_mouth", "lambda_eyes", "lambda_delta", "lambda_sum", "steps",
                           "step_size", "sigma_init", "sigma_traj", "seed", "absolute_keypoints"},
                       "reenact");
        json merged = c.reenact.to_json();
        merged.update(r);
        c.reenact = reenact::ReenactmentConfig::from_json(merged);
    }
    if (j.contains("video")) {
        reject_unknown(j.at("video"), {"fps"}, "video");
        c.fps = j.at("video").value("fps", c.fps);
    }
    if (j.contains("evaluate")) {
        reject_unknown(j.at("evaluate"), {"top_k"}, "evaluate");
        c.eval_top_k = j.at("evaluate").value("top_k", c.eval_top_k);
    }

    if (c.canonical_resolution <= 0) raise(ErrorCode::ConfigInvalid, "bad canonical resolution");
    if (c.scan_select.n < 2) raise(ErrorCode::ConfigInvalid, "scan_select.n must be >= 2");
    c.reenact.validate();
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::MissingArtifact, "missing config: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const std::exception& e) {
        raise(ErrorCode::ConfigInvalid, "config parse failure: " + std::string(e.what()));
    }
    return from_json(j);
}

std::filesystem::path RunConfig::resolved_cache_root() const {
    if (!cache_root.empty()) return cache_root;
    if (const char* env = std::getenv("REENACT_CACHE"); env && *env) return env;
    return "reenact_cache";
}

facekit::KeypointIndexTable RunConfig::resolved_table() const {
    if (keypoint_table_path.empty()) return facekit::default_index_table();
    std::ifstream in(keypoint_table_path);
    if (!in) raise(ErrorCode::MissingArtifact, "missing keypoint table: " + keypoint_table_path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return facekit::KeypointIndexTable::from_json(text);
}

} // namespace mimic::pipeline
