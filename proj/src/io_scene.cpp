#include "gsc/io.hpp"

#include <json.hpp>

#include <fstream>
#include <iostream>
#include <set>

namespace gsc {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) {
    throw FormatError(FormatErrorKind::InvariantViolation, "scene config: " + msg);
}

Vec3 read_vec3(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number()) {
        bad("'" + key + "' must be an array of 3 numbers");
    }
    return Vec3(j[0].get<float>(), j[1].get<float>(), j[2].get<float>());
}

void warn_unknown(const json& obj, const std::set<std::string>& known,
                  const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (!known.count(key)) {
            std::cerr << "warning: unknown scene config key '" << where << key << "'\n";
        }
    }
}

}  // namespace

SceneConfig load_scene_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError(FormatErrorKind::IoError, "cannot open scene config: " + path.string());
    }
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(FormatErrorKind::InvariantViolation,
                          std::string("scene config: ") + e.what());
    }
    if (!root.is_object()) bad("top level must be an object");
    warn_unknown(root, {"templates", "motions", "grid", "camera", "lod", "crowd", "render"},
                 "");

    SceneConfig cfg;
    const std::filesystem::path base = path.parent_path();
    auto resolve = [&](const std::string& p) {
        const std::filesystem::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).string();
    };

    if (!root.contains("templates") || !root["templates"].is_array() ||
        root["templates"].empty()) {
        bad("required key 'templates' must be a non-empty array of paths");
    }
    for (const auto& t : root["templates"]) {
        if (!t.is_string()) bad("'templates' entries must be strings");
        cfg.template_paths.push_back(resolve(t.get<std::string>()));
    }
    if (!root.contains("motions") || !root["motions"].is_array() || root["motions"].empty()) {
        bad("required key 'motions' must be a non-empty array of paths");
    }
    for (const auto& m : root["motions"]) {
        if (!m.is_string()) bad("'motions' entries must be strings");
        cfg.motion_paths.push_back(resolve(m.get<std::string>()));
    }

    if (!root.contains("grid") || !root["grid"].is_object()) {
        bad("required key 'grid' must be an object");
    }
    const json& grid = root["grid"];
    warn_unknown(grid, {"rows", "cols", "spacing_m"}, "grid.");
    if (!grid.contains("rows") || !grid.contains("cols")) bad("grid needs 'rows' and 'cols'");
    if (!grid["rows"].is_number_unsigned() || !grid["cols"].is_number_unsigned()) {
        bad("grid rows/cols must be non-negative integers");
    }
    cfg.grid.rows = grid["rows"].get<uint32_t>();
    cfg.grid.cols = grid["cols"].get<uint32_t>();
    cfg.grid.spacing_m = grid.value("spacing_m", 1.0f);

    if (!root.contains("camera") || !root["camera"].is_object()) {
        bad("required key 'camera' must be an object");
    }
    const json& cam = root["camera"];
    warn_unknown(cam, {"position", "look_at", "fov_y_deg", "width", "height", "near_m"},
                 "camera.");
    if (!cam.contains("position") || !cam.contains("look_at")) {
        bad("camera needs 'position' and 'look_at'");
    }
    cfg.camera.position = read_vec3(cam["position"], "camera.position");
    cfg.camera.look_at = read_vec3(cam["look_at"], "camera.look_at");
    cfg.camera.fov_y_deg = cam.value("fov_y_deg", 50.0f);
    cfg.camera.width = cam.value("width", 1280u);
    cfg.camera.height = cam.value("height", 720u);
    cfg.camera.near_m = cam.value("near_m", 0.1f);

    if (root.contains("lod")) {
        if (!root["lod"].is_object()) bad("'lod' must be an object");
        const json& lod = root["lod"];
        warn_unknown(lod, {"thresholds_m", "hysteresis_m"}, "lod.");
        if (lod.contains("thresholds_m")) {
            if (!lod["thresholds_m"].is_array()) bad("lod.thresholds_m must be an array");
            cfg.lod.thresholds_m.clear();
            for (const auto& t : lod["thresholds_m"]) {
                if (!t.is_number()) bad("lod.thresholds_m entries must be numbers");
                cfg.lod.thresholds_m.push_back(t.get<float>());
            }
        }
        cfg.lod.hysteresis_band_m = lod.value("hysteresis_m", 0.0f);
    }

    if (!root.contains("crowd") || !root["crowd"].is_object()) {
        bad("required key 'crowd' must be an object");
    }
    const json& crowd = root["crowd"];
    warn_unknown(crowd, {"count", "seed"}, "crowd.");
    if (!crowd.contains("count") || !crowd["count"].is_number_unsigned()) {
        bad("crowd.count must be a non-negative integer");
    }
    cfg.crowd_count = crowd["count"].get<uint32_t>();
    cfg.seed = crowd.value("seed", 1ull);

    if (root.contains("render")) {
        if (!root["render"].is_object()) bad("'render' must be an object");
        const json& render = root["render"];
        warn_unknown(render, {"background_rgb", "tile_size"}, "render.");
        if (render.contains("background_rgb")) {
            cfg.background = read_vec3(render["background_rgb"], "render.background_rgb");
        }
        cfg.tile_size = render.value("tile_size", 16);
    }

    try {
        validate(cfg);
    } catch (const std::invalid_argument& e) {
        throw FormatError(FormatErrorKind::InvariantViolation,
                          std::string("scene config: ") + e.what());
    }
    return cfg;
}

}  // namespace gsc
