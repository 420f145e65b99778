// Scene configuration: everything the CLI needs to assemble a crowd scene.
#pragma once

#include "gsc/lod.hpp"
#include "gsc/math.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gsc {

struct GridConfig {
    uint32_t rows = 1;
    uint32_t cols = 1;
    float spacing_m = 1.0f;
};

struct CameraConfig {
    Vec3 position = Vec3(0.0f, 1.6f, -3.0f);
    Vec3 look_at = Vec3(0.0f, 1.0f, 1.0f);
    float fov_y_deg = 50.0f;
    uint32_t width = 1280;
    uint32_t height = 720;
    float near_m = 0.1f;

    Camera to_camera() const {
        return Camera::look_at(position, look_at, fov_y_deg, static_cast<int>(width),
                               static_cast<int>(height), near_m);
    }
};

struct SceneConfig {
    std::vector<std::string> template_paths;
    std::vector<std::string> motion_paths;
    GridConfig grid;
    CameraConfig camera;
    LodPolicy lod;
    uint32_t crowd_count = 1;
    uint64_t seed = 1;
    Vec3 background = Vec3::Zero();
    int tile_size = 16;
};

void validate(const SceneConfig& cfg);

}  // namespace gsc
