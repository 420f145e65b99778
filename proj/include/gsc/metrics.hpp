// Image quality metrics and the LoD quality sweep.
#pragma once

#include "gsc/avatar.hpp"
#include "gsc/renderer.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gsc {

// 10*log10(1 / MSE) over all channels in linear float space. Identical
// images return the 99 dB cap. Throws on dimension mismatch.
float psnr(const Framebuffer& a, const Framebuffer& b);

struct QualityRow {
    float distance_m = 0.0f;
    uint32_t level = 0;
    uint32_t gaussian_count = 0;
    float psnr_db = 0.0f;
};

using QualityTable = std::vector<QualityRow>;

// Renders a single bind-posed character once per (distance, level) with the
// camera aimed at mid height; each level is compared against the finest
// level's render at the same distance. Requires >= 2 levels.
QualityTable lod_quality_sweep(const AvatarTemplate& tpl, std::span<const float> distances_m,
                               const Camera& camera_prototype, const RenderSettings& settings);

}  // namespace gsc
