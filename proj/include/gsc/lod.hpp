// Distance-based Level-of-Detail selection.
#pragma once

#include "gsc/math.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace gsc {

// Ascending distance thresholds; level i covers [t[i-1], t[i]). A boundary
// belongs to the coarser level. The optional hysteresis band shifts the
// boundary toward the previously held level by band/2 so a static distance
// at a threshold cannot oscillate.
struct LodPolicy {
    std::vector<float> thresholds_m = {5.0f, 10.0f};
    float hysteresis_band_m = 0.0f;

    uint32_t level_count() const { return static_cast<uint32_t>(thresholds_m.size()) + 1; }
};

void validate(const LodPolicy& policy);

uint32_t select_lod(const LodPolicy& policy, float distance_m,
                    std::optional<uint32_t> previous_level = std::nullopt);

float instance_distance(const Vec3& instance_root_position, const Vec3& camera_position);

}  // namespace gsc
