#include "gsc/lod.hpp"

#include <cmath>
#include <stdexcept>

namespace gsc {

void validate(const LodPolicy& policy) {
    for (size_t i = 0; i < policy.thresholds_m.size(); ++i) {
        if (!std::isfinite(policy.thresholds_m[i]) || policy.thresholds_m[i] <= 0.0f) {
            throw std::invalid_argument("LodPolicy: thresholds must be positive and finite");
        }
        if (i > 0 && policy.thresholds_m[i] <= policy.thresholds_m[i - 1]) {
            throw std::invalid_argument("LodPolicy: thresholds must be strictly ascending");
        }
    }
    if (!(policy.hysteresis_band_m >= 0.0f)) {
        throw std::invalid_argument("LodPolicy: hysteresis band must be >= 0");
    }
}

uint32_t select_lod(const LodPolicy& policy, float distance_m,
                    std::optional<uint32_t> previous_level) {
    const size_t bounds = policy.thresholds_m.size();
    for (size_t k = 0; k < bounds; ++k) {
        float t = policy.thresholds_m[k];
        if (previous_level && policy.hysteresis_band_m > 0.0f) {
            // Shift the boundary so leaving the previous level takes band/2
            // more distance than the plain policy would require.
            t += (k >= *previous_level ? 0.5f : -0.5f) * policy.hysteresis_band_m;
        }
        if (distance_m < t) {
            return static_cast<uint32_t>(k);
        }
    }
    return static_cast<uint32_t>(bounds);
}

float instance_distance(const Vec3& instance_root_position, const Vec3& camera_position) {
    return (instance_root_position - camera_position).norm();
}

}  // namespace gsc
