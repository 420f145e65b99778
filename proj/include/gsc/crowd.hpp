// Crowd construction, shared-attribute instancing, per-frame animation
// update, and byte-exact memory accounting for the instancing scheme.
#pragma once

#include "gsc/avatar.hpp"
#include "gsc/lod.hpp"
#include "gsc/scene.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace gsc {

constexpr uint32_t kLodUnset = 0xffffffffu;

struct CrowdInstance {
    uint32_t instance_id = 0;
    uint32_t template_id = 0;
    uint32_t motion_id = 0;
    float x = 0.0f, z = 0.0f, yaw = 0.0f;  // rigid 2D placement, lifted to 3D
    float phase_offset_s = 0.0f;
    uint32_t active_lod = kLodUnset;

    // Owned per-frame output of the skinning stage. Sized to the active LoD;
    // capacity follows the high-water mark so LoD switches don't churn.
    std::vector<Vec3> posed_means;
    std::vector<Quat> posed_rotations;  // filled only when rotation skinning is on

    Mat4 root_transform() const;
    // True once posed_means is valid for the current (lod, mode); lets the
    // static path skip recomputation frame over frame.
    bool posed_valid = false;
};

using TemplateStore = std::vector<AvatarTemplate>;
using MotionStore = std::vector<MotionClip>;

struct Crowd {
    std::shared_ptr<const TemplateStore> templates;
    std::shared_ptr<const MotionStore> motions;
    std::vector<CrowdInstance> instances;
    LodPolicy lod;
};

// Places instances on the grid (row-major cell order) with seeded jitter, a
// seeded template/motion assignment, yaw, and a motion phase offset.
// Deterministic for a given seed. Throws when the grid is too small or an
// asset list is empty.
Crowd build_crowd(const SceneConfig& cfg, std::shared_ptr<const TemplateStore> templates,
                  std::shared_ptr<const MotionStore> motions, uint64_t seed);

struct UpdateOptions {
    float time_s = 0.0f;
    bool static_pose = false;             // bind pose, no motion sampling
    std::optional<uint32_t> forced_lod;   // pin the LoD level (quality sweeps, bench)
    bool skin_rotations = false;          // also pose the Gaussian orientations
    int thread_count = 0;
};

// Re-selects each instance's LoD from camera distance, samples its motion,
// runs FK + LBS on the active level and applies the root placement.
void update_crowd(Crowd& crowd, const Camera& camera, const UpdateOptions& opts);

// Byte sizes per Gaussian for each attribute channel. The posed-mean channel
// equals the mean channel: that is the only per-instance data the shared
// layout keeps.
struct MemoryLayoutModel {
    uint32_t mean_bytes = 12;
    uint32_t rotation_bytes = 16;
    uint32_t scale_bytes = 12;
    uint32_t opacity_bytes = 4;
    uint32_t color_bytes = 12;
    uint32_t skin_index_bytes = 8;
    uint32_t skin_weight_bytes = 16;
    uint64_t fixed_overhead_bytes = 0;

    uint32_t template_bytes_per_gaussian() const {
        return mean_bytes + rotation_bytes + scale_bytes + opacity_bytes + color_bytes +
               skin_index_bytes + skin_weight_bytes;
    }
    uint32_t posed_bytes_per_gaussian() const { return mean_bytes; }
};

void validate(const MemoryLayoutModel& model);

struct ChannelBreakdown {
    uint64_t mean = 0, rotation = 0, scale = 0, opacity = 0, color = 0;
    uint64_t skin_indices = 0, skin_weights = 0;
};

struct MemoryReport {
    uint64_t naive_bytes = 0;
    uint64_t shared_bytes = 0;
    double savings_fraction = 0.0;  // 1 - shared/naive
    double naive_marginal_bytes_per_instance = 0.0;
    double shared_marginal_bytes_per_instance = 0.0;
    uint64_t resident_template_bytes = 0;  // charged in both modes
    uint64_t fixed_overhead_bytes = 0;
    ChannelBreakdown resident_channels;
    uint64_t posed_mean_bytes = 0;  // per-instance total, shared mode
    uint64_t instance_count = 0;
};

// Accounting for the crowd as updated: residents are the (template, level)
// pairs referenced by at least one instance's active LoD. Both modes charge
// the resident store once; the naive mode duplicates every channel per
// instance while the shared mode adds only posed means.
MemoryReport memory_report(const Crowd& crowd, const MemoryLayoutModel& model);

// Single-cell form used for Table-style grids: `instances` characters all
// resident on one level of `gaussians` Gaussians.
MemoryReport memory_report_cell(uint64_t instances, uint64_t gaussians,
                                const MemoryLayoutModel& model);

}  // namespace gsc
