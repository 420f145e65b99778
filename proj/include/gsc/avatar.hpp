// Skeletons, poses, motion clips, multi-LoD avatar templates, forward
// kinematics and Linear Blend Skinning of Gaussian means.
#pragma once

#include "gsc/math.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace gsc {

// Joint hierarchy plus inverse bind transforms. Parents precede children;
// the single root has parent -1. Rigid bind transforms are required.
struct Skeleton {
    std::vector<int16_t> parents;
    std::vector<Mat4> inverse_bind;  // world -> joint at bind pose

    // Derived at construction: bind[j] = inverse_bind[j]^-1 and
    // local_bind[j] = bind[parent]^-1 * bind[j] (bind[root] for the root).
    std::vector<Mat4> bind;
    std::vector<Mat4> local_bind;

    uint32_t joint_count() const { return static_cast<uint32_t>(parents.size()); }

    // Validates invariants and fills the derived transforms.
    static Skeleton make(std::vector<int16_t> parents, std::vector<Mat4> inverse_bind);
};

struct Pose {
    Vec3 root_translation = Vec3::Zero();
    std::vector<Quat> local_rotations;  // one unit quaternion per joint
};

Pose bind_pose(uint32_t joint_count);

struct MotionClip {
    float fps = 30.0f;
    uint16_t joint_count = 0;
    std::vector<Pose> frames;

    float duration_s() const { return static_cast<float>(frames.size()) / fps; }
};

void validate(const MotionClip& clip);

// One template resolution: canonical Gaussians with fixed attributes plus
// 4-influence skinning data. All arrays have length gaussian_count.
struct LodLevel {
    std::vector<Vec3> means;
    std::vector<Quat> rotations;
    std::vector<Vec3> scales;
    std::vector<float> opacities;
    std::vector<Vec3> colors;
    std::vector<std::array<uint16_t, 4>> skin_indices;
    std::vector<std::array<float, 4>> skin_weights;

    // Cached world-space covariances of the canonical Gaussians, filled by
    // finalize(). Not serialized.
    std::vector<std::array<float, 6>> cov_cache;  // xx,xy,xz,yy,yz,zz

    uint32_t gaussian_count() const { return static_cast<uint32_t>(means.size()); }
    void finalize();
};

void validate(const LodLevel& level, uint32_t joint_count);

struct AvatarTemplate {
    uint32_t template_id = 0;
    Skeleton skeleton;
    std::vector<LodLevel> levels;  // strictly decreasing gaussian_count
};

void validate(const AvatarTemplate& tpl);

// world[j] = world[parent(j)] * local_bind[j] * R(pose.rotation[j]); the root
// additionally composes pose.root_translation and the given root transform.
std::vector<Mat4> forward_kinematics(const Skeleton& skel, const Pose& pose,
                                     const Mat4& root = Mat4::Identity());

// skin_matrices[j] = world[j] * inverse_bind[j]
std::vector<Mat4> compute_skin_matrices(std::span<const Mat4> world,
                                        std::span<const Mat4> inverse_bind);

// posed[i] = sum_k weight[i][k] * skin_matrices[index[i][k]] * means[i]
void skin_means(const LodLevel& level, std::span<const Mat4> skin_matrices,
                std::span<Vec3> posed_out);

std::vector<Vec3> skin_means(const LodLevel& level, std::span<const Mat4> world,
                             std::span<const Mat4> inverse_bind);

// Weight-blended rotation component of the skin matrices, applied to the
// template rotations. Used only when Gaussian orientation tracking is on.
void skin_rotations(const LodLevel& level, std::span<const Mat4> skin_matrices,
                    std::span<Quat> posed_out);

// Samples the clip at a time point. Linear interpolation for translation,
// shortest-arc slerp for rotations. wrap=true loops over the clip duration;
// wrap=false clamps to the last frame. Throws on an empty clip.
Pose sample_pose(const MotionClip& clip, float time_s, bool wrap);

Quat slerp_shortest(const Quat& a, const Quat& b, float t);

// Stand-in for avatar reconstruction: a deterministic humanoid built from
// Gaussian-sampled ellipsoid body parts rigged to an SMPL-style 24-joint
// hierarchy. level_counts must be strictly decreasing; every level covers the
// same silhouette with splat radius shrinking as the count grows.
AvatarTemplate generate_synthetic_template(uint64_t seed,
                                           std::span<const uint32_t> level_counts,
                                           uint32_t joint_count = 24);

// Deterministic walk-in-place cycle for the synthetic skeleton. Loops
// seamlessly; amplitudes vary with the seed.
MotionClip generate_synthetic_motion(uint64_t seed, uint32_t joint_count = 24,
                                     float fps = 30.0f, uint32_t frame_count = 60);

}  // namespace gsc
