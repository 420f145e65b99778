#include "gsc/avatar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace gsc {

namespace {

// mt19937 is fully specified by the standard; only raw draws are used so the
// stream is identical on every platform.
struct Rng {
    std::mt19937 gen;
    explicit Rng(uint64_t seed)
        : gen(static_cast<uint32_t>(seed ^ (seed >> 32)) * 2654435761u + 0x9E3779B9u) {}
    float uniform() { return static_cast<float>(gen() >> 8) * 0x1.0p-24f; }  // [0,1)
    float range(float lo, float hi) { return lo + (hi - lo) * uniform(); }
    uint32_t index(uint32_t n) { return static_cast<uint32_t>(uniform() * static_cast<float>(n)); }
    float gauss() {
        const float u1 = std::max(uniform(), 1e-7f);
        const float u2 = uniform();
        return std::sqrt(-2.0f * std::log(u1)) * std::cos(6.28318530718f * u2);
    }
    Vec3 gauss3() { return Vec3(gauss(), gauss(), gauss()); }
};

struct JointDef {
    int16_t parent;
    Vec3 pos;  // bind position, y up, character facing -z
};

// SMPL-style joint order: pelvis, hips, spine chain, knees, ankles, feet,
// neck, collars, head, shoulders, elbows, wrists, hands.
const JointDef kHumanoidJoints[24] = {
    {-1, {0.00f, 0.95f, 0.00f}},   // 0  pelvis
    {0, {0.09f, 0.90f, 0.00f}},    // 1  hip L
    {0, {-0.09f, 0.90f, 0.00f}},   // 2  hip R
    {0, {0.00f, 1.05f, 0.00f}},    // 3  spine1
    {1, {0.10f, 0.50f, 0.00f}},    // 4  knee L
    {2, {-0.10f, 0.50f, 0.00f}},   // 5  knee R
    {3, {0.00f, 1.16f, 0.00f}},    // 6  spine2
    {4, {0.11f, 0.09f, 0.00f}},    // 7  ankle L
    {5, {-0.11f, 0.09f, 0.00f}},   // 8  ankle R
    {6, {0.00f, 1.27f, 0.00f}},    // 9  spine3
    {7, {0.12f, 0.03f, -0.10f}},   // 10 foot L
    {8, {-0.12f, 0.03f, -0.10f}},  // 11 foot R
    {9, {0.00f, 1.42f, 0.00f}},    // 12 neck
    {9, {0.07f, 1.38f, 0.00f}},    // 13 collar L
    {9, {-0.07f, 1.38f, 0.00f}},   // 14 collar R
    {12, {0.00f, 1.53f, 0.00f}},   // 15 head
    {13, {0.19f, 1.39f, 0.00f}},   // 16 shoulder L
    {14, {-0.19f, 1.39f, 0.00f}},  // 17 shoulder R
    {16, {0.27f, 1.10f, 0.00f}},   // 18 elbow L
    {17, {-0.27f, 1.10f, 0.00f}},  // 19 elbow R
    {18, {0.32f, 0.84f, 0.00f}},   // 20 wrist L
    {19, {-0.32f, 0.84f, 0.00f}},  // 21 wrist R
    {20, {0.34f, 0.72f, 0.00f}},   // 22 hand L
    {21, {-0.34f, 0.72f, 0.00f}},  // 23 hand R
};

enum ColorRole { kShirt = 0, kPants, kSkin };

struct PartDef {
    Vec3 a, b;          // segment endpoints
    float radius;       // lateral semi-axis
    float radius_z;     // depth semi-axis
    float tip_extend;   // fraction of length added past b (covers hands/feet)
    int driver;         // joint that skins the bulk of the part
    int blend_in;       // joint blended near the a end, -1 none
    int blend_out;      // joint blended near the b end, -1 none
    ColorRole role;
    bool spine_chain;   // torso: weights interpolated along the spine joints
};

const PartDef kParts[] = {
    // torso
    {{0, 0.88f, 0}, {0, 1.44f, 0}, 0.155f, 0.095f, 0.0f, 9, -1, -1, kShirt, true},
    // head
    {{0, 1.47f, 0}, {0, 1.70f, 0}, 0.085f, 0.095f, 0.0f, 15, 12, -1, kSkin, false},
    // thighs
    {{0.09f, 0.90f, 0}, {0.10f, 0.50f, 0}, 0.072f, 0.072f, 0.0f, 1, 0, 4, kPants, false},
    {{-0.09f, 0.90f, 0}, {-0.10f, 0.50f, 0}, 0.072f, 0.072f, 0.0f, 2, 0, 5, kPants, false},
    // shins (extended to cover the feet)
    {{0.10f, 0.50f, 0}, {0.11f, 0.09f, 0}, 0.050f, 0.050f, 0.12f, 4, 1, 7, kPants, false},
    {{-0.10f, 0.50f, 0}, {-0.11f, 0.09f, 0}, 0.050f, 0.050f, 0.12f, 5, 2, 8, kPants, false},
    // upper arms
    {{0.19f, 1.39f, 0}, {0.27f, 1.10f, 0}, 0.045f, 0.045f, 0.0f, 16, 13, 18, kShirt, false},
    {{-0.19f, 1.39f, 0}, {-0.27f, 1.10f, 0}, 0.045f, 0.045f, 0.0f, 17, 14, 19, kShirt, false},
    // forearms (extended to cover the hands)
    {{0.27f, 1.10f, 0}, {0.32f, 0.84f, 0}, 0.038f, 0.038f, 0.25f, 18, 16, 20, kSkin, false},
    {{-0.27f, 1.10f, 0}, {-0.32f, 0.84f, 0}, 0.038f, 0.038f, 0.25f, 19, 17, 21, kSkin, false},
};
constexpr size_t kPartCount = sizeof(kParts) / sizeof(kParts[0]);

// Spine joints used for torso weights, bottom to top.
const int kSpineJoints[] = {0, 3, 6, 9, 12};
const float kSpineHeights[] = {0.95f, 1.05f, 1.16f, 1.27f, 1.42f};

// Thomsen approximation of the ellipsoid surface area.
float ellipsoid_area(float a, float b, float c) {
    const float p = 1.6075f;
    const float s = (std::pow(a * b, p) + std::pow(a * c, p) + std::pow(b * c, p)) / 3.0f;
    return 4.0f * 3.14159265f * std::pow(s, 1.0f / p);
}

uint16_t clamp_joint(int joint, uint32_t joint_count) {
    while (joint >= 0 && static_cast<uint32_t>(joint) >= joint_count) {
        joint = kHumanoidJoints[joint < 24 ? joint : 23].parent;
    }
    return static_cast<uint16_t>(std::max(joint, 0));
}

Vec3 hsv_to_rgb(float h, float s, float v) {
    const float c = v * s;
    const float hp = h * 6.0f;
    const float x = c * (1.0f - std::abs(std::fmod(hp, 2.0f) - 1.0f));
    Vec3 rgb;
    if (hp < 1) rgb = Vec3(c, x, 0);
    else if (hp < 2) rgb = Vec3(x, c, 0);
    else if (hp < 3) rgb = Vec3(0, c, x);
    else if (hp < 4) rgb = Vec3(0, x, c);
    else if (hp < 5) rgb = Vec3(x, 0, c);
    else rgb = Vec3(c, 0, x);
    return rgb + Vec3::Constant(v - c);
}

Skeleton make_humanoid_skeleton(uint32_t joint_count) {
    std::vector<int16_t> parents(joint_count);
    std::vector<Mat4> inv_bind(joint_count);
    for (uint32_t j = 0; j < joint_count; ++j) {
        Vec3 pos;
        if (j < 24) {
            parents[j] = kHumanoidJoints[j].parent;
            pos = kHumanoidJoints[j].pos;
        } else {
            parents[j] = static_cast<int16_t>(j - 1);  // chain off the last hand
            pos = kHumanoidJoints[23].pos + Vec3(0.0f, -0.02f * static_cast<float>(j - 23), 0.0f);
        }
        Mat4 ib = Mat4::Identity();
        ib.topRightCorner<3, 1>() = -pos;
        inv_bind[j] = ib;
    }
    return Skeleton::make(std::move(parents), std::move(inv_bind));
}

void part_weights(const PartDef& part, const Vec3& p, float t, uint32_t joint_count,
                  std::array<uint16_t, 4>& idx, std::array<float, 4>& w) {
    idx = {0, 0, 0, 0};
    w = {0.0f, 0.0f, 0.0f, 0.0f};
    if (part.spine_chain) {
        // Interpolate between the two bracketing spine joints by height.
        const float y = p.y();
        int seg = 0;
        while (seg < 3 && y > kSpineHeights[seg + 1]) ++seg;
        const float lo = kSpineHeights[seg], hi = kSpineHeights[seg + 1];
        const float s = std::clamp((y - lo) / (hi - lo), 0.0f, 1.0f);
        idx[0] = clamp_joint(kSpineJoints[seg], joint_count);
        idx[1] = clamp_joint(kSpineJoints[seg + 1], joint_count);
        w[0] = 1.0f - s;
        w[1] = s;
    } else {
        const float zone = 0.18f;
        float w_in = 0.0f, w_out = 0.0f;
        if (part.blend_in >= 0) {
            w_in = std::clamp((zone - t) / (2.0f * zone), 0.0f, 0.5f);
        }
        if (part.blend_out >= 0) {
            w_out = std::clamp((t - (1.0f - zone)) / (2.0f * zone), 0.0f, 1.0f);
        }
        idx[0] = clamp_joint(part.driver, joint_count);
        idx[1] = clamp_joint(part.blend_in >= 0 ? part.blend_in : part.driver, joint_count);
        idx[2] = clamp_joint(part.blend_out >= 0 ? part.blend_out : part.driver, joint_count);
        w[0] = 1.0f - w_in - w_out;
        w[1] = w_in;
        w[2] = w_out;
    }
    // Renormalize so the stored weights sum to 1 exactly up to float rounding.
    float sum = w[0] + w[1] + w[2] + w[3];
    for (float& x : w) x /= sum;
}

LodLevel generate_level(uint32_t count, uint32_t joint_count, Rng& rng,
                        const Vec3 part_colors[kPartCount]) {
    // Split the budget across parts proportionally to surface area.
    float areas[kPartCount];
    float total_area = 0.0f;
    for (size_t i = 0; i < kPartCount; ++i) {
        const PartDef& part = kParts[i];
        const float len = (part.b - part.a).norm() * (1.0f + part.tip_extend);
        areas[i] = ellipsoid_area(part.radius, part.radius_z, 0.5f * len + 0.6f * part.radius);
        total_area += areas[i];
    }
    uint32_t part_n[kPartCount];
    float fracs[kPartCount];
    uint32_t assigned = 0;
    for (size_t i = 0; i < kPartCount; ++i) {
        const float exact = static_cast<float>(count) * areas[i] / total_area;
        part_n[i] = static_cast<uint32_t>(exact);
        fracs[i] = exact - static_cast<float>(part_n[i]);
        assigned += part_n[i];
    }
    while (assigned < count) {  // hand out the rounding remainder
        size_t best = 0;
        for (size_t i = 1; i < kPartCount; ++i) {
            if (fracs[i] > fracs[best]) best = i;
        }
        ++part_n[best];
        fracs[best] = -1.0f;
        ++assigned;
    }

    LodLevel level;
    level.means.reserve(count);
    level.rotations.reserve(count);
    level.scales.reserve(count);
    level.opacities.reserve(count);
    level.colors.reserve(count);
    level.skin_indices.reserve(count);
    level.skin_weights.reserve(count);

    for (size_t pi = 0; pi < kPartCount; ++pi) {
        const PartDef& part = kParts[pi];
        if (part_n[pi] == 0) continue;

        const Vec3 seg = part.b - part.a;
        const float seg_len = seg.norm();
        const Vec3 axis = seg / seg_len;
        const Vec3 tip = part.b + axis * (seg_len * part.tip_extend);
        const Vec3 center = 0.5f * (part.a + tip);
        const float half_len = 0.5f * (tip - part.a).norm() + 0.6f * part.radius;

        // Local orthonormal frame with w along the segment.
        Vec3 u = std::abs(axis.y()) < 0.9f ? Vec3(0, 1, 0).cross(axis).normalized()
                                           : Vec3(1, 0, 0).cross(axis).normalized();
        Vec3 v = axis.cross(u);

        // Tangential splat sigma keeps silhouette coverage roughly constant:
        // each splat owns area/4 of the part, with generous overlap.
        const float sigma_t = std::min(
            0.42f * std::sqrt(areas[pi] / static_cast<float>(part_n[pi])),
            0.8f * std::min({part.radius, part.radius_z, half_len}));

        for (uint32_t k = 0; k < part_n[pi]; ++k) {
            Vec3 d = rng.gauss3();
            const float n = d.norm();
            d = n > 1e-6f ? Vec3(d / n) : Vec3(0, 0, 1);

            const Vec3 p = center + (part.radius * d.x()) * u + (part.radius_z * d.y()) * v +
                           (half_len * d.z()) * axis;
            Vec3 normal = (d.x() / part.radius) * u + (d.y() / part.radius_z) * v +
                          (d.z() / half_len) * axis;
            normal.normalize();

            const float s_t = sigma_t * rng.range(0.85f, 1.15f);
            const Vec3 scale(s_t, s_t, 0.35f * s_t);
            const Quat rot = Quat::FromTwoVectors(Vec3(0, 0, 1), normal).normalized();

            const float t = std::clamp(seg_len > 1e-6f ? (p - part.a).dot(axis) / seg_len : 0.0f,
                                       0.0f, 1.0f + part.tip_extend);
            std::array<uint16_t, 4> idx;
            std::array<float, 4> w;
            part_weights(part, p, t, joint_count, idx, w);

            Vec3 color = part_colors[pi];
            const float tint = rng.range(-0.02f, 0.02f);
            color = (color + Vec3::Constant(tint)).cwiseMax(0.0f).cwiseMin(1.0f);

            level.means.push_back(p);
            level.rotations.push_back(rot);
            level.scales.push_back(scale);
            level.opacities.push_back(rng.range(0.88f, 0.99f));
            level.colors.push_back(color);
            level.skin_indices.push_back(idx);
            level.skin_weights.push_back(w);
        }
    }
    level.finalize();
    return level;
}

}  // namespace

AvatarTemplate generate_synthetic_template(uint64_t seed,
                                           std::span<const uint32_t> level_counts,
                                           uint32_t joint_count) {
    if (level_counts.empty()) {
        throw std::invalid_argument("generate_synthetic_template: no level counts");
    }
    for (size_t i = 0; i < level_counts.size(); ++i) {
        if (level_counts[i] < 1) {
            throw std::invalid_argument("generate_synthetic_template: counts must be >= 1");
        }
        if (i > 0 && level_counts[i] >= level_counts[i - 1]) {
            throw std::invalid_argument(
                "generate_synthetic_template: counts must be strictly decreasing");
        }
    }
    if (joint_count < 1) {
        throw std::invalid_argument("generate_synthetic_template: joint_count must be >= 1");
    }

    AvatarTemplate tpl;
    tpl.skeleton = make_humanoid_skeleton(joint_count);

    // One palette per seed, shared by all levels so LoD switches don't recolor.
    Rng palette_rng(seed);
    Vec3 role_colors[3];
    role_colors[kShirt] = hsv_to_rgb(palette_rng.uniform(), palette_rng.range(0.45f, 0.8f),
                                     palette_rng.range(0.55f, 0.9f));
    role_colors[kPants] = hsv_to_rgb(palette_rng.uniform(), palette_rng.range(0.3f, 0.7f),
                                     palette_rng.range(0.25f, 0.55f));
    role_colors[kSkin] = Vec3(0.83f, 0.64f, 0.52f) * palette_rng.range(0.7f, 1.1f);
    Vec3 part_colors[kPartCount];
    for (size_t i = 0; i < kPartCount; ++i) {
        const Vec3 base = role_colors[kParts[i].role];
        const float shift = palette_rng.range(-0.06f, 0.06f);
        part_colors[i] = (base + Vec3::Constant(shift)).cwiseMax(0.0f).cwiseMin(1.0f);
    }

    for (size_t l = 0; l < level_counts.size(); ++l) {
        Rng level_rng(seed * 1000003u + 7919u * static_cast<uint64_t>(l + 1));
        tpl.levels.push_back(
            generate_level(level_counts[l], joint_count, level_rng, part_colors));
    }
    validate(tpl);
    return tpl;
}

MotionClip generate_synthetic_motion(uint64_t seed, uint32_t joint_count, float fps,
                                     uint32_t frame_count) {
    if (frame_count < 1 || !(fps > 0.0f)) {
        throw std::invalid_argument("generate_synthetic_motion: bad fps or frame count");
    }
    Rng rng(seed);
    const float leg_amp = rng.range(0.35f, 0.6f);
    const float knee_amp = rng.range(0.5f, 0.9f);
    const float arm_amp = rng.range(0.25f, 0.5f);
    const float spine_amp = rng.range(0.05f, 0.12f);
    const float bob = rng.range(0.012f, 0.025f);
    const float sway = rng.range(0.005f, 0.015f);

    auto rot_x = [](float a) { return Quat(Eigen::AngleAxisf(a, Vec3::UnitX())); };
    auto rot_y = [](float a) { return Quat(Eigen::AngleAxisf(a, Vec3::UnitY())); };

    MotionClip clip;
    clip.fps = fps;
    clip.joint_count = static_cast<uint16_t>(joint_count);
    clip.frames.resize(frame_count);
    for (uint32_t k = 0; k < frame_count; ++k) {
        const float ph = 6.28318530718f * static_cast<float>(k) / static_cast<float>(frame_count);
        Pose& pose = clip.frames[k];
        pose.local_rotations.assign(joint_count, Quat::Identity());
        pose.root_translation = Vec3(sway * std::sin(ph), bob * std::sin(2.0f * ph), 0.0f);

        auto set = [&](uint32_t j, const Quat& q) {
            if (j < joint_count) pose.local_rotations[j] = q.normalized();
        };
        set(1, rot_x(leg_amp * std::sin(ph)));
        set(2, rot_x(-leg_amp * std::sin(ph)));
        set(4, rot_x(knee_amp * 0.5f * (1.0f - std::cos(ph))));
        set(5, rot_x(knee_amp * 0.5f * (1.0f + std::cos(ph))));
        set(16, rot_x(-arm_amp * std::sin(ph)));
        set(17, rot_x(arm_amp * std::sin(ph)));
        set(18, rot_x(-0.3f * arm_amp * (1.0f - std::cos(ph))));
        set(19, rot_x(-0.3f * arm_amp * (1.0f + std::cos(ph))));
        set(6, rot_y(spine_amp * std::sin(ph)));
        set(15, rot_y(-0.4f * spine_amp * std::sin(ph)));
    }
    validate(clip);
    return clip;
}

}  // namespace gsc
