#include "gsc/crowd.hpp"

#include "gsc/parallel.hpp"

#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace gsc {

namespace {

float uniform01(std::mt19937& gen) {
    return static_cast<float>(gen() >> 8) * 0x1.0p-24f;
}

}  // namespace

Mat4 CrowdInstance::root_transform() const {
    Mat4 m = Mat4::Identity();
    const float c = std::cos(yaw), s = std::sin(yaw);
    m(0, 0) = c;
    m(0, 2) = s;
    m(2, 0) = -s;
    m(2, 2) = c;
    m(0, 3) = x;
    m(2, 3) = z;
    return m;
}

void validate(const SceneConfig& cfg) {
    if (static_cast<uint64_t>(cfg.grid.rows) * cfg.grid.cols < cfg.crowd_count) {
        throw std::invalid_argument("SceneConfig: grid capacity below crowd count");
    }
    if (!(cfg.grid.spacing_m >= 0.0f)) {
        throw std::invalid_argument("SceneConfig: negative grid spacing");
    }
    if (cfg.tile_size < 1) {
        throw std::invalid_argument("SceneConfig: tile size must be >= 1");
    }
    validate(cfg.lod);
    validate(cfg.camera.to_camera());
}

Crowd build_crowd(const SceneConfig& cfg, std::shared_ptr<const TemplateStore> templates,
                  std::shared_ptr<const MotionStore> motions, uint64_t seed) {
    validate(cfg);
    if (!templates || templates->empty()) {
        throw std::invalid_argument("build_crowd: no templates");
    }
    if (!motions || motions->empty()) {
        throw std::invalid_argument("build_crowd: no motions");
    }

    Crowd crowd;
    crowd.templates = std::move(templates);
    crowd.motions = std::move(motions);
    crowd.lod = cfg.lod;
    crowd.instances.resize(cfg.crowd_count);

    std::mt19937 gen(static_cast<uint32_t>(seed ^ (seed >> 32)));
    const float jitter = 0.25f * cfg.grid.spacing_m;
    const uint32_t n_templates = static_cast<uint32_t>(crowd.templates->size());
    const uint32_t n_motions = static_cast<uint32_t>(crowd.motions->size());

    for (uint32_t i = 0; i < cfg.crowd_count; ++i) {
        CrowdInstance& inst = crowd.instances[i];
        inst.instance_id = i;
        inst.template_id = static_cast<uint32_t>(uniform01(gen) * n_templates);
        inst.motion_id = static_cast<uint32_t>(uniform01(gen) * n_motions);
        const MotionClip& clip = (*crowd.motions)[inst.motion_id];
        inst.phase_offset_s = uniform01(gen) * clip.duration_s();

        const uint32_t row = i / cfg.grid.cols;
        const uint32_t col = i % cfg.grid.cols;
        inst.x = static_cast<float>(col) * cfg.grid.spacing_m +
                 (2.0f * uniform01(gen) - 1.0f) * jitter;
        inst.z = static_cast<float>(row) * cfg.grid.spacing_m +
                 (2.0f * uniform01(gen) - 1.0f) * jitter;
        inst.yaw = uniform01(gen) * 6.28318530718f;
    }
    return crowd;
}

void update_crowd(Crowd& crowd, const Camera& camera, const UpdateOptions& opts) {
    const TemplateStore& templates = *crowd.templates;

    parallel_for(crowd.instances.size(), opts.thread_count, [&](size_t i) {
        CrowdInstance& inst = crowd.instances[i];
        const AvatarTemplate& tpl = templates[inst.template_id];

        uint32_t lod;
        if (opts.forced_lod) {
            lod = std::min(*opts.forced_lod,
                           static_cast<uint32_t>(tpl.levels.size()) - 1);
        } else {
            const Vec3 pelvis = tpl.skeleton.bind[0].topRightCorner<3, 1>();
            const Vec3 root_pos(inst.x, pelvis.y(), inst.z);
            const float dist = instance_distance(root_pos, camera.position);
            std::optional<uint32_t> prev;
            if (inst.active_lod != kLodUnset) prev = inst.active_lod;
            lod = std::min(select_lod(crowd.lod, dist, prev),
                           static_cast<uint32_t>(tpl.levels.size()) - 1);
        }
        if (lod != inst.active_lod) {
            inst.active_lod = lod;
            inst.posed_valid = false;
        }

        const LodLevel& level = tpl.levels[lod];
        if (opts.static_pose && inst.posed_valid &&
            inst.posed_means.size() == level.gaussian_count() &&
            (!opts.skin_rotations || inst.posed_rotations.size() == level.gaussian_count())) {
            return;  // camera static + bind pose: nothing changed
        }

        Pose pose;
        if (opts.static_pose) {
            pose = bind_pose(tpl.skeleton.joint_count());
        } else {
            const MotionClip& clip = (*crowd.motions)[inst.motion_id];
            pose = sample_pose(clip, opts.time_s + inst.phase_offset_s, /*wrap=*/true);
        }

        const std::vector<Mat4> world =
            forward_kinematics(tpl.skeleton, pose, inst.root_transform());
        const std::vector<Mat4> skin = compute_skin_matrices(world, tpl.skeleton.inverse_bind);

        inst.posed_means.resize(level.gaussian_count());
        skin_means(level, skin, inst.posed_means);
        if (opts.skin_rotations) {
            inst.posed_rotations.resize(level.gaussian_count());
            skin_rotations(level, skin, inst.posed_rotations);
        } else {
            inst.posed_rotations.clear();
        }
        inst.posed_valid = opts.static_pose;
    });
}

void validate(const MemoryLayoutModel& model) {
    if (model.mean_bytes == 0 || model.rotation_bytes == 0 || model.scale_bytes == 0 ||
        model.opacity_bytes == 0 || model.color_bytes == 0 || model.skin_index_bytes == 0 ||
        model.skin_weight_bytes == 0) {
        throw std::invalid_argument("MemoryLayoutModel: channel sizes must be > 0");
    }
}

namespace {

MemoryReport assemble_report(const MemoryLayoutModel& model, uint64_t resident_gaussians,
                             uint64_t instance_gaussians, uint64_t instance_count) {
    MemoryReport rep;
    rep.instance_count = instance_count;
    rep.fixed_overhead_bytes = model.fixed_overhead_bytes;

    rep.resident_channels.mean = resident_gaussians * model.mean_bytes;
    rep.resident_channels.rotation = resident_gaussians * model.rotation_bytes;
    rep.resident_channels.scale = resident_gaussians * model.scale_bytes;
    rep.resident_channels.opacity = resident_gaussians * model.opacity_bytes;
    rep.resident_channels.color = resident_gaussians * model.color_bytes;
    rep.resident_channels.skin_indices = resident_gaussians * model.skin_index_bytes;
    rep.resident_channels.skin_weights = resident_gaussians * model.skin_weight_bytes;
    rep.resident_template_bytes = resident_gaussians * model.template_bytes_per_gaussian();

    const uint64_t base = model.fixed_overhead_bytes + rep.resident_template_bytes;
    rep.posed_mean_bytes = instance_gaussians * model.posed_bytes_per_gaussian();
    rep.naive_bytes = base + instance_gaussians * model.template_bytes_per_gaussian();
    rep.shared_bytes = base + rep.posed_mean_bytes;
    rep.savings_fraction =
        rep.naive_bytes == 0
            ? 0.0
            : 1.0 - static_cast<double>(rep.shared_bytes) / static_cast<double>(rep.naive_bytes);
    if (instance_count > 0) {
        rep.naive_marginal_bytes_per_instance =
            static_cast<double>(instance_gaussians * model.template_bytes_per_gaussian()) /
            static_cast<double>(instance_count);
        rep.shared_marginal_bytes_per_instance =
            static_cast<double>(rep.posed_mean_bytes) / static_cast<double>(instance_count);
    }
    return rep;
}

}  // namespace

MemoryReport memory_report(const Crowd& crowd, const MemoryLayoutModel& model) {
    validate(model);
    std::set<std::pair<uint32_t, uint32_t>> residents;
    uint64_t instance_gaussians = 0;
    for (const CrowdInstance& inst : crowd.instances) {
        const AvatarTemplate& tpl = (*crowd.templates)[inst.template_id];
        const uint32_t lod = inst.active_lod == kLodUnset ? 0 : inst.active_lod;
        residents.emplace(inst.template_id, lod);
        instance_gaussians += tpl.levels[lod].gaussian_count();
    }
    uint64_t resident_gaussians = 0;
    for (const auto& [tid, lod] : residents) {
        resident_gaussians += (*crowd.templates)[tid].levels[lod].gaussian_count();
    }
    return assemble_report(model, resident_gaussians, instance_gaussians,
                           crowd.instances.size());
}

MemoryReport memory_report_cell(uint64_t instances, uint64_t gaussians,
                                const MemoryLayoutModel& model) {
    validate(model);
    const uint64_t resident = instances > 0 ? gaussians : 0;
    return assemble_report(model, resident, instances * gaussians, instances);
}

}  // namespace gsc
