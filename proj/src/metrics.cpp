#include "gsc/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace gsc {

float psnr(const Framebuffer& a, const Framebuffer& b) {
    if (a.width != b.width || a.height != b.height) {
        throw std::invalid_argument("psnr: dimension mismatch");
    }
    double sse = 0.0;
    for (size_t i = 0; i < a.rgb.size(); ++i) {
        const double d = static_cast<double>(a.rgb[i]) - static_cast<double>(b.rgb[i]);
        sse += d * d;
    }
    if (sse == 0.0) {
        return kPsnrCap;
    }
    const double mse = sse / static_cast<double>(a.rgb.size());
    const float db = static_cast<float>(10.0 * std::log10(1.0 / mse));
    return std::min(db, kPsnrCap);
}

QualityTable lod_quality_sweep(const AvatarTemplate& tpl, std::span<const float> distances_m,
                               const Camera& camera_prototype,
                               const RenderSettings& settings) {
    if (tpl.levels.size() < 2) {
        throw std::invalid_argument("lod_quality_sweep: template needs >= 2 levels");
    }

    // Single bind-posed character at the origin; a 1-frame clip keeps the
    // crowd assets valid without animating anything.
    auto templates = std::make_shared<TemplateStore>();
    templates->push_back(tpl);
    auto motions = std::make_shared<MotionStore>();
    MotionClip idle;
    idle.fps = 1.0f;
    idle.joint_count = static_cast<uint16_t>(tpl.skeleton.joint_count());
    idle.frames.push_back(bind_pose(tpl.skeleton.joint_count()));
    motions->push_back(idle);

    Crowd crowd;
    crowd.templates = templates;
    crowd.motions = motions;
    crowd.instances.resize(1);
    crowd.instances[0].instance_id = 0;
    crowd.instances[0].template_id = 0;
    crowd.instances[0].motion_id = 0;

    // Aim at mid height so the character is centered at every distance.
    const Vec3 pelvis = tpl.skeleton.bind[0].topRightCorner<3, 1>();
    const float aim_y = pelvis.y();

    QualityTable table;
    for (const float dist : distances_m) {
        Camera cam = Camera::look_at(Vec3(0.0f, aim_y, -dist), Vec3(0.0f, aim_y, 0.0f),
                                     camera_prototype.fov_y_deg, camera_prototype.width,
                                     camera_prototype.height, camera_prototype.near_m);
        std::vector<Framebuffer> renders(tpl.levels.size());
        for (uint32_t level = 0; level < tpl.levels.size(); ++level) {
            renders[level] =
                render_frame(crowd, cam, 0.0f, settings, /*static_pose=*/true, level);
        }
        for (uint32_t level = 0; level < tpl.levels.size(); ++level) {
            QualityRow row;
            row.distance_m = dist;
            row.level = level;
            row.gaussian_count = tpl.levels[level].gaussian_count();
            row.psnr_db = level == 0 ? kPsnrCap : psnr(renders[level], renders[0]);
            table.push_back(row);
        }
    }
    return table;
}

}  // namespace gsc
