#include "gsc/bench.hpp"

#include <algorithm>
#include <new>
#include <stdexcept>

namespace gsc {

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<BenchReport> run_benchmark(const BenchMatrix& matrix, const SceneConfig& scene,
                                       std::shared_ptr<const TemplateStore> templates,
                                       std::shared_ptr<const MotionStore> motions) {
    if (!templates || templates->empty() || !motions || motions->empty()) {
        throw std::invalid_argument("run_benchmark: missing scene assets");
    }

    std::vector<uint32_t> gaussian_counts = matrix.gaussian_counts;
    if (gaussian_counts.empty()) {
        for (const LodLevel& level : templates->front().levels) {
            gaussian_counts.push_back(level.gaussian_count());
        }
    }

    RenderSettings settings;
    settings.tile_size = scene.tile_size;
    settings.background = scene.background;
    const Camera camera = scene.camera.to_camera();

    std::vector<BenchReport> reports;
    for (uint32_t gauss : gaussian_counts) {
        // The cell pins every instance to the level with this gaussian count.
        std::optional<uint32_t> level;
        const AvatarTemplate& tpl = templates->front();
        for (uint32_t l = 0; l < tpl.levels.size(); ++l) {
            if (tpl.levels[l].gaussian_count() == gauss) level = l;
        }

        for (uint32_t count : matrix.instance_counts) {
            for (bool motion : matrix.motion_flags) {
                BenchReport rep;
                rep.instance_count = count;
                rep.gaussian_count = gauss;
                rep.motion = motion;
                rep.label = std::to_string(gauss) + (motion ? " (w/ motion)" : " (w/o motion)") +
                            " x" + std::to_string(count);

                if (!level) {
                    rep.skipped = true;
                    rep.skip_reason = "no template level with this gaussian count";
                    reports.push_back(rep);
                    continue;
                }
                if (static_cast<uint64_t>(scene.grid.rows) * scene.grid.cols < count) {
                    rep.skipped = true;
                    rep.skip_reason = "grid capacity below instance count";
                    reports.push_back(rep);
                    continue;
                }

                try {
                    SceneConfig cell = scene;
                    cell.crowd_count = count;
                    Crowd crowd = build_crowd(cell, templates, motions, scene.seed);

                    FrameContext ctx;
                    std::vector<double> update, gather, sort_t, raster, total;
                    for (int f = 0; f < matrix.warmup_frames + matrix.timed_frames; ++f) {
                        StageTimes times;
                        const float t = static_cast<float>(f) / 30.0f;
                        render_frame(crowd, camera, t, settings, !motion, level, &times, ctx);
                        if (f < matrix.warmup_frames) continue;
                        update.push_back(times.update_ms);
                        gather.push_back(times.gather_ms);
                        sort_t.push_back(times.sort_ms);
                        raster.push_back(times.rasterize_ms);
                        total.push_back(times.total_ms());
                        rep.splat_count = times.splat_count;
                    }
                    rep.update_ms = median(update);
                    rep.gather_ms = median(gather);
                    rep.sort_ms = median(sort_t);
                    rep.rasterize_ms = median(raster);
                    rep.total_ms = median(total);
                    rep.fps = rep.total_ms > 0.0 ? 1000.0 / rep.total_ms : 0.0;
                } catch (const std::bad_alloc&) {
                    rep.skipped = true;
                    rep.skip_reason = "out of memory";
                }
                reports.push_back(rep);
            }
        }
    }
    return reports;
}

}  // namespace gsc
