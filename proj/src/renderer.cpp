#include "gsc/renderer.hpp"

#include "gsc/parallel.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace gsc {

void validate(const RenderSettings& s) {
    if (s.tile_size < 1) {
        throw std::invalid_argument("RenderSettings: tile_size must be >= 1");
    }
    if (!(s.alpha_cutoff > 0.0f && s.alpha_cutoff < 1.0f)) {
        throw std::invalid_argument("RenderSettings: alpha_cutoff outside (0,1)");
    }
    if (!(s.transmittance_floor > 0.0f && s.transmittance_floor < 1.0f)) {
        throw std::invalid_argument("RenderSettings: transmittance_floor outside (0,1)");
    }
}

void gather_splats(const Crowd& crowd, const Camera& camera, int thread_count,
                   FrameContext& ctx) {
    ctx.frame.width = camera.width;
    ctx.frame.height = camera.height;
    ctx.frame.splats.clear();

    const TemplateStore& templates = *crowd.templates;
    ctx.gather_locals.resize(crowd.instances.size());
    const CameraBasis basis = CameraBasis::from(camera);

    parallel_for(crowd.instances.size(), thread_count, [&](size_t i) {
        const CrowdInstance& inst = crowd.instances[i];
        const AvatarTemplate& tpl = templates[inst.template_id];
        const uint32_t lod = inst.active_lod == kLodUnset ? 0 : inst.active_lod;
        const LodLevel& level = tpl.levels[lod];
        const size_t n = inst.posed_means.size();
        const bool rotated = inst.posed_rotations.size() == n;

        std::vector<FrameSplat>& out = ctx.gather_locals[i];
        out.clear();
        out.reserve(n);
        for (size_t g = 0; g < n; ++g) {
            Mat3 cov;
            if (rotated) {
                cov = build_covariance(inst.posed_rotations[g], level.scales[g]);
            } else {
                const auto& c = level.cov_cache[g];
                cov << c[0], c[1], c[2], c[1], c[3], c[4], c[2], c[4], c[5];
            }
            auto splat = project_covariance(inst.posed_means[g], cov, level.colors[g],
                                            level.opacities[g], basis);
            if (!splat) continue;
            FrameSplat fs;
            fs.splat = *splat;
            fs.instance_id = inst.instance_id;
            fs.gaussian_index = static_cast<uint32_t>(g);
            fs.bounds = splat_bounds(splat->mean_px, splat->cov_xx, splat->cov_yy,
                                     camera.width, camera.height);
            out.push_back(fs);
        }
    });

    size_t total = 0;
    for (const auto& v : ctx.gather_locals) total += v.size();
    ctx.frame.splats.reserve(total);
    for (const auto& v : ctx.gather_locals) {
        ctx.frame.splats.insert(ctx.frame.splats.end(), v.begin(), v.end());
    }
}

SplatFrame gather_splats(const Crowd& crowd, const Camera& camera, int thread_count) {
    FrameContext ctx;
    gather_splats(crowd, camera, thread_count, ctx);
    return std::move(ctx.frame);
}

namespace {

// Depths are positive finite, so their IEEE-754 bit patterns sort like the
// floats themselves; (depth, instance, gaussian) packs into two words.
void sort_splats_impl(SplatFrame& frame, std::vector<FrameContext::SortKey>& keys,
                      std::vector<FrameSplat>& tmp) {
    const size_t n = frame.splats.size();
    keys.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const FrameSplat& fs = frame.splats[i];
        keys[i].primary = (static_cast<uint64_t>(std::bit_cast<uint32_t>(fs.splat.depth))
                           << 32) |
                          fs.instance_id;
        keys[i].secondary =
            (static_cast<uint64_t>(fs.gaussian_index) << 32) | static_cast<uint32_t>(i);
    }
    std::sort(keys.begin(), keys.end(),
              [](const FrameContext::SortKey& a, const FrameContext::SortKey& b) {
                  if (a.primary != b.primary) return a.primary < b.primary;
                  return a.secondary < b.secondary;
              });
    tmp.resize(n);
    for (size_t i = 0; i < n; ++i) {
        tmp[i] = frame.splats[static_cast<uint32_t>(keys[i].secondary)];
    }
    frame.splats.swap(tmp);
}

}  // namespace

void sort_splats(SplatFrame& frame) {
    std::vector<FrameContext::SortKey> keys;
    std::vector<FrameSplat> tmp;
    sort_splats_impl(frame, keys, tmp);
}

void sort_splats(FrameContext& ctx) {
    sort_splats_impl(ctx.frame, ctx.sort_keys, ctx.sort_tmp);
}

void rasterize_full(const SplatFrame& frame, const RenderSettings& settings, int width,
                    int height, FrameContext& ctx) {
    validate(settings);
    if (width != frame.width || height != frame.height) {
        throw std::invalid_argument("rasterize: splat frame was gathered for another size");
    }

    if (ctx.out.color.width != width || ctx.out.color.height != height) {
        ctx.out.color = Framebuffer(width, height);
        ctx.out.transmittance.resize(static_cast<size_t>(width) * height);
    }

    ctx.prepared.resize(frame.splats.size());
    for (size_t i = 0; i < frame.splats.size(); ++i) {
        const Splat2D& s = frame.splats[i].splat;
        const float det = s.cov_xx * s.cov_yy - s.cov_xy * s.cov_xy;
        const float inv_det = 1.0f / det;
        // alpha < cutoff exactly when power < log(cutoff / opacity)
        ctx.prepared[i] = {s.cov_yy * inv_det, -s.cov_xy * inv_det, s.cov_xx * inv_det,
                           std::log(settings.alpha_cutoff / s.opacity)};
    }

    const int ts = settings.tile_size;
    const int tiles_x = (width + ts - 1) / ts;
    const int tiles_y = (height + ts - 1) / ts;

    // Bin in frame order so every per-tile list stays globally sorted.
    ctx.bins.resize(static_cast<size_t>(tiles_x) * tiles_y);
    for (auto& bin : ctx.bins) bin.clear();
    for (size_t i = 0; i < frame.splats.size(); ++i) {
        const PixelRect& r = frame.splats[i].bounds;
        if (r.empty()) continue;
        const int tx0 = r.x0 / ts, tx1 = (r.x1 - 1) / ts;
        const int ty0 = r.y0 / ts, ty1 = (r.y1 - 1) / ts;
        for (int ty = ty0; ty <= ty1; ++ty) {
            for (int tx = tx0; tx <= tx1; ++tx) {
                ctx.bins[static_cast<size_t>(ty) * tiles_x + tx].push_back(
                    static_cast<uint32_t>(i));
            }
        }
    }

    Framebuffer& fb = ctx.out.color;
    std::vector<float>& trans = ctx.out.transmittance;
    // Splat-major within each tile: per-pixel transmittance and color live in
    // tile-local buffers, and a live-pixel counter ends the tile early once
    // every pixel has crossed the transmittance floor. Each pixel still sees
    // its splats in the same global order, so results match the pixel-major
    // reference bit for bit.
    parallel_for_range(ctx.bins.size(), settings.thread_count, [&](size_t tile_begin,
                                                                   size_t tile_end) {
        std::vector<float> t_buf(static_cast<size_t>(ts) * ts);
        std::vector<float> rgb_buf(static_cast<size_t>(ts) * ts * 3);
        for (size_t tile = tile_begin; tile < tile_end; ++tile) {
            const std::vector<uint32_t>& list = ctx.bins[tile];
            const int tx = static_cast<int>(tile) % tiles_x;
            const int ty = static_cast<int>(tile) / tiles_x;
            const int px0 = tx * ts, px1 = std::min(width, px0 + ts);
            const int py0 = ty * ts, py1 = std::min(height, py0 + ts);
            const int tw = px1 - px0, th = py1 - py0;

            std::fill(t_buf.begin(), t_buf.begin() + static_cast<size_t>(tw) * th, 1.0f);
            std::fill(rgb_buf.begin(), rgb_buf.begin() + static_cast<size_t>(tw) * th * 3,
                      0.0f);
            int live = tw * th;

            for (uint32_t idx : list) {
                if (live == 0) break;
                const FrameSplat& fs = frame.splats[idx];
                const FrameContext::Prepared& co = ctx.prepared[idx];
                const int sx0 = std::max(px0, fs.bounds.x0), sx1 = std::min(px1, fs.bounds.x1);
                const int sy0 = std::max(py0, fs.bounds.y0), sy1 = std::min(py1, fs.bounds.y1);
                for (int py = sy0; py < sy1; ++py) {
                    const size_t row = static_cast<size_t>(py - py0) * tw;
                    for (int px = sx0; px < sx1; ++px) {
                        float& t = t_buf[row + (px - px0)];
                        if (t < settings.transmittance_floor) continue;
                        const float dx =
                            (static_cast<float>(px) + 0.5f) - fs.splat.mean_px.x();
                        const float dy =
                            (static_cast<float>(py) + 0.5f) - fs.splat.mean_px.y();
                        const float power =
                            -0.5f * (co.a * dx * dx + co.c * dy * dy) - co.b * dx * dy;
                        if (power < co.power_floor) continue;  // alpha below cutoff
                        float alpha = fs.splat.opacity * std::exp(power);
                        if (alpha > settings.alpha_max) alpha = settings.alpha_max;
                        const float w = t * alpha;
                        float* rgb = &rgb_buf[(row + (px - px0)) * 3];
                        rgb[0] += w * fs.splat.color.x();
                        rgb[1] += w * fs.splat.color.y();
                        rgb[2] += w * fs.splat.color.z();
                        t *= 1.0f - alpha;
                        if (t < settings.transmittance_floor) --live;
                    }
                }
            }

            for (int py = py0; py < py1; ++py) {
                const size_t row = static_cast<size_t>(py - py0) * tw;
                for (int px = px0; px < px1; ++px) {
                    const float t = t_buf[row + (px - px0)];
                    const float* rgb = &rgb_buf[(row + (px - px0)) * 3];
                    float* px_out = fb.pixel(px, py);
                    px_out[0] = rgb[0] + t * settings.background.x();
                    px_out[1] = rgb[1] + t * settings.background.y();
                    px_out[2] = rgb[2] + t * settings.background.z();
                    trans[static_cast<size_t>(py) * width + px] = t;
                }
            }
        }
    });
}

RasterOutput rasterize_full(const SplatFrame& frame, const RenderSettings& settings,
                            int width, int height) {
    FrameContext ctx;
    rasterize_full(frame, settings, width, height, ctx);
    RasterOutput out;
    out.color = std::move(ctx.out.color);
    out.transmittance = std::move(ctx.out.transmittance);
    return out;
}

Framebuffer rasterize(const SplatFrame& frame, const RenderSettings& settings, int width,
                      int height) {
    return rasterize_full(frame, settings, width, height).color;
}

void render_frame(Crowd& crowd, const Camera& camera, float time_s,
                  const RenderSettings& settings, bool static_pose,
                  std::optional<uint32_t> forced_lod, StageTimes* times, FrameContext& ctx) {
    using clock = std::chrono::steady_clock;
    const auto ms = [](clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double, std::milli>(b - a).count();
    };

    UpdateOptions opts;
    opts.time_s = time_s;
    opts.static_pose = static_pose;
    opts.forced_lod = forced_lod;
    opts.thread_count = settings.thread_count;

    const auto t0 = clock::now();
    update_crowd(crowd, camera, opts);
    const auto t1 = clock::now();
    gather_splats(crowd, camera, settings.thread_count, ctx);
    const auto t2 = clock::now();
    sort_splats(ctx);
    const auto t3 = clock::now();
    rasterize_full(ctx.frame, settings, camera.width, camera.height, ctx);
    const auto t4 = clock::now();

    if (times) {
        times->update_ms = ms(t0, t1);
        times->gather_ms = ms(t1, t2);
        times->sort_ms = ms(t2, t3);
        times->rasterize_ms = ms(t3, t4);
        times->splat_count = ctx.frame.splats.size();
    }
}

Framebuffer render_frame(Crowd& crowd, const Camera& camera, float time_s,
                         const RenderSettings& settings, bool static_pose,
                         std::optional<uint32_t> forced_lod, StageTimes* times) {
    FrameContext ctx;
    render_frame(crowd, camera, time_s, settings, static_pose, forced_lod, times, ctx);
    return std::move(ctx.out.color);
}

}  // namespace gsc
