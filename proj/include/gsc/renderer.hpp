// Deterministic tile-based software rasterizer: cull, project, depth-sort,
// tile-bin, and front-to-back alpha-composite splats into a framebuffer.
// Output is independent of the thread count by construction: splats carry a
// total sort key and every pixel is owned by exactly one tile worker.
#pragma once

#include "gsc/crowd.hpp"
#include "gsc/math.hpp"

#include <cstdint>
#include <vector>

namespace gsc {

struct RenderSettings {
    int tile_size = 16;
    Vec3 background = Vec3::Zero();
    float alpha_max = kAlphaMax;
    float alpha_cutoff = kAlphaCutoff;
    float transmittance_floor = 1e-4f;
    int thread_count = 0;  // 0 = env var / hardware default
};

void validate(const RenderSettings& s);

struct Framebuffer {
    int width = 0;
    int height = 0;
    std::vector<float> rgb;  // row-major, 3 floats per pixel, linear light

    Framebuffer() = default;
    Framebuffer(int w, int h) : width(w), height(h), rgb(static_cast<size_t>(w) * h * 3, 0.0f) {}
    float* pixel(int x, int y) { return rgb.data() + 3 * (static_cast<size_t>(y) * width + x); }
    const float* pixel(int x, int y) const {
        return rgb.data() + 3 * (static_cast<size_t>(y) * width + x);
    }
};

struct FrameSplat {
    Splat2D splat;
    uint32_t instance_id = 0;
    uint32_t gaussian_index = 0;
    PixelRect bounds;  // 3-sigma rectangle clipped to the image
};

struct SplatFrame {
    int width = 0;
    int height = 0;
    std::vector<FrameSplat> splats;
};

struct RasterOutput {
    Framebuffer color;
    std::vector<float> transmittance;  // final per-pixel T
};

// Reusable per-frame buffers. A caller rendering many frames holds one of
// these so steady-state frames allocate nothing.
struct FrameContext {
    std::vector<std::vector<FrameSplat>> gather_locals;
    SplatFrame frame;

    struct SortKey {
        uint64_t primary;    // depth bits | instance id
        uint64_t secondary;  // gaussian index | source slot
    };
    std::vector<SortKey> sort_keys;
    std::vector<FrameSplat> sort_tmp;

    // per-splat conic (inverse covariance) and the power threshold below
    // which alpha would fall under alpha_cutoff
    struct Prepared {
        float a, b, c, power_floor;
    };
    std::vector<Prepared> prepared;
    std::vector<std::vector<uint32_t>> bins;

    RasterOutput out;
};

// Projects every Gaussian of every instance's active LoD. The instance's
// posed means pair with the template's fixed rotation/scale/opacity/color
// (or the posed rotations when rotation skinning ran). Culled splats are
// dropped. The crowd must be updated for the current time.
SplatFrame gather_splats(const Crowd& crowd, const Camera& camera, int thread_count = 0);
void gather_splats(const Crowd& crowd, const Camera& camera, int thread_count,
                   FrameContext& ctx);

// Ascending view depth, ties broken by (instance_id, gaussian_index); the
// order is total, so downstream compositing is reproducible.
void sort_splats(SplatFrame& frame);
void sort_splats(FrameContext& ctx);

Framebuffer rasterize(const SplatFrame& frame, const RenderSettings& settings, int width,
                      int height);

// Same as rasterize but also returns the final per-pixel transmittance,
// which the compositing-conservation checks need.
RasterOutput rasterize_full(const SplatFrame& frame, const RenderSettings& settings,
                            int width, int height);

void rasterize_full(const SplatFrame& frame, const RenderSettings& settings, int width,
                    int height, FrameContext& ctx);

struct StageTimes {
    double update_ms = 0.0;
    double gather_ms = 0.0;
    double sort_ms = 0.0;
    double rasterize_ms = 0.0;
    double total_ms() const { return update_ms + gather_ms + sort_ms + rasterize_ms; }
    uint64_t splat_count = 0;
};

Framebuffer render_frame(Crowd& crowd, const Camera& camera, float time_s,
                         const RenderSettings& settings, bool static_pose = false,
                         std::optional<uint32_t> forced_lod = std::nullopt,
                         StageTimes* times = nullptr);

// Steady-state form: the context's buffers (including the framebuffer in
// ctx.out) are reused across calls.
void render_frame(Crowd& crowd, const Camera& camera, float time_s,
                  const RenderSettings& settings, bool static_pose,
                  std::optional<uint32_t> forced_lod, StageTimes* times, FrameContext& ctx);

}  // namespace gsc
