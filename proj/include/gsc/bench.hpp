// FPS/memory benchmark harness: a matrix of (instance count, gaussian count,
// motion flag) cells, each timed over warmup + measured frames with median
// per-stage times.
#pragma once

#include "gsc/renderer.hpp"
#include "gsc/scene.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gsc {

struct BenchMatrix {
    std::vector<uint32_t> instance_counts = {1, 100, 400};
    std::vector<uint32_t> gaussian_counts;  // empty = every level of template 0
    std::vector<bool> motion_flags = {false, true};
    int warmup_frames = 5;
    int timed_frames = 30;
};

struct BenchReport {
    std::string label;
    uint32_t instance_count = 0;
    uint32_t gaussian_count = 0;
    bool motion = false;
    double update_ms = 0.0;
    double gather_ms = 0.0;
    double sort_ms = 0.0;
    double rasterize_ms = 0.0;
    double total_ms = 0.0;
    double fps = 0.0;
    uint64_t splat_count = 0;
    bool skipped = false;
    std::string skip_reason;
};

// Runs every cell of the matrix against the scene prototype. The workload is
// deterministic; wall-clock medians are not. A cell whose gaussian count has
// no matching template level, whose instance count exceeds the grid, or that
// runs out of memory is reported as skipped with a reason.
std::vector<BenchReport> run_benchmark(const BenchMatrix& matrix, const SceneConfig& scene,
                                       std::shared_ptr<const TemplateStore> templates,
                                       std::shared_ptr<const MotionStore> motions);

}  // namespace gsc
