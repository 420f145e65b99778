#include "gsc/metrics.hpp"

#include "gsc/bench.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace gsc;

TEST_CASE("psnr: identical images hit the cap") {
    Framebuffer a(8, 8), b(8, 8);
    for (size_t i = 0; i < a.rgb.size(); ++i) a.rgb[i] = b.rgb[i] = 0.37f;
    CHECK(psnr(a, b) == kPsnrCap);
}

TEST_CASE("psnr: all-zeros vs all-ones is 0 dB") {
    Framebuffer a(8, 8), b(8, 8);
    for (float& v : b.rgb) v = 1.0f;
    CHECK(psnr(a, b) == doctest::Approx(0.0f).scale(1.0));
}

TEST_CASE("psnr: one fully differing pixel in a 10x10 image is 20 dB") {
    Framebuffer a(10, 10), b(10, 10);
    float* px = b.pixel(3, 7);
    px[0] = px[1] = px[2] = 1.0f;  // MSE = 3/300 = 1/100
    CHECK(psnr(a, b) == doctest::Approx(20.0f).epsilon(1e-6));
}

TEST_CASE("psnr: symmetric and strictly decreasing in perturbation size") {
    oracle::TestRng rng(3);
    Framebuffer a(16, 16);
    for (float& v : a.rgb) v = rng.uniform();
    float prev = kPsnrCap + 1.0f;
    for (float mag : {0.01f, 0.05f, 0.2f, 0.5f}) {
        Framebuffer b = a;
        for (size_t i = 0; i < b.rgb.size(); i += 7) {
            b.rgb[i] = std::min(1.0f, b.rgb[i] + mag);
        }
        CHECK(psnr(a, b) == psnr(b, a));
        CHECK(psnr(a, b) < prev);
        prev = psnr(a, b);
    }
}

TEST_CASE("psnr: dimension mismatch throws") {
    Framebuffer a(8, 8), b(8, 9);
    CHECK_THROWS_AS(psnr(a, b), std::invalid_argument);
}

TEST_CASE("lod_quality_sweep: table shape and reference rows") {
    const AvatarTemplate tpl =
        generate_synthetic_template(4, std::array<uint32_t, 3>{1600, 420, 110});
    Camera proto;
    proto.width = 320;
    proto.height = 180;
    proto.fov_y_deg = 50.0f;
    RenderSettings settings;
    const std::array<float, 4> distances{1.9f, 3.0f, 5.0f, 10.0f};
    const QualityTable table = lod_quality_sweep(tpl, distances, proto, settings);

    REQUIRE(table.size() == 12);  // 4 distances x 3 levels
    for (size_t d = 0; d < 4; ++d) {
        for (size_t l = 0; l < 3; ++l) {
            const QualityRow& row = table[d * 3 + l];
            CHECK(row.distance_m == distances[d]);
            CHECK(row.level == l);
            CHECK(row.gaussian_count == tpl.levels[l].gaussian_count());
            if (l == 0) {
                CHECK(row.psnr_db == kPsnrCap);  // any level vs itself
            } else {
                CHECK(row.psnr_db > 0.0f);
            }
        }
    }
}

TEST_CASE("lod_quality_sweep: far renders are closer to the reference") {
    const AvatarTemplate tpl =
        generate_synthetic_template(4, std::array<uint32_t, 3>{1600, 420, 110});
    Camera proto;
    proto.width = 320;
    proto.height = 180;
    RenderSettings settings;
    const std::array<float, 2> distances{1.9f, 10.0f};
    const QualityTable table = lod_quality_sweep(tpl, distances, proto, settings);
    const float coarse_near = table[2].psnr_db;
    const float coarse_far = table[5].psnr_db;
    CHECK(coarse_far > coarse_near);
}

TEST_CASE("lod_quality_sweep: rejects single-level templates") {
    const AvatarTemplate tpl = generate_synthetic_template(4, std::array<uint32_t, 1>{200});
    Camera proto;
    RenderSettings settings;
    const std::array<float, 1> distances{3.0f};
    CHECK_THROWS_AS(lod_quality_sweep(tpl, distances, proto, settings),
                    std::invalid_argument);
}

TEST_CASE("run_benchmark: matrix shape, labels, and deterministic workload") {
    auto templates = std::make_shared<TemplateStore>();
    templates->push_back(generate_synthetic_template(6, std::array<uint32_t, 2>{120, 40}));
    auto motions = std::make_shared<MotionStore>();
    motions->push_back(generate_synthetic_motion(7, 24, 30.0f, 16));

    SceneConfig scene;
    scene.crowd_count = 4;
    scene.grid.rows = 2;
    scene.grid.cols = 2;
    scene.camera.position = Vec3(0.5f, 1.5f, -3.0f);
    scene.camera.look_at = Vec3(0.5f, 1.0f, 1.0f);
    scene.camera.width = 160;
    scene.camera.height = 90;
    scene.seed = 12;

    BenchMatrix matrix;
    matrix.instance_counts = {1, 4};
    matrix.gaussian_counts = {120, 40, 999};
    matrix.motion_flags = {false, true};
    matrix.warmup_frames = 1;
    matrix.timed_frames = 3;

    const auto reports = run_benchmark(matrix, scene, templates, motions);
    REQUIRE(reports.size() == 12);

    int skipped = 0;
    for (const BenchReport& rep : reports) {
        if (rep.gaussian_count == 999) {
            CHECK(rep.skipped);
            CHECK(rep.skip_reason == "no template level with this gaussian count");
            ++skipped;
            continue;
        }
        CHECK_FALSE(rep.skipped);
        CHECK(rep.total_ms > 0.0);
        CHECK(rep.fps == doctest::Approx(1000.0 / rep.total_ms));
        CHECK(rep.label.find(rep.motion ? "w/ motion" : "w/o motion") != std::string::npos);
    }
    CHECK(skipped == 4);

    // single instance at the fine level contributes exactly its gaussians
    for (const BenchReport& rep : reports) {
        if (rep.instance_count == 1 && rep.gaussian_count == 120 && !rep.motion) {
            CHECK(rep.splat_count == 120);
        }
    }

    // deterministic workload: same splat counts on a rerun
    const auto again = run_benchmark(matrix, scene, templates, motions);
    REQUIRE(again.size() == reports.size());
    for (size_t i = 0; i < reports.size(); ++i) {
        CHECK(again[i].splat_count == reports[i].splat_count);
    }
}

TEST_CASE("run_benchmark: grid capacity shortfall is a skipped cell") {
    auto templates = std::make_shared<TemplateStore>();
    templates->push_back(generate_synthetic_template(6, std::array<uint32_t, 1>{50}));
    auto motions = std::make_shared<MotionStore>();
    motions->push_back(generate_synthetic_motion(7, 24, 30.0f, 8));

    SceneConfig scene;
    scene.crowd_count = 1;
    scene.grid.rows = 1;
    scene.grid.cols = 1;
    scene.camera.width = 64;
    scene.camera.height = 64;

    BenchMatrix matrix;
    matrix.instance_counts = {1, 100};
    matrix.gaussian_counts = {50};
    matrix.motion_flags = {false};
    matrix.warmup_frames = 0;
    matrix.timed_frames = 1;
    const auto reports = run_benchmark(matrix, scene, templates, motions);
    REQUIRE(reports.size() == 2);
    CHECK_FALSE(reports[0].skipped);
    CHECK(reports[1].skipped);
    CHECK(reports[1].skip_reason == "grid capacity below instance count");
}
