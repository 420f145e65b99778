#include "gsc/crowd.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cstring>
#include <set>

using namespace gsc;

namespace {

std::shared_ptr<TemplateStore> make_templates(int count, uint64_t seed_base = 100) {
    auto store = std::make_shared<TemplateStore>();
    const std::array<uint32_t, 3> counts{60, 24, 8};
    for (int i = 0; i < count; ++i) {
        AvatarTemplate tpl = generate_synthetic_template(seed_base + i, counts);
        tpl.template_id = static_cast<uint32_t>(i);
        store->push_back(std::move(tpl));
    }
    return store;
}

std::shared_ptr<MotionStore> make_motions(int count, uint64_t seed_base = 500) {
    auto store = std::make_shared<MotionStore>();
    for (int i = 0; i < count; ++i) {
        store->push_back(generate_synthetic_motion(seed_base + i, 24, 30.0f, 24));
    }
    return store;
}

SceneConfig basic_scene(uint32_t count, uint32_t rows, uint32_t cols) {
    SceneConfig cfg;
    cfg.crowd_count = count;
    cfg.grid.rows = rows;
    cfg.grid.cols = cols;
    cfg.grid.spacing_m = 1.0f;
    cfg.camera.position = Vec3(0.0f, 1.6f, -3.0f);
    cfg.camera.look_at = Vec3(0.0f, 1.0f, 5.0f);
    cfg.camera.width = 160;
    cfg.camera.height = 90;
    return cfg;
}

bool same_instances(const Crowd& a, const Crowd& b) {
    if (a.instances.size() != b.instances.size()) return false;
    for (size_t i = 0; i < a.instances.size(); ++i) {
        const CrowdInstance& x = a.instances[i];
        const CrowdInstance& y = b.instances[i];
        if (x.template_id != y.template_id || x.motion_id != y.motion_id) return false;
        if (x.x != y.x || x.z != y.z || x.yaw != y.yaw) return false;
        if (x.phase_offset_s != y.phase_offset_s) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("build_crowd: benchmark-scale population uses every asset") {
    auto templates = make_templates(14);
    auto motions = make_motions(15);
    SceneConfig cfg = basic_scene(3500, 59, 60);
    const Crowd crowd = build_crowd(cfg, templates, motions, 99);

    REQUIRE(crowd.instances.size() == 3500);
    std::set<uint32_t> templates_used, motions_used;
    for (const CrowdInstance& inst : crowd.instances) {
        templates_used.insert(inst.template_id);
        motions_used.insert(inst.motion_id);
        // placement stays within the jittered grid bounds
        CHECK(inst.x >= -0.26f);
        CHECK(inst.x <= 59.26f);
        CHECK(inst.z >= -0.26f);
        CHECK(inst.z <= 58.26f);
        const MotionClip& clip = (*motions)[inst.motion_id];
        CHECK(inst.phase_offset_s >= 0.0f);
        CHECK(inst.phase_offset_s < clip.duration_s());
    }
    CHECK(templates_used.size() == 14);
    CHECK(motions_used.size() == 15);
}

TEST_CASE("build_crowd: one instance sits in cell (0,0) plus jitter") {
    auto templates = make_templates(1);
    auto motions = make_motions(1);
    SceneConfig cfg = basic_scene(1, 1, 1);
    const Crowd crowd = build_crowd(cfg, templates, motions, 5);
    REQUIRE(crowd.instances.size() == 1);
    CHECK(std::abs(crowd.instances[0].x) <= 0.25f);
    CHECK(std::abs(crowd.instances[0].z) <= 0.25f);
}

TEST_CASE("build_crowd: deterministic per seed") {
    auto templates = make_templates(3);
    auto motions = make_motions(2);
    SceneConfig cfg = basic_scene(64, 8, 8);
    const Crowd a = build_crowd(cfg, templates, motions, 1234);
    const Crowd b = build_crowd(cfg, templates, motions, 1234);
    const Crowd c = build_crowd(cfg, templates, motions, 4321);
    CHECK(same_instances(a, b));
    CHECK_FALSE(same_instances(a, c));
}

TEST_CASE("build_crowd: capacity and asset errors") {
    auto templates = make_templates(1);
    auto motions = make_motions(1);
    SceneConfig cfg = basic_scene(10, 3, 3);
    CHECK_THROWS_AS(build_crowd(cfg, templates, motions, 1), std::invalid_argument);
    cfg = basic_scene(4, 2, 2);
    CHECK_THROWS_AS(build_crowd(cfg, std::make_shared<TemplateStore>(), motions, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_crowd(cfg, templates, std::make_shared<MotionStore>(), 1),
                    std::invalid_argument);
}

TEST_CASE("update_crowd: bind-pose clip equals root-transformed canonical means") {
    auto templates = make_templates(1);
    auto motions = std::make_shared<MotionStore>();
    MotionClip bind_clip;
    bind_clip.fps = 1.0f;
    bind_clip.joint_count = 24;
    bind_clip.frames.push_back(bind_pose(24));
    motions->push_back(bind_clip);

    SceneConfig cfg = basic_scene(1, 1, 1);
    Crowd crowd = build_crowd(cfg, templates, motions, 3);
    const Camera cam = cfg.camera.to_camera();
    UpdateOptions opts;
    update_crowd(crowd, cam, opts);

    const CrowdInstance& inst = crowd.instances[0];
    const LodLevel& level = (*templates)[0].levels[inst.active_lod];
    REQUIRE(inst.posed_means.size() == level.gaussian_count());
    const Mat4 root = inst.root_transform();
    float max_err = 0.0f;
    for (size_t i = 0; i < level.means.size(); ++i) {
        const Vec3 expect =
            (root * Vec4(level.means[i].x(), level.means[i].y(), level.means[i].z(), 1))
                .head<3>();
        max_err = std::max(max_err, (inst.posed_means[i] - expect).cwiseAbs().maxCoeff());
    }
    CHECK(max_err < 1e-4f);
}

TEST_CASE("update_crowd: static and motion modes share counts, not means") {
    auto templates = make_templates(1);
    auto motions = make_motions(1);
    SceneConfig cfg = basic_scene(4, 2, 2);
    Crowd moving = build_crowd(cfg, templates, motions, 7);
    Crowd frozen = build_crowd(cfg, templates, motions, 7);
    const Camera cam = cfg.camera.to_camera();

    UpdateOptions opts;
    opts.time_s = 0.4f;
    update_crowd(moving, cam, opts);
    opts.static_pose = true;
    update_crowd(frozen, cam, opts);

    bool any_diff = false;
    for (size_t i = 0; i < moving.instances.size(); ++i) {
        REQUIRE(moving.instances[i].posed_means.size() ==
                frozen.instances[i].posed_means.size());
        if (std::memcmp(moving.instances[i].posed_means.data(),
                        frozen.instances[i].posed_means.data(),
                        moving.instances[i].posed_means.size() * sizeof(Vec3)) != 0) {
            any_diff = true;
        }
    }
    CHECK(any_diff);
}

TEST_CASE("update_crowd: LoD switches with camera distance") {
    auto templates = make_templates(1);
    auto motions = make_motions(1);
    SceneConfig cfg = basic_scene(1, 1, 1);
    Crowd crowd = build_crowd(cfg, templates, motions, 11);
    crowd.instances[0].x = 0.0f;
    crowd.instances[0].z = 0.0f;

    const AvatarTemplate& tpl = (*templates)[0];
    UpdateOptions opts;
    Camera cam = Camera::look_at(Vec3(0, 1.0f, -4.0f), Vec3(0, 1.0f, 0), 50, 160, 90);
    update_crowd(crowd, cam, opts);
    CHECK(crowd.instances[0].active_lod == 0);
    CHECK(crowd.instances[0].posed_means.size() == tpl.levels[0].gaussian_count());

    cam = Camera::look_at(Vec3(0, 1.0f, -12.0f), Vec3(0, 1.0f, 0), 50, 160, 90);
    update_crowd(crowd, cam, opts);
    CHECK(crowd.instances[0].active_lod == 2);
    CHECK(crowd.instances[0].posed_means.size() == tpl.levels[2].gaussian_count());
}

TEST_CASE("update_crowd: forced LoD overrides distance") {
    auto templates = make_templates(1);
    auto motions = make_motions(1);
    SceneConfig cfg = basic_scene(1, 1, 1);
    Crowd crowd = build_crowd(cfg, templates, motions, 11);
    UpdateOptions opts;
    opts.forced_lod = 1;
    update_crowd(crowd, cfg.camera.to_camera(), opts);
    CHECK(crowd.instances[0].active_lod == 1);
    CHECK(crowd.instances[0].posed_means.size() == (*templates)[0].levels[1].gaussian_count());
}

TEST_CASE("update_crowd: template data stays bit-unchanged") {
    auto templates = make_templates(2);
    auto motions = make_motions(2);
    const LodLevel snapshot = (*templates)[0].levels[0];

    SceneConfig cfg = basic_scene(9, 3, 3);
    Crowd crowd = build_crowd(cfg, templates, motions, 21);
    UpdateOptions opts;
    for (float t : {0.0f, 0.3f, 0.9f}) {
        opts.time_s = t;
        update_crowd(crowd, cfg.camera.to_camera(), opts);
    }
    const LodLevel& after = (*templates)[0].levels[0];
    CHECK(std::memcmp(snapshot.means.data(), after.means.data(),
                      snapshot.means.size() * sizeof(Vec3)) == 0);
    CHECK(std::memcmp(snapshot.rotations.data(), after.rotations.data(),
                      snapshot.rotations.size() * sizeof(Quat)) == 0);
    CHECK(std::memcmp(snapshot.skin_weights.data(), after.skin_weights.data(),
                      snapshot.skin_weights.size() * sizeof(std::array<float, 4>)) == 0);
}

TEST_CASE("update_crowd: posed buffers deterministic across thread counts") {
    auto templates = make_templates(2);
    auto motions = make_motions(3);
    SceneConfig cfg = basic_scene(16, 4, 4);
    Crowd a = build_crowd(cfg, templates, motions, 77);
    Crowd b = build_crowd(cfg, templates, motions, 77);
    const Camera cam = cfg.camera.to_camera();

    UpdateOptions opts;
    opts.time_s = 0.7f;
    opts.thread_count = 1;
    update_crowd(a, cam, opts);
    opts.thread_count = 8;
    update_crowd(b, cam, opts);
    for (size_t i = 0; i < a.instances.size(); ++i) {
        REQUIRE(a.instances[i].posed_means.size() == b.instances[i].posed_means.size());
        CHECK(std::memcmp(a.instances[i].posed_means.data(), b.instances[i].posed_means.data(),
                          a.instances[i].posed_means.size() * sizeof(Vec3)) == 0);
    }
}

TEST_CASE("memory model: hand arithmetic for 100 instances of one template") {
    MemoryLayoutModel model;
    CHECK(model.template_bytes_per_gaussian() == 80);
    CHECK(model.posed_bytes_per_gaussian() == 12);

    const uint64_t n = 1000;
    const MemoryReport rep = memory_report_cell(100, n, model);
    // resident template once in both modes, then 80 B vs 12 B per Gaussian
    // per instance.
    CHECK(rep.resident_template_bytes == 80 * n);
    CHECK(rep.naive_bytes == 80 * n + 100 * 80 * n);
    CHECK(rep.shared_bytes == 80 * n + 100 * 12 * n);
    CHECK(rep.savings_fraction == doctest::Approx(1.0 - 1280.0 / 8080.0).epsilon(1e-12));
    CHECK(rep.naive_marginal_bytes_per_instance == doctest::Approx(80.0 * n));
    CHECK(rep.shared_marginal_bytes_per_instance == doctest::Approx(12.0 * n));
}

TEST_CASE("memory model: single instance differs by the redundant template copy") {
    MemoryLayoutModel model;
    const uint64_t n = 500;
    const MemoryReport rep = memory_report_cell(1, n, model);
    CHECK(rep.naive_bytes == 80 * n + 80 * n);
    CHECK(rep.shared_bytes == 80 * n + 12 * n);
    CHECK(rep.naive_bytes - rep.shared_bytes == 68 * n);
    CHECK(rep.shared_bytes < rep.naive_bytes);
}

TEST_CASE("memory model: marginal slopes are exactly 12 and 80 bytes per Gaussian") {
    MemoryLayoutModel model;
    model.fixed_overhead_bytes = 123456789;
    const uint64_t n = 3176;
    for (uint64_t c : {1ull, 2ull, 100ull, 4999ull}) {
        const MemoryReport lo = memory_report_cell(c, n, model);
        const MemoryReport hi = memory_report_cell(c + 1, n, model);
        CHECK(hi.naive_bytes - lo.naive_bytes == 80 * n);
        CHECK(hi.shared_bytes - lo.shared_bytes == 12 * n);
        // slope ratio 12/80 checked in exact integer arithmetic
        CHECK((hi.shared_bytes - lo.shared_bytes) * 80 == (hi.naive_bytes - lo.naive_bytes) * 12);
    }
}

TEST_CASE("memory model: ordering and monotonicity") {
    MemoryLayoutModel model;
    model.fixed_overhead_bytes = 1 << 20;
    uint64_t prev_naive = 0, prev_shared = 0;
    for (uint64_t c : {0ull, 1ull, 10ull, 100ull, 1000ull}) {
        const MemoryReport rep = memory_report_cell(c, 12661, model);
        CHECK(rep.shared_bytes <= rep.naive_bytes);
        if (c == 0) {
            CHECK(rep.shared_bytes == rep.naive_bytes);  // equality only here
            CHECK(rep.naive_bytes == model.fixed_overhead_bytes);
        } else {
            CHECK(rep.shared_bytes < rep.naive_bytes);
        }
        CHECK(rep.naive_bytes >= prev_naive);
        CHECK(rep.shared_bytes >= prev_shared);
        prev_naive = rep.naive_bytes;
        prev_shared = rep.shared_bytes;
    }
    // monotone in gaussian count too
    const MemoryReport small = memory_report_cell(10, 3176, model);
    const MemoryReport big = memory_report_cell(10, 12661, model);
    CHECK(big.naive_bytes > small.naive_bytes);
    CHECK(big.shared_bytes > small.shared_bytes);
}

TEST_CASE("memory_report: residents counted once per (template, level)") {
    auto templates = make_templates(2);
    auto motions = make_motions(1);
    SceneConfig cfg = basic_scene(6, 3, 2);
    Crowd crowd = build_crowd(cfg, templates, motions, 13);
    // pin assignments: three instances of template 0, three of template 1,
    // all at level 1
    for (size_t i = 0; i < crowd.instances.size(); ++i) {
        crowd.instances[i].template_id = static_cast<uint32_t>(i % 2);
        crowd.instances[i].active_lod = 1;
    }
    MemoryLayoutModel model;
    const MemoryReport rep = memory_report(crowd, model);
    const uint64_t level_n = (*templates)[0].levels[1].gaussian_count();
    CHECK(rep.resident_template_bytes == 2 * 80 * level_n);
    CHECK(rep.shared_bytes == 2 * 80 * level_n + 6 * 12 * level_n);
    CHECK(rep.naive_bytes == 2 * 80 * level_n + 6 * 80 * level_n);

    // channel breakdown adds up to the resident total
    const ChannelBreakdown& ch = rep.resident_channels;
    CHECK(ch.mean + ch.rotation + ch.scale + ch.opacity + ch.color + ch.skin_indices +
              ch.skin_weights ==
          rep.resident_template_bytes);
}
