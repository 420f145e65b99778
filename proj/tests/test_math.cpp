#include "gsc/math.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstring>

using namespace gsc;

namespace {

Camera canonical_camera(int width = 640, int height = 360, float fov = 50.0f) {
    return Camera::look_at(Vec3::Zero(), Vec3(0, 0, 1), fov, width, height, 0.1f);
}

}  // namespace

TEST_CASE("build_covariance: isotropic unit case is the identity") {
    const Mat3 cov = build_covariance(Quat::Identity(), Vec3(1, 1, 1));
    CHECK((cov - Mat3::Identity()).cwiseAbs().maxCoeff() == 0.0f);
}

TEST_CASE("build_covariance: axis-aligned eigenvalues are squared scales") {
    const Mat3 cov = build_covariance(Quat::Identity(), Vec3(2, 1, 1));
    CHECK(cov(0, 0) == doctest::Approx(4.0f));
    CHECK(cov(1, 1) == doctest::Approx(1.0f));
    CHECK(cov(2, 2) == doctest::Approx(1.0f));
    CHECK(std::abs(cov(0, 1)) < 1e-7f);
}

TEST_CASE("build_covariance: 90 degree z rotation permutes the axes") {
    const Quat q(Eigen::AngleAxisf(0.5f * 3.14159265f, Vec3::UnitZ()));
    const Mat3 cov = build_covariance(q, Vec3(2, 1, 1));
    const Mat3 ref = oracle::ref_covariance(q, Vec3(2, 1, 1));
    CHECK((cov - ref).cwiseAbs().maxCoeff() < 1e-5f);
    CHECK(cov(0, 0) == doctest::Approx(1.0f).epsilon(1e-5));
    CHECK(cov(1, 1) == doctest::Approx(4.0f).epsilon(1e-5));
    CHECK(cov(2, 2) == doctest::Approx(1.0f).epsilon(1e-5));
}

TEST_CASE("build_covariance: spectrum is rotation invariant") {
    oracle::TestRng rng(11);
    for (int it = 0; it < 200; ++it) {
        const Quat q = rng.unit_quat();
        const Vec3 scale(rng.range(0.1f, 2.0f), rng.range(0.1f, 2.0f), rng.range(0.1f, 2.0f));
        const Mat3 cov = build_covariance(q, scale);

        CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() < 1e-6f);
        Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
        Vec3 expected = scale.cwiseProduct(scale);
        std::sort(expected.data(), expected.data() + 3);
        for (int i = 0; i < 3; ++i) {
            CHECK(eig.eigenvalues()[i] ==
                  doctest::Approx(expected[i]).epsilon(1e-4).scale(1.0));
        }
        CHECK((cov - oracle::ref_covariance(q, scale)).cwiseAbs().maxCoeff() < 1e-5f);
    }
}

TEST_CASE("build_covariance: non-finite input rejected") {
    CHECK_THROWS_AS(build_covariance(Quat(NAN, 0, 0, 0), Vec3(1, 1, 1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_covariance(Quat::Identity(), Vec3(1, -1, 1)),
                    std::invalid_argument);
}

TEST_CASE("project_gaussian: on-axis Gaussian lands at the image center") {
    const Camera cam = canonical_camera();
    const float f = cam.focal_px();
    const float d = 4.0f, s = 0.05f;
    Gaussian3D g;
    g.mean = Vec3(0, 0, d);
    g.scale = Vec3(s, s, s);
    const auto splat = project_gaussian(g, cam);
    REQUIRE(splat.has_value());
    CHECK(splat->mean_px.x() == doctest::Approx(320.0f).epsilon(1e-4));
    CHECK(splat->mean_px.y() == doctest::Approx(180.0f).epsilon(1e-4));
    const float expected = (f * s / d) * (f * s / d) + kCovDilation;
    CHECK(splat->cov_xx == doctest::Approx(expected).epsilon(1e-3));
    CHECK(splat->cov_yy == doctest::Approx(expected).epsilon(1e-3));
    CHECK(splat->depth == doctest::Approx(d).epsilon(1e-5));
}

TEST_CASE("project_gaussian: behind-camera Gaussians are culled") {
    const Camera cam = canonical_camera();
    Gaussian3D g;
    g.scale = Vec3(0.1f, 0.1f, 0.1f);
    g.mean = Vec3(0, 0, -2.0f);
    CHECK_FALSE(project_gaussian(g, cam).has_value());
    g.mean = Vec3(0, 0, 0.05f);  // in front but inside the near plane
    CHECK_FALSE(project_gaussian(g, cam).has_value());
    g.mean = Vec3(NAN, 0, 3.0f);
    CHECK_FALSE(project_gaussian(g, cam).has_value());
}

TEST_CASE("project_gaussian: off-screen Gaussians are culled") {
    const Camera cam = canonical_camera();
    Gaussian3D g;
    g.scale = Vec3(0.01f, 0.01f, 0.01f);
    g.mean = Vec3(50.0f, 0, 2.0f);  // far outside the frustum
    CHECK_FALSE(project_gaussian(g, cam).has_value());
}

TEST_CASE("project_gaussian: camera-space mirror symmetry") {
    const Camera cam = canonical_camera();
    Gaussian3D g;
    g.scale = Vec3(0.08f, 0.03f, 0.05f);
    g.rotation = Quat(Eigen::AngleAxisf(0.7f, Vec3(1, 2, 0.5f).normalized()));

    // Camera at the origin looking +z with identity-free mapping: camera x is
    // world -x, so mirroring camera x means mirroring world x.
    const Vec3 cam_space(0.8f, 0.4f, 5.0f);
    const Mat3 world_from_cam = cam.orientation.toRotationMatrix();
    g.mean = world_from_cam * cam_space;
    const auto a = project_gaussian(g, cam);
    Gaussian3D gm = g;
    gm.mean = world_from_cam * Vec3(-cam_space.x(), cam_space.y(), cam_space.z());
    // Mirror the covariance too: reflect the rotation about the x axis.
    gm.rotation = Quat(g.rotation.w(), g.rotation.x(), -g.rotation.y(), -g.rotation.z());
    const auto b = project_gaussian(gm, cam);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(b->mean_px.x() ==
          doctest::Approx(static_cast<float>(cam.width) - a->mean_px.x()).epsilon(1e-4));
    CHECK(b->mean_px.y() == doctest::Approx(a->mean_px.y()).epsilon(1e-4));
    CHECK(b->cov_xx == doctest::Approx(a->cov_xx).epsilon(1e-4));
    CHECK(b->cov_yy == doctest::Approx(a->cov_yy).epsilon(1e-4));
    CHECK(b->cov_xy == doctest::Approx(-a->cov_xy).epsilon(1e-4));
}

TEST_CASE("project_gaussian: analytic covariance matches finite differences") {
    const Camera cam = canonical_camera(1280, 720);
    oracle::TestRng rng(23);
    int tested = 0;
    while (tested < 100) {
        const float d = rng.range(2.0f, 20.0f);
        const Vec3 mean(rng.range(-0.4f, 0.4f) * d, rng.range(-0.2f, 0.2f) * d, d);
        const float smax = 0.045f * d;
        const Vec3 scale(rng.range(0.2f, 1.0f) * smax, rng.range(0.2f, 1.0f) * smax,
                         rng.range(0.2f, 1.0f) * smax);
        const Quat q = rng.unit_quat();
        const Mat3 cov = build_covariance(q, scale);
        const auto splat = project_covariance(mean, cov, Vec3::Ones(), 1.0f, cam);
        if (!splat) continue;
        ++tested;

        double fd[2][2];
        oracle::fd_projected_cov(cam, mean, cov, fd);
        const double scale_ref = std::max({std::abs(fd[0][0]), std::abs(fd[1][1]), 1.0});
        CHECK(std::abs(splat->cov_xx - fd[0][0]) / scale_ref < 1e-3);
        CHECK(std::abs(splat->cov_yy - fd[1][1]) / scale_ref < 1e-3);
        CHECK(std::abs(splat->cov_xy - fd[0][1]) / scale_ref < 1e-3);
    }
}

TEST_CASE("project_gaussian: pixel radius scales as 1/distance") {
    const Camera cam = canonical_camera(1280, 720);
    const float s = 0.03f;
    Gaussian3D g;
    g.scale = Vec3(s, s, s);
    float prev_radius = 0.0f;
    float prev_d = 0.0f;
    for (float d : {1.0f, 2.0f, 4.0f, 8.0f}) {
        g.mean = Vec3(0, 0, d);
        const auto splat = project_gaussian(g, cam);
        REQUIRE(splat.has_value());
        const float radius = std::sqrt(splat->cov_xx - kCovDilation);
        if (prev_radius > 0.0f) {
            const float expected = prev_radius * prev_d / d;
            CHECK(std::abs(radius - expected) / expected < 0.05f);
        }
        prev_radius = radius;
        prev_d = d;
    }
}

TEST_CASE("eval_alpha: spec examples") {
    Splat2D s;
    s.mean_px = Vec2(10, 10);
    s.cov_xx = 4;
    s.cov_xy = 0;
    s.cov_yy = 4;

    s.opacity = 0.8f;
    CHECK(eval_alpha(s, Vec2(10, 10)) == doctest::Approx(0.8f));

    s.opacity = 1.0f;
    CHECK(eval_alpha(s, Vec2(10, 10)) == doctest::Approx(0.99f));  // clamp

    CHECK(eval_alpha(s, Vec2(12, 10)) == doctest::Approx(std::exp(-0.5f)).epsilon(1e-6));
}

TEST_CASE("eval_alpha: cutoff returns exactly zero") {
    Splat2D s;
    s.mean_px = Vec2(0, 0);
    s.cov_xx = 1;
    s.cov_xy = 0;
    s.cov_yy = 1;
    s.opacity = 1.0f;
    CHECK(eval_alpha(s, Vec2(10, 0)) == 0.0f);
}

TEST_CASE("eval_alpha: monotone in Mahalanobis distance, bounded by alpha_max") {
    oracle::TestRng rng(7);
    for (int it = 0; it < 50; ++it) {
        Splat2D s;
        s.mean_px = Vec2(rng.range(0, 100), rng.range(0, 100));
        const float l0 = rng.range(0.5f, 30.0f), l1 = rng.range(0.5f, 30.0f);
        const float theta = rng.range(0.0f, 6.2831853f);
        const float c = std::cos(theta), sn = std::sin(theta);
        s.cov_xx = c * c * l0 + sn * sn * l1;
        s.cov_yy = sn * sn * l0 + c * c * l1;
        s.cov_xy = c * sn * (l0 - l1);
        s.opacity = rng.range(0.1f, 1.0f);

        const Vec2 dir(std::cos(rng.range(0.0f, 6.28f)), std::sin(rng.range(0.0f, 6.28f)));
        float prev = kAlphaMax + 1.0f;
        for (float r = 0.0f; r < 12.0f; r += 0.5f) {
            const float alpha = eval_alpha(s, s.mean_px + r * dir);
            CHECK(alpha <= kAlphaMax);
            CHECK(alpha <= prev + 1e-7f);
            prev = alpha;
        }
    }
}

TEST_CASE("math operations are pure: identical inputs give identical bits") {
    const Camera cam = canonical_camera();
    Gaussian3D g;
    g.mean = Vec3(0.3f, -0.2f, 5.0f);
    g.rotation = Quat(Eigen::AngleAxisf(0.4f, Vec3(0.2f, 1, 0).normalized()));
    g.scale = Vec3(0.2f, 0.1f, 0.05f);
    g.opacity = 0.7f;
    const auto a = project_gaussian(g, cam);
    const auto b = project_gaussian(g, cam);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(std::memcmp(&a->mean_px, &b->mean_px, sizeof(Vec2)) == 0);
    CHECK(a->cov_xx == b->cov_xx);
    CHECK(a->cov_xy == b->cov_xy);
    CHECK(a->cov_yy == b->cov_yy);
    CHECK(eval_alpha(*a, Vec2(1, 2)) == eval_alpha(*b, Vec2(1, 2)));
}

TEST_CASE("Camera and Gaussian validation") {
    Camera cam;
    cam.width = 0;
    CHECK_THROWS_AS(validate(cam), std::invalid_argument);
    cam = canonical_camera();
    cam.fov_y_deg = 180.0f;
    CHECK_THROWS_AS(validate(cam), std::invalid_argument);
    cam = canonical_camera();
    cam.near_m = 0.0f;
    CHECK_THROWS_AS(validate(cam), std::invalid_argument);

    Gaussian3D g;
    g.opacity = 0.0f;
    CHECK_THROWS_AS(validate(g), std::invalid_argument);
    g = Gaussian3D{};
    g.rotation = Quat(0.9f, 0, 0, 0);
    CHECK_THROWS_AS(validate(g), std::invalid_argument);
    g = Gaussian3D{};
    g.color = Vec3(1.2f, 0, 0);
    CHECK_THROWS_AS(validate(g), std::invalid_argument);
}
