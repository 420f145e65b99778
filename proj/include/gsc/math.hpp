// Gaussian primitive math: 3D covariance construction, EWA perspective
// projection to screen-space 2D Gaussians, and alpha evaluation.
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <optional>

namespace gsc {

using Vec2 = Eigen::Vector2f;
using Vec3 = Eigen::Vector3f;
using Vec4 = Eigen::Vector4f;
using Quat = Eigen::Quaternionf;
using Mat2 = Eigen::Matrix2f;
using Mat3 = Eigen::Matrix3f;
using Mat4 = Eigen::Matrix4f;

// Rasterizer constants shared by the whole pipeline.
inline constexpr float kAlphaMax = 0.99f;
inline constexpr float kAlphaCutoff = 1.0f / 255.0f;
// Low-pass dilation added to both diagonal entries of every projected
// covariance (px^2). Keeps cov2d invertible and antialiases sub-pixel splats.
inline constexpr float kCovDilation = 0.3f;
inline constexpr float kPsnrCap = 99.0f;

struct Gaussian3D {
    Vec3 mean = Vec3::Zero();          // world space, meters
    Quat rotation = Quat::Identity();  // unit quaternion (w,x,y,z)
    Vec3 scale = Vec3::Ones();         // per-axis stddev, meters, > 0
    float opacity = 1.0f;              // (0, 1]
    Vec3 color = Vec3::Ones();         // linear RGB, [0,1]
};

// Throws std::invalid_argument when an invariant is violated.
void validate(const Gaussian3D& g);

// Pinhole camera. Camera space is x-right, y-down, z-forward; view depth is
// the camera-space z coordinate.
struct Camera {
    Vec3 position = Vec3::Zero();
    Quat orientation = Quat::Identity();  // camera-to-world rotation
    float fov_y_deg = 50.0f;              // vertical field of view, (0,180)
    int width = 1280;
    int height = 720;
    float near_m = 0.1f;

    static Camera look_at(const Vec3& eye, const Vec3& target, float fov_y_deg,
                          int width, int height, float near_m = 0.1f,
                          const Vec3& up = Vec3(0.0f, 1.0f, 0.0f));

    float focal_px() const;                  // square pixels, from fov_y
    Mat3 view_rotation() const;              // world -> camera
    Vec3 to_view(const Vec3& world) const;   // world point -> camera space
};

void validate(const Camera& cam);

// Screen-space 2D Gaussian. cov2d is stored as the three unique entries of
// the symmetric 2x2 matrix; after projection it includes the low-pass
// dilation and is positive definite.
struct Splat2D {
    Vec2 mean_px = Vec2::Zero();
    float cov_xx = 1.0f;
    float cov_xy = 0.0f;
    float cov_yy = 1.0f;
    float depth = 0.0f;  // view-space z, meters
    Vec3 color = Vec3::Ones();
    float opacity = 1.0f;

    Mat2 cov2d() const {
        Mat2 m;
        m << cov_xx, cov_xy, cov_xy, cov_yy;
        return m;
    }
};

// Sigma = R * S * S^T * R^T. Symmetric positive definite; eigenvalues are
// the squared scales. Throws std::invalid_argument on non-finite input.
Mat3 build_covariance(const Quat& rotation, const Vec3& scale);

// Camera pose and intrinsics flattened for bulk projection, so per-splat
// calls don't redo the quaternion-to-matrix conversion.
struct CameraBasis {
    Mat3 world_to_view;
    Vec3 position;
    float focal;
    float cx, cy;
    float near_m;
    int width, height;

    static CameraBasis from(const Camera& cam);
};

// EWA projection: local affine (Jacobian) approximation of the perspective
// map evaluated at the Gaussian mean. Returns nullopt when the Gaussian is
// culled: view z <= near, the 3-sigma screen rectangle misses the image, or
// any input is non-finite.
std::optional<Splat2D> project_covariance(const Vec3& mean_world, const Mat3& cov_world,
                                          const Vec3& color, float opacity,
                                          const CameraBasis& basis);

std::optional<Splat2D> project_covariance(const Vec3& mean_world, const Mat3& cov_world,
                                          const Vec3& color, float opacity,
                                          const Camera& cam);

std::optional<Splat2D> project_gaussian(const Gaussian3D& g, const Camera& cam);

// alpha = min(alpha_max, opacity * exp(-0.5 * d^T cov2d^-1 d)); values below
// alpha_cutoff evaluate to 0.
float eval_alpha(const Splat2D& s, const Vec2& pixel_center,
                 float alpha_max = kAlphaMax, float alpha_cutoff = kAlphaCutoff);

// Integer 3-sigma bounding rectangle of a splat clipped to [0,w) x [0,h),
// half-open. Empty (x0 >= x1 or y0 >= y1) means the splat misses the image.
struct PixelRect {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    bool empty() const { return x0 >= x1 || y0 >= y1; }
};

PixelRect splat_bounds(const Vec2& mean_px, float cov_xx, float cov_yy, int width, int height);

}  // namespace gsc
