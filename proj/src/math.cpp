#include "gsc/math.hpp"

#include <cmath>
#include <stdexcept>

namespace gsc {

namespace {

bool finite(const Vec3& v) {
    return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

bool finite(const Quat& q) {
    return std::isfinite(q.w()) && std::isfinite(q.x()) && std::isfinite(q.y()) &&
           std::isfinite(q.z());
}

}  // namespace

void validate(const Gaussian3D& g) {
    if (!finite(g.mean) || !finite(g.rotation) || !finite(g.scale) ||
        !std::isfinite(g.opacity) || !finite(g.color)) {
        throw std::invalid_argument("Gaussian3D: non-finite field");
    }
    if (std::abs(g.rotation.norm() - 1.0f) > 1e-6f) {
        throw std::invalid_argument("Gaussian3D: rotation quaternion not normalized");
    }
    if (!(g.scale.x() > 0.0f && g.scale.y() > 0.0f && g.scale.z() > 0.0f)) {
        throw std::invalid_argument("Gaussian3D: scale components must be positive");
    }
    if (!(g.opacity > 0.0f && g.opacity <= 1.0f)) {
        throw std::invalid_argument("Gaussian3D: opacity outside (0,1]");
    }
    for (int i = 0; i < 3; ++i) {
        if (g.color[i] < 0.0f || g.color[i] > 1.0f) {
            throw std::invalid_argument("Gaussian3D: color component outside [0,1]");
        }
    }
}

Camera Camera::look_at(const Vec3& eye, const Vec3& target, float fov_y_deg, int width,
                       int height, float near_m, const Vec3& up) {
    Vec3 forward = (target - eye).normalized();
    Vec3 axis = up;
    if (forward.cross(axis).squaredNorm() < 1e-12f) {
        axis = Vec3(0.0f, 0.0f, 1.0f);  // looking straight along up; pick another
    }
    // Right-handed basis with image y pointing down: right x down = forward.
    Vec3 right = forward.cross(axis).normalized();
    Vec3 down = forward.cross(right);
    Mat3 basis;
    basis.col(0) = right;
    basis.col(1) = down;
    basis.col(2) = forward;
    Camera cam;
    cam.position = eye;
    cam.orientation = Quat(basis).normalized();
    cam.fov_y_deg = fov_y_deg;
    cam.width = width;
    cam.height = height;
    cam.near_m = near_m;
    return cam;
}

float Camera::focal_px() const {
    const float half_fov = 0.5f * fov_y_deg * (3.14159265358979323846f / 180.0f);
    return 0.5f * static_cast<float>(height) / std::tan(half_fov);
}

Mat3 Camera::view_rotation() const {
    return orientation.toRotationMatrix().transpose();
}

Vec3 Camera::to_view(const Vec3& world) const {
    return view_rotation() * (world - position);
}

void validate(const Camera& cam) {
    if (cam.width < 1 || cam.height < 1) {
        throw std::invalid_argument("Camera: width and height must be >= 1");
    }
    if (!(cam.near_m > 0.0f)) {
        throw std::invalid_argument("Camera: near plane must be > 0");
    }
    if (!(cam.fov_y_deg > 0.0f && cam.fov_y_deg < 180.0f)) {
        throw std::invalid_argument("Camera: fov_y outside (0,180)");
    }
    if (!finite(cam.position) || !finite(cam.orientation)) {
        throw std::invalid_argument("Camera: non-finite pose");
    }
}

Mat3 build_covariance(const Quat& rotation, const Vec3& scale) {
    if (!finite(rotation) || !finite(scale)) {
        throw std::invalid_argument("build_covariance: non-finite input");
    }
    if (!(scale.x() > 0.0f && scale.y() > 0.0f && scale.z() > 0.0f)) {
        throw std::invalid_argument("build_covariance: scale components must be positive");
    }
    Mat3 r = rotation.toRotationMatrix();
    Mat3 m = r * scale.asDiagonal();
    return m * m.transpose();
}

PixelRect splat_bounds(const Vec2& mean_px, float cov_xx, float cov_yy, int width,
                       int height) {
    const float rx = 3.0f * std::sqrt(cov_xx);
    const float ry = 3.0f * std::sqrt(cov_yy);
    PixelRect r;
    r.x0 = std::max(0, static_cast<int>(std::floor(mean_px.x() - rx)));
    r.y0 = std::max(0, static_cast<int>(std::floor(mean_px.y() - ry)));
    r.x1 = std::min(width, static_cast<int>(std::floor(mean_px.x() + rx)) + 1);
    r.y1 = std::min(height, static_cast<int>(std::floor(mean_px.y() + ry)) + 1);
    return r;
}

CameraBasis CameraBasis::from(const Camera& cam) {
    CameraBasis b;
    b.world_to_view = cam.view_rotation();
    b.position = cam.position;
    b.focal = cam.focal_px();
    b.cx = 0.5f * static_cast<float>(cam.width);
    b.cy = 0.5f * static_cast<float>(cam.height);
    b.near_m = cam.near_m;
    b.width = cam.width;
    b.height = cam.height;
    return b;
}

std::optional<Splat2D> project_covariance(const Vec3& mean_world, const Mat3& cov_world,
                                          const Vec3& color, float opacity,
                                          const CameraBasis& basis) {
    if (!finite(mean_world) || !cov_world.allFinite()) {
        return std::nullopt;
    }
    const Mat3& w = basis.world_to_view;
    const Vec3 t = w * (mean_world - basis.position);
    if (!(t.z() > basis.near_m)) {
        return std::nullopt;
    }

    const float f = basis.focal;
    const float inv_z = 1.0f / t.z();
    const Vec2 mean_px(f * t.x() * inv_z + basis.cx, f * t.y() * inv_z + basis.cy);

    // J = d(pixel)/d(camera point), evaluated at the mean.
    Eigen::Matrix<float, 2, 3> jac;
    jac << f * inv_z, 0.0f, -f * t.x() * inv_z * inv_z,
           0.0f, f * inv_z, -f * t.y() * inv_z * inv_z;

    const Eigen::Matrix<float, 2, 3> m = jac * w;
    Mat2 cov2 = m * cov_world * m.transpose();
    cov2(0, 0) += kCovDilation;
    cov2(1, 1) += kCovDilation;

    if (splat_bounds(mean_px, cov2(0, 0), cov2(1, 1), basis.width, basis.height).empty()) {
        return std::nullopt;
    }

    Splat2D s;
    s.mean_px = mean_px;
    s.cov_xx = cov2(0, 0);
    s.cov_xy = 0.5f * (cov2(0, 1) + cov2(1, 0));
    s.cov_yy = cov2(1, 1);
    s.depth = t.z();
    s.color = color;
    s.opacity = opacity;
    return s;
}

std::optional<Splat2D> project_covariance(const Vec3& mean_world, const Mat3& cov_world,
                                          const Vec3& color, float opacity,
                                          const Camera& cam) {
    return project_covariance(mean_world, cov_world, color, opacity, CameraBasis::from(cam));
}

std::optional<Splat2D> project_gaussian(const Gaussian3D& g, const Camera& cam) {
    if (!finite(g.scale) || !(g.scale.x() > 0.0f && g.scale.y() > 0.0f && g.scale.z() > 0.0f)) {
        return std::nullopt;
    }
    return project_covariance(g.mean, build_covariance(g.rotation, g.scale), g.color,
                              g.opacity, cam);
}

float eval_alpha(const Splat2D& s, const Vec2& pixel_center, float alpha_max,
                 float alpha_cutoff) {
    const float det = s.cov_xx * s.cov_yy - s.cov_xy * s.cov_xy;
    const float inv_det = 1.0f / det;
    const float a = s.cov_yy * inv_det;
    const float b = -s.cov_xy * inv_det;
    const float c = s.cov_xx * inv_det;
    const float dx = pixel_center.x() - s.mean_px.x();
    const float dy = pixel_center.y() - s.mean_px.y();
    const float power = -0.5f * (a * dx * dx + c * dy * dy) - b * dx * dy;
    float alpha = s.opacity * std::exp(power);
    if (alpha > alpha_max) alpha = alpha_max;
    return alpha < alpha_cutoff ? 0.0f : alpha;
}

}  // namespace gsc
