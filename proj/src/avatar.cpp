#include "gsc/avatar.hpp"

#include <cmath>
#include <stdexcept>

namespace gsc {

namespace {

Mat4 rigid_inverse(const Mat4& m) {
    Mat3 r = m.topLeftCorner<3, 3>();
    Vec3 t = m.topRightCorner<3, 1>();
    Mat4 out = Mat4::Identity();
    out.topLeftCorner<3, 3>() = r.transpose();
    out.topRightCorner<3, 1>() = -(r.transpose() * t);
    return out;
}

Mat4 rotation_matrix(const Quat& q) {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = q.toRotationMatrix();
    return m;
}

void check_rigid(const Mat4& m, const char* what) {
    Mat3 r = m.topLeftCorner<3, 3>();
    if ((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-4f) {
        throw std::invalid_argument(std::string(what) + ": rotation block not orthonormal");
    }
    if (std::abs(r.determinant() - 1.0f) > 1e-4f) {
        throw std::invalid_argument(std::string(what) + ": determinant not +1");
    }
    if (m.row(3) != Eigen::RowVector4f(0, 0, 0, 1)) {
        throw std::invalid_argument(std::string(what) + ": bottom row not (0,0,0,1)");
    }
}

}  // namespace

Skeleton Skeleton::make(std::vector<int16_t> parents, std::vector<Mat4> inverse_bind) {
    if (parents.empty()) {
        throw std::invalid_argument("Skeleton: no joints");
    }
    if (parents.size() != inverse_bind.size()) {
        throw std::invalid_argument("Skeleton: parent/inverse_bind size mismatch");
    }
    int roots = 0;
    for (size_t j = 0; j < parents.size(); ++j) {
        if (parents[j] < 0) {
            ++roots;
        } else if (static_cast<size_t>(parents[j]) >= j) {
            throw std::invalid_argument("Skeleton: parent index must precede child");
        }
    }
    if (roots != 1 || parents[0] >= 0) {
        throw std::invalid_argument("Skeleton: exactly one root at index 0 required");
    }

    Skeleton s;
    s.parents = std::move(parents);
    s.inverse_bind = std::move(inverse_bind);
    s.bind.resize(s.inverse_bind.size());
    s.local_bind.resize(s.inverse_bind.size());
    for (size_t j = 0; j < s.inverse_bind.size(); ++j) {
        check_rigid(s.inverse_bind[j], "Skeleton inverse_bind");
        s.bind[j] = rigid_inverse(s.inverse_bind[j]);
        s.local_bind[j] = s.parents[j] < 0
                              ? s.bind[j]
                              : Mat4(s.inverse_bind[s.parents[j]] * s.bind[j]);
    }
    return s;
}

Pose bind_pose(uint32_t joint_count) {
    Pose p;
    p.local_rotations.assign(joint_count, Quat::Identity());
    return p;
}

void validate(const MotionClip& clip) {
    if (clip.frames.empty()) {
        throw std::invalid_argument("MotionClip: no frames");
    }
    if (!(clip.fps > 0.0f)) {
        throw std::invalid_argument("MotionClip: fps must be > 0");
    }
    for (const Pose& f : clip.frames) {
        if (f.local_rotations.size() != clip.joint_count) {
            throw std::invalid_argument("MotionClip: frame joint count mismatch");
        }
        for (const Quat& q : f.local_rotations) {
            if (std::abs(q.norm() - 1.0f) > 1e-5f) {
                throw std::invalid_argument("MotionClip: rotation not normalized");
            }
        }
    }
}

void LodLevel::finalize() {
    cov_cache.resize(means.size());
    for (size_t i = 0; i < means.size(); ++i) {
        Mat3 c = build_covariance(rotations[i], scales[i]);
        cov_cache[i] = {c(0, 0), c(0, 1), c(0, 2), c(1, 1), c(1, 2), c(2, 2)};
    }
}

void validate(const LodLevel& level, uint32_t joint_count) {
    const size_t n = level.means.size();
    if (n == 0) {
        throw std::invalid_argument("LodLevel: empty");
    }
    if (level.rotations.size() != n || level.scales.size() != n ||
        level.opacities.size() != n || level.colors.size() != n ||
        level.skin_indices.size() != n || level.skin_weights.size() != n) {
        throw std::invalid_argument("LodLevel: attribute array length mismatch");
    }
    for (size_t i = 0; i < n; ++i) {
        Gaussian3D g{level.means[i], level.rotations[i], level.scales[i],
                     level.opacities[i], level.colors[i]};
        validate(g);
        float wsum = 0.0f;
        for (int k = 0; k < 4; ++k) {
            if (level.skin_indices[i][k] >= joint_count) {
                throw std::invalid_argument("LodLevel: skin index out of range");
            }
            if (level.skin_weights[i][k] < 0.0f) {
                throw std::invalid_argument("LodLevel: negative skin weight");
            }
            wsum += level.skin_weights[i][k];
        }
        if (std::abs(wsum - 1.0f) > 1e-5f) {
            throw std::invalid_argument("LodLevel: skin weights do not sum to 1");
        }
    }
}

void validate(const AvatarTemplate& tpl) {
    if (tpl.levels.empty()) {
        throw std::invalid_argument("AvatarTemplate: no LoD levels");
    }
    for (size_t l = 0; l < tpl.levels.size(); ++l) {
        validate(tpl.levels[l], tpl.skeleton.joint_count());
        if (l > 0 && tpl.levels[l].gaussian_count() >= tpl.levels[l - 1].gaussian_count()) {
            throw std::invalid_argument("AvatarTemplate: level counts must strictly decrease");
        }
    }
}

std::vector<Mat4> forward_kinematics(const Skeleton& skel, const Pose& pose,
                                     const Mat4& root) {
    const uint32_t joints = skel.joint_count();
    if (pose.local_rotations.size() != joints) {
        throw std::invalid_argument("forward_kinematics: pose joint count mismatch");
    }
    std::vector<Mat4> world(joints);
    Mat4 root_offset = Mat4::Identity();
    root_offset.topRightCorner<3, 1>() = pose.root_translation;
    for (uint32_t j = 0; j < joints; ++j) {
        const Mat4 local = skel.local_bind[j] * rotation_matrix(pose.local_rotations[j]);
        world[j] = j == 0 ? Mat4(root * root_offset * local)
                          : Mat4(world[skel.parents[j]] * local);
    }
    return world;
}

std::vector<Mat4> compute_skin_matrices(std::span<const Mat4> world,
                                        std::span<const Mat4> inverse_bind) {
    if (world.size() != inverse_bind.size()) {
        throw std::invalid_argument("compute_skin_matrices: size mismatch");
    }
    std::vector<Mat4> out(world.size());
    for (size_t j = 0; j < world.size(); ++j) {
        out[j] = world[j] * inverse_bind[j];
    }
    return out;
}

void skin_means(const LodLevel& level, std::span<const Mat4> skin_matrices,
                std::span<Vec3> posed_out) {
    const size_t n = level.means.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec4 p(level.means[i].x(), level.means[i].y(), level.means[i].z(), 1.0f);
        Vec3 acc = Vec3::Zero();
        const auto& idx = level.skin_indices[i];
        const auto& w = level.skin_weights[i];
        for (int k = 0; k < 4; ++k) {
            if (w[k] == 0.0f) continue;
            acc += w[k] * (skin_matrices[idx[k]] * p).head<3>();
        }
        posed_out[i] = acc;
    }
}

std::vector<Vec3> skin_means(const LodLevel& level, std::span<const Mat4> world,
                             std::span<const Mat4> inverse_bind) {
    std::vector<Mat4> sm = compute_skin_matrices(world, inverse_bind);
    std::vector<Vec3> posed(level.means.size());
    skin_means(level, sm, posed);
    return posed;
}

void skin_rotations(const LodLevel& level, std::span<const Mat4> skin_matrices,
                    std::span<Quat> posed_out) {
    std::vector<Quat> joint_rot(skin_matrices.size());
    for (size_t j = 0; j < skin_matrices.size(); ++j) {
        joint_rot[j] = Quat(Mat3(skin_matrices[j].topLeftCorner<3, 3>())).normalized();
    }
    const size_t n = level.means.size();
    for (size_t i = 0; i < n; ++i) {
        const auto& idx = level.skin_indices[i];
        const auto& w = level.skin_weights[i];
        Quat ref = joint_rot[idx[0]];
        Vec4 acc = Vec4::Zero();
        for (int k = 0; k < 4; ++k) {
            if (w[k] == 0.0f) continue;
            Quat q = joint_rot[idx[k]];
            const float sign = q.dot(ref) < 0.0f ? -1.0f : 1.0f;
            acc += (w[k] * sign) * q.coeffs();
        }
        Quat blended(acc);
        blended.normalize();
        posed_out[i] = blended * level.rotations[i];
    }
}

Quat slerp_shortest(const Quat& a, const Quat& b, float t) {
    float d = a.dot(b);
    Quat bf = b;
    if (d < 0.0f) {
        d = -d;
        bf.coeffs() = -bf.coeffs();
    }
    if (d > 0.9995f) {
        Quat out(a.coeffs() + t * (bf.coeffs() - a.coeffs()));
        out.normalize();
        return out;
    }
    const float theta = std::acos(std::min(d, 1.0f));
    const float s = std::sin(theta);
    const float wa = std::sin((1.0f - t) * theta) / s;
    const float wb = std::sin(t * theta) / s;
    Quat out(wa * a.coeffs() + wb * bf.coeffs());
    out.normalize();
    return out;
}

Pose sample_pose(const MotionClip& clip, float time_s, bool wrap) {
    if (clip.frames.empty()) {
        throw std::invalid_argument("sample_pose: empty clip");
    }
    const size_t n = clip.frames.size();
    float fpos = time_s * clip.fps;
    size_t i0, i1;
    float t;
    if (wrap) {
        fpos = std::fmod(fpos, static_cast<float>(n));
        if (fpos < 0.0f) fpos += static_cast<float>(n);
        i0 = static_cast<size_t>(fpos) % n;
        i1 = (i0 + 1) % n;
        t = fpos - std::floor(fpos);
    } else {
        if (fpos <= 0.0f) fpos = 0.0f;
        const float last = static_cast<float>(n - 1);
        if (fpos >= last) {
            i0 = i1 = n - 1;
            t = 0.0f;
        } else {
            i0 = static_cast<size_t>(fpos);
            i1 = i0 + 1;
            t = fpos - static_cast<float>(i0);
        }
    }

    const Pose& a = clip.frames[i0];
    const Pose& b = clip.frames[i1];
    Pose out;
    out.root_translation = (1.0f - t) * a.root_translation + t * b.root_translation;
    out.local_rotations.resize(a.local_rotations.size());
    for (size_t j = 0; j < a.local_rotations.size(); ++j) {
        out.local_rotations[j] = slerp_shortest(a.local_rotations[j], b.local_rotations[j], t);
    }
    return out;
}

}  // namespace gsc
