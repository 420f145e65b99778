#include "gsc/io.hpp"

#include <cstring>
#include <fstream>
#include <vector>

namespace gsc {

namespace {

constexpr uint32_t kFormatVersion = 1;

// Little-endian byte stream writer/reader. Hosts are LE in practice but the
// explicit byte handling keeps the files portable regardless.
class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
        if (!out_) {
            throw FormatError(FormatErrorKind::IoError,
                              "cannot open for writing: " + path.string());
        }
    }
    void bytes(const void* data, size_t n) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    }
    void u8(uint8_t v) { bytes(&v, 1); }
    void u16(uint16_t v) {
        const uint8_t b[2] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8)};
        bytes(b, 2);
    }
    void i16(int16_t v) { u16(static_cast<uint16_t>(v)); }
    void u32(uint32_t v) {
        const uint8_t b[4] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8),
                              static_cast<uint8_t>(v >> 16), static_cast<uint8_t>(v >> 24)};
        bytes(b, 4);
    }
    void f32(float v) {
        uint32_t bits;
        std::memcpy(&bits, &v, 4);
        u32(bits);
    }
    void finish(const std::filesystem::path& path) {
        out_.flush();
        if (!out_) {
            throw FormatError(FormatErrorKind::IoError, "write failed: " + path.string());
        }
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    Reader(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw FormatError(FormatErrorKind::IoError,
                              "cannot open for reading: " + path.string());
        }
        in.seekg(0, std::ios::end);
        data_.resize(static_cast<size_t>(in.tellg()));
        in.seekg(0);
        in.read(reinterpret_cast<char*>(data_.data()),
                static_cast<std::streamsize>(data_.size()));
        if (!in) {
            throw FormatError(FormatErrorKind::IoError, "read failed: " + path.string());
        }
    }
    void section(std::string name) { section_ = std::move(name); }
    void bytes(void* out, size_t n) {
        if (pos_ + n > data_.size()) {
            throw FormatError(FormatErrorKind::Truncated,
                              "file truncated in section '" + section_ + "'");
        }
        std::memcpy(out, data_.data() + pos_, n);
        pos_ += n;
    }
    uint8_t u8() {
        uint8_t v;
        bytes(&v, 1);
        return v;
    }
    uint16_t u16() {
        uint8_t b[2];
        bytes(b, 2);
        return static_cast<uint16_t>(b[0] | (b[1] << 8));
    }
    int16_t i16() { return static_cast<int16_t>(u16()); }
    uint32_t u32() {
        uint8_t b[4];
        bytes(b, 4);
        return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
               (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
    }
    float f32() {
        const uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    bool at_end() const { return pos_ == data_.size(); }

private:
    std::vector<uint8_t> data_;
    size_t pos_ = 0;
    std::string section_ = "header";
};

void check_magic(Reader& r, const char expected[4], const char* what) {
    char magic[4];
    r.section("magic");
    r.bytes(magic, 4);
    if (std::memcmp(magic, expected, 4) != 0) {
        throw FormatError(FormatErrorKind::BadMagic,
                          std::string("bad magic, not a ") + what + " file");
    }
    r.section("version");
    const uint32_t version = r.u32();
    if (version != kFormatVersion) {
        throw FormatError(FormatErrorKind::VersionMismatch,
                          "unsupported " + std::string(what) + " version " +
                              std::to_string(version));
    }
}

template <typename Fn>
auto wrap_invariant(Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        throw FormatError(FormatErrorKind::InvariantViolation, e.what());
    }
}

}  // namespace

void save_template(const AvatarTemplate& tpl, const std::filesystem::path& path) {
    validate(tpl);
    Writer w(path);
    w.bytes("GSAT", 4);
    w.u32(kFormatVersion);
    w.u16(static_cast<uint16_t>(tpl.skeleton.joint_count()));
    w.u8(static_cast<uint8_t>(tpl.levels.size()));
    for (int16_t p : tpl.skeleton.parents) w.i16(p);
    for (const Mat4& m : tpl.skeleton.inverse_bind) {
        for (int row = 0; row < 4; ++row) {
            for (int col = 0; col < 4; ++col) w.f32(m(row, col));
        }
    }
    for (const LodLevel& level : tpl.levels) {
        const uint32_t n = level.gaussian_count();
        w.u32(n);
        for (const Vec3& v : level.means) {
            w.f32(v.x());
            w.f32(v.y());
            w.f32(v.z());
        }
        for (const Quat& q : level.rotations) {
            w.f32(q.w());
            w.f32(q.x());
            w.f32(q.y());
            w.f32(q.z());
        }
        for (const Vec3& v : level.scales) {
            w.f32(v.x());
            w.f32(v.y());
            w.f32(v.z());
        }
        for (float o : level.opacities) w.f32(o);
        for (const Vec3& v : level.colors) {
            w.f32(v.x());
            w.f32(v.y());
            w.f32(v.z());
        }
        for (const auto& idx : level.skin_indices) {
            for (uint16_t i : idx) w.u16(i);
        }
        for (const auto& weights : level.skin_weights) {
            for (float x : weights) w.f32(x);
        }
    }
    w.finish(path);
}

AvatarTemplate load_template(const std::filesystem::path& path) {
    Reader r(path);
    check_magic(r, "GSAT", "GSAT template");

    r.section("header");
    const uint16_t joints = r.u16();
    const uint8_t levels = r.u8();
    if (joints < 1 || levels < 1) {
        throw FormatError(FormatErrorKind::InvariantViolation,
                          "GSAT header: joint and level counts must be >= 1");
    }

    r.section("parents");
    std::vector<int16_t> parents(joints);
    for (auto& p : parents) p = r.i16();

    r.section("inverse_bind");
    std::vector<Mat4> inv_bind(joints);
    for (Mat4& m : inv_bind) {
        for (int row = 0; row < 4; ++row) {
            for (int col = 0; col < 4; ++col) m(row, col) = r.f32();
        }
    }

    AvatarTemplate tpl;
    tpl.skeleton = wrap_invariant(
        [&] { return Skeleton::make(std::move(parents), std::move(inv_bind)); });

    std::string sec;
    for (uint32_t l = 0; l < levels; ++l) {
        LodLevel level;
        sec = "level " + std::to_string(l);
        r.section(sec + " count");
        const uint32_t n = r.u32();

        const std::string means_sec = sec + " means";
        r.section(means_sec);
        level.means.resize(n);
        for (Vec3& v : level.means) {
            const float x = r.f32(), y = r.f32(), z = r.f32();
            v = Vec3(x, y, z);
        }

        const std::string rot_sec = sec + " rotations";
        r.section(rot_sec);
        level.rotations.resize(n);
        for (Quat& q : level.rotations) {
            const float w = r.f32(), x = r.f32(), y = r.f32(), z = r.f32();
            q = Quat(w, x, y, z);
        }

        const std::string scale_sec = sec + " scales";
        r.section(scale_sec);
        level.scales.resize(n);
        for (Vec3& v : level.scales) {
            const float x = r.f32(), y = r.f32(), z = r.f32();
            v = Vec3(x, y, z);
        }

        const std::string op_sec = sec + " opacities";
        r.section(op_sec);
        level.opacities.resize(n);
        for (float& o : level.opacities) o = r.f32();

        const std::string col_sec = sec + " colors";
        r.section(col_sec);
        level.colors.resize(n);
        for (Vec3& v : level.colors) {
            const float x = r.f32(), y = r.f32(), z = r.f32();
            v = Vec3(x, y, z);
        }

        const std::string idx_sec = sec + " skin_indices";
        r.section(idx_sec);
        level.skin_indices.resize(n);
        for (auto& idx : level.skin_indices) {
            for (uint16_t& i : idx) i = r.u16();
        }

        const std::string w_sec = sec + " skin_weights";
        r.section(w_sec);
        level.skin_weights.resize(n);
        for (auto& weights : level.skin_weights) {
            for (float& x : weights) x = r.f32();
        }
        level.finalize();
        tpl.levels.push_back(std::move(level));
    }
    if (!r.at_end()) {
        throw FormatError(FormatErrorKind::InvariantViolation,
                          "GSAT file has trailing bytes");
    }
    wrap_invariant([&] { validate(tpl); return 0; });
    return tpl;
}

void save_motion(const MotionClip& clip, const std::filesystem::path& path) {
    validate(clip);
    Writer w(path);
    w.bytes("GSMO", 4);
    w.u32(kFormatVersion);
    w.f32(clip.fps);
    w.u32(static_cast<uint32_t>(clip.frames.size()));
    w.u16(clip.joint_count);
    for (const Pose& f : clip.frames) {
        w.f32(f.root_translation.x());
        w.f32(f.root_translation.y());
        w.f32(f.root_translation.z());
        for (const Quat& q : f.local_rotations) {
            w.f32(q.w());
            w.f32(q.x());
            w.f32(q.y());
            w.f32(q.z());
        }
    }
    w.finish(path);
}

MotionClip load_motion(const std::filesystem::path& path) {
    Reader r(path);
    check_magic(r, "GSMO", "GSMO motion");

    r.section("header");
    MotionClip clip;
    clip.fps = r.f32();
    const uint32_t frame_count = r.u32();
    clip.joint_count = r.u16();
    if (!(clip.fps > 0.0f)) {
        throw FormatError(FormatErrorKind::InvariantViolation, "GSMO header: fps must be > 0");
    }
    if (frame_count < 1) {
        throw FormatError(FormatErrorKind::InvariantViolation,
                          "GSMO header: frame count must be >= 1");
    }

    clip.frames.resize(frame_count);
    for (uint32_t f = 0; f < frame_count; ++f) {
        const std::string sec = "frame " + std::to_string(f);
        r.section(sec);
        Pose& pose = clip.frames[f];
        const float tx = r.f32(), ty = r.f32(), tz = r.f32();
        pose.root_translation = Vec3(tx, ty, tz);
        pose.local_rotations.resize(clip.joint_count);
        for (Quat& q : pose.local_rotations) {
            const float w = r.f32(), x = r.f32(), y = r.f32(), z = r.f32();
            q = Quat(w, x, y, z);
        }
    }
    if (!r.at_end()) {
        throw FormatError(FormatErrorKind::InvariantViolation,
                          "GSMO file has trailing bytes");
    }
    wrap_invariant([&] { validate(clip); return 0; });
    return clip;
}

}  // namespace gsc
