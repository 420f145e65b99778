// Bit-exact binary asset formats (GSAT templates, GSMO motion clips), JSON
// scene configuration, image output, and delimited report export. Byte
// layouts are documented in docs/FORMATS.md.
#pragma once

#include "gsc/avatar.hpp"
#include "gsc/bench.hpp"
#include "gsc/crowd.hpp"
#include "gsc/metrics.hpp"
#include "gsc/scene.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace gsc {

enum class FormatErrorKind {
    IoError,
    BadMagic,
    VersionMismatch,
    Truncated,
    InvariantViolation,
};

class FormatError : public std::runtime_error {
public:
    FormatError(FormatErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}
    FormatErrorKind kind() const { return kind_; }

private:
    FormatErrorKind kind_;
};

// GSAT v1: header, parent indices, inverse binds, then one block per level.
// Round trips are byte-identical.
void save_template(const AvatarTemplate& tpl, const std::filesystem::path& path);
AvatarTemplate load_template(const std::filesystem::path& path);

// GSMO v1: header, then per frame a root translation and J quaternions.
void save_motion(const MotionClip& clip, const std::filesystem::path& path);
MotionClip load_motion(const std::filesystem::path& path);

// JSON scene config. Relative asset paths resolve against the config file's
// directory. Unknown keys warn on stderr; missing required keys throw.
SceneConfig load_scene_config(const std::filesystem::path& path);

enum class ImageFormat { Ppm, Png };

// Linear floats pass through the standard sRGB transfer function and are
// quantized with round-half-away-from-zero. PPM output is binary "P6",
// maxval 255. Byte-exact for a given framebuffer.
void write_image(const Framebuffer& fb, const std::filesystem::path& path,
                 ImageFormat format);

uint8_t linear_to_srgb_u8(float linear);

// Delimited tabular text: one header row, comma separator, period decimal
// point, no grouping. Identical bytes on every platform for the same data.
void export_quality_table(const QualityTable& table, const std::filesystem::path& path);
void export_bench_reports(const std::vector<BenchReport>& reports,
                          const std::filesystem::path& path);

struct MemoryGridRow {
    uint64_t gaussians = 0;
    uint64_t characters = 0;
    MemoryReport report;
};

void export_memory_grid(const std::vector<MemoryGridRow>& rows, bool include_naive,
                        bool include_shared, const std::filesystem::path& path);

}  // namespace gsc
