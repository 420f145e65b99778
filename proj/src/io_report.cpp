#include "gsc/io.hpp"

#include <charconv>
#include <fstream>

namespace gsc {

namespace {

// std::to_chars is locale-independent; snprintf honors the locale's decimal
// point and would break the byte-identical contract.
std::string num(double v, int precision = 4) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
    return std::string(buf, p);
}

std::string num(uint64_t v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary keeps \n on every platform
    if (!out) {
        throw FormatError(FormatErrorKind::IoError, "cannot open for writing: " + path.string());
    }
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) {
        throw FormatError(FormatErrorKind::IoError, "write failed: " + path.string());
    }
}

}  // namespace

void export_quality_table(const QualityTable& table, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "distance_m,level,gaussians,psnr_db\n";
    for (const QualityRow& row : table) {
        out << num(row.distance_m, 2) << ',' << row.level << ','
            << num(static_cast<uint64_t>(row.gaussian_count)) << ',' << num(row.psnr_db, 3)
            << '\n';
    }
    finish(out, path);
}

void export_bench_reports(const std::vector<BenchReport>& reports,
                          const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "label,characters,gaussians,motion,update_ms,gather_ms,sort_ms,rasterize_ms,"
           "total_ms,fps,splats,skipped,skip_reason\n";
    for (const BenchReport& r : reports) {
        out << r.label << ',' << r.instance_count << ',' << r.gaussian_count << ','
            << (r.motion ? "on" : "off") << ',' << num(r.update_ms) << ',' << num(r.gather_ms)
            << ',' << num(r.sort_ms) << ',' << num(r.rasterize_ms) << ',' << num(r.total_ms)
            << ',' << num(r.fps, 2) << ',' << num(r.splat_count) << ','
            << (r.skipped ? "yes" : "no") << ',' << r.skip_reason << '\n';
    }
    finish(out, path);
}

void export_memory_grid(const std::vector<MemoryGridRow>& rows, bool include_naive,
                        bool include_shared, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "gaussians,characters,mode,bytes,mib,marginal_bytes_per_character,"
           "savings_fraction\n";
    constexpr double kMib = 1024.0 * 1024.0;
    for (const MemoryGridRow& row : rows) {
        if (include_naive) {
            out << num(row.gaussians) << ',' << num(row.characters) << ",naive,"
                << num(row.report.naive_bytes) << ','
                << num(static_cast<double>(row.report.naive_bytes) / kMib, 2) << ','
                << num(row.report.naive_marginal_bytes_per_instance, 1) << ",0.0000\n";
        }
        if (include_shared) {
            out << num(row.gaussians) << ',' << num(row.characters) << ",shared,"
                << num(row.report.shared_bytes) << ','
                << num(static_cast<double>(row.report.shared_bytes) / kMib, 2) << ','
                << num(row.report.shared_marginal_bytes_per_instance, 1) << ','
                << num(row.report.savings_fraction) << '\n';
        }
    }
    finish(out, path);
}

}  // namespace gsc
