// Command-line front end: template/motion generation, single-frame and
// sequence rendering, the FPS benchmark, the memory grid, and the LoD
// quality sweep.
#include "gsc/bench.hpp"
#include "gsc/io.hpp"
#include "gsc/metrics.hpp"
#include "gsc/renderer.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace {

// Exit codes: 0 ok, 1 usage (CLI11), 2 config, 3 asset, 4 runtime.
constexpr int kExitConfig = 2;
constexpr int kExitAsset = 3;
constexpr int kExitRuntime = 4;

struct LoadedScene {
    gsc::SceneConfig cfg;
    std::shared_ptr<gsc::TemplateStore> templates;
    std::shared_ptr<gsc::MotionStore> motions;
};

gsc::SceneConfig load_config_or_exit(const std::string& path) {
    try {
        return gsc::load_scene_config(path);
    } catch (const gsc::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::exit(kExitConfig);
    }
}

LoadedScene load_scene_or_exit(const std::string& path) {
    LoadedScene scene;
    scene.cfg = load_config_or_exit(path);
    scene.templates = std::make_shared<gsc::TemplateStore>();
    scene.motions = std::make_shared<gsc::MotionStore>();
    try {
        for (const std::string& tpath : scene.cfg.template_paths) {
            gsc::AvatarTemplate tpl = gsc::load_template(tpath);
            tpl.template_id = static_cast<uint32_t>(scene.templates->size());
            scene.templates->push_back(std::move(tpl));
        }
        for (const std::string& mpath : scene.cfg.motion_paths) {
            scene.motions->push_back(gsc::load_motion(mpath));
        }
    } catch (const gsc::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::exit(kExitAsset);
    }
    return scene;
}

std::vector<uint32_t> parse_counts(const std::string& spec) {
    std::vector<uint32_t> counts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        counts.push_back(static_cast<uint32_t>(std::stoul(item)));
    }
    return counts;
}

gsc::ImageFormat format_for(const std::filesystem::path& path, const std::string& flag) {
    if (flag == "ppm") return gsc::ImageFormat::Ppm;
    if (flag == "png") return gsc::ImageFormat::Png;
    return path.extension() == ".png" ? gsc::ImageFormat::Png : gsc::ImageFormat::Ppm;
}

gsc::RenderSettings settings_for(const gsc::SceneConfig& cfg, int threads) {
    gsc::RenderSettings settings;
    settings.tile_size = cfg.tile_size;
    settings.background = cfg.background;
    settings.thread_count = threads;
    return settings;
}

int run_gen_template(uint64_t seed, const std::string& counts_spec, uint32_t joints,
                     const std::string& out) {
    std::vector<uint32_t> counts;
    try {
        counts = parse_counts(counts_spec);
    } catch (const std::exception&) {
        std::cerr << "error: --counts must be a comma-separated list of integers\n";
        return kExitConfig;
    }
    try {
        const gsc::AvatarTemplate tpl = gsc::generate_synthetic_template(seed, counts, joints);
        gsc::save_template(tpl, out);
        std::cout << "wrote " << out << " (" << tpl.levels.size() << " levels:";
        for (const auto& level : tpl.levels) std::cout << " " << level.gaussian_count();
        std::cout << ")\n";
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const gsc::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAsset;
    }
}

int run_gen_motion(uint64_t seed, uint32_t joints, float fps, uint32_t frames,
                   const std::string& out) {
    try {
        const gsc::MotionClip clip = gsc::generate_synthetic_motion(seed, joints, fps, frames);
        gsc::save_motion(clip, out);
        std::cout << "wrote " << out << " (" << clip.frames.size() << " frames @ " << clip.fps
                  << " fps)\n";
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const gsc::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAsset;
    }
}

int run_render(const std::string& scene_path, float time_s, const std::string& out,
               const std::string& format, int threads) {
    LoadedScene scene = load_scene_or_exit(scene_path);
    try {
        gsc::Crowd crowd =
            gsc::build_crowd(scene.cfg, scene.templates, scene.motions, scene.cfg.seed);
        const gsc::Camera camera = scene.cfg.camera.to_camera();
        const gsc::Framebuffer fb =
            gsc::render_frame(crowd, camera, time_s, settings_for(scene.cfg, threads));
        gsc::write_image(fb, out, format_for(out, format));
        std::cout << "wrote " << out << " (" << fb.width << "x" << fb.height << ", "
                  << crowd.instances.size() << " characters)\n";
        return 0;
    } catch (const gsc::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAsset;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int run_animate(const std::string& scene_path, float start_s, uint32_t frames, float fps,
                const std::string& out_dir, const std::string& format, int threads) {
    LoadedScene scene = load_scene_or_exit(scene_path);
    try {
        std::filesystem::create_directories(out_dir);
        gsc::Crowd crowd =
            gsc::build_crowd(scene.cfg, scene.templates, scene.motions, scene.cfg.seed);
        const gsc::Camera camera = scene.cfg.camera.to_camera();
        const gsc::RenderSettings settings = settings_for(scene.cfg, threads);
        const char* ext = format == "png" ? ".png" : ".ppm";
        for (uint32_t k = 0; k < frames; ++k) {
            const float t = start_s + static_cast<float>(k) / fps;
            const gsc::Framebuffer fb = gsc::render_frame(crowd, camera, t, settings);
            char name[32];
            std::snprintf(name, sizeof(name), "frame_%05u%s", k, ext);
            gsc::write_image(fb, std::filesystem::path(out_dir) / name,
                             format == "png" ? gsc::ImageFormat::Png : gsc::ImageFormat::Ppm);
        }
        std::cout << "wrote " << frames << " frames to " << out_dir << "\n";
        return 0;
    } catch (const gsc::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAsset;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

bool parse_matrix(const std::string& spec, gsc::BenchMatrix& matrix) {
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ';')) {
        const size_t eq = part.find('=');
        if (eq == std::string::npos) return false;
        const std::string key = part.substr(0, eq);
        std::stringstream values(part.substr(eq + 1));
        std::string v;
        if (key == "chars") {
            matrix.instance_counts.clear();
            while (std::getline(values, v, ',')) {
                matrix.instance_counts.push_back(static_cast<uint32_t>(std::stoul(v)));
            }
        } else if (key == "gauss") {
            matrix.gaussian_counts.clear();
            while (std::getline(values, v, ',')) {
                matrix.gaussian_counts.push_back(static_cast<uint32_t>(std::stoul(v)));
            }
        } else if (key == "motion") {
            matrix.motion_flags.clear();
            while (std::getline(values, v, ',')) {
                if (v == "on") matrix.motion_flags.push_back(true);
                else if (v == "off") matrix.motion_flags.push_back(false);
                else return false;
            }
        } else {
            return false;
        }
    }
    return !matrix.instance_counts.empty() && !matrix.motion_flags.empty();
}

int run_bench(const std::string& scene_path, const std::string& matrix_spec, int warmup,
              int repeats, const std::string& out) {
    gsc::BenchMatrix matrix;
    if (!matrix_spec.empty() && !parse_matrix(matrix_spec, matrix)) {
        std::cerr << "error: bad --matrix spec, expected e.g. "
                     "\"chars=1,100;gauss=3176;motion=on,off\"\n";
        return kExitConfig;
    }
    matrix.warmup_frames = warmup;
    matrix.timed_frames = repeats;

    LoadedScene scene = load_scene_or_exit(scene_path);
    try {
        const auto reports = gsc::run_benchmark(matrix, scene.cfg, scene.templates,
                                                scene.motions);
        gsc::export_bench_reports(reports, out);
        size_t ok = 0;
        for (const auto& rep : reports) {
            if (rep.skipped) {
                std::cout << rep.label << ": skipped (" << rep.skip_reason << ")\n";
            } else {
                std::printf("%s: %.2f fps (%.3f ms, %llu splats)\n", rep.label.c_str(),
                            rep.fps, rep.total_ms,
                            static_cast<unsigned long long>(rep.splat_count));
                ++ok;
            }
        }
        std::cout << "wrote " << out << "\n";
        return ok == 0 ? kExitRuntime : 0;
    } catch (const gsc::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAsset;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int run_memreport(const std::string& scene_path, const std::string& mode, double overhead_mib,
                  const std::string& chars_spec, const std::string& out) {
    if (mode != "naive" && mode != "shared" && mode != "both") {
        std::cerr << "error: --mode must be naive, shared, or both\n";
        return kExitConfig;
    }
    LoadedScene scene = load_scene_or_exit(scene_path);
    try {
        gsc::MemoryLayoutModel model;
        model.fixed_overhead_bytes =
            static_cast<uint64_t>(overhead_mib * 1024.0 * 1024.0);

        std::vector<uint32_t> char_counts = parse_counts(chars_spec);
        std::vector<uint64_t> gaussian_counts;
        for (const gsc::LodLevel& level : scene.templates->front().levels) {
            gaussian_counts.push_back(level.gaussian_count());
        }

        std::vector<gsc::MemoryGridRow> rows;
        for (uint64_t gauss : gaussian_counts) {
            for (uint32_t chars : char_counts) {
                gsc::MemoryGridRow row;
                row.gaussians = gauss;
                row.characters = chars;
                row.report = gsc::memory_report_cell(chars, gauss, model);
                rows.push_back(row);
            }
        }
        gsc::export_memory_grid(rows, mode != "shared", mode != "naive", out);
        std::cout << "wrote " << out << " (" << rows.size() << " cells)\n";
        return 0;
    } catch (const gsc::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAsset;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int run_lod_sweep(const std::string& template_path, const std::string& distances_spec,
                  uint32_t width, uint32_t height, const std::string& out) {
    try {
        const gsc::AvatarTemplate tpl = gsc::load_template(template_path);
        std::vector<float> distances;
        std::stringstream ss(distances_spec);
        std::string item;
        while (std::getline(ss, item, ',')) distances.push_back(std::stof(item));

        gsc::Camera proto;
        proto.width = static_cast<int>(width);
        proto.height = static_cast<int>(height);
        gsc::RenderSettings settings;
        const gsc::QualityTable table = gsc::lod_quality_sweep(tpl, distances, proto, settings);
        gsc::export_quality_table(table, out);
        for (const gsc::QualityRow& row : table) {
            std::printf("d=%.2fm level=%u (%u gaussians): %.2f dB\n", row.distance_m,
                        row.level, row.gaussian_count, row.psnr_db);
        }
        std::cout << "wrote " << out << "\n";
        return 0;
    } catch (const gsc::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAsset;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Instanced Gaussian-splat crowd renderer and benchmark harness.\n"
        "Defaults: LoD thresholds 5/10 m, tile size 16, resolution 1280x720,\n"
        "threads from GSCROWD_THREADS or hardware concurrency."};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen-template",
                                   "Generate a synthetic multi-LoD avatar template (GSAT)");
    uint64_t gen_seed = 1;
    std::string gen_counts = "202738,12661,3176";
    uint32_t gen_joints = 24;
    std::string gen_out;
    gen->add_option("--seed", gen_seed, "RNG seed");
    gen->add_option("--counts", gen_counts, "Strictly decreasing gaussian counts per level");
    gen->add_option("--joints", gen_joints, "Skeleton joint count (default 24)");
    gen->add_option("--out", gen_out, "Output .gsat path")->required();

    auto* genm = app.add_subcommand("gen-motion",
                                    "Generate a synthetic looping motion clip (GSMO)");
    uint64_t genm_seed = 1;
    uint32_t genm_joints = 24;
    float genm_fps = 30.0f;
    uint32_t genm_frames = 60;
    std::string genm_out;
    genm->add_option("--seed", genm_seed, "RNG seed");
    genm->add_option("--joints", genm_joints, "Joint count (default 24)");
    genm->add_option("--fps", genm_fps, "Clip frame rate");
    genm->add_option("--frames", genm_frames, "Frame count");
    genm->add_option("--out", genm_out, "Output .gsmo path")->required();

    auto* render = app.add_subcommand("render", "Render one frame of a scene");
    std::string render_scene, render_out, render_format = "auto";
    float render_time = 0.0f;
    int render_threads = 0;
    render->add_option("--scene", render_scene, "Scene config JSON")->required();
    render->add_option("--time", render_time, "Scene time in seconds");
    render->add_option("--out", render_out, "Output image (.ppm or .png)")->required();
    render->add_option("--format", render_format, "ppm|png (default: by extension)");
    render->add_option("--threads", render_threads, "Worker thread count (0 = auto)");

    auto* animate = app.add_subcommand("animate", "Render a numbered frame sequence");
    std::string anim_scene, anim_dir, anim_format = "ppm";
    float anim_start = 0.0f, anim_fps = 30.0f;
    uint32_t anim_frames = 30;
    int anim_threads = 0;
    animate->add_option("--scene", anim_scene, "Scene config JSON")->required();
    animate->add_option("--start", anim_start, "Start time in seconds");
    animate->add_option("--frames", anim_frames, "Number of frames");
    animate->add_option("--fps", anim_fps, "Playback frame rate");
    animate->add_option("--out-dir", anim_dir, "Output directory")->required();
    animate->add_option("--format", anim_format, "ppm|png");
    animate->add_option("--threads", anim_threads, "Worker thread count (0 = auto)");

    auto* bench = app.add_subcommand("bench", "Run the FPS benchmark matrix");
    std::string bench_scene, bench_matrix, bench_out = "bench.csv";
    int bench_warmup = 5, bench_repeats = 30;
    bench->add_option("--scene", bench_scene, "Scene config JSON")->required();
    bench->add_option("--matrix", bench_matrix,
                      "Cell spec, e.g. chars=1,100;gauss=3176;motion=on,off");
    bench->add_option("--warmup", bench_warmup, "Warmup frames per cell");
    bench->add_option("--repeats", bench_repeats, "Timed frames per cell");
    bench->add_option("--out", bench_out, "Report CSV path");

    auto* mem = app.add_subcommand("memreport", "Export the instancing memory grid");
    std::string mem_scene, mem_mode = "both", mem_chars = "1,100,400,1000,5000";
    std::string mem_out = "memory.csv";
    double mem_overhead = 0.0;
    mem->add_option("--scene", mem_scene, "Scene config JSON")->required();
    mem->add_option("--mode", mem_mode, "naive|shared|both");
    mem->add_option("--overhead", mem_overhead, "Fixed overhead in MiB");
    mem->add_option("--chars", mem_chars, "Character counts, comma separated");
    mem->add_option("--out", mem_out, "Report CSV path");

    auto* sweep = app.add_subcommand("lod-sweep", "PSNR of each LoD level vs the finest");
    std::string sweep_template, sweep_distances = "1.9,3,5,10", sweep_out = "quality.csv";
    uint32_t sweep_w = 1280, sweep_h = 720;
    sweep->add_option("--template", sweep_template, "GSAT template path")->required();
    sweep->add_option("--distances", sweep_distances, "Distances in meters");
    sweep->add_option("--width", sweep_w, "Render width");
    sweep->add_option("--height", sweep_h, "Render height");
    sweep->add_option("--out", sweep_out, "Report CSV path");

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) return run_gen_template(gen_seed, gen_counts, gen_joints, gen_out);
    if (genm->parsed()) {
        return run_gen_motion(genm_seed, genm_joints, genm_fps, genm_frames, genm_out);
    }
    if (render->parsed()) {
        return run_render(render_scene, render_time, render_out, render_format,
                          render_threads);
    }
    if (animate->parsed()) {
        return run_animate(anim_scene, anim_start, anim_frames, anim_fps, anim_dir,
                           anim_format, anim_threads);
    }
    if (bench->parsed()) {
        return run_bench(bench_scene, bench_matrix, bench_warmup, bench_repeats, bench_out);
    }
    if (mem->parsed()) {
        return run_memreport(mem_scene, mem_mode, mem_overhead, mem_chars, mem_out);
    }
    if (sweep->parsed()) {
        return run_lod_sweep(sweep_template, sweep_distances, sweep_w, sweep_h, sweep_out);
    }
    return 0;
}
