#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "secvos/config.hpp"
#include "secvos/dataset.hpp"
#include "secvos/image_io.hpp"
#include "secvos/pipeline.hpp"
#include "secvos/wire.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitBackend = 2;

struct BackendSpec {
    std::string value = "toy";
};

std::unique_ptr<secvos::LineTransport> make_transport(const std::string& spec,
                                                      std::chrono::milliseconds timeout) {
    if (spec.rfind("tcp:", 0) == 0) {
        const std::string rest = spec.substr(4);
        const auto colon = rest.rfind(':');
        if (colon == std::string::npos)
            throw secvos::ValidationError("backend address must be tcp:host:port");
        return std::make_unique<secvos::TcpTransport>(
            rest.substr(0, colon), std::stoi(rest.substr(colon + 1)), timeout);
    }
    return std::make_unique<secvos::SubprocessTransport>(spec);
}

void write_json_file(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out)
        throw secvos::IoError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

json stats_to_json(const secvos::RunStats& stats, const secvos::SceneList& scenes) {
    json j;
    j["frames_total"] = stats.frames_total;
    j["concept_invocations"] = stats.concept_invocations;
    j["concept_guidance_ratio"] = stats.concept_guidance_ratio();
    j["keyframes_admitted"] = stats.keyframes_admitted;
    j["memory_resets"] = stats.memory_resets;
    j["cuts"] = scenes.cut_indices;
    j["scene_count"] = scenes.scene_count();
    return j;
}

int run_track(const std::string& frames_dir, const std::string& first_mask_path,
              const std::string& pixel_spec, const std::string& concept_spec,
              const std::string& mode, secvos::TrackerConfig config,
              const std::string& out_dir, int timeout_ms, bool embed_frames) {
    auto frames = std::make_shared<std::vector<secvos::ImageFrame>>(
        secvos::load_frames_dir(frames_dir));
    const secvos::IndexedImage first = secvos::read_png_indexed(first_mask_path);
    if (!frames->empty() && (first.width != frames->front().width ||
                             first.height != frames->front().height))
        throw secvos::DimensionMismatchError("first mask size differs from frames");

    std::map<int, secvos::BinaryMask> first_masks;
    for (int id = 1; id < 256; ++id) {
        secvos::BinaryMask mask = secvos::BinaryMask::zeros(first.width, first.height);
        bool any = false;
        for (std::size_t i = 0; i < first.indices.size(); ++i)
            if (first.indices[i] == id) {
                mask.bits[i] = 1;
                any = true;
            }
        if (any)
            first_masks.emplace(id, std::move(mask));
    }

    config.mode = mode == "offline" ? secvos::TrackerConfig::Mode::kOffline
                                    : secvos::TrackerConfig::Mode::kOnline;

    auto source = std::make_shared<secvos::VectorFrameSource>(frames.get());
    // Keep `frames` alive alongside the borrowing source.
    std::unique_ptr<secvos::PixelBackend> pixel;
    std::unique_ptr<secvos::ConceptBackend> concept_backend;
    const std::chrono::milliseconds timeout{timeout_ms};
    if (pixel_spec == "toy") {
        pixel = std::make_unique<secvos::ToyPixelBackend>(source);
    } else {
        secvos::WireOptions options;
        options.timeout = timeout;
        options.frames_dir = fs::absolute(frames_dir).string();
        if (embed_frames)
            options.embed_frames = source;
        pixel = std::make_unique<secvos::WirePixelBackend>(
            make_transport(pixel_spec, timeout), options);
    }
    if (concept_spec == "toy") {
        concept_backend = std::make_unique<secvos::ToyConceptBackend>(source);
    } else {
        secvos::WireOptions options;
        options.timeout = timeout;
        options.frames_dir = fs::absolute(frames_dir).string();
        if (embed_frames)
            options.embed_frames = source;
        concept_backend = std::make_unique<secvos::WireConceptBackend>(
            make_transport(concept_spec, timeout), options);
    }

    const secvos::TrackResult result =
        config.mode == secvos::TrackerConfig::Mode::kOffline
            ? secvos::track_offline(*frames, first_masks, config, *pixel, *concept_backend)
            : secvos::track_video(*frames, first_masks, config, *pixel, *concept_backend);

    secvos::write_predictions(result, out_dir);
    std::cout << stats_to_json(result.stats, result.scenes).dump(2) << "\n";
    return kExitOk;
}

int run_scene(const std::string& frames_dir, double threshold, int h_bins, int s_bins,
              const std::string& out_path) {
    const std::vector<secvos::ImageFrame> frames = secvos::load_frames_dir(frames_dir);
    const secvos::SceneList scenes =
        secvos::segment_scenes(frames, {threshold, h_bins, s_bins});
    json j{{"cuts", scenes.cut_indices}, {"scene_count", scenes.scene_count()}};
    if (out_path.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_json_file(out_path, j);
    return kExitOk;
}

struct EvalVideoJob {
    std::string name;
    fs::path pred_dir;
    fs::path gt_dir;
    fs::path frames_dir; // may be empty
};

secvos::SceneList scenes_for_video(const EvalVideoJob& job, const json& scenes_map,
                                   bool auto_scenes,
                                   const secvos::SceneChangeConfig& det_config) {
    secvos::SceneList scenes;
    if (!auto_scenes) {
        if (!scenes_map.contains(job.name))
            throw secvos::MissingSceneListError("no scene list for video " + job.name);
        const json& entry = scenes_map[job.name];
        const json& cuts = entry.is_object() ? entry.at("cuts") : entry;
        scenes.cut_indices = cuts.get<std::vector<int>>();
        return scenes;
    }
    if (!job.frames_dir.empty() && fs::is_directory(job.frames_dir))
        return secvos::segment_scenes(secvos::load_frames_dir(job.frames_dir),
                                      det_config);
    const fs::path stats_path = job.pred_dir / "stats.json";
    if (fs::exists(stats_path)) {
        std::ifstream in(stats_path);
        json stats = json::parse(in, nullptr, false);
        if (!stats.is_discarded() && stats.contains("cuts")) {
            scenes.cut_indices = stats["cuts"].get<std::vector<int>>();
            return scenes;
        }
    }
    throw secvos::MissingSceneListError(
        "cannot derive scenes for " + job.name +
        ": pass --scenes FILE, --frames DIR, or track first (stats.json)");
}

int run_eval(const std::string& pred_root, const std::string& gt_root,
             const std::string& frames_root, const std::string& scenes_arg,
             const std::string& tolerance_arg, double threshold, int workers,
             const std::string& out_path) {
    std::vector<EvalVideoJob> jobs;
    const bool single_video = !secvos::list_videos({gt_root}).empty() ? false : true;
    if (single_video) {
        EvalVideoJob job;
        job.name = fs::path(gt_root).filename().string();
        job.gt_dir = fs::is_directory(fs::path(gt_root) / "annotations")
                         ? fs::path(gt_root) / "annotations"
                         : fs::path(gt_root);
        job.pred_dir = pred_root;
        if (!frames_root.empty())
            job.frames_dir = frames_root;
        else if (fs::is_directory(fs::path(gt_root) / "frames"))
            job.frames_dir = fs::path(gt_root) / "frames";
        jobs.push_back(job);
    } else {
        for (const std::string& name : secvos::list_videos({gt_root})) {
            EvalVideoJob job;
            job.name = name;
            job.gt_dir = fs::path(gt_root) / name / "annotations";
            job.pred_dir = fs::path(pred_root) / name;
            job.frames_dir = frames_root.empty() ? fs::path(gt_root) / name / "frames"
                                                 : fs::path(frames_root) / name;
            jobs.push_back(job);
        }
    }
    if (jobs.empty())
        throw secvos::MissingFileError("no videos found under " + gt_root);

    const bool auto_scenes = scenes_arg == "auto";
    json scenes_map;
    if (!auto_scenes) {
        std::ifstream in(scenes_arg);
        if (!in)
            throw secvos::MissingFileError("cannot open scenes file " + scenes_arg);
        scenes_map = json::parse(in, nullptr, false);
        if (scenes_map.is_discarded())
            throw secvos::ValidationError("invalid JSON in " + scenes_arg);
    }
    const int tolerance = tolerance_arg == "auto" ? -1 : std::stoi(tolerance_arg);
    const secvos::SceneChangeConfig det_config{threshold, 32, 32};

    struct VideoOutcome {
        secvos::VideoEval eval;
        secvos::SceneList scenes;
    };
    std::vector<VideoOutcome> outcomes(jobs.size());
    std::atomic<std::size_t> cursor{0};
    std::vector<std::future<void>> pool;
    const int n_workers =
        std::max(1, workers > 0 ? workers
                                : static_cast<int>(std::thread::hardware_concurrency()));
    std::mutex error_mutex;
    std::exception_ptr first_error;
    for (int w = 0; w < n_workers; ++w) {
        pool.push_back(std::async(std::launch::async, [&] {
            for (;;) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= jobs.size())
                    return;
                try {
                    const EvalVideoJob& job = jobs[i];
                    const auto gt = secvos::load_annotation_dir(job.gt_dir);
                    const auto pred = secvos::load_annotation_dir(job.pred_dir);
                    std::map<int, std::vector<secvos::BinaryMask>> aligned_pred;
                    for (const auto& [id, seq] : gt) {
                        const auto it = pred.find(id);
                        if (it != pred.end()) {
                            aligned_pred[id] = it->second;
                        } else {
                            // Missing object: score empty predictions.
                            std::vector<secvos::BinaryMask> empties(
                                seq.size(), secvos::BinaryMask::zeros(seq[0].width,
                                                                      seq[0].height));
                            aligned_pred[id] = std::move(empties);
                        }
                    }
                    outcomes[i].eval = secvos::evaluate_video(aligned_pred, gt, tolerance);
                    outcomes[i].scenes =
                        scenes_for_video(job, scenes_map, auto_scenes, det_config);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error)
                        first_error = std::current_exception();
                    return;
                }
            }
        }));
    }
    for (auto& f : pool)
        f.get();
    if (first_error)
        std::rethrow_exception(first_error);

    std::vector<std::string> names;
    std::vector<secvos::VideoEval> evals;
    std::vector<secvos::SceneList> scene_lists;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        names.push_back(jobs[i].name);
        evals.push_back(outcomes[i].eval);
        scene_lists.push_back(outcomes[i].scenes);
    }
    const secvos::BenchmarkReport report =
        secvos::bucket_report(names, evals, scene_lists);

    auto bucket_json = [](const secvos::BucketStats& b) {
        return json{{"videos", b.video_count}, {"JF", b.jf}, {"J", b.j}, {"F", b.f}};
    };
    json j;
    j["overall"] = bucket_json(report.overall);
    j["no_scene_change"] = bucket_json(report.no_change);
    j["single_scene_change"] = bucket_json(report.single_change);
    j["multi_scene_change"] = bucket_json(report.multi_change);
    j["videos"] = json::array();
    for (const secvos::VideoRow& row : report.rows)
        j["videos"].push_back(json{{"name", row.name},
                                   {"scene_changes", row.eval.scene_change_count},
                                   {"JF", row.eval.jf()},
                                   {"J", row.eval.j},
                                   {"F", row.eval.f}});
    write_json_file(out_path, j);

    fs::path csv_path = out_path;
    csv_path.replace_extension(".csv");
    std::ofstream csv(csv_path);
    csv << "video,scene_changes,JF,J,F\n";
    for (const secvos::VideoRow& row : report.rows)
        csv << row.name << "," << row.eval.scene_change_count << "," << row.eval.jf()
            << "," << row.eval.j << "," << row.eval.f << "\n";
    csv << "\nbucket,videos,JF,J,F\n";
    auto csv_bucket = [&](const char* name, const secvos::BucketStats& b) {
        csv << name << "," << b.video_count << "," << b.jf << "," << b.j << "," << b.f
            << "\n";
    };
    csv_bucket("no_scene_change", report.no_change);
    csv_bucket("single_scene_change", report.single_change);
    csv_bucket("multi_scene_change", report.multi_change);
    csv_bucket("overall", report.overall);

    std::cout << j["overall"].dump() << "\n";
    return kExitOk;
}

int run_stats(const std::string& dataset_root, double default_fps, double threshold,
              const std::string& out_path) {
    const secvos::DatasetLayout layout{dataset_root};
    const std::vector<std::string> videos = secvos::list_videos(layout);
    if (videos.empty())
        throw secvos::MissingFileError("no videos under " + dataset_root);

    std::vector<secvos::VideoForStats> rows;
    std::vector<std::string> fps_defaulted;
    json per_video = json::array();
    for (const std::string& name : videos) {
        const secvos::LoadedVideo video = secvos::load_video(layout, name, default_fps);
        secvos::VideoForStats row;
        row.frame_count = video.frames.size();
        row.fps = video.fps;
        for (const auto& [id, seq] : video.gt)
            row.gt_objects.push_back(seq);
        row.scenes = secvos::segment_scenes(video.frames, {threshold, 32, 32});
        if (video.fps_defaulted)
            fps_defaulted.push_back(name);
        per_video.push_back(json{{"name", name},
                                 {"frames", video.frames.size()},
                                 {"fps", video.fps},
                                 {"scene_count", row.scenes.scene_count()},
                                 {"cuts", row.scenes.cut_indices}});
        rows.push_back(std::move(row));
    }
    const secvos::DatasetStats stats = secvos::dataset_stats(rows);

    json j;
    j["video_count"] = stats.video_count;
    j["avg_duration_s"] = stats.avg_duration_s;
    j["disappearance_rate"] = stats.disappearance_rate;
    j["avg_scene_count"] = stats.avg_scene_count;
    j["fps_defaulted"] = fps_defaulted;
    j["videos"] = per_video;
    if (out_path.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_json_file(out_path, j);

    if (!out_path.empty()) {
        fs::path csv_path = out_path;
        csv_path.replace_extension(".csv");
        std::ofstream csv(csv_path);
        csv << "video_count,avg_duration_s,disappearance_rate,avg_scene_count\n";
        csv << stats.video_count << "," << stats.avg_duration_s << ","
            << stats.disappearance_rate << "," << stats.avg_scene_count << "\n";
    }
    return kExitOk;
}

int run_synth(const std::string& spec_path, const std::string& out_dir,
              const std::string& name) {
    std::ifstream in(spec_path);
    if (!in)
        throw secvos::MissingFileError("cannot open spec " + spec_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const secvos::SyntheticSpec spec = secvos::synthetic_spec_from_json(buffer.str());
    secvos::generate_synthetic(spec, out_dir, name);
    std::cout << "wrote " << (fs::path(out_dir) / name).string() << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scene-adaptive video object segmentation toolkit"};
    app.require_subcommand(1);

    // track
    auto* track = app.add_subcommand("track", "Track objects through a video");
    std::string t_frames, t_first_mask, t_out, t_mode = "online";
    std::string t_pixel = "toy", t_concept = "toy", t_config;
    int t_timeout_ms = 30000;
    bool t_force_concept = false, t_no_reset = false, t_embed = false;
    secvos::TrackerConfig tracker_config;
    track->add_option("--frames", t_frames, "Directory of video frames")->required();
    track->add_option("--first-mask", t_first_mask, "Indexed PNG with first-frame masks")
        ->required();
    track->add_option("--out", t_out, "Output directory")->required();
    track->add_option("--mode", t_mode, "online|offline")
        ->check(CLI::IsMember({"online", "offline"}));
    track->add_option("--pixel-backend", t_pixel, "toy | shell command | tcp:host:port");
    track->add_option("--concept-backend", t_concept,
                      "toy | shell command | tcp:host:port");
    track->add_option("--scene-threshold", tracker_config.scene_threshold,
                      "Scene-change threshold");
    track->add_option("--memory-window", tracker_config.memory_window,
                      "Memory window size");
    track->add_option("--keyframe-capacity", tracker_config.keyframe_capacity,
                      "Keyframe FIFO capacity");
    track->add_option("--timeout-ms", t_timeout_ms, "Backend timeout (ms)");
    track->add_option("--config", t_config, "JSON or TOML tracker config file");
    track->add_flag("--force-concept", t_force_concept,
                    "Route every frame through the concept path");
    track->add_flag("--no-memory-reset", t_no_reset,
                    "Disable memory reset on concept disagreement");
    track->add_flag("--keep-going", tracker_config.keep_going,
                    "Record backend failures and score missing frames empty");
    track->add_flag("--embed-frames", t_embed,
                    "Embed frames as base64 PNG in wire requests");

    // scene
    auto* scene = app.add_subcommand("scene", "Detect scene changes in a video");
    std::string s_frames, s_out;
    double s_threshold = 0.35;
    int s_h_bins = 32, s_s_bins = 32;
    scene->add_option("--frames", s_frames, "Directory of video frames")->required();
    scene->add_option("--threshold", s_threshold, "Scene-change threshold");
    scene->add_option("--h-bins", s_h_bins, "Hue bins");
    scene->add_option("--s-bins", s_s_bins, "Saturation bins");
    scene->add_option("--out", s_out, "Output JSON (stdout when omitted)");

    // eval
    auto* eval = app.add_subcommand("eval", "Score predictions against ground truth");
    std::string e_pred, e_gt, e_frames, e_scenes = "auto", e_tolerance = "auto",
                          e_out = "report.json";
    double e_threshold = 0.35;
    int e_workers = 0;
    eval->add_option("--pred", e_pred, "Predictions root")->required();
    eval->add_option("--gt", e_gt, "Ground-truth root")->required();
    eval->add_option("--frames", e_frames, "Frames root (for --scenes auto)");
    eval->add_option("--scenes", e_scenes, "Scene-cut JSON file or 'auto'");
    eval->add_option("--tolerance", e_tolerance, "Boundary tolerance in px or 'auto'");
    eval->add_option("--scene-threshold", e_threshold,
                     "Detector threshold for --scenes auto");
    eval->add_option("--workers", e_workers, "Parallel video workers (0 = all cores)");
    eval->add_option("--out", e_out, "Report JSON path (CSV written alongside)");

    // stats
    auto* stats = app.add_subcommand("stats", "Dataset statistics");
    std::string d_root, d_out;
    double d_fps = 24.0, d_threshold = 0.35;
    stats->add_option("--dataset", d_root, "Dataset root")->required();
    stats->add_option("--fps", d_fps, "Fallback fps for videos without metadata");
    stats->add_option("--threshold", d_threshold, "Scene-change threshold");
    stats->add_option("--out", d_out, "Output JSON (stdout when omitted)");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic video dataset");
    std::string y_spec, y_out, y_name = "synthetic";
    synth->add_option("--spec", y_spec, "Synthetic spec JSON")->required();
    synth->add_option("--out", y_out, "Output dataset root")->required();
    synth->add_option("--name", y_name, "Video name");

    CLI11_PARSE(app, argc, argv);

    try {
        if (track->parsed()) {
            if (!t_config.empty())
                secvos::apply_config_file(tracker_config, t_config);
            if (t_force_concept)
                tracker_config.force_concept_every_frame = true;
            if (t_no_reset)
                tracker_config.reset_memory_on_disagreement = false;
            return run_track(t_frames, t_first_mask, t_pixel, t_concept, t_mode,
                             tracker_config, t_out, t_timeout_ms, t_embed);
        }
        if (scene->parsed())
            return run_scene(s_frames, s_threshold, s_h_bins, s_s_bins, s_out);
        if (eval->parsed())
            return run_eval(e_pred, e_gt, e_frames, e_scenes, e_tolerance, e_threshold,
                            e_workers, e_out);
        if (stats->parsed())
            return run_stats(d_root, d_fps, d_threshold, d_out);
        if (synth->parsed())
            return run_synth(y_spec, y_out, y_name);
    } catch (const secvos::BackendError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return kExitBackend;
    } catch (const secvos::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}
