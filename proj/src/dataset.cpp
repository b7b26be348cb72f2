#include "secvos/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "secvos/image_io.hpp"

namespace secvos {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool has_image_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::vector<fs::path> sorted_images(const fs::path& dir) {
    if (!fs::is_directory(dir))
        throw MissingFileError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && has_image_extension(entry.path()))
            files.push_back(entry.path());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) {
                  return a.filename().string() < b.filename().string();
              });
    return files;
}

std::string frame_filename(int index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%05d.png", index);
    return buf;
}

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw MissingFileError("cannot open " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw ValidationError("invalid JSON in " + path.string());
    return j;
}

// Deterministic per-(seed, frame, pixel) hash for background speckle.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::vector<std::string> list_videos(const DatasetLayout& layout) {
    if (!fs::is_directory(layout.root))
        throw MissingFileError("dataset root not found: " + layout.root.string());
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(layout.root))
        if (entry.is_directory() && fs::is_directory(entry.path() / "frames"))
            names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
}

std::vector<ImageFrame> load_frames_dir(const fs::path& dir) {
    const std::vector<fs::path> files = sorted_images(dir);
    if (files.empty())
        throw MissingFileError("no frames in " + dir.string());
    std::vector<ImageFrame> frames;
    frames.reserve(files.size());
    for (std::size_t i = 0; i < files.size(); ++i) {
        ImageFrame frame = read_image_rgb(files[i].string());
        frame.frame_index = static_cast<int>(i);
        frames.push_back(std::move(frame));
    }
    return frames;
}

std::map<int, std::vector<BinaryMask>> load_annotation_dir(
    const fs::path& dir, const std::vector<int>& declared_ids) {
    const std::vector<fs::path> files = sorted_images(dir);
    if (files.empty())
        throw MissingFileError("no annotation images in " + dir.string());

    std::vector<IndexedImage> images;
    std::set<int> observed;
    for (const fs::path& file : files) {
        IndexedImage img = read_png_indexed(file.string());
        for (std::uint8_t v : img.indices)
            if (v != 0)
                observed.insert(v);
        images.push_back(std::move(img));
    }

    std::set<int> ids(declared_ids.begin(), declared_ids.end());
    if (ids.empty()) {
        ids = observed;
    } else {
        for (int v : observed)
            if (!ids.contains(v))
                throw UnknownObjectIdError("annotation value " + std::to_string(v) +
                                           " not in declared object list");
    }

    std::map<int, std::vector<BinaryMask>> gt;
    for (int id : ids) {
        std::vector<BinaryMask>& seq = gt[id];
        seq.reserve(images.size());
        for (const IndexedImage& img : images) {
            BinaryMask mask = BinaryMask::zeros(img.width, img.height);
            for (std::size_t i = 0; i < img.indices.size(); ++i)
                mask.bits[i] = img.indices[i] == id ? 1 : 0;
            seq.push_back(std::move(mask));
        }
    }
    return gt;
}

LoadedVideo load_video(const DatasetLayout& layout, const std::string& video_name,
                       double default_fps) {
    const fs::path video_dir = layout.root / video_name;
    LoadedVideo video;
    video.name = video_name;

    video.frames = load_frames_dir(video_dir / "frames");

    std::vector<int> declared_ids;
    video.fps = default_fps;
    video.fps_defaulted = true;
    const fs::path meta_path = video_dir / "meta.json";
    if (fs::exists(meta_path)) {
        const json meta = read_json_file(meta_path);
        if (meta.contains("fps")) {
            video.fps = meta["fps"].get<double>();
            video.fps_defaulted = false;
        }
        if (meta.contains("objects"))
            declared_ids = meta["objects"].get<std::vector<int>>();
    }

    video.gt = load_annotation_dir(video_dir / "annotations", declared_ids);
    for (const auto& [id, seq] : video.gt) {
        if (id <= 0)
            throw UnknownObjectIdError("object ids must be positive");
        for (const BinaryMask& mask : seq)
            if (mask.width != video.frames[0].width ||
                mask.height != video.frames[0].height)
                throw DimensionMismatchError("annotation size differs from frames in " +
                                             video_name);
    }
    return video;
}

void write_predictions(const TrackResult& result, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    if (result.records.empty())
        throw ValidationError("write_predictions: empty result");

    const std::size_t frame_count = result.records.begin()->second.size();
    const BinaryMask& first = result.records.begin()->second.front().mask;
    for (std::size_t t = 0; t < frame_count; ++t) {
        IndexedImage img;
        img.width = first.width;
        img.height = first.height;
        img.indices.assign(static_cast<std::size_t>(img.width) * img.height, 0);
        img.palette = vos_palette();
        for (const auto& [object_id, records] : result.records) {
            const BinaryMask& mask = records.at(t).mask;
            for (std::size_t i = 0; i < mask.bits.size(); ++i)
                if (mask.bits[i] && object_id > img.indices[i])
                    img.indices[i] = static_cast<std::uint8_t>(object_id);
        }
        write_png_indexed((out_dir / frame_filename(static_cast<int>(t))).string(), img);
    }

    json stats;
    stats["frames_total"] = result.stats.frames_total;
    stats["concept_invocations"] = result.stats.concept_invocations;
    stats["concept_guidance_ratio"] = result.stats.concept_guidance_ratio();
    stats["keyframes_admitted"] = result.stats.keyframes_admitted;
    stats["memory_resets"] = result.stats.memory_resets;
    stats["frame_duration_ms"] = result.stats.frame_duration_ms;
    stats["cuts"] = result.scenes.cut_indices;
    if (!result.failure.empty())
        stats["failure"] = result.failure;
    stats["scene_count"] = result.scenes.scene_count();
    std::vector<int> ids;
    for (const auto& [object_id, records] : result.records)
        ids.push_back(object_id);
    stats["objects"] = ids;
    std::ofstream out(out_dir / "stats.json");
    out << stats.dump(2) << "\n";
}

RenderedVideo render_synthetic(const SyntheticSpec& spec) {
    if (spec.width <= 0 || spec.height <= 0 || spec.frame_count <= 0)
        throw ValidationError("synthetic spec: bad dimensions or frame count");
    for (std::size_t i = 0; i < spec.cut_indices.size(); ++i) {
        const int cut = spec.cut_indices[i];
        if (cut < 1 || cut >= spec.frame_count ||
            (i > 0 && cut <= spec.cut_indices[i - 1]))
            throw ValidationError("synthetic spec: invalid cut indices");
    }
    if (spec.segment_colors.size() != spec.cut_indices.size() + 1)
        throw ValidationError("synthetic spec: need one background color per segment");
    for (const ObjectTrack& track : spec.objects) {
        if (track.object_id <= 0 || track.object_id > 255)
            throw ValidationError("synthetic spec: object ids must be in 1..255");
        if (track.states.size() != static_cast<std::size_t>(spec.frame_count))
            throw ValidationError("synthetic spec: each object needs one state per frame");
        for (const auto& state : track.states) {
            if (!state)
                continue;
            if (state->w <= 0 || state->h <= 0 || state->x < 0 || state->y < 0 ||
                state->x + state->w > spec.width || state->y + state->h > spec.height)
                throw OutOfBoundsTrajectoryError(
                    "synthetic spec: rectangle outside the frame");
        }
    }

    RenderedVideo video;
    for (const ObjectTrack& track : spec.objects)
        video.gt[track.object_id] = {};

    std::size_t segment = 0;
    for (int t = 0; t < spec.frame_count; ++t) {
        if (segment < spec.cut_indices.size() && t >= spec.cut_indices[segment])
            ++segment;
        ImageFrame frame = ImageFrame::solid(spec.width, spec.height,
                                             spec.segment_colors[segment], t);
        if (spec.speckle_amplitude > 0) {
            const int amp = spec.speckle_amplitude;
            for (int y = 0; y < spec.height; ++y) {
                for (int x = 0; x < spec.width; ++x) {
                    const std::uint64_t hash =
                        mix64(spec.seed ^ mix64((static_cast<std::uint64_t>(t) << 40) ^
                                                (static_cast<std::uint64_t>(y) << 20) ^
                                                static_cast<std::uint64_t>(x)));
                    const int delta = static_cast<int>(hash % (2 * amp + 1)) - amp;
                    std::uint8_t* px = frame.rgb(x, y);
                    for (int c = 0; c < 3; ++c)
                        px[c] = static_cast<std::uint8_t>(
                            std::clamp(static_cast<int>(px[c]) + delta, 0, 255));
                }
            }
        }

        for (const ObjectTrack& track : spec.objects) {
            const auto& state = track.states[static_cast<std::size_t>(t)];
            if (!state) {
                video.gt[track.object_id].push_back(
                    BinaryMask::zeros(spec.width, spec.height));
                continue;
            }
            const std::size_t two_tone = static_cast<std::size_t>(
                std::llround(state->fill2 * static_cast<double>(state->w) * state->h));
            std::size_t drawn = 0;
            for (int y = state->y; y < state->y + state->h; ++y) {
                for (int x = state->x; x < state->x + state->w; ++x, ++drawn) {
                    const auto& rgb = drawn < two_tone ? state->color2 : state->color;
                    std::uint8_t* px = frame.rgb(x, y);
                    px[0] = rgb[0];
                    px[1] = rgb[1];
                    px[2] = rgb[2];
                }
            }
            video.gt[track.object_id].push_back(BinaryMask::filled_rect(
                spec.width, spec.height, state->x, state->y, state->w, state->h));
        }
        video.frames.push_back(std::move(frame));
    }
    return video;
}

DatasetLayout generate_synthetic(const SyntheticSpec& spec, const fs::path& out_dir,
                                 const std::string& name) {
    const RenderedVideo video = render_synthetic(spec);
    const fs::path video_dir = out_dir / name;
    fs::create_directories(video_dir / "frames");
    fs::create_directories(video_dir / "annotations");

    for (int t = 0; t < spec.frame_count; ++t)
        write_png_rgb((video_dir / "frames" / frame_filename(t)).string(),
                      video.frames[static_cast<std::size_t>(t)]);

    for (int t = 0; t < spec.frame_count; ++t) {
        IndexedImage img;
        img.width = spec.width;
        img.height = spec.height;
        img.indices.assign(static_cast<std::size_t>(spec.width) * spec.height, 0);
        img.palette = vos_palette();
        for (const auto& [object_id, seq] : video.gt) {
            const BinaryMask& mask = seq[static_cast<std::size_t>(t)];
            for (std::size_t i = 0; i < mask.bits.size(); ++i)
                if (mask.bits[i] && object_id > img.indices[i])
                    img.indices[i] = static_cast<std::uint8_t>(object_id);
        }
        write_png_indexed((video_dir / "annotations" / frame_filename(t)).string(), img);
    }

    json meta;
    meta["fps"] = spec.fps;
    std::vector<int> ids;
    for (const ObjectTrack& track : spec.objects)
        ids.push_back(track.object_id);
    meta["objects"] = ids;
    std::ofstream out(video_dir / "meta.json");
    out << meta.dump(2) << "\n";

    return DatasetLayout{out_dir};
}

SyntheticSpec synthetic_spec_from_json(const std::string& json_text) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded())
        throw ValidationError("synthetic spec: invalid JSON");

    SyntheticSpec spec;
    spec.width = j.value("width", 160);
    spec.height = j.value("height", 120);
    spec.frame_count = j.value("frame_count", 0);
    spec.fps = j.value("fps", 24.0);
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.speckle_amplitude = j.value("speckle", 0);
    if (j.contains("cuts"))
        spec.cut_indices = j["cuts"].get<std::vector<int>>();
    for (const auto& c : j.at("segment_colors"))
        spec.segment_colors.push_back(
            {c.at(0).get<std::uint8_t>(), c.at(1).get<std::uint8_t>(),
             c.at(2).get<std::uint8_t>()});

    for (const auto& obj : j.value("objects", json::array())) {
        ObjectTrack track;
        track.object_id = obj.at("id").get<int>();
        track.states.assign(static_cast<std::size_t>(spec.frame_count), std::nullopt);
        // Segments: inclusive frame ranges with optional per-frame motion.
        for (const auto& seg : obj.at("segments")) {
            const int from = seg.at("from").get<int>();
            const int to = seg.at("to").get<int>();
            if (from < 0 || to >= spec.frame_count || from > to)
                throw ValidationError("synthetic spec: segment range out of bounds");
            RectState state;
            state.x = seg.at("x").get<int>();
            state.y = seg.at("y").get<int>();
            state.w = seg.at("w").get<int>();
            state.h = seg.at("h").get<int>();
            const auto& color = seg.at("color");
            state.color = {color.at(0).get<std::uint8_t>(),
                           color.at(1).get<std::uint8_t>(),
                           color.at(2).get<std::uint8_t>()};
            if (seg.contains("color2")) {
                const auto& c2 = seg.at("color2");
                state.color2 = {c2.at(0).get<std::uint8_t>(),
                                c2.at(1).get<std::uint8_t>(),
                                c2.at(2).get<std::uint8_t>()};
                state.fill2 = seg.value("fill2", 0.0);
            }
            const int dx = seg.value("dx", 0);
            const int dy = seg.value("dy", 0);
            for (int t = from; t <= to; ++t) {
                RectState at = state;
                at.x += dx * (t - from);
                at.y += dy * (t - from);
                track.states[static_cast<std::size_t>(t)] = at;
            }
        }
        spec.objects.push_back(std::move(track));
    }
    return spec;
}

} // namespace secvos
