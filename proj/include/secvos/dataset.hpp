#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "secvos/core.hpp"
#include "secvos/pipeline.hpp"

namespace secvos {

// On-disk layout:
//   root/<video>/frames/<zero-padded>.png|.jpg
//   root/<video>/annotations/<zero-padded>.png   (indexed palette, value = object id)
//   root/<video>/meta.json                       (optional: {"fps": .., "objects": [..]})
struct DatasetLayout {
    std::filesystem::path root;
};

struct LoadedVideo {
    std::string name;
    std::vector<ImageFrame> frames;
    std::map<int, std::vector<BinaryMask>> gt; // one sequence per object id
    double fps = 0.0;
    bool fps_defaulted = false;
};

std::vector<std::string> list_videos(const DatasetLayout& layout);

LoadedVideo load_video(const DatasetLayout& layout, const std::string& video_name,
                       double default_fps = 24.0);

// Decodes every image in a directory, sorted by filename; the sort order
// defines the frame indices.
std::vector<ImageFrame> load_frames_dir(const std::filesystem::path& dir);

// Per-object masks from one directory of indexed-palette PNGs, sorted by
// filename. `declared_ids` (when non-empty) rejects unknown pixel values.
std::map<int, std::vector<BinaryMask>> load_annotation_dir(
    const std::filesystem::path& dir, const std::vector<int>& declared_ids = {});

// One composed palette PNG per frame (higher object id wins overlaps) plus
// stats.json with the run counters.
void write_predictions(const TrackResult& result, const std::filesystem::path& out_dir);

// --- synthetic fixtures -----------------------------------------------------

struct RectState {
    int x = 0, y = 0, w = 0, h = 0;
    std::array<std::uint8_t, 3> color{};
    // Optional second tone: the first floor(fill2 * w * h) pixels of the
    // rectangle, row-major, take color2.
    std::array<std::uint8_t, 3> color2{};
    double fill2 = 0.0;
};

struct ObjectTrack {
    int object_id = 0;
    std::vector<std::optional<RectState>> states; // one per frame; nullopt = absent
};

struct SyntheticSpec {
    int width = 160;
    int height = 120;
    int frame_count = 0;
    double fps = 24.0;
    std::vector<int> cut_indices;                        // strictly increasing, >= 1
    std::vector<std::array<std::uint8_t, 3>> segment_colors; // cut_indices.size() + 1
    std::vector<ObjectTrack> objects;
    std::uint64_t seed = 0;
    int speckle_amplitude = 0; // deterministic per-pixel background speckle
};

struct RenderedVideo {
    std::vector<ImageFrame> frames;
    std::map<int, std::vector<BinaryMask>> gt;
};

// In-memory realization of the spec; GT masks are exactly the rectangles.
RenderedVideo render_synthetic(const SyntheticSpec& spec);

// Renders and persists the spec in the dataset layout under out_dir/<name>.
DatasetLayout generate_synthetic(const SyntheticSpec& spec,
                                 const std::filesystem::path& out_dir,
                                 const std::string& name = "synthetic");

SyntheticSpec synthetic_spec_from_json(const std::string& json_text);

} // namespace secvos
