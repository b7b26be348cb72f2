#pragma once

#include <map>
#include <vector>

#include "secvos/backends.hpp"
#include "secvos/keyframes.hpp"
#include "secvos/memory.hpp"
#include "secvos/metrics.hpp"
#include "secvos/scenedetect.hpp"

namespace secvos {

struct TrackerConfig {
    double scene_threshold = 0.35;
    int h_bins = 32;
    int s_bins = 32;
    std::size_t memory_window = 22;
    std::size_t keyframe_capacity = 6; // recents; +1 anchor
    double diversity_threshold = 0.2;
    double confidence_threshold = 0.5;

    enum class Mode { kOnline, kOffline };
    Mode mode = Mode::kOnline;

    bool force_concept_every_frame = false; // ablation: concept path always

    // Clear memory recents when a concept result disagrees with the last
    // pixel-path result below this IoU (re-acquisition hygiene).
    bool reset_memory_on_disagreement = true;
    double reset_iou_threshold = 0.5;

    // Backend failures normally abort the video. With keep_going the failure
    // is recorded instead and every remaining frame scores as an empty
    // prediction.
    bool keep_going = false;
};

struct RunStats {
    // Routed (frame, object) decisions: the supervised first frame is not one.
    std::size_t frames_total = 0;
    std::size_t concept_invocations = 0;
    std::size_t keyframes_admitted = 0;
    std::size_t memory_resets = 0;
    std::vector<double> frame_duration_ms; // one entry per routed frame

    double concept_guidance_ratio() const {
        return frames_total == 0
                   ? 0.0
                   : static_cast<double>(concept_invocations) /
                         static_cast<double>(frames_total);
    }
};

struct TrackResult {
    std::map<int, std::vector<SegmentationRecord>> records; // object -> one per frame
    RunStats stats;
    SceneList scenes; // cuts observed by the shared per-video detector
    std::string failure; // non-empty when a keep_going run hit a backend error
};

// Semi-supervised tracking of one video: frame 0 carries the given masks;
// every later frame routes to the concept path iff a scene change fired
// (or the ablation flag forces it), else to the pixel path.
TrackResult track_video(const std::vector<ImageFrame>& frames,
                        const std::map<int, BinaryMask>& first_masks,
                        const TrackerConfig& config, PixelBackend& pixel,
                        ConceptBackend& concept_backend);

// Two passes: pass 1 builds the keyframe banks online, then the banks are
// frozen and the video is re-tracked against the finalized concept evidence.
// Reported masks/scenes come from pass 2; counters cover both passes.
TrackResult track_offline(const std::vector<ImageFrame>& frames,
                          const std::map<int, BinaryMask>& first_masks,
                          const TrackerConfig& config, PixelBackend& pixel,
                          ConceptBackend& concept_backend);

struct SweepRow {
    double threshold = 0.0;
    double ratio = 0.0;
    double jf = 0.0;
};

// Re-runs track_video per threshold and scores against ground truth,
// producing the guidance-ratio/quality curve.
std::vector<SweepRow> sweep_guidance_ratio(
    const std::vector<ImageFrame>& frames, const std::map<int, BinaryMask>& first_masks,
    const std::vector<double>& thresholds, const TrackerConfig& base_config,
    PixelBackend& pixel, ConceptBackend& concept_backend,
    const std::map<int, std::vector<BinaryMask>>& gt);

} // namespace secvos
