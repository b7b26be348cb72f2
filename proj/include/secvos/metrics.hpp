#pragma once

#include <map>
#include <string>
#include <vector>

#include "secvos/core.hpp"
#include "secvos/scenedetect.hpp"

namespace secvos {

struct FrameEval {
    double j = 0.0;
    double f = 0.0;
    bool both_empty = false; // both masks empty: scored 1/1 by convention
};

struct VideoEval {
    double j = 0.0; // mean over objects of per-object frame means
    double f = 0.0;
    int scene_change_count = 0;
    std::map<int, FrameEval> per_object; // per-object frame means

    double jf() const { return (j + f) / 2.0; }
};

// J: intersection-over-union with the both-empty = 1 convention.
double region_similarity(const BinaryMask& pred, const BinaryMask& gt);

// round(0.008 * image diagonal), at least 1 pixel.
int default_boundary_tolerance(int width, int height);

// Boundary F-measure: precision/recall of boundary pixels matched within a
// Chebyshev distance of `tolerance`. Both masks empty scores 1; exactly one
// empty scores 0.
double contour_accuracy(const BinaryMask& pred, const BinaryMask& gt, int tolerance);

FrameEval evaluate_frame(const BinaryMask& pred, const BinaryMask& gt, int tolerance);

// Frame 0 is the given ground truth and is excluded from scoring. Pass
// tolerance < 0 for the default derived from the mask size.
VideoEval evaluate_video(const std::map<int, std::vector<BinaryMask>>& preds,
                         const std::map<int, std::vector<BinaryMask>>& gts,
                         int tolerance = -1);

struct BucketStats {
    std::size_t video_count = 0;
    double j = 0.0;
    double f = 0.0;
    double jf = 0.0;
};

struct VideoRow {
    std::string name;
    VideoEval eval;
};

// Buckets: 0 cuts / 1 cut / 2+ cuts; unweighted means per bucket and overall.
struct BenchmarkReport {
    BucketStats overall;
    BucketStats no_change;
    BucketStats single_change;
    BucketStats multi_change;
    std::vector<VideoRow> rows;
};

BenchmarkReport bucket_report(const std::vector<std::string>& names,
                              const std::vector<VideoEval>& evals,
                              const std::vector<SceneList>& scenes);

// Fraction of objects that are absent in at least one frame after their
// first appearance. One entry per object, each a full GT mask sequence.
double disappearance_rate(const std::vector<std::vector<BinaryMask>>& gt_objects);

struct VideoForStats {
    std::size_t frame_count = 0;
    double fps = 0.0; // <= 0 means unknown
    std::vector<std::vector<BinaryMask>> gt_objects;
    SceneList scenes;
};

struct DatasetStats {
    std::size_t video_count = 0;
    double avg_duration_s = 0.0;
    double disappearance_rate = 0.0;
    double avg_scene_count = 0.0;
};

DatasetStats dataset_stats(const std::vector<VideoForStats>& videos);

} // namespace secvos
