#include "secvos/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace secvos {

double region_similarity(const BinaryMask& pred, const BinaryMask& gt) {
    return mask_iou(pred, gt);
}

int default_boundary_tolerance(int width, int height) {
    const double diagonal = std::sqrt(static_cast<double>(width) * width +
                                      static_cast<double>(height) * height);
    return std::max(1, static_cast<int>(std::lround(0.008 * diagonal)));
}

namespace {

// Chebyshev dilation by `radius`, as two separable max passes.
std::vector<std::uint8_t> dilate(const BinaryMask& mask, int radius) {
    const int w = mask.width, h = mask.height;
    std::vector<std::uint8_t> rows(static_cast<std::size_t>(w) * h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y))
                continue;
            const int x0 = std::max(0, x - radius);
            const int x1 = std::min(w - 1, x + radius);
            for (int xx = x0; xx <= x1; ++xx)
                rows[static_cast<std::size_t>(y) * w + xx] = 1;
        }
    }
    std::vector<std::uint8_t> out(static_cast<std::size_t>(w) * h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!rows[static_cast<std::size_t>(y) * w + x])
                continue;
            const int y0 = std::max(0, y - radius);
            const int y1 = std::min(h - 1, y + radius);
            for (int yy = y0; yy <= y1; ++yy)
                out[static_cast<std::size_t>(yy) * w + x] = 1;
        }
    }
    return out;
}

double covered_fraction(const BinaryMask& boundary,
                        const std::vector<std::uint8_t>& dilated_other) {
    std::size_t total = 0, hit = 0;
    for (std::size_t i = 0; i < boundary.bits.size(); ++i) {
        if (!boundary.bits[i])
            continue;
        ++total;
        hit += dilated_other[i] ? 1 : 0;
    }
    return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
}

} // namespace

double contour_accuracy(const BinaryMask& pred, const BinaryMask& gt, int tolerance) {
    if (!pred.same_shape(gt))
        throw DimensionMismatchError("contour_accuracy: shapes differ");
    const bool pred_empty = !pred.any();
    const bool gt_empty = !gt.any();
    if (pred_empty && gt_empty)
        return 1.0;
    if (pred_empty || gt_empty)
        return 0.0;

    const BinaryMask bp = boundary_map(pred);
    const BinaryMask bg = boundary_map(gt);
    const std::vector<std::uint8_t> bg_dilated = dilate(bg, tolerance);
    const std::vector<std::uint8_t> bp_dilated = dilate(bp, tolerance);
    const double precision = covered_fraction(bp, bg_dilated);
    const double recall = covered_fraction(bg, bp_dilated);
    if (precision + recall == 0.0)
        return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

FrameEval evaluate_frame(const BinaryMask& pred, const BinaryMask& gt, int tolerance) {
    FrameEval eval;
    eval.j = region_similarity(pred, gt);
    eval.f = contour_accuracy(pred, gt, tolerance);
    eval.both_empty = !pred.any() && !gt.any();
    return eval;
}

VideoEval evaluate_video(const std::map<int, std::vector<BinaryMask>>& preds,
                         const std::map<int, std::vector<BinaryMask>>& gts,
                         int tolerance) {
    if (gts.empty())
        throw LengthMismatchError("evaluate_video: no ground-truth objects");
    VideoEval video;
    for (const auto& [object_id, gt_seq] : gts) {
        const auto it = preds.find(object_id);
        if (it == preds.end())
            throw LengthMismatchError("evaluate_video: missing predictions for object " +
                                      std::to_string(object_id));
        const std::vector<BinaryMask>& pred_seq = it->second;
        if (pred_seq.size() != gt_seq.size())
            throw LengthMismatchError("evaluate_video: object " +
                                      std::to_string(object_id) + " has " +
                                      std::to_string(pred_seq.size()) +
                                      " predictions for " + std::to_string(gt_seq.size()) +
                                      " GT frames");
        if (gt_seq.size() < 2)
            throw LengthMismatchError("evaluate_video: nothing to score after frame 0");
        const int tol = tolerance >= 0 ? tolerance
                                       : default_boundary_tolerance(gt_seq[0].width,
                                                                    gt_seq[0].height);
        double j_sum = 0.0, f_sum = 0.0;
        for (std::size_t t = 1; t < gt_seq.size(); ++t) {
            const FrameEval fe = evaluate_frame(pred_seq[t], gt_seq[t], tol);
            j_sum += fe.j;
            f_sum += fe.f;
        }
        const double n = static_cast<double>(gt_seq.size() - 1);
        FrameEval mean;
        mean.j = j_sum / n;
        mean.f = f_sum / n;
        video.per_object[object_id] = mean;
    }
    for (const auto& [id, mean] : video.per_object) {
        video.j += mean.j;
        video.f += mean.f;
    }
    video.j /= static_cast<double>(video.per_object.size());
    video.f /= static_cast<double>(video.per_object.size());
    return video;
}

namespace {

BucketStats reduce(const std::vector<const VideoEval*>& members) {
    BucketStats stats;
    stats.video_count = members.size();
    if (members.empty())
        return stats;
    for (const VideoEval* e : members) {
        stats.j += e->j;
        stats.f += e->f;
        stats.jf += e->jf();
    }
    stats.j /= static_cast<double>(members.size());
    stats.f /= static_cast<double>(members.size());
    stats.jf /= static_cast<double>(members.size());
    return stats;
}

} // namespace

BenchmarkReport bucket_report(const std::vector<std::string>& names,
                              const std::vector<VideoEval>& evals,
                              const std::vector<SceneList>& scenes) {
    if (evals.size() != scenes.size() || names.size() != evals.size())
        throw MissingSceneListError("bucket_report: one scene list per video required");
    BenchmarkReport report;
    std::vector<const VideoEval*> all, none, single, multi;
    for (std::size_t i = 0; i < evals.size(); ++i) {
        VideoRow row{names[i], evals[i]};
        row.eval.scene_change_count = static_cast<int>(scenes[i].cut_indices.size());
        report.rows.push_back(row);
    }
    for (const VideoRow& row : report.rows) {
        all.push_back(&row.eval);
        if (row.eval.scene_change_count == 0)
            none.push_back(&row.eval);
        else if (row.eval.scene_change_count == 1)
            single.push_back(&row.eval);
        else
            multi.push_back(&row.eval);
    }
    report.overall = reduce(all);
    report.no_change = reduce(none);
    report.single_change = reduce(single);
    report.multi_change = reduce(multi);
    return report;
}

double disappearance_rate(const std::vector<std::vector<BinaryMask>>& gt_objects) {
    if (gt_objects.empty())
        throw EmptySequenceError("disappearance_rate: no objects");
    std::size_t disappearing = 0;
    for (const std::vector<BinaryMask>& seq : gt_objects) {
        bool appeared = false;
        bool vanished = false;
        for (const BinaryMask& mask : seq) {
            const bool visible = mask.any();
            if (!appeared) {
                appeared = visible;
            } else if (!visible) {
                vanished = true;
                break;
            }
        }
        disappearing += vanished ? 1 : 0;
    }
    return static_cast<double>(disappearing) / static_cast<double>(gt_objects.size());
}

DatasetStats dataset_stats(const std::vector<VideoForStats>& videos) {
    if (videos.empty())
        throw EmptySequenceError("dataset_stats: no videos");
    DatasetStats stats;
    stats.video_count = videos.size();
    std::vector<std::vector<BinaryMask>> all_objects;
    double duration_sum = 0.0, scene_sum = 0.0;
    for (const VideoForStats& v : videos) {
        if (v.fps <= 0.0)
            throw MissingFpsError("dataset_stats: video without a frame rate");
        duration_sum += static_cast<double>(v.frame_count) / v.fps;
        scene_sum += static_cast<double>(v.scenes.scene_count());
        for (const auto& seq : v.gt_objects)
            all_objects.push_back(seq);
    }
    stats.avg_duration_s = duration_sum / static_cast<double>(videos.size());
    stats.avg_scene_count = scene_sum / static_cast<double>(videos.size());
    stats.disappearance_rate = disappearance_rate(all_objects);
    return stats;
}

} // namespace secvos
