#include "secvos/backends.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "secvos/scenedetect.hpp"

namespace secvos {

const ImageFrame& VectorFrameSource::frame(int frame_index) const {
    const std::vector<ImageFrame>& frames = borrowed_ ? *borrowed_ : frames_;
    if (frame_index < 0 || static_cast<std::size_t>(frame_index) >= frames.size())
        throw BackendError("FrameSource: frame " + std::to_string(frame_index) +
                           " out of range");
    return frames[static_cast<std::size_t>(frame_index)];
}

namespace {

struct Candidate {
    double score = std::numeric_limits<double>::infinity();
    int dy = 0;
    int dx = 0;
    bool valid = false;
};

// argmin with ties toward smaller |delta|, then lexicographic (dy, dx).
void offer(Candidate& best, double score, int dy, int dx) {
    if (!best.valid) {
        best = {score, dy, dx, true};
        return;
    }
    if (score > best.score)
        return;
    if (score < best.score) {
        best = {score, dy, dx, true};
        return;
    }
    const long long mag = static_cast<long long>(dy) * dy + static_cast<long long>(dx) * dx;
    const long long best_mag =
        static_cast<long long>(best.dy) * best.dy + static_cast<long long>(best.dx) * best.dx;
    if (mag < best_mag || (mag == best_mag && std::make_pair(dy, dx) <
                                                  std::make_pair(best.dy, best.dx)))
        best = {score, dy, dx, true};
}

SegmentationRecord absent_record(const PixelRequest& req, int w, int h) {
    SegmentationRecord rec;
    rec.frame_index = req.frame_index;
    rec.object_id = req.object_id;
    rec.mask = BinaryMask::zeros(w, h);
    rec.presence_score = 0.0;
    rec.confidence = 0.0;
    return rec;
}

HsHistogram rect_histogram(const ImageFrame& frame, const PixelRect& rect, int h_bins,
                           int s_bins) {
    HsHistogram hist;
    hist.h_bins = h_bins;
    hist.s_bins = s_bins;
    hist.weights.assign(static_cast<std::size_t>(h_bins) * s_bins, 0.0);
    const double w = 1.0 / (static_cast<double>(rect.w) * rect.h);
    for (int y = rect.y; y < rect.y + rect.h; ++y) {
        for (int x = rect.x; x < rect.x + rect.w; ++x) {
            const std::uint8_t* px = frame.rgb(x, y);
            const HsPoint hs = rgb_to_hs(px[0], px[1], px[2]);
            int hb = std::clamp(static_cast<int>(hs.hue / 360.0 * h_bins), 0, h_bins - 1);
            int sb = std::clamp(static_cast<int>(hs.saturation * s_bins), 0, s_bins - 1);
            hist.weights[static_cast<std::size_t>(hb) * s_bins + sb] += w;
        }
    }
    return hist;
}

} // namespace

ToyPixelBackend::ToyPixelBackend(std::shared_ptr<const FrameSource> frames,
                                 ToyPixelConfig config)
    : frames_(std::move(frames)), config_(config) {}

BackendResponse ToyPixelBackend::segment(const PixelRequest& request) {
    if (request.window.empty())
        throw ProtocolViolationError("pixel request without memory window");
    const ImageFrame& current = frames_->frame(request.frame_index);

    const MemoryWindowItem& newest = request.window.back();
    const ImageFrame& source = frames_->frame(newest.frame_index);
    if (source.width != current.width || source.height != current.height)
        throw ProtocolViolationError("pixel request: frame sizes differ");

    const auto bbox = mask_bbox(newest.mask);
    if (!bbox)
        return {absent_record(request, current.width, current.height)};

    Candidate best;
    const int radius = config_.search_radius;
    const std::size_t samples = static_cast<std::size_t>(bbox->w) * bbox->h * 3;
    for (int dy = -radius; dy <= radius; ++dy) {
        const int ty = bbox->y + dy;
        if (ty < 0 || ty + bbox->h > current.height)
            continue;
        for (int dx = -radius; dx <= radius; ++dx) {
            const int tx = bbox->x + dx;
            if (tx < 0 || tx + bbox->w > current.width)
                continue;
            double ssd = 0.0;
            for (int y = 0; y < bbox->h; ++y) {
                const std::uint8_t* a = source.rgb(bbox->x, bbox->y + y);
                const std::uint8_t* b = current.rgb(tx, ty + y);
                for (int i = 0; i < bbox->w * 3; ++i) {
                    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
                    ssd += d * d;
                }
            }
            offer(best, ssd / static_cast<double>(samples), dy, dx);
        }
    }
    // (0,0) keeps the box inside the frame, so a candidate always exists.
    const double presence = std::max(0.0, 1.0 - best.score / config_.tau);

    SegmentationRecord rec;
    rec.frame_index = request.frame_index;
    rec.object_id = request.object_id;
    rec.presence_score = presence;
    rec.confidence = presence;
    rec.mask = presence > 0.0 ? translate_mask(newest.mask, best.dx, best.dy)
                              : BinaryMask::zeros(current.width, current.height);
    return {rec};
}

ToyConceptBackend::ToyConceptBackend(std::shared_ptr<const FrameSource> frames,
                                     ToyConceptConfig config)
    : frames_(std::move(frames)), config_(config) {}

BackendResponse ToyConceptBackend::segment(const ConceptRequest& request) {
    if (request.keyframes.empty())
        throw ProtocolViolationError("concept request without keyframes");
    for (std::size_t i = 1; i < request.keyframes.size(); ++i)
        if (request.keyframes[i].frame_index <= request.keyframes[i - 1].frame_index)
            throw ProtocolViolationError("concept request: keyframes out of order");

    const ImageFrame& current = frames_->frame(request.frame_index);

    // Mean of the object-region histograms; keyframes with empty masks are skipped.
    HsHistogram descriptor;
    descriptor.h_bins = config_.h_bins;
    descriptor.s_bins = config_.s_bins;
    descriptor.weights.assign(
        static_cast<std::size_t>(config_.h_bins) * config_.s_bins, 0.0);
    std::size_t contributing = 0;
    for (const KeyframeItem& kf : request.keyframes) {
        if (!kf.mask.any())
            continue;
        const ImageFrame& frame = frames_->frame(kf.frame_index);
        HsHistogram hist =
            compute_hs_histogram_masked(frame, kf.mask, config_.h_bins, config_.s_bins);
        for (std::size_t i = 0; i < hist.weights.size(); ++i)
            descriptor.weights[i] += hist.weights[i];
        ++contributing;
    }

    const KeyframeItem& anchor = request.keyframes.front();
    const auto bbox = mask_bbox(anchor.mask);
    SegmentationRecord rec;
    rec.frame_index = request.frame_index;
    rec.object_id = request.object_id;
    if (contributing == 0 || !bbox || bbox->w > current.width || bbox->h > current.height) {
        rec.mask = BinaryMask::zeros(current.width, current.height);
        return {rec};
    }
    for (double& w : descriptor.weights)
        w /= static_cast<double>(contributing);

    const int stride_x = std::max(1, bbox->w / 4);
    const int stride_y = std::max(1, bbox->h / 4);
    const int max_x = current.width - bbox->w;
    const int max_y = current.height - bbox->h;

    Candidate best;
    for (int wy = 0;; wy += stride_y) {
        const int y = std::min(wy, max_y);
        for (int wx = 0;; wx += stride_x) {
            const int x = std::min(wx, max_x);
            HsHistogram hist = rect_histogram(current, {x, y, bbox->w, bbox->h},
                                              config_.h_bins, config_.s_bins);
            offer(best, bhattacharyya_distance(hist, descriptor), y - bbox->y, x - bbox->x);
            if (x == max_x)
                break;
        }
        if (y == max_y)
            break;
    }

    const double presence = std::max(0.0, 1.0 - best.score / config_.tau);
    rec.presence_score = presence;
    rec.confidence = presence;
    rec.mask = presence > 0.0 ? translate_mask(anchor.mask, best.dx, best.dy)
                              : BinaryMask::zeros(current.width, current.height);
    return {rec};
}

void validate_response(const BackendResponse& response, int frame_index, int object_id,
                       int frame_width, int frame_height) {
    const SegmentationRecord& rec = response.record;
    if (rec.frame_index != frame_index)
        throw ProtocolViolationError("response frame_index " +
                                     std::to_string(rec.frame_index) + " != request " +
                                     std::to_string(frame_index));
    if (rec.object_id != object_id)
        throw ProtocolViolationError("response object_id mismatch");
    if (rec.mask.width != frame_width || rec.mask.height != frame_height)
        throw ProtocolViolationError("response mask size differs from frame");
    if (!(rec.presence_score >= 0.0 && rec.presence_score <= 1.0) ||
        !(rec.confidence >= 0.0 && rec.confidence <= 1.0))
        throw ProtocolViolationError("response scores out of [0,1]");
    const bool empty = !rec.mask.any();
    if (rec.presence_score == 0.0 && !empty)
        throw ProtocolViolationError("zero presence with non-empty mask");
    if (rec.presence_score > 0.0 && empty)
        throw ProtocolViolationError("positive presence with empty mask");
}

} // namespace secvos
