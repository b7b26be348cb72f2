#include "secvos/keyframes.hpp"

#include <algorithm>

namespace secvos {

KeyframeBank::KeyframeBank(const ImageFrame& first_frame, const BinaryMask& first_mask,
                           KeyframeBankConfig config)
    : config_(config) {
    if (first_frame.width != first_mask.width || first_frame.height != first_mask.height)
        throw DimensionMismatchError("KeyframeBank: first mask does not match frame");
    anchor_.frame_index = first_frame.frame_index;
    anchor_.histogram = compute_hs_histogram(first_frame, config_.h_bins, config_.s_bins);
    anchor_.is_anchor = true;
    anchor_.record.frame_index = first_frame.frame_index;
    anchor_.record.mask = first_mask;
    anchor_.record.presence_score = 1.0; // ground truth
    anchor_.record.confidence = 1.0;
}

bool KeyframeBank::consider(const ImageFrame& frame, const SegmentationRecord& record) {
    if (frozen_)
        throw FrozenBankError("KeyframeBank::consider on frozen bank");
    const int last = recents_.empty() ? anchor_.frame_index : recents_.back().frame_index;
    if (record.frame_index <= last)
        throw OutOfOrderFrameError("KeyframeBank::consider: frame " +
                                   std::to_string(record.frame_index) +
                                   " not after stored frame " + std::to_string(last));

    if (record.confidence < config_.confidence_threshold || record.presence_score <= 0.0 ||
        !record.mask.any())
        return false;

    HsHistogram hist = compute_hs_histogram(frame, config_.h_bins, config_.s_bins);
    double min_dist = bhattacharyya_distance(hist, anchor_.histogram);
    for (const Keyframe& kf : recents_)
        min_dist = std::min(min_dist, bhattacharyya_distance(hist, kf.histogram));
    if (min_dist <= config_.diversity_threshold)
        return false;

    Keyframe kf;
    kf.frame_index = record.frame_index;
    kf.histogram = std::move(hist);
    kf.record = record;
    kf.is_anchor = false;
    recents_.push_back(std::move(kf));
    if (recents_.size() > config_.capacity)
        recents_.pop_front(); // FIFO eviction; the anchor is untouchable
    return true;
}

std::vector<Keyframe> KeyframeBank::contents() const {
    std::vector<Keyframe> out;
    out.reserve(recents_.size() + 1);
    out.push_back(anchor_);
    out.insert(out.end(), recents_.begin(), recents_.end());
    return out;
}

} // namespace secvos
