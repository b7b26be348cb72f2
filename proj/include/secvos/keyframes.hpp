#pragma once

#include <deque>
#include <vector>

#include "secvos/core.hpp"
#include "secvos/scenedetect.hpp"

namespace secvos {

struct Keyframe {
    int frame_index = 0;
    HsHistogram histogram; // of the full frame
    SegmentationRecord record;
    bool is_anchor = false;
};

struct KeyframeBankConfig {
    std::size_t capacity = 6;          // recents only; plus the anchor = 7 total
    double diversity_threshold = 0.2;  // min Bhattacharyya distance to every stored keyframe
    double confidence_threshold = 0.5;
    int h_bins = 32;
    int s_bins = 32;
};

// Anchor plus a FIFO of representative keyframes. The anchor is the first
// annotated frame and is never evicted; recents are admitted only when the
// frame looks unlike everything stored and carries a confident, non-empty
// segmentation.
class KeyframeBank {
public:
    KeyframeBank(const ImageFrame& first_frame, const BinaryMask& first_mask,
                 KeyframeBankConfig config = {});

    // Returns true iff the frame was admitted. Throws FrozenBankError on a
    // frozen bank and OutOfOrderFrameError when the record does not advance
    // past every stored frame.
    bool consider(const ImageFrame& frame, const SegmentationRecord& record);

    // [anchor] ++ recents, temporally ordered.
    std::vector<Keyframe> contents() const;

    void freeze() { frozen_ = true; }
    bool frozen() const { return frozen_; }

    const Keyframe& anchor() const { return anchor_; }
    std::size_t size() const { return recents_.size() + 1; }
    const KeyframeBankConfig& config() const { return config_; }

private:
    KeyframeBankConfig config_;
    Keyframe anchor_;
    std::deque<Keyframe> recents_;
    bool frozen_ = false;
};

} // namespace secvos
