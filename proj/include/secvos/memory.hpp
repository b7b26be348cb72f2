#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "secvos/core.hpp"

namespace secvos {

// Presence scores at or below this count as "object absent".
inline constexpr double kPresenceEpsilon = 1e-6;

struct MemoryEntry {
    int frame_index = 0;
    SegmentationRecord record;
    std::optional<std::string> feature_handle; // backend-side cached features
    bool is_anchor = false;
};

struct SelectedMemory {
    MemoryEntry entry;
    int offset; // current_frame_index - entry.frame_index, >= 1
};

// Sliding window of object-visible past frames for the pixel path. The
// ground-truth anchor is always retained; recents keep only frames whose
// presence score is non-zero.
class MemoryBank {
public:
    explicit MemoryBank(SegmentationRecord anchor_record, std::size_t window = 22);

    // Returns true iff the record was accepted (presence above epsilon).
    // Evicts the oldest recent beyond window-1 entries.
    bool admit(const SegmentationRecord& record,
               std::optional<std::string> feature_handle = std::nullopt);

    // [anchor] ++ recents with temporal offsets, oldest first, at most
    // `window` entries.
    std::vector<SelectedMemory> select_window(int current_frame_index) const;

    // Drops all recents, keeping the anchor. Used when the concept path
    // re-acquires the object and pre-cut appearance should stop dominating.
    void reset_recents() { recents_.clear(); }

    std::size_t window() const { return window_; }
    std::size_t size() const { return recents_.size() + 1; }
    int newest_frame_index() const {
        return recents_.empty() ? anchor_.frame_index : recents_.back().frame_index;
    }

private:
    std::size_t window_;
    MemoryEntry anchor_;
    std::deque<MemoryEntry> recents_;
};

} // namespace secvos
