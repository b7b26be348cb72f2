#include "secvos/memory.hpp"

namespace secvos {

MemoryBank::MemoryBank(SegmentationRecord anchor_record, std::size_t window)
    : window_(window) {
    anchor_.frame_index = anchor_record.frame_index;
    anchor_.record = std::move(anchor_record);
    anchor_.is_anchor = true;
}

bool MemoryBank::admit(const SegmentationRecord& record,
                       std::optional<std::string> feature_handle) {
    if (record.frame_index <= newest_frame_index())
        throw OutOfOrderFrameError("MemoryBank::admit: frame " +
                                   std::to_string(record.frame_index) +
                                   " not after stored frame " +
                                   std::to_string(newest_frame_index()));
    if (record.presence_score <= kPresenceEpsilon)
        return false; // object-aware filtering: invisible frames stay out
    MemoryEntry entry;
    entry.frame_index = record.frame_index;
    entry.record = record;
    entry.feature_handle = std::move(feature_handle);
    entry.is_anchor = false;
    recents_.push_back(std::move(entry));
    while (recents_.size() > window_ - 1)
        recents_.pop_front();
    return true;
}

std::vector<SelectedMemory> MemoryBank::select_window(int current_frame_index) const {
    if (current_frame_index <= newest_frame_index())
        throw OutOfOrderFrameError("MemoryBank::select_window: current frame " +
                                   std::to_string(current_frame_index) +
                                   " not after stored frame " +
                                   std::to_string(newest_frame_index()));
    std::vector<SelectedMemory> out;
    out.reserve(recents_.size() + 1);
    out.push_back({anchor_, current_frame_index - anchor_.frame_index});
    for (const MemoryEntry& e : recents_)
        out.push_back({e, current_frame_index - e.frame_index});
    return out;
}

} // namespace secvos
