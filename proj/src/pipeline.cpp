#include "secvos/pipeline.hpp"

#include <chrono>

namespace secvos {

namespace {

struct ObjectState {
    KeyframeBank keyframes;
    MemoryBank memory;
    BinaryMask last_pixel_mask; // most recent non-concept result (GT counts)
};

std::vector<MemoryWindowItem> window_items(const MemoryBank& memory, int frame_index) {
    std::vector<MemoryWindowItem> items;
    for (const SelectedMemory& sel : memory.select_window(frame_index))
        items.push_back({sel.entry.frame_index, sel.entry.record.mask,
                         sel.entry.record.presence_score, sel.offset});
    return items;
}

std::vector<KeyframeItem> keyframe_items(const KeyframeBank& bank) {
    std::vector<KeyframeItem> items;
    for (const Keyframe& kf : bank.contents())
        items.push_back({kf.frame_index, kf.record.mask});
    return items;
}

void validate_inputs(const std::vector<ImageFrame>& frames,
                     const std::map<int, BinaryMask>& first_masks) {
    if (frames.empty())
        throw EmptySequenceError("track_video: no frames");
    if (first_masks.empty())
        throw ValidationError("track_video: no first-frame masks");
    for (const auto& [object_id, mask] : first_masks) {
        if (object_id <= 0)
            throw ValidationError("track_video: object ids must be positive");
        if (mask.width != frames[0].width || mask.height != frames[0].height)
            throw DimensionMismatchError("track_video: first mask of object " +
                                         std::to_string(object_id) +
                                         " does not match frame size");
        if (!mask.any())
            throw ValidationError("track_video: first mask of object " +
                                  std::to_string(object_id) + " is empty");
    }
}

TrackResult track_pass(const std::vector<ImageFrame>& frames,
                       const std::map<int, BinaryMask>& first_masks,
                       const TrackerConfig& config, PixelBackend& pixel,
                       ConceptBackend& concept_backend, std::map<int, KeyframeBank>& banks) {
    validate_inputs(frames, first_masks);

    KeyframeBankConfig kf_config{config.keyframe_capacity, config.diversity_threshold,
                                 config.confidence_threshold, config.h_bins,
                                 config.s_bins};

    TrackResult result;
    std::map<int, ObjectState> objects;
    for (const auto& [object_id, mask] : first_masks) {
        SegmentationRecord given;
        given.frame_index = frames[0].frame_index;
        given.object_id = object_id;
        given.mask = mask;
        given.presence_score = 1.0;
        given.confidence = 1.0;

        if (!banks.contains(object_id))
            banks.emplace(object_id, KeyframeBank(frames[0], mask, kf_config));
        objects.emplace(object_id,
                        ObjectState{banks.at(object_id),
                                    MemoryBank(given, config.memory_window), mask});
        result.records[object_id].push_back(given);
    }

    SceneChangeDetector detector(
        {config.scene_threshold, config.h_bins, config.s_bins});
    detector.detect_change(frames[0]); // seed; never a cut

    for (std::size_t t = 1; t < frames.size(); ++t) {
        const auto started = std::chrono::steady_clock::now();
        const ImageFrame& frame = frames[t];
        const int frame_index = frame.frame_index;
        const bool changed = detector.detect_change(frame);
        if (changed)
            result.scenes.cut_indices.push_back(static_cast<int>(t));

        for (auto& [object_id, state] : objects) {
            ++result.stats.frames_total;
            const bool use_concept = changed || config.force_concept_every_frame;

            BackendResponse response;
            try {
                if (use_concept) {
                    ConceptRequest request;
                    request.frame_index = frame_index;
                    request.object_id = object_id;
                    request.keyframes = keyframe_items(state.keyframes);
                    request.window = window_items(state.memory, frame_index);
                    response = concept_backend.segment(request);
                    ++result.stats.concept_invocations;
                } else {
                    PixelRequest request;
                    request.frame_index = frame_index;
                    request.object_id = object_id;
                    request.window = window_items(state.memory, frame_index);
                    response = pixel.segment(request);
                }
                validate_response(response, frame_index, object_id, frame.width,
                                  frame.height);
            } catch (const BackendError& e) {
                const std::string context = "frame " + std::to_string(frame_index) +
                                            ", object " + std::to_string(object_id) +
                                            ": " + e.what();
                if (!config.keep_going) {
                    if (dynamic_cast<const TimeoutError*>(&e))
                        throw TimeoutError(context);
                    if (dynamic_cast<const BackendUnavailableError*>(&e))
                        throw BackendUnavailableError(context);
                    if (dynamic_cast<const ProtocolViolationError*>(&e))
                        throw ProtocolViolationError(context);
                    throw BackendError(context);
                }
                // Salvage: every remaining (frame, object) scores as an empty
                // prediction, honestly reported as a failure.
                result.failure = context;
                for (auto& [id, records] : result.records) {
                    while (records.size() < frames.size()) {
                        SegmentationRecord empty;
                        empty.frame_index = frames[records.size()].frame_index;
                        empty.object_id = id;
                        empty.mask = BinaryMask::zeros(frame.width, frame.height);
                        records.push_back(std::move(empty));
                    }
                }
                for (auto& [id, st] : objects)
                    banks.insert_or_assign(id, std::move(st.keyframes));
                return result;
            }
            const SegmentationRecord& record = response.record;

            if (use_concept) {
                // Re-acquisition hygiene: only a non-empty concept result that
                // lands away from the last pixel result clears the recents. An
                // empty result claims absence and must not erase the memory the
                // pixel path needs to recover with.
                if (config.reset_memory_on_disagreement &&
                    record.presence_score > 0.0 &&
                    mask_iou(record.mask, state.last_pixel_mask) <
                        config.reset_iou_threshold) {
                    state.memory.reset_recents();
                    ++result.stats.memory_resets;
                }
            } else {
                state.last_pixel_mask = record.mask;
            }

            state.memory.admit(record);
            if (!state.keyframes.frozen() &&
                state.keyframes.consider(frame, record))
                ++result.stats.keyframes_admitted;

            result.records[object_id].push_back(record);
        }
        result.stats.frame_duration_ms.push_back(
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                      started)
                .count());
    }

    for (auto& [object_id, state] : objects)
        banks.insert_or_assign(object_id, std::move(state.keyframes));
    return result;
}

} // namespace

TrackResult track_video(const std::vector<ImageFrame>& frames,
                        const std::map<int, BinaryMask>& first_masks,
                        const TrackerConfig& config, PixelBackend& pixel,
                        ConceptBackend& concept_backend) {
    std::map<int, KeyframeBank> banks;
    return track_pass(frames, first_masks, config, pixel, concept_backend, banks);
}

TrackResult track_offline(const std::vector<ImageFrame>& frames,
                          const std::map<int, BinaryMask>& first_masks,
                          const TrackerConfig& config, PixelBackend& pixel,
                          ConceptBackend& concept_backend) {
    std::map<int, KeyframeBank> banks;
    TrackResult pass1 = track_pass(frames, first_masks, config, pixel, concept_backend, banks);
    for (auto& [object_id, bank] : banks)
        bank.freeze();
    TrackResult pass2 = track_pass(frames, first_masks, config, pixel, concept_backend, banks);

    pass2.stats.frames_total += pass1.stats.frames_total;
    pass2.stats.concept_invocations += pass1.stats.concept_invocations;
    pass2.stats.keyframes_admitted += pass1.stats.keyframes_admitted;
    pass2.stats.memory_resets += pass1.stats.memory_resets;
    pass2.stats.frame_duration_ms.insert(pass2.stats.frame_duration_ms.begin(),
                                         pass1.stats.frame_duration_ms.begin(),
                                         pass1.stats.frame_duration_ms.end());
    return pass2;
}

std::vector<SweepRow> sweep_guidance_ratio(
    const std::vector<ImageFrame>& frames, const std::map<int, BinaryMask>& first_masks,
    const std::vector<double>& thresholds, const TrackerConfig& base_config,
    PixelBackend& pixel, ConceptBackend& concept_backend,
    const std::map<int, std::vector<BinaryMask>>& gt) {
    std::vector<SweepRow> rows;
    for (double threshold : thresholds) {
        TrackerConfig config = base_config;
        config.scene_threshold = threshold;
        const TrackResult result =
            track_video(frames, first_masks, config, pixel, concept_backend);
        std::map<int, std::vector<BinaryMask>> preds;
        for (const auto& [object_id, records] : result.records)
            for (const SegmentationRecord& rec : records)
                preds[object_id].push_back(rec.mask);
        const VideoEval eval = evaluate_video(preds, gt);
        rows.push_back({threshold, result.stats.concept_guidance_ratio(), eval.jf()});
    }
    return rows;
}

} // namespace secvos
