#pragma once

#include <memory>
#include <vector>

#include "secvos/core.hpp"
#include "secvos/memory.hpp"

namespace secvos {

// Read access to a video's frames, shared by the in-process backends.
class FrameSource {
public:
    virtual ~FrameSource() = default;
    virtual const ImageFrame& frame(int frame_index) const = 0;
};

class VectorFrameSource final : public FrameSource {
public:
    explicit VectorFrameSource(std::vector<ImageFrame> frames)
        : frames_(std::move(frames)) {}
    explicit VectorFrameSource(const std::vector<ImageFrame>* borrowed)
        : borrowed_(borrowed) {}

    const ImageFrame& frame(int frame_index) const override;

private:
    std::vector<ImageFrame> frames_;
    const std::vector<ImageFrame>* borrowed_ = nullptr;
};

// One memory-window slot as a backend sees it.
struct MemoryWindowItem {
    int frame_index = 0;
    BinaryMask mask;
    double presence_score = 0.0;
    int offset = 0; // current - frame_index
};

struct KeyframeItem {
    int frame_index = 0;
    BinaryMask mask;
};

struct PixelRequest {
    int frame_index = 0;
    int object_id = 0;
    std::vector<MemoryWindowItem> window; // non-empty; anchor first
};

struct ConceptRequest {
    int frame_index = 0;
    int object_id = 0;
    std::vector<KeyframeItem> keyframes; // non-empty, temporally ordered, anchor first
    std::vector<MemoryWindowItem> window;
};

struct BackendResponse {
    SegmentationRecord record;
};

class PixelBackend {
public:
    virtual ~PixelBackend() = default;
    virtual BackendResponse segment(const PixelRequest& request) = 0;
};

class ConceptBackend {
public:
    virtual ~ConceptBackend() = default;
    virtual BackendResponse segment(const ConceptRequest& request) = 0;
};

// Deterministic template matcher standing in for the pixel-association path.
//
// Template: bounding box of the newest window mask's object pixels, sampled
// from its source frame. Candidates: translations (dy, dx) within
// search_radius that keep the box inside the frame. Score: mean squared
// difference over all RGB samples of the box. Ties break toward the smaller
// translation magnitude, then lexicographic (dy, dx). Output: the newest mask
// translated by the winning offset and clipped; presence = confidence =
// max(0, 1 - score / tau). A zero presence yields an empty mask.
struct ToyPixelConfig {
    int search_radius = 16;
    double tau = 1500.0; // squared 8-bit units
};

class ToyPixelBackend final : public PixelBackend {
public:
    ToyPixelBackend(std::shared_ptr<const FrameSource> frames, ToyPixelConfig config = {});
    BackendResponse segment(const PixelRequest& request) override;

private:
    std::shared_ptr<const FrameSource> frames_;
    ToyPixelConfig config_;
};

// Deterministic whole-frame re-detector standing in for concept reasoning.
//
// Descriptor: mean of the keyframes' object-region hue/saturation histograms.
// Candidates: sliding windows of the anchor mask's bounding-box size, stride
// a quarter of the box per axis (plus the flush-right/bottom positions).
// Score: Bhattacharyya distance between the window's histogram and the
// descriptor; same tie-breaking as the pixel matcher, with translations
// measured from the anchor box. Output: the anchor mask moved to the winning
// window; presence = confidence = max(0, 1 - score / tau).
struct ToyConceptConfig {
    int h_bins = 32;
    int s_bins = 32;
    double tau = 0.6;
};

class ToyConceptBackend final : public ConceptBackend {
public:
    ToyConceptBackend(std::shared_ptr<const FrameSource> frames, ToyConceptConfig config = {});
    BackendResponse segment(const ConceptRequest& request) override;

private:
    std::shared_ptr<const FrameSource> frames_;
    ToyConceptConfig config_;
};

// Engine-side contract check applied to every backend answer.
void validate_response(const BackendResponse& response, int frame_index, int object_id,
                       int frame_width, int frame_height);

} // namespace secvos
