#pragma once

#include <optional>
#include <vector>

#include "secvos/core.hpp"

namespace secvos {

// L1-normalized 2D hue/saturation histogram.
struct HsHistogram {
    int h_bins = 0;
    int s_bins = 0;
    std::vector<double> weights; // h_bins * s_bins, index = h_bin * s_bins + s_bin

    double at(int h_bin, int s_bin) const {
        return weights[static_cast<std::size_t>(h_bin) * s_bins + s_bin];
    }
    bool same_geometry(const HsHistogram& other) const {
        return h_bins == other.h_bins && s_bins == other.s_bins;
    }
};

struct HsPoint {
    double hue;        // degrees, [0, 360)
    double saturation; // [0, 1]
};

// max = max(r,g,b)/255, min likewise; saturation = 0 when max = 0, else
// (max-min)/max; hue from the hexagonal formula, 0 for achromatic pixels.
HsPoint rgb_to_hs(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Bins each pixel by floor(h/360*h_bins) and floor(s*s_bins), both clamped
// to the last bin, then divides by the pixel count.
HsHistogram compute_hs_histogram(const ImageFrame& frame, int h_bins, int s_bins);

// Histogram restricted to the mask's object pixels. Weights are all zero when
// the region is empty (the only case where the result is not L1-normalized).
HsHistogram compute_hs_histogram_masked(const ImageFrame& frame, const BinaryMask& mask,
                                        int h_bins, int s_bins);

// sqrt(max(0, 1 - sum_i sqrt(p_i * q_i))); the clamp guards rounding noise.
double bhattacharyya_distance(const HsHistogram& p, const HsHistogram& q);

struct SceneChangeConfig {
    double threshold = 0.35;
    int h_bins = 32;
    int s_bins = 32;
};

// Stateful per-video detector; feed frames in temporal order.
class SceneChangeDetector {
public:
    SceneChangeDetector() = default;
    explicit SceneChangeDetector(SceneChangeConfig config) : config_(config) {}

    // False on the very first frame. Otherwise true iff the Bhattacharyya
    // distance to the previous frame exceeds the threshold. The previous
    // histogram is replaced in all cases, so back-to-back distinct scenes
    // each register exactly one cut.
    bool detect_change(const ImageFrame& frame);

    void reset() { prev_.reset(); }
    const SceneChangeConfig& config() const { return config_; }

private:
    SceneChangeConfig config_;
    std::optional<HsHistogram> prev_;
};

struct SceneList {
    std::vector<int> cut_indices; // strictly increasing, all >= 1
    int scene_count() const { return static_cast<int>(cut_indices.size()) + 1; }
};

// Runs detect_change over the whole sequence; a change at position i adds cut i.
SceneList segment_scenes(const std::vector<ImageFrame>& frames,
                         const SceneChangeConfig& config = {});

} // namespace secvos
