#include "secvos/scenedetect.hpp"

#include <algorithm>
#include <cmath>

namespace secvos {

HsPoint rgb_to_hs(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const double rf = r / 255.0;
    const double gf = g / 255.0;
    const double bf = b / 255.0;
    const double max = std::max({rf, gf, bf});
    const double min = std::min({rf, gf, bf});
    const double delta = max - min;

    const double saturation = (max == 0.0) ? 0.0 : delta / max;

    double hue = 0.0;
    if (delta > 0.0) {
        if (max == rf)
            hue = 60.0 * ((gf - bf) / delta);
        else if (max == gf)
            hue = 60.0 * ((bf - rf) / delta + 2.0);
        else
            hue = 60.0 * ((rf - gf) / delta + 4.0);
        if (hue < 0.0)
            hue += 360.0;
        if (hue >= 360.0)
            hue -= 360.0;
    }
    return {hue, saturation};
}

namespace {

inline std::size_t hs_bin_index(const HsPoint& hs, int h_bins, int s_bins) {
    int hb = static_cast<int>(hs.hue / 360.0 * h_bins);
    int sb = static_cast<int>(hs.saturation * s_bins);
    hb = std::clamp(hb, 0, h_bins - 1);
    sb = std::clamp(sb, 0, s_bins - 1);
    return static_cast<std::size_t>(hb) * s_bins + sb;
}

} // namespace

HsHistogram compute_hs_histogram(const ImageFrame& frame, int h_bins, int s_bins) {
    if (!frame.valid())
        throw EmptyFrameError("compute_hs_histogram: empty or invalid frame");
    HsHistogram hist;
    hist.h_bins = h_bins;
    hist.s_bins = s_bins;
    hist.weights.assign(static_cast<std::size_t>(h_bins) * s_bins, 0.0);
    const std::size_t n = static_cast<std::size_t>(frame.width) * frame.height;
    const double w = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t* px = frame.pixels.data() + i * 3;
        hist.weights[hs_bin_index(rgb_to_hs(px[0], px[1], px[2]), h_bins, s_bins)] += w;
    }
    return hist;
}

HsHistogram compute_hs_histogram_masked(const ImageFrame& frame, const BinaryMask& mask,
                                        int h_bins, int s_bins) {
    if (!frame.valid())
        throw EmptyFrameError("compute_hs_histogram_masked: empty or invalid frame");
    if (frame.width != mask.width || frame.height != mask.height)
        throw DimensionMismatchError("compute_hs_histogram_masked: mask/frame shapes differ");
    HsHistogram hist;
    hist.h_bins = h_bins;
    hist.s_bins = s_bins;
    hist.weights.assign(static_cast<std::size_t>(h_bins) * s_bins, 0.0);
    const std::size_t region = mask.count();
    if (region == 0)
        return hist;
    const double w = 1.0 / static_cast<double>(region);
    for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x) {
            if (!mask.at(x, y))
                continue;
            const std::uint8_t* px = frame.rgb(x, y);
            hist.weights[hs_bin_index(rgb_to_hs(px[0], px[1], px[2]), h_bins, s_bins)] += w;
        }
    }
    return hist;
}

double bhattacharyya_distance(const HsHistogram& p, const HsHistogram& q) {
    if (!p.same_geometry(q))
        throw GeometryMismatchError("bhattacharyya_distance: bin geometries differ");
    double sum_p = 0.0, sum_q = 0.0;
    for (double w : p.weights) sum_p += w;
    for (double w : q.weights) sum_q += w;
    if (std::abs(sum_p - 1.0) > 1e-6 || std::abs(sum_q - 1.0) > 1e-6)
        throw NotNormalizedError("bhattacharyya_distance: inputs must be L1-normalized");
    double coeff = 0.0;
    for (std::size_t i = 0; i < p.weights.size(); ++i)
        coeff += std::sqrt(p.weights[i] * q.weights[i]);
    return std::sqrt(std::max(0.0, 1.0 - coeff));
}

bool SceneChangeDetector::detect_change(const ImageFrame& frame) {
    HsHistogram current = compute_hs_histogram(frame, config_.h_bins, config_.s_bins);
    bool changed = false;
    if (prev_)
        changed = bhattacharyya_distance(*prev_, current) > config_.threshold;
    prev_ = std::move(current);
    return changed;
}

SceneList segment_scenes(const std::vector<ImageFrame>& frames,
                         const SceneChangeConfig& config) {
    if (frames.empty())
        throw EmptySequenceError("segment_scenes: no frames");
    SceneChangeDetector detector(config);
    SceneList scenes;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (detector.detect_change(frames[i]))
            scenes.cut_indices.push_back(static_cast<int>(i));
    }
    return scenes;
}

} // namespace secvos
