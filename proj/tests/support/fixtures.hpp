#pragma once

// Synthetic video constructions shared by the unit and acceptance suites.
// All geometry is chosen so the relevant scores sit far from decision
// thresholds (distances at cuts ~0.99 vs threshold 0.35, in-scene ~0).

#include <array>
#include <vector>

#include "secvos/dataset.hpp"

namespace fixtures {

using secvos::ObjectTrack;
using secvos::RectState;
using secvos::SyntheticSpec;

inline constexpr std::array<std::uint8_t, 3> kRed{255, 0, 0};
inline constexpr std::array<std::uint8_t, 3> kYellow{255, 255, 0};

// Backgrounds with pairwise-distinct hue/saturation bins, all distinct from
// the object colors above (32x32 binning).
inline const std::vector<std::array<std::uint8_t, 3>>& backgrounds() {
    static const std::vector<std::array<std::uint8_t, 3>> bgs = {
        {0, 180, 180},  // cyan
        {60, 60, 220},  // blue
        {160, 40, 200}, // purple
        {40, 200, 40},  // green
        {200, 200, 60}, // olive
    };
    return bgs;
}

inline ObjectTrack static_object(int object_id, int frames, int x, int y, int w, int h,
                                 std::array<std::uint8_t, 3> color) {
    ObjectTrack track;
    track.object_id = object_id;
    track.states.assign(static_cast<std::size_t>(frames),
                        RectState{x, y, w, h, color, {}, 0.0});
    return track;
}

// The ten-video suite: 100 frames each, video i plants i%5 cuts at evenly
// spaced positions; videos 2, 5, 8 hide the object on frames 70..80.
inline std::vector<SyntheticSpec> suite() {
    std::vector<SyntheticSpec> specs;
    for (int i = 0; i < 10; ++i) {
        SyntheticSpec spec;
        spec.width = 160;
        spec.height = 120;
        spec.frame_count = 100;
        const int cuts = i % 5;
        for (int k = 1; k <= cuts; ++k)
            spec.cut_indices.push_back(100 * k / (cuts + 1));
        for (int s = 0; s <= cuts; ++s)
            spec.segment_colors.push_back(backgrounds()[s % backgrounds().size()]);
        ObjectTrack object = static_object(1, 100, 20, 30, 16, 12, kRed);
        if (i == 2 || i == 5 || i == 8)
            for (int t = 70; t <= 80; ++t)
                object.states[static_cast<std::size_t>(t)] = std::nullopt;
        spec.objects.push_back(std::move(object));
        specs.push_back(std::move(spec));
    }
    return specs;
}

// 120 frames, one cut at frame 60 with a background swap and an object
// teleport. The object drifts a few pixels per frame inside each scene. The
// post-cut position (41, 90) sits off the concept matcher's stride-4 window
// grid, so the re-detection lands one pixel left and the pixel path carries
// that offset to the end of the video.
inline SyntheticSpec one_cut_video() {
    SyntheticSpec spec;
    spec.width = 160;
    spec.height = 120;
    spec.frame_count = 120;
    spec.cut_indices = {60};
    spec.segment_colors = {backgrounds()[0], backgrounds()[1]};

    ObjectTrack object;
    object.object_id = 1;
    object.states.resize(120);
    int x = 20, y = 30;
    for (int t = 0; t < 60; ++t) {
        object.states[static_cast<std::size_t>(t)] =
            RectState{x, y, 16, 12, kRed, {}, 0.0};
        if (t < 40) {
            x += 2;
            y += 1;
        } else {
            x += 1;
            y -= 1;
        }
    }
    x = 41;
    y = 90;
    for (int t = 60; t < 120; ++t) {
        object.states[static_cast<std::size_t>(t)] =
            RectState{x, y, 16, 12, kRed, {}, 0.0};
        if (t < 100)
            x += 1;
    }
    spec.objects.push_back(std::move(object));
    return spec;
}

// 120 frames, cuts at 60/85/95. The object starts red, teleports at the
// first cut, then fades pixel-by-pixel to yellow between frames 61 and 84
// (10 pixels per frame over the 20x12 = 240-pixel rectangle). The later
// cuts only swap the background, so the pixel path re-locks one frame after
// each and the bank picks up yellow keyframes that only a finalized concept
// can exploit at the earlier cuts.
inline SyntheticSpec concept_evolution_video() {
    SyntheticSpec spec;
    spec.width = 160;
    spec.height = 120;
    spec.frame_count = 120;
    spec.cut_indices = {60, 85, 95};
    spec.segment_colors = {backgrounds()[0], backgrounds()[1], backgrounds()[2],
                           backgrounds()[3]};

    ObjectTrack object;
    object.object_id = 1;
    object.states.resize(120);
    for (int t = 0; t < 60; ++t)
        object.states[static_cast<std::size_t>(t)] =
            RectState{20, 30, 20, 12, kRed, {}, 0.0};
    for (int t = 60; t < 120; ++t) {
        RectState state{120, 84, 20, 12, kRed, kYellow, 0.0};
        const int faded = std::min(240, std::max(0, (t - 60) * 10));
        state.fill2 = static_cast<double>(faded) / 240.0;
        object.states[static_cast<std::size_t>(t)] = state;
    }
    spec.objects.push_back(std::move(object));
    return spec;
}

} // namespace fixtures
