#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "secvos/errors.hpp"

namespace secvos {

// Row-major RGB frame, 8 bits per channel.
struct ImageFrame {
    int width = 0;
    int height = 0;
    int frame_index = 0;
    std::vector<std::uint8_t> pixels; // width*height*3

    static ImageFrame solid(int width, int height, std::array<std::uint8_t, 3> rgb,
                            int frame_index = 0);

    bool valid() const {
        return width > 0 && height > 0 &&
               pixels.size() == static_cast<std::size_t>(width) * height * 3;
    }
    const std::uint8_t* rgb(int x, int y) const {
        return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
    std::uint8_t* rgb(int x, int y) {
        return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
};

// Per-pixel binary object mask, row-major, one byte per pixel (0 or 1).
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits; // width*height

    static BinaryMask zeros(int width, int height);
    static BinaryMask filled_rect(int width, int height, int x, int y, int w, int h);

    bool valid() const {
        return width > 0 && height > 0 &&
               bits.size() == static_cast<std::size_t>(width) * height;
    }
    std::uint8_t at(int x, int y) const {
        return bits[static_cast<std::size_t>(y) * width + x];
    }
    void set(int x, int y, bool v) {
        bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
    }
    std::size_t count() const;
    bool any() const { return count() > 0; }
    bool same_shape(const BinaryMask& other) const {
        return width == other.width && height == other.height;
    }

    friend bool operator==(const BinaryMask& a, const BinaryMask& b) = default;
};

// Run-length encoding of a BinaryMask: alternating background/object run
// lengths over a column-major scan. The first run counts background pixels
// and may be zero.
struct RleMask {
    int width = 0;
    int height = 0;
    std::vector<std::int64_t> runs;

    friend bool operator==(const RleMask& a, const RleMask& b) = default;
};

// One backend answer for one (frame, object).
struct SegmentationRecord {
    int frame_index = 0;
    int object_id = 0;
    BinaryMask mask;
    double presence_score = 0.0; // 0 means the backend asserts the object absent
    double confidence = 0.0;     // mask quality, defined regardless of presence
};

RleMask rle_encode(const BinaryMask& mask);
BinaryMask rle_decode(const RleMask& rle);

// |a∩b| / |a∪b|; both-empty pairs score 1 so disappearance frames stay scoreable.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

// Object pixels with at least one 4-connected neighbor outside the object;
// the image border counts as outside.
BinaryMask boundary_map(const BinaryMask& mask);

struct PixelRect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
};

// Tight bounding box of the object pixels; nullopt for an empty mask.
std::optional<PixelRect> mask_bbox(const BinaryMask& mask);

// Mask shifted by (dx, dy); pixels leaving the frame are dropped.
BinaryMask translate_mask(const BinaryMask& mask, int dx, int dy);

} // namespace secvos
