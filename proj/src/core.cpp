#include "secvos/core.hpp"

#include <algorithm>
#include <numeric>

namespace secvos {

ImageFrame ImageFrame::solid(int width, int height, std::array<std::uint8_t, 3> rgb,
                             int frame_index) {
    ImageFrame f;
    f.width = width;
    f.height = height;
    f.frame_index = frame_index;
    f.pixels.resize(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t i = 0; i < f.pixels.size(); i += 3) {
        f.pixels[i] = rgb[0];
        f.pixels[i + 1] = rgb[1];
        f.pixels[i + 2] = rgb[2];
    }
    return f;
}

BinaryMask BinaryMask::zeros(int width, int height) {
    BinaryMask m;
    m.width = width;
    m.height = height;
    m.bits.assign(static_cast<std::size_t>(width) * height, 0);
    return m;
}

BinaryMask BinaryMask::filled_rect(int width, int height, int x, int y, int w, int h) {
    BinaryMask m = zeros(width, height);
    const int x1 = std::min(width, x + w);
    const int y1 = std::min(height, y + h);
    for (int yy = std::max(0, y); yy < y1; ++yy)
        for (int xx = std::max(0, x); xx < x1; ++xx)
            m.set(xx, yy, true);
    return m;
}

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(
        std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

RleMask rle_encode(const BinaryMask& mask) {
    RleMask rle;
    rle.width = mask.width;
    rle.height = mask.height;
    std::uint8_t current = 0; // first run counts background
    std::int64_t run = 0;
    for (int x = 0; x < mask.width; ++x) {
        for (int y = 0; y < mask.height; ++y) {
            const std::uint8_t v = mask.at(x, y);
            if (v == current) {
                ++run;
            } else {
                rle.runs.push_back(run);
                current = v;
                run = 1;
            }
        }
    }
    rle.runs.push_back(run);
    return rle;
}

BinaryMask rle_decode(const RleMask& rle) {
    const std::int64_t expected =
        static_cast<std::int64_t>(rle.width) * rle.height;
    std::int64_t total = 0;
    for (std::int64_t r : rle.runs) {
        if (r < 0)
            throw MalformedRleError("negative run length");
        total += r;
    }
    if (total != expected)
        throw MalformedRleError("run lengths sum to " + std::to_string(total) +
                                ", expected " + std::to_string(expected));
    BinaryMask mask = BinaryMask::zeros(rle.width, rle.height);
    std::int64_t pos = 0;
    std::uint8_t value = 0;
    for (std::int64_t r : rle.runs) {
        if (value) {
            for (std::int64_t i = pos; i < pos + r; ++i) {
                const int x = static_cast<int>(i / rle.height);
                const int y = static_cast<int>(i % rle.height);
                mask.set(x, y, true);
            }
        }
        pos += r;
        value ^= 1;
    }
    return mask;
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
    if (!a.same_shape(b))
        throw DimensionMismatchError("mask_iou: shapes differ");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) {
        const bool av = a.bits[i] != 0;
        const bool bv = b.bits[i] != 0;
        inter += (av && bv) ? 1 : 0;
        uni += (av || bv) ? 1 : 0;
    }
    if (uni == 0)
        return 1.0; // both empty: prediction matches an absent object
    return static_cast<double>(inter) / static_cast<double>(uni);
}

BinaryMask boundary_map(const BinaryMask& mask) {
    BinaryMask out = BinaryMask::zeros(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y))
                continue;
            const bool border = x == 0 || x == mask.width - 1 || y == 0 ||
                                y == mask.height - 1;
            if (border || !mask.at(x - 1, y) || !mask.at(x + 1, y) ||
                !mask.at(x, y - 1) || !mask.at(x, y + 1))
                out.set(x, y, true);
        }
    }
    return out;
}

std::optional<PixelRect> mask_bbox(const BinaryMask& mask) {
    int x0 = mask.width, y0 = mask.height, x1 = -1, y1 = -1;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y))
                continue;
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
        }
    }
    if (x1 < 0)
        return std::nullopt;
    return PixelRect{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

BinaryMask translate_mask(const BinaryMask& mask, int dx, int dy) {
    BinaryMask out = BinaryMask::zeros(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y))
                continue;
            const int nx = x + dx;
            const int ny = y + dy;
            if (nx >= 0 && nx < mask.width && ny >= 0 && ny < mask.height)
                out.set(nx, ny, true);
        }
    }
    return out;
}

} // namespace secvos
