#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "secvos/core.hpp"

namespace secvos {

// 8-bit indexed image; pixel value = palette index (object id for annotations).
struct IndexedImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> indices;                 // row-major
    std::vector<std::array<std::uint8_t, 3>> palette;  // up to 256 entries

    std::uint8_t at(int x, int y) const {
        return indices[static_cast<std::size_t>(y) * width + x];
    }
};

// Decodes PNG or JPEG (sniffed from the file magic) to RGB8.
ImageFrame read_image_rgb(const std::string& path);

// Decodes a palette (or 8-bit grayscale) PNG without applying the palette,
// so annotation indices survive a round trip.
IndexedImage read_png_indexed(const std::string& path);

void write_png_rgb(const std::string& path, const ImageFrame& frame);
void write_png_indexed(const std::string& path, const IndexedImage& image);

// In-memory PNG encode, used when frames are embedded on the wire.
std::vector<std::uint8_t> encode_png_rgb(const ImageFrame& frame);

// The 256-entry colormap conventionally used for segmentation annotations.
const std::vector<std::array<std::uint8_t, 3>>& vos_palette();

} // namespace secvos
