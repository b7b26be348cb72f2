#include "secvos/image_io.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>

#include <jpeglib.h>
#include <png.h>

namespace secvos {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f)
            std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f)
        throw MissingFileError("cannot open " + path);
    return f;
}

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriter() { png_destroy_write_struct(&png, &info); }
};

void init_reader(PngReader& r, const std::string& path) {
    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    r.info = png_create_info_struct(r.png);
    if (!r.png || !r.info)
        throw IoError("libpng init failed for " + path);
}

void append_byte(png_structp png, png_bytep data, png_size_t length) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + length);
}

void flush_noop(png_structp) {}

bool is_png_magic(const std::string& path) {
    FilePtr f = open_file(path, "rb");
    unsigned char magic[8] = {0};
    const std::size_t n = std::fread(magic, 1, 8, f.get());
    return n == 8 && png_sig_cmp(magic, 0, 8) == 0;
}

ImageFrame read_png_rgb(const std::string& path) {
    FilePtr f = open_file(path, "rb");
    PngReader r;
    init_reader(r, path);
    if (setjmp(png_jmpbuf(r.png)))
        throw IoError("PNG decode failed: " + path);
    png_init_io(r.png, f.get());
    png_read_info(r.png, r.info);

    png_set_expand(r.png);        // palette/gray/low-depth -> 8-bit RGB(A)
    png_set_strip_16(r.png);
    png_set_strip_alpha(r.png);
    png_set_gray_to_rgb(r.png);
    png_read_update_info(r.png, r.info);

    ImageFrame frame;
    frame.width = static_cast<int>(png_get_image_width(r.png, r.info));
    frame.height = static_cast<int>(png_get_image_height(r.png, r.info));
    if (png_get_rowbytes(r.png, r.info) != static_cast<std::size_t>(frame.width) * 3)
        throw IoError("unexpected PNG row layout: " + path);
    frame.pixels.resize(static_cast<std::size_t>(frame.width) * frame.height * 3);
    std::vector<png_bytep> rows(frame.height);
    for (int y = 0; y < frame.height; ++y)
        rows[y] = frame.pixels.data() + static_cast<std::size_t>(y) * frame.width * 3;
    png_read_image(r.png, rows.data());
    png_read_end(r.png, nullptr);
    return frame;
}

struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    std::longjmp(err->jump, 1);
}

ImageFrame read_jpeg_rgb(const std::string& path) {
    FilePtr f = open_file(path, "rb");
    jpeg_decompress_struct cinfo;
    JpegErrorMgr jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw IoError("JPEG decode failed: " + path);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, f.get());
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    ImageFrame frame;
    frame.width = static_cast<int>(cinfo.output_width);
    frame.height = static_cast<int>(cinfo.output_height);
    frame.pixels.resize(static_cast<std::size_t>(frame.width) * frame.height * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = frame.pixels.data() +
                       static_cast<std::size_t>(cinfo.output_scanline) * frame.width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return frame;
}

void write_png_rgb_impl(png_structp png, png_infop info, const ImageFrame& frame) {
    png_set_IHDR(png, info, static_cast<png_uint_32>(frame.width),
                 static_cast<png_uint_32>(frame.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < frame.height; ++y)
        png_write_row(png, const_cast<png_bytep>(
                               frame.pixels.data() +
                               static_cast<std::size_t>(y) * frame.width * 3));
    png_write_end(png, nullptr);
}

} // namespace

ImageFrame read_image_rgb(const std::string& path) {
    if (is_png_magic(path))
        return read_png_rgb(path);
    return read_jpeg_rgb(path);
}

IndexedImage read_png_indexed(const std::string& path) {
    FilePtr f = open_file(path, "rb");
    PngReader r;
    init_reader(r, path);
    if (setjmp(png_jmpbuf(r.png)))
        throw IoError("PNG decode failed: " + path);
    png_init_io(r.png, f.get());
    png_read_info(r.png, r.info);

    const png_byte color_type = png_get_color_type(r.png, r.info);
    if (color_type != PNG_COLOR_TYPE_PALETTE && color_type != PNG_COLOR_TYPE_GRAY)
        throw IoError("annotation PNG must be palette or grayscale: " + path);
    if (png_get_bit_depth(r.png, r.info) < 8)
        png_set_packing(r.png); // unpack 1/2/4-bit indices to one byte each
    if (png_get_bit_depth(r.png, r.info) == 16)
        png_set_strip_16(r.png);
    png_read_update_info(r.png, r.info);

    IndexedImage img;
    img.width = static_cast<int>(png_get_image_width(r.png, r.info));
    img.height = static_cast<int>(png_get_image_height(r.png, r.info));
    if (png_get_rowbytes(r.png, r.info) != static_cast<std::size_t>(img.width))
        throw IoError("unexpected PNG row layout: " + path);
    img.indices.resize(static_cast<std::size_t>(img.width) * img.height);
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = img.indices.data() + static_cast<std::size_t>(y) * img.width;
    png_read_image(r.png, rows.data());

    if (color_type == PNG_COLOR_TYPE_PALETTE) {
        png_colorp palette = nullptr;
        int count = 0;
        if (png_get_PLTE(r.png, r.info, &palette, &count))
            for (int i = 0; i < count; ++i)
                img.palette.push_back({palette[i].red, palette[i].green, palette[i].blue});
    }
    png_read_end(r.png, nullptr);
    return img;
}

void write_png_rgb(const std::string& path, const ImageFrame& frame) {
    FilePtr f = open_file(path, "wb");
    PngWriter w;
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    w.info = png_create_info_struct(w.png);
    if (!w.png || !w.info)
        throw IoError("libpng init failed for " + path);
    if (setjmp(png_jmpbuf(w.png)))
        throw IoError("PNG encode failed: " + path);
    png_init_io(w.png, f.get());
    write_png_rgb_impl(w.png, w.info, frame);
}

std::vector<std::uint8_t> encode_png_rgb(const ImageFrame& frame) {
    std::vector<std::uint8_t> out;
    PngWriter w;
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    w.info = png_create_info_struct(w.png);
    if (!w.png || !w.info)
        throw IoError("libpng init failed");
    if (setjmp(png_jmpbuf(w.png)))
        throw IoError("PNG encode failed");
    png_set_write_fn(w.png, &out, append_byte, flush_noop);
    write_png_rgb_impl(w.png, w.info, frame);
    return out;
}

void write_png_indexed(const std::string& path, const IndexedImage& image) {
    if (image.palette.empty() || image.palette.size() > 256)
        throw IoError("indexed PNG needs a palette of 1..256 entries");
    FilePtr f = open_file(path, "wb");
    PngWriter w;
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    w.info = png_create_info_struct(w.png);
    if (!w.png || !w.info)
        throw IoError("libpng init failed for " + path);
    if (setjmp(png_jmpbuf(w.png)))
        throw IoError("PNG encode failed: " + path);
    png_init_io(w.png, f.get());
    png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(image.width),
                 static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_PALETTE,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    std::vector<png_color> palette(image.palette.size());
    for (std::size_t i = 0; i < image.palette.size(); ++i)
        palette[i] = {image.palette[i][0], image.palette[i][1], image.palette[i][2]};
    png_set_PLTE(w.png, w.info, palette.data(), static_cast<int>(palette.size()));
    png_write_info(w.png, w.info);
    for (int y = 0; y < image.height; ++y)
        png_write_row(w.png, const_cast<png_bytep>(
                                 image.indices.data() +
                                 static_cast<std::size_t>(y) * image.width));
    png_write_end(w.png, nullptr);
}

const std::vector<std::array<std::uint8_t, 3>>& vos_palette() {
    static const std::vector<std::array<std::uint8_t, 3>> palette = [] {
        std::vector<std::array<std::uint8_t, 3>> p(256);
        for (int i = 0; i < 256; ++i) {
            int r = 0, g = 0, b = 0, id = i;
            for (int bit = 0; bit < 8; ++bit) {
                r |= ((id >> 0) & 1) << (7 - bit);
                g |= ((id >> 1) & 1) << (7 - bit);
                b |= ((id >> 2) & 1) << (7 - bit);
                id >>= 3;
            }
            p[i] = {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                    static_cast<std::uint8_t>(b)};
        }
        return p;
    }();
    return palette;
}

} // namespace secvos
