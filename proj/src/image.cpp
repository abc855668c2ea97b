#include "fakesat/image.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include <jpeglib.h>
#include <png.h>

#include "fakesat/errors.hpp"

namespace fakesat {

std::string_view to_string(Label label) {
    switch (label) {
    case Label::Real: return "real";
    case Label::Fake: return "fake";
    case Label::Unknown: return "unknown";
    }
    return "unknown";
}

Image::Image(int height, int width, double fill)
    : height_(height), width_(width),
      data_(static_cast<std::size_t>(height) * width * kColorChannels, fill) {
    if (height < 0 || width < 0) throw ShapeError("negative image dimensions");
}

void validate_tile_image(const Image& image) {
    if (image.height() <= 0 || image.width() <= 0 || image.height() % kBlockSize != 0 ||
        image.width() % kBlockSize != 0) {
        throw ShapeError("tile is " + std::to_string(image.height()) + "x" + std::to_string(image.width()) +
                         ", dimensions must be positive multiples of 16");
    }
    for (double v : image.data()) {
        if (!(v >= 0.0 && v <= 1.0)) throw ShapeError("tile sample outside [0,1]");
    }
}

Tile make_tile(Image pixels, Label label, std::string id) {
    validate_tile_image(pixels);
    return Tile{std::move(pixels), label, std::move(id)};
}

namespace {

Image from_rgb8(const std::uint8_t* rgb, int height, int width) {
    Image image(height, width);
    auto out = image.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = rgb[i] / 255.0;
    return image;
}

std::vector<std::uint8_t> to_rgb8(const Image& image) {
    std::vector<std::uint8_t> rgb(image.data().size());
    auto in = image.data();
    for (std::size_t i = 0; i < rgb.size(); ++i) {
        const double v = std::clamp(in[i], 0.0, 1.0);
        rgb[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
    return rgb;
}

bool is_png(std::span<const std::uint8_t> b) {
    static constexpr std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    return b.size() >= 8 && std::equal(sig, sig + 8, b.begin());
}

bool is_jpeg(std::span<const std::uint8_t> b) {
    return b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF;
}

Image decode_png(std::span<const std::uint8_t> bytes) {
    png_image png;
    std::memset(&png, 0, sizeof png);
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
        throw DecodeError(std::string("PNG: ") + png.message);
    }
    const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
    const bool alpha = (png.format & PNG_FORMAT_FLAG_ALPHA) != 0;
    if (!color || alpha) {
        png_image_free(&png);
        throw ShapeError("PNG must have exactly 3 color channels");
    }
    png.format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, rgb.data(), 0, nullptr)) {
        throw DecodeError(std::string("PNG: ") + png.message);
    }
    return from_rgb8(rgb.data(), static_cast<int>(png.height), static_cast<int>(png.width));
}

struct JpegErrorManager {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

// libjpeg reports failures through longjmp, so these two functions keep only trivially
// destructible state between setjmp and the calls that may jump.

Image decode_jpeg(std::span<const std::uint8_t> bytes) {
    jpeg_decompress_struct cinfo;
    JpegErrorManager err;
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = jpeg_error_exit;
    std::vector<std::uint8_t> rgb;
    int height = 0;
    int width = 0;
    bool wrong_channels = false;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw DecodeError(std::string("JPEG: ") + err.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    if (cinfo.num_components != 3) {
        wrong_channels = true;
    } else {
        cinfo.out_color_space = JCS_RGB;
        jpeg_start_decompress(&cinfo);
        height = static_cast<int>(cinfo.output_height);
        width = static_cast<int>(cinfo.output_width);
        rgb.resize(static_cast<std::size_t>(height) * width * 3);
        while (cinfo.output_scanline < cinfo.output_height) {
            JSAMPROW row = rgb.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * 3;
            jpeg_read_scanlines(&cinfo, &row, 1);
        }
        jpeg_finish_decompress(&cinfo);
    }
    jpeg_destroy_decompress(&cinfo);
    if (wrong_channels) throw ShapeError("JPEG must have exactly 3 color channels");
    return from_rgb8(rgb.data(), height, width);
}

} // namespace

Image decode_image(std::span<const std::uint8_t> bytes) {
    if (is_png(bytes)) return decode_png(bytes);
    if (is_jpeg(bytes)) return decode_jpeg(bytes);
    throw DecodeError("unrecognized image format");
}

Image decode_image_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DecodeError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_image(bytes);
    } catch (const DecodeError& e) {
        throw DecodeError(path.string() + ": " + e.what());
    }
}

Tile load_tile(const std::filesystem::path& path, Label label) {
    Image image = decode_image_file(path);
    try {
        return make_tile(std::move(image), label, path.stem().string());
    } catch (const ShapeError& e) {
        throw ShapeError(path.string() + ": " + e.what());
    }
}

std::vector<std::uint8_t> encode_png_rgb8(std::span<const std::uint8_t> rgb, int height, int width) {
    png_image png;
    std::memset(&png, 0, sizeof png);
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(width);
    png.height = static_cast<png_uint_32>(height);
    png.format = PNG_FORMAT_RGB;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&png, nullptr, &size, 0, rgb.data(), 0, nullptr)) {
        throw IoError(std::string("PNG encode: ") + png.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&png, out.data(), &size, 0, rgb.data(), 0, nullptr)) {
        throw IoError(std::string("PNG encode: ") + png.message);
    }
    out.resize(size);
    return out;
}

std::vector<std::uint8_t> encode_png(const Image& image) {
    return encode_png_rgb8(to_rgb8(image), image.height(), image.width());
}

void save_png(const std::filesystem::path& path, const Image& image) {
    const auto bytes = encode_png(image);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::uint8_t> encode_jpeg(const Image& image, int quality) {
    if (quality < 1 || quality > 100) throw CodecError("JPEG quality must be in 1..100");
    const auto rgb = to_rgb8(image);
    jpeg_compress_struct cinfo;
    JpegErrorManager err;
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = jpeg_error_exit;
    unsigned char* buffer = nullptr;
    unsigned long size = 0;
    if (setjmp(err.jump)) {
        jpeg_destroy_compress(&cinfo);
        std::free(buffer);
        throw CodecError(std::string("JPEG encode: ") + err.message);
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &buffer, &size);
    cinfo.image_width = static_cast<JDIMENSION>(image.width());
    cinfo.image_height = static_cast<JDIMENSION>(image.height());
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    // Baseline YCbCr with 2x2 luma sampling, i.e. 4:2:0 chroma.
    cinfo.comp_info[0].h_samp_factor = 2;
    cinfo.comp_info[0].v_samp_factor = 2;
    cinfo.comp_info[1].h_samp_factor = cinfo.comp_info[1].v_samp_factor = 1;
    cinfo.comp_info[2].h_samp_factor = cinfo.comp_info[2].v_samp_factor = 1;
    jpeg_start_compress(&cinfo, TRUE);
    const std::size_t stride = static_cast<std::size_t>(image.width()) * 3;
    while (cinfo.next_scanline < cinfo.image_height) {
        auto row = const_cast<JSAMPROW>(rgb.data() + cinfo.next_scanline * stride);
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
    std::vector<std::uint8_t> out(buffer, buffer + size);
    std::free(buffer);
    return out;
}

Block extract_block(const Image& image, int r0, int c0) {
    if (r0 < 0 || c0 < 0 || r0 + kBlockSize > image.height() || c0 + kBlockSize > image.width()) {
        throw ShapeError("block window outside the image");
    }
    Block block;
    const auto src = image.data();
    const std::size_t row_len = kBlockSize * kColorChannels;
    for (int r = 0; r < kBlockSize; ++r) {
        const std::size_t offset = (static_cast<std::size_t>(r0 + r) * image.width() + c0) * kColorChannels;
        std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(offset), row_len,
                    block.pixels.begin() + static_cast<std::ptrdiff_t>(r * row_len));
    }
    return block;
}

std::vector<Block> partition_blocks(const Tile& tile) {
    validate_tile_image(tile.pixels);
    std::vector<Block> blocks;
    blocks.reserve(static_cast<std::size_t>(tile.block_count()));
    for (int br = 0; br < tile.block_rows(); ++br) {
        for (int bc = 0; bc < tile.block_cols(); ++bc) {
            Block b = extract_block(tile.pixels, br * kBlockSize, bc * kBlockSize);
            b.tile_id = tile.id;
            b.row = br;
            b.col = bc;
            blocks.push_back(std::move(b));
        }
    }
    return blocks;
}

Image assemble_blocks(std::span<const Block> blocks, int height, int width) {
    if (height % kBlockSize != 0 || width % kBlockSize != 0 ||
        blocks.size() != static_cast<std::size_t>(height / kBlockSize) * (width / kBlockSize)) {
        throw ShapeError("block count does not match the requested image size");
    }
    Image image(height, width);
    for (const Block& b : blocks) {
        for (int r = 0; r < kBlockSize; ++r)
            for (int c = 0; c < kBlockSize; ++c)
                for (int ch = 0; ch < kColorChannels; ++ch)
                    image.at(b.row * kBlockSize + r, b.col * kBlockSize + c, ch) = b.at(r, c, ch);
    }
    return image;
}

} // namespace fakesat
