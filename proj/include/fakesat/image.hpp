#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fakesat {

inline constexpr int kBlockSize = 16;
inline constexpr int kColorChannels = 3;
inline constexpr int kBlockValues = kBlockSize * kBlockSize * kColorChannels;

enum class Label { Real, Fake, Unknown };

std::string_view to_string(Label label);

/// Interleaved (row, col, channel) RGB image with real-valued samples.
class Image {
public:
    Image() = default;
    Image(int height, int width, double fill = 0.0);

    int height() const { return height_; }
    int width() const { return width_; }
    bool empty() const { return data_.empty(); }

    double& at(int r, int c, int ch) { return data_[index(r, c, ch)]; }
    double at(int r, int c, int ch) const { return data_[index(r, c, ch)]; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t index(int r, int c, int ch) const {
        return (static_cast<std::size_t>(r) * width_ + c) * kColorChannels + ch;
    }

    int height_ = 0;
    int width_ = 0;
    std::vector<double> data_;
};

/// The unit of detection. Height and width are positive multiples of 16 and every
/// sample lies in [0, 1].
struct Tile {
    Image pixels;
    Label label = Label::Unknown;
    std::string id;

    int height() const { return pixels.height(); }
    int width() const { return pixels.width(); }
    int block_rows() const { return pixels.height() / kBlockSize; }
    int block_cols() const { return pixels.width() / kBlockSize; }
    int block_count() const { return block_rows() * block_cols(); }
};

struct Block {
    std::array<double, kBlockValues> pixels{};
    std::string tile_id;
    int row = 0;
    int col = 0;

    double at(int r, int c, int ch) const { return pixels[(r * kBlockSize + c) * kColorChannels + ch]; }
};

/// Throws ShapeError unless the image satisfies the tile invariants.
void validate_tile_image(const Image& image);

Tile make_tile(Image pixels, Label label, std::string id);

/// Decodes a PNG or JPEG file (format sniffed from the magic bytes) into [0,1] samples.
Image decode_image_file(const std::filesystem::path& path);
Image decode_image(std::span<const std::uint8_t> bytes);

Tile load_tile(const std::filesystem::path& path, Label label);

/// Writes an 8-bit RGB PNG; samples are clamped and rounded to the nearest level.
void save_png(const std::filesystem::path& path, const Image& image);
std::vector<std::uint8_t> encode_png(const Image& image);

/// 8-bit RGB buffer straight to PNG, used by the heat-map renderer.
std::vector<std::uint8_t> encode_png_rgb8(std::span<const std::uint8_t> rgb, int height, int width);

std::vector<std::uint8_t> encode_jpeg(const Image& image, int quality);

/// Copies the 16x16 window whose top-left pixel is (r0, c0).
Block extract_block(const Image& image, int r0, int c0);

/// Non-overlapping 16x16 blocks in row-major order.
std::vector<Block> partition_blocks(const Tile& tile);

/// Inverse of partition_blocks.
Image assemble_blocks(std::span<const Block> blocks, int height, int width);

} // namespace fakesat
