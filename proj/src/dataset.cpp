#include "fakesat/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "fakesat/errors.hpp"
#include "fakesat/random.hpp"

namespace fakesat {

namespace {

constexpr double kTextureSigma = 0.05;
constexpr double kChromaTextureSigma = 0.015;
constexpr double kFakeBlurSigma = 1.0;
constexpr double kPatternAmplitude = 0.012;

void paint_smooth_field(Image& img, Rng& rng) {
    constexpr int grid = 4;
    const int size = img.height();
    double ctrl[grid + 1][grid + 1][kColorChannels];
    for (auto& row : ctrl)
        for (auto& p : row) {
            const double base = rng.uniform(0.25, 0.7);
            for (double& ch : p) ch = std::clamp(base + rng.uniform(-0.08, 0.08), 0.0, 1.0);
        }
    const double cell = static_cast<double>(size - 1) / grid;
    for (int r = 0; r < size; ++r) {
        const double gy = r / cell;
        const int iy = std::min(static_cast<int>(gy), grid - 1);
        const double ty = gy - iy;
        for (int c = 0; c < size; ++c) {
            const double gx = c / cell;
            const int ix = std::min(static_cast<int>(gx), grid - 1);
            const double tx = gx - ix;
            for (int ch = 0; ch < kColorChannels; ++ch) {
                const double top = ctrl[iy][ix][ch] * (1 - tx) + ctrl[iy][ix + 1][ch] * tx;
                const double bot = ctrl[iy + 1][ix][ch] * (1 - tx) + ctrl[iy + 1][ix + 1][ch] * tx;
                img.at(r, c, ch) = top * (1 - ty) + bot * ty;
            }
        }
    }
}

void paint_structures(Image& img, Rng& rng) {
    const int size = img.height();
    const int rects = 2 + static_cast<int>(rng.below(4));
    for (int i = 0; i < rects; ++i) {
        const int hgt = 4 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, size / 3))));
        const int wid = 4 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, size / 3))));
        const int r0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(size)));
        const int c0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(size)));
        const double shade = rng.uniform(0.1, 0.9);
        double color[kColorChannels];
        for (double& ch : color) ch = std::clamp(shade + rng.uniform(-0.1, 0.1), 0.0, 1.0);
        for (int r = r0; r < std::min(size, r0 + hgt); ++r)
            for (int c = c0; c < std::min(size, c0 + wid); ++c)
                for (int ch = 0; ch < kColorChannels; ++ch) img.at(r, c, ch) = color[ch];
    }
    // Roads: straight bands of constant color at a random angle.
    const int roads = 1 + static_cast<int>(rng.below(2));
    for (int i = 0; i < roads; ++i) {
        const double angle = rng.uniform(0.0, std::numbers::pi);
        const double nx = std::cos(angle);
        const double ny = std::sin(angle);
        const double offset = rng.uniform(0.2, 0.8) * size * (std::abs(nx) + std::abs(ny));
        const double half_width = rng.uniform(1.0, 2.5);
        const double shade = rng.uniform(0.3, 0.6);
        for (int r = 0; r < size; ++r)
            for (int c = 0; c < size; ++c) {
                const double d = c * nx + r * ny - offset;
                if (std::abs(d) <= half_width)
                    for (int ch = 0; ch < kColorChannels; ++ch) img.at(r, c, ch) = shade;
            }
    }
}

void add_texture(Image& img, Rng& rng) {
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c) {
            const double lum = kTextureSigma * rng.normal();
            for (int ch = 0; ch < kColorChannels; ++ch) img.at(r, c, ch) += lum + kChromaTextureSigma * rng.normal();
        }
}

Image real_like(Rng& rng, int size) {
    Image img(size, size);
    paint_smooth_field(img, rng);
    paint_structures(img, rng);
    add_texture(img, rng);
    return img;
}

Image gaussian_blur(const Image& src, double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;
    const int h = src.height();
    const int w = src.width();
    auto clampi = [](int v, int hi) { return std::clamp(v, 0, hi - 1); };
    Image tmp(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            for (int ch = 0; ch < kColorChannels; ++ch) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * src.at(r, clampi(c + i, w), ch);
                tmp.at(r, c, ch) = acc;
            }
    Image out(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            for (int ch = 0; ch < kColorChannels; ++ch) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * tmp.at(clampi(r + i, h), c, ch);
                out.at(r, c, ch) = acc;
            }
    return out;
}

void finalize(Image& img) {
    for (double& v : img.data()) v = std::lround(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0;
}

std::uint64_t tile_seed(std::uint64_t seed, Label label, int index) {
    return mix_seed(mix_seed(seed, fnv1a64(to_string(label))), static_cast<std::uint64_t>(index));
}

std::string tile_name(Label label, int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%04d", label == Label::Real ? "real" : "fake", index);
    return buf;
}

void check_size(int size) {
    if (size <= 0 || size % kBlockSize != 0) throw ShapeError("synthetic tile size must be a positive multiple of 16");
}

bool is_image_file(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::vector<std::filesystem::path> list_class(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) return files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

} // namespace

Image synth_real_image(std::uint64_t seed, int index, int size) {
    check_size(size);
    Rng rng(tile_seed(seed, Label::Real, index));
    Image img = real_like(rng, size);
    finalize(img);
    return img;
}

Image synth_fake_image(std::uint64_t seed, int index, int size) {
    check_size(size);
    Rng rng(tile_seed(seed, Label::Fake, index));
    Image img = gaussian_blur(real_like(rng, size), kFakeBlurSigma);
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c) {
            const double pattern =
                kPatternAmplitude * std::cos(std::numbers::pi * r / 2.0) * std::cos(std::numbers::pi * c / 2.0);
            for (int ch = 0; ch < kColorChannels; ++ch) img.at(r, c, ch) += pattern;
        }
    finalize(img);
    return img;
}

std::vector<Tile> synth_tiles(const SynthOptions& options) {
    if (options.n_per_class < 1) throw ConfigError("n_per_class must be at least 1");
    std::vector<Tile> tiles;
    tiles.reserve(2 * static_cast<std::size_t>(options.n_per_class));
    for (int i = 0; i < options.n_per_class; ++i)
        tiles.push_back({synth_real_image(options.seed, i, options.tile_size), Label::Real, tile_name(Label::Real, i)});
    for (int i = 0; i < options.n_per_class; ++i)
        tiles.push_back({synth_fake_image(options.seed, i, options.tile_size), Label::Fake, tile_name(Label::Fake, i)});
    return tiles;
}

void synth_dataset(const SynthOptions& options, const std::filesystem::path& out_dir) {
    if (options.n_per_class < 1) throw ConfigError("n_per_class must be at least 1");
    check_size(options.tile_size);
    std::error_code ec;
    std::filesystem::create_directories(out_dir / "real", ec);
    if (ec) throw IoError("cannot create " + (out_dir / "real").string() + ": " + ec.message());
    std::filesystem::create_directories(out_dir / "fake", ec);
    if (ec) throw IoError("cannot create " + (out_dir / "fake").string() + ": " + ec.message());
    for (int i = 0; i < options.n_per_class; ++i) {
        save_png(out_dir / "real" / (tile_name(Label::Real, i) + ".png"),
                 synth_real_image(options.seed, i, options.tile_size));
        save_png(out_dir / "fake" / (tile_name(Label::Fake, i) + ".png"),
                 synth_fake_image(options.seed, i, options.tile_size));
    }
}

std::vector<Tile> load_dataset(const std::filesystem::path& root) {
    std::vector<Tile> tiles;
    for (auto [sub, label] : {std::pair{"real", Label::Real}, std::pair{"fake", Label::Fake}}) {
        for (const auto& file : list_class(root / sub)) tiles.push_back(load_tile(file, label));
    }
    if (tiles.empty()) throw IoError("no images under " + root.string() + "/real or /fake");
    return tiles;
}

std::uint64_t dataset_hash(const std::filesystem::path& root) {
    std::uint64_t h = fnv1a64("");
    for (const char* sub : {"real", "fake"}) {
        for (const auto& file : list_class(root / sub)) {
            h = fnv1a64(std::string(sub) + "/" + file.filename().string(), h);
            std::ifstream in(file, std::ios::binary);
            char buf[1 << 16];
            while (in.read(buf, sizeof buf) || in.gcount() > 0) {
                h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
            }
        }
    }
    return h;
}

} // namespace fakesat
