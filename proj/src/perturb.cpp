#include "fakesat/perturb.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "fakesat/errors.hpp"
#include "fakesat/random.hpp"

namespace fakesat {

namespace {

double parse_number(std::string_view text, std::string_view spec) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError("malformed perturbation '" + std::string(spec) + "'");
    }
    return value;
}

} // namespace

PerturbationConfig parse_perturbation(std::string_view spec) {
    if (spec.empty() || spec == "none") return PerturbationConfig::none();
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) throw ConfigError("malformed perturbation '" + std::string(spec) + "'");
    const auto kind = spec.substr(0, colon);
    const double value = parse_number(spec.substr(colon + 1), spec);
    if (kind == "resize") {
        if (value != std::floor(value) || value <= 0 || static_cast<int>(value) % kBlockSize != 0) {
            throw ConfigError("resize target must be a positive multiple of 16");
        }
        return PerturbationConfig::resize(static_cast<int>(value));
    }
    if (kind == "awgn") {
        if (!(value >= 0.0)) throw ConfigError("awgn sigma must be non-negative");
        return PerturbationConfig::awgn(value);
    }
    if (kind == "jpeg") {
        double q = value;
        if (q > 0.0 && q <= 1.0 && q != std::floor(q)) q = std::round(q * 100.0);
        if (q != std::floor(q) || q < 1 || q > 100) throw ConfigError("jpeg quality must be in 1..100");
        return PerturbationConfig::jpeg(static_cast<int>(q));
    }
    throw ConfigError("unknown perturbation kind '" + std::string(kind) + "'");
}

std::string to_string(const PerturbationConfig& config) {
    std::ostringstream os;
    switch (config.kind) {
    case PerturbationConfig::Kind::None: os << "none"; break;
    case PerturbationConfig::Kind::Resize: os << "resize:" << config.target_size; break;
    case PerturbationConfig::Kind::Awgn: os << "awgn:" << config.sigma; break;
    case PerturbationConfig::Kind::Jpeg: os << "jpeg:" << config.quality; break;
    }
    return os.str();
}

std::vector<PerturbationConfig> standard_perturbation_grid() {
    return {PerturbationConfig::none(),      PerturbationConfig::resize(128), PerturbationConfig::resize(64),
            PerturbationConfig::awgn(0.02),  PerturbationConfig::awgn(0.06),  PerturbationConfig::awgn(0.1),
            PerturbationConfig::jpeg(95),    PerturbationConfig::jpeg(85),    PerturbationConfig::jpeg(75)};
}

Tile resize(const Tile& tile, int target) { return resize(tile, target, target); }

Tile resize(const Tile& tile, int target_height, int target_width) {
    const int h = tile.height();
    const int w = tile.width();
    if (target_height <= 0 || target_width <= 0 || target_height % kBlockSize != 0 ||
        target_width % kBlockSize != 0) {
        throw ShapeError("resize target must be a positive multiple of 16");
    }
    if (target_height > h || target_width > w || h % target_height != 0 || w % target_width != 0) {
        throw ShapeError("resize needs an integer downscale factor");
    }
    const int fy = h / target_height;
    const int fx = w / target_width;
    const double inv = 1.0 / (fy * fx);
    Image out(target_height, target_width);
    for (int r = 0; r < target_height; ++r) {
        for (int c = 0; c < target_width; ++c) {
            for (int ch = 0; ch < kColorChannels; ++ch) {
                double sum = 0.0;
                for (int dy = 0; dy < fy; ++dy)
                    for (int dx = 0; dx < fx; ++dx) sum += tile.pixels.at(r * fy + dy, c * fx + dx, ch);
                out.at(r, c, ch) = std::clamp(sum * inv, 0.0, 1.0);
            }
        }
    }
    return Tile{std::move(out), tile.label, tile.id};
}

Tile add_gaussian_noise(const Tile& tile, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw ConfigError("noise sigma must be non-negative");
    Tile out = tile;
    if (sigma == 0.0) return out;
    Rng rng(seed);
    for (double& v : out.pixels.data()) v = std::clamp(v + sigma * rng.normal(), 0.0, 1.0);
    return out;
}

Tile jpeg_roundtrip(const Tile& tile, int quality) {
    const auto bytes = encode_jpeg(tile.pixels, quality);
    Image decoded;
    try {
        decoded = decode_image(bytes);
    } catch (const Error& e) {
        throw CodecError(std::string("JPEG roundtrip: ") + e.what());
    }
    return Tile{std::move(decoded), tile.label, tile.id};
}

Tile apply_perturbation(const Tile& tile, const PerturbationConfig& config) {
    switch (config.kind) {
    case PerturbationConfig::Kind::None: return tile;
    case PerturbationConfig::Kind::Resize: return resize(tile, config.target_size);
    case PerturbationConfig::Kind::Awgn: {
        const std::uint64_t seed =
            mix_seed(config.seed, fnv1a64(tile.id, fnv1a64(to_string(tile.label))));
        return add_gaussian_noise(tile, config.sigma, seed);
    }
    case PerturbationConfig::Kind::Jpeg: return jpeg_roundtrip(tile, config.quality);
    }
    return tile;
}

} // namespace fakesat
