#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fakesat/image.hpp"

namespace fakesat {

/// One manipulation setting of the robustness grid. Only the fields of the active
/// kind are meaningful.
struct PerturbationConfig {
    enum class Kind { None, Resize, Awgn, Jpeg };

    Kind kind = Kind::None;
    int target_size = 0;
    double sigma = 0.0;
    int quality = 0;
    std::uint64_t seed = 0;

    static PerturbationConfig none() { return {}; }
    static PerturbationConfig resize(int target) { return {Kind::Resize, target, 0.0, 0, 0}; }
    static PerturbationConfig awgn(double sigma, std::uint64_t seed = 0) { return {Kind::Awgn, 0, sigma, 0, seed}; }
    static PerturbationConfig jpeg(int quality) { return {Kind::Jpeg, 0, 0.0, quality, 0}; }

    friend bool operator==(const PerturbationConfig&, const PerturbationConfig&) = default;
};

/// Parses `none`, `resize:128`, `awgn:0.06`, `jpeg:85`. A fractional JPEG quality
/// such as `jpeg:0.85` is read as 85.
PerturbationConfig parse_perturbation(std::string_view spec);
std::string to_string(const PerturbationConfig& config);

/// none, resize:128/64, awgn:0.02/0.06/0.1, jpeg:95/85/75.
std::vector<PerturbationConfig> standard_perturbation_grid();

/// Area-average downsampling to target x target (square targets) or, with the
/// two-argument form, to an arbitrary multiple-of-16 size with integer factors.
Tile resize(const Tile& tile, int target);
Tile resize(const Tile& tile, int target_height, int target_width);

/// i.i.d. N(0, sigma^2) per sample, clamped to [0,1]. Pure in (tile, sigma, seed).
Tile add_gaussian_noise(const Tile& tile, double sigma, std::uint64_t seed);

Tile jpeg_roundtrip(const Tile& tile, int quality);

/// Applies a grid setting to one dataset tile. AWGN draws use a per-tile seed derived
/// from the config seed and the tile's label and id, so every tile gets its own noise.
Tile apply_perturbation(const Tile& tile, const PerturbationConfig& config);

} // namespace fakesat
