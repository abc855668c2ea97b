#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fakesat/image.hpp"

namespace fakesat {

struct SynthOptions {
    int n_per_class = 200;
    std::uint64_t seed = 1;
    int tile_size = 64;
};

/// One procedural real-like tile with sharp edges and fine texture. Deterministic in
/// (seed, index).
Image synth_real_image(std::uint64_t seed, int index, int size);

/// A fake counterpart: an independent real-like draw with its high frequencies
/// suppressed by a Gaussian blur plus a faint grid-aligned periodic pattern.
Image synth_fake_image(std::uint64_t seed, int index, int size);

/// Writes `<out>/real/real_NNNN.png` and `<out>/fake/fake_NNNN.png`.
void synth_dataset(const SynthOptions& options, const std::filesystem::path& out_dir);

/// In-memory equivalent of synth_dataset followed by load_dataset. Samples are
/// quantized to 8 bits exactly as PNG storage does, ids match the file stems.
std::vector<Tile> synth_tiles(const SynthOptions& options);

/// Loads `<root>/real/*` and `<root>/fake/*` (PNG or JPEG), sorted by file name.
/// Throws IoError when the directory holds no images.
std::vector<Tile> load_dataset(const std::filesystem::path& root);

/// FNV-1a over the relative paths and bytes of every dataset image, in load order.
std::uint64_t dataset_hash(const std::filesystem::path& root);

} // namespace fakesat
