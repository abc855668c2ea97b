#pragma once

#include <vector>

#include "fakesat/image.hpp"
#include "fakesat/matrix.hpp"
#include "fakesat/saab.hpp"

namespace fakesat {

/// Joint spatial/spectral responses of one block: (17-s) x (17-s) positions, L channels.
struct ResponseTensor {
    PatchConfig config;
    int height = 0;
    int width = 0;
    std::vector<double> values; // height x width x L

    int channels() const { return config.dim(); }
    double at(int i, int j, int k) const {
        return values[(static_cast<std::size_t>(i) * width + j) * channels() + k];
    }
};

/// Number of stride-1 window positions along one side of a 16-pixel block.
inline int positions_per_side(const PatchConfig& config) { return kBlockSize - config.size + 1; }

/// Copies the s x s x c window at (i, j) into `out` (length L), (row, col, channel) order.
void gather_patch(const Block& block, const PatchConfig& config, int i, int j, double* out);

/// All stride-1 windows, row-major over positions: an N x L matrix with N = (17-s)^2.
Matrix extract_patches(const Block& block, const PatchConfig& config);

/// Feeds every window of the block into a Saab accumulator.
void accumulate_patches(const Block& block, SaabAccumulator& acc);

ResponseTensor apply(const Block& block, const SaabFilterBank& bank);

/// Row-major flattening of one channel's response plane (length W*H).
std::vector<double> channel_features(const ResponseTensor& tensor, int channel);

/// Same values as channel_features(apply(block, bank), channel) without computing the
/// other channels.
std::vector<double> channel_plane(const Block& block, const SaabFilterBank& bank, int channel);

} // namespace fakesat
