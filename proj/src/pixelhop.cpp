#include "fakesat/pixelhop.hpp"

#include <array>

#include "fakesat/errors.hpp"

namespace fakesat {

namespace {

constexpr int kMaxPatchValues = kBlockValues;

void check_config(const PatchConfig& config) {
    if (config.channels != kColorChannels || config.size < 1 || config.size > kBlockSize) {
        throw ShapeError("patch config incompatible with 16x16x3 blocks");
    }
}

} // namespace

void gather_patch(const Block& block, const PatchConfig& config, int i, int j, double* out) {
    const int s = config.size;
    for (int dr = 0; dr < s; ++dr) {
        const double* src = block.pixels.data() + ((i + dr) * kBlockSize + j) * kColorChannels;
        for (int v = 0; v < s * kColorChannels; ++v) *out++ = src[v];
    }
}

Matrix extract_patches(const Block& block, const PatchConfig& config) {
    check_config(config);
    const int n = positions_per_side(config);
    Matrix patches(static_cast<std::size_t>(n) * n, static_cast<std::size_t>(config.dim()));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            gather_patch(block, config, i, j, patches.row(static_cast<std::size_t>(i) * n + j).data());
    return patches;
}

void accumulate_patches(const Block& block, SaabAccumulator& acc) {
    const PatchConfig& config = acc.config();
    check_config(config);
    const int n = positions_per_side(config);
    std::array<double, kMaxPatchValues> patch{};
    const std::span<const double> view(patch.data(), static_cast<std::size_t>(config.dim()));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            gather_patch(block, config, i, j, patch.data());
            acc.add(view);
        }
}

ResponseTensor apply(const Block& block, const SaabFilterBank& bank) {
    validate_bank(bank);
    check_config(bank.config);
    const int n = positions_per_side(bank.config);
    const int L = bank.dim();
    ResponseTensor t{bank.config, n, n, std::vector<double>(static_cast<std::size_t>(n) * n * L)};
    std::array<double, kMaxPatchValues> patch{};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            gather_patch(block, bank.config, i, j, patch.data());
            double* out = t.values.data() + (static_cast<std::size_t>(i) * n + j) * L;
            for (int k = 0; k < L; ++k) out[k] = saab_response(bank.kernel(k), patch.data());
        }
    return t;
}

std::vector<double> channel_features(const ResponseTensor& tensor, int channel) {
    if (channel < 0 || channel >= tensor.channels()) {
        throw IndexError("channel " + std::to_string(channel) + " out of range");
    }
    std::vector<double> plane(static_cast<std::size_t>(tensor.height) * tensor.width);
    for (int i = 0; i < tensor.height; ++i)
        for (int j = 0; j < tensor.width; ++j) plane[static_cast<std::size_t>(i) * tensor.width + j] = tensor.at(i, j, channel);
    return plane;
}

std::vector<double> channel_plane(const Block& block, const SaabFilterBank& bank, int channel) {
    validate_bank(bank);
    check_config(bank.config);
    if (channel < 0 || channel >= bank.dim()) throw IndexError("channel " + std::to_string(channel) + " out of range");
    const int n = positions_per_side(bank.config);
    const auto kernel = bank.kernel(channel);
    std::vector<double> plane(static_cast<std::size_t>(n) * n);
    std::array<double, kMaxPatchValues> patch{};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            gather_patch(block, bank.config, i, j, patch.data());
            plane[static_cast<std::size_t>(i) * n + j] = saab_response(kernel, patch.data());
        }
    return plane;
}

} // namespace fakesat
