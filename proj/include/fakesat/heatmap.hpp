#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakesat/detector.hpp"

namespace fakesat {

/// Per-pixel fake probability at tile resolution.
struct HeatMap {
    int height = 0;
    int width = 0;
    int stride = 16;
    std::optional<ChannelId> channel; // set for single-channel maps
    std::vector<double> scores;       // row-major, values in [0,1]

    double at(int r, int c) const { return scores[static_cast<std::size_t>(r) * width + c]; }
};

inline constexpr int kDefaultHeatmapStride = 4;

/// Top-left corners of the 16x16 windows visited at `stride` along a side of `extent` pixels.
std::vector<int> window_offsets(int extent, int stride);

/// Window score = mean soft score of the model's selected channels.
double window_score(const Tile& tile, const DetectorModel& model, int r0, int c0);

/// Slides a 16x16 window at `stride` (1..16), averages the window scores covering each
/// pixel. Pixels no window reaches take the value of the nearest covered pixel.
HeatMap compute_heatmap(const Tile& tile, const DetectorModel& model, int stride = kDefaultHeatmapStride);

/// Same, scoring windows with one channel's classifier. Throws MissingChannel when the
/// classifier was not retained in the model.
HeatMap channel_heatmap(const Tile& tile, const DetectorModel& model, const ChannelId& channel,
                        int stride = kDefaultHeatmapStride);

/// Diverging colormap: 0 -> blue (0,0,255), 0.5 -> white, 1 -> red (255,0,0).
std::array<std::uint8_t, 3> heat_color(double score);

std::vector<std::uint8_t> render_png_bytes(const HeatMap& map);
void render_png(const HeatMap& map, const std::filesystem::path& out);

/// Side-car form with the raw score grid.
nlohmann::json to_json(const HeatMap& map);

} // namespace fakesat
