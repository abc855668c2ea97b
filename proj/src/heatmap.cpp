#include "fakesat/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "fakesat/errors.hpp"
#include "fakesat/parallel.hpp"
#include "fakesat/pixelhop.hpp"

namespace fakesat {

namespace {

using Scorer = std::vector<std::pair<const SaabFilterBank*, const StumpEnsemble*>>;

Scorer scorer_for(const DetectorModel& model, std::span<const ChannelId> channels) {
    Scorer parts;
    for (const ChannelId& id : channels) {
        const StumpEnsemble* clf = model.classifier(id);
        if (!clf) throw MissingChannel("model has no classifier for channel " + to_string(id));
        parts.emplace_back(&model.bank(id.hop), clf);
    }
    if (parts.empty()) throw MissingChannel("no channels to score");
    return parts;
}

double score_window(const Tile& tile, const Scorer& parts, std::span<const ChannelId> channels, int r0, int c0) {
    const Block block = extract_block(tile.pixels, r0, c0);
    double sum = 0.0;
    for (std::size_t s = 0; s < parts.size(); ++s) {
        sum += predict_score(*parts[s].second, channel_plane(block, *parts[s].first, channels[s].channel));
    }
    return sum / static_cast<double>(parts.size());
}

HeatMap build(const Tile& tile, const DetectorModel& model, std::span<const ChannelId> channels, int stride) {
    if (stride < 1 || stride > kBlockSize) throw ShapeError("heat-map stride must be in 1..16");
    validate_tile_image(tile.pixels);
    if (tile.height() != model.tile_height || tile.width() != model.tile_width) {
        throw ShapeError("tile size differs from the model's training tile size");
    }
    const Scorer parts = scorer_for(model, channels);
    const auto rows = window_offsets(tile.height(), stride);
    const auto cols = window_offsets(tile.width(), stride);

    std::vector<double> window(rows.size() * cols.size());
    parallel_for(rows.size(), [&](std::size_t i) {
        for (std::size_t j = 0; j < cols.size(); ++j)
            window[i * cols.size() + j] = score_window(tile, parts, channels, rows[i], cols[j]);
    });

    // Fixed-order accumulation keeps the sums bit-stable regardless of threading.
    const int h = tile.height();
    const int w = tile.width();
    std::vector<double> sum(static_cast<std::size_t>(h) * w, 0.0);
    std::vector<int> count(sum.size(), 0);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const double v = window[i * cols.size() + j];
            for (int r = rows[i]; r < rows[i] + kBlockSize; ++r)
                for (int c = cols[j]; c < cols[j] + kBlockSize; ++c) {
                    sum[static_cast<std::size_t>(r) * w + c] += v;
                    ++count[static_cast<std::size_t>(r) * w + c];
                }
        }

    HeatMap map{h, w, stride, std::nullopt, std::vector<double>(sum.size())};
    const int max_r = rows.back() + kBlockSize - 1;
    const int max_c = cols.back() + kBlockSize - 1;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const std::size_t src = static_cast<std::size_t>(std::min(r, max_r)) * w + std::min(c, max_c);
            map.scores[static_cast<std::size_t>(r) * w + c] = std::clamp(sum[src] / count[src], 0.0, 1.0);
        }
    return map;
}

} // namespace

std::vector<int> window_offsets(int extent, int stride) {
    std::vector<int> offsets;
    for (int p = 0; p + kBlockSize <= extent; p += stride) offsets.push_back(p);
    return offsets;
}

double window_score(const Tile& tile, const DetectorModel& model, int r0, int c0) {
    return score_window(tile, scorer_for(model, model.selected), model.selected, r0, c0);
}

HeatMap compute_heatmap(const Tile& tile, const DetectorModel& model, int stride) {
    return build(tile, model, model.selected, stride);
}

HeatMap channel_heatmap(const Tile& tile, const DetectorModel& model, const ChannelId& channel, int stride) {
    const ChannelId one[] = {channel};
    HeatMap map = build(tile, model, one, stride);
    map.channel = channel;
    return map;
}

std::array<std::uint8_t, 3> heat_color(double score) {
    const double s = std::clamp(score, 0.0, 1.0);
    const auto level = [](double v) { return static_cast<std::uint8_t>(std::lround(255.0 * v)); };
    if (s < 0.5) {
        const double t = s / 0.5;
        return {level(t), level(t), 255};
    }
    const double t = (s - 0.5) / 0.5;
    return {255, level(1.0 - t), level(1.0 - t)};
}

std::vector<std::uint8_t> render_png_bytes(const HeatMap& map) {
    if (map.height <= 0 || map.width <= 0 || map.scores.size() != static_cast<std::size_t>(map.height) * map.width) {
        throw ShapeError("heat map grid is malformed");
    }
    std::vector<std::uint8_t> rgb(map.scores.size() * 3);
    for (std::size_t i = 0; i < map.scores.size(); ++i) {
        const auto c = heat_color(map.scores[i]);
        std::copy(c.begin(), c.end(), rgb.begin() + static_cast<std::ptrdiff_t>(3 * i));
    }
    return encode_png_rgb8(rgb, map.height, map.width);
}

void render_png(const HeatMap& map, const std::filesystem::path& out) {
    const auto bytes = render_png_bytes(map);
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + out.string());
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("write failed: " + out.string());
}

nlohmann::json to_json(const HeatMap& map) {
    nlohmann::json j = {{"height", map.height}, {"width", map.width}, {"stride", map.stride}, {"scores", map.scores}};
    j["channel"] = map.channel ? nlohmann::json(to_string(*map.channel)) : nlohmann::json(nullptr);
    return j;
}

} // namespace fakesat
