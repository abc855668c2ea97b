#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <functional>

#include "fakesat/dataset.hpp"
#include "fakesat/errors.hpp"
#include "fakesat/heatmap.hpp"

using namespace fakesat;

namespace {

const TrainOutcome& trained() {
    static const TrainOutcome out = [] {
        DetectorConfig config;
        config.hops = {Hop::B};
        config.boost.n_trees = 20;
        config.channel_grid = {1, 2};
        config.retain_all_channels = true;
        config.split = {0.6, 0.2, 0.2};
        return train(config, synth_tiles({30, 2, 64}));
    }();
    return out;
}

double mean(const HeatMap& m) {
    double s = 0.0;
    for (double v : m.scores) s += v;
    return s / static_cast<double>(m.scores.size());
}

// Mean map value over fake test tiles minus the same over real test tiles.
double separation(const std::function<HeatMap(const Tile&)>& render) {
    double fake = 0.0, real = 0.0;
    int nf = 0, nr = 0;
    for (const Tile& t : trained().split.test) {
        const double m = mean(render(t));
        if (t.label == Label::Fake) {
            fake += m;
            ++nf;
        } else {
            real += m;
            ++nr;
        }
    }
    return fake / nf - real / nr;
}

} // namespace

TEST_CASE("window offsets") {
    CHECK(window_offsets(64, 16) == std::vector<int>{0, 16, 32, 48});
    CHECK(window_offsets(64, 4).size() == 13);
    CHECK(window_offsets(16, 1) == std::vector<int>{0});
}

TEST_CASE("stride 16 reproduces the block-level channel scores") {
    const auto& model = trained().model;
    const Tile& tile = trained().split.test.front();
    const HeatMap map = compute_heatmap(tile, model, 16);
    const Matrix blocks = block_channel_scores(tile, model);
    CHECK(map.height == 64);
    CHECK(map.width == 64);
    for (int br = 0; br < 4; ++br)
        for (int bc = 0; bc < 4; ++bc) {
            double expected = 0.0;
            for (std::size_t s = 0; s < blocks.cols; ++s) expected += blocks(static_cast<std::size_t>(br * 4 + bc), s);
            expected /= static_cast<double>(blocks.cols);
            for (int r = 0; r < 16; ++r)
                for (int c = 0; c < 16; ++c) CHECK(map.at(br * 16 + r, bc * 16 + c) == doctest::Approx(expected).epsilon(1e-12));
        }
}

TEST_CASE("map equals a naive average of covering windows") {
    const auto& model = trained().model;
    const Tile& tile = trained().split.test.back();
    const int stride = 8;
    const HeatMap map = compute_heatmap(tile, model, stride);
    const auto offs = window_offsets(64, stride);
    for (int r = 0; r < 64; r += 3)
        for (int c = 0; c < 64; c += 5) {
            double sum = 0.0;
            int n = 0;
            for (int r0 : offs)
                for (int c0 : offs)
                    if (r >= r0 && r < r0 + 16 && c >= c0 && c < c0 + 16) {
                        sum += window_score(tile, model, r0, c0);
                        ++n;
                    }
            REQUIRE(n > 0);
            CHECK(map.at(r, c) == doctest::Approx(sum / n).epsilon(1e-12));
        }
}

TEST_CASE("constant tile gives a constant map") {
    const auto& model = trained().model;
    const HeatMap map = compute_heatmap(make_tile(Image(64, 64, 0.4), Label::Unknown, "c"), model, 4);
    for (double v : map.scores) CHECK(v == doctest::Approx(map.scores.front()).epsilon(1e-12));
}

TEST_CASE("finer strides stay close to the block map") {
    const auto& model = trained().model;
    for (const Tile& tile : trained().split.test) {
        const double coarse = mean(compute_heatmap(tile, model, 16));
        const double fine = mean(compute_heatmap(tile, model, 4));
        CHECK(std::abs(coarse - fine) < 0.15);
    }
}

TEST_CASE("uncovered border pixels copy the nearest covered pixel") {
    const auto& model = trained().model;
    const HeatMap map = compute_heatmap(trained().split.test.front(), model, 5);
    // Windows start at 0,5,...,45 so coverage ends at pixel 60.
    CHECK(map.at(63, 63) == map.at(60, 60));
    CHECK(map.at(10, 62) == map.at(10, 60));
    for (double v : map.scores) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("an AC channel separates the classes better than DC") {
    const auto& out = trained();
    int best = 1;
    for (const auto& s : out.model.channel_report)
        if (s.id.channel > 0 && s.f1_val > out.model.channel_report[static_cast<std::size_t>(best)].f1_val) best = s.id.channel;
    const double dc = separation([&](const Tile& t) { return channel_heatmap(t, out.model, {Hop::B, 0}, 16); });
    const double ac = separation([&](const Tile& t) { return channel_heatmap(t, out.model, {Hop::B, best}, 16); });
    CHECK(ac > std::abs(dc));
    const HeatMap m = channel_heatmap(out.split.test.front(), out.model, {Hop::B, best}, 8);
    REQUIRE(m.channel.has_value());
    CHECK(*m.channel == ChannelId{Hop::B, best});
}

TEST_CASE("colormap endpoints") {
    CHECK(heat_color(0.0) == std::array<std::uint8_t, 3>{0, 0, 255});
    CHECK(heat_color(0.5) == std::array<std::uint8_t, 3>{255, 255, 255});
    CHECK(heat_color(1.0) == std::array<std::uint8_t, 3>{255, 0, 0});
    CHECK(heat_color(-3.0) == heat_color(0.0));
    CHECK(heat_color(0.25) == std::array<std::uint8_t, 3>{128, 128, 255});
}

TEST_CASE("rendered PNG decodes to the map size") {
    const HeatMap map = compute_heatmap(trained().split.test.front(), trained().model, 16);
    const Image img = decode_image(render_png_bytes(map));
    CHECK(img.height() == 64);
    CHECK(img.width() == 64);
    const auto dir = std::filesystem::temp_directory_path() / "fakesat_test_heatmap";
    std::filesystem::create_directories(dir);
    render_png(map, dir / "h.png");
    CHECK(std::filesystem::file_size(dir / "h.png") > 0);
    const auto j = to_json(map);
    CHECK(j["scores"].size() == 64u * 64u);
    CHECK(j["channel"].is_null());
}

TEST_CASE("errors") {
    const auto& model = trained().model;
    const Tile& tile = trained().split.test.front();
    CHECK_THROWS_AS(compute_heatmap(tile, model, 0), ShapeError);
    CHECK_THROWS_AS(compute_heatmap(tile, model, 17), ShapeError);
    CHECK_THROWS_AS(compute_heatmap(make_tile(Image(32, 32), Label::Real, "s"), model, 4), ShapeError);
    DetectorModel pruned = model;
    pruned.classifiers.erase(pruned.classifiers.begin() + 1, pruned.classifiers.end());
    const ChannelId kept = pruned.classifiers.front().id;
    const ChannelId dropped = kept.channel == 26 ? ChannelId{Hop::B, 25} : ChannelId{Hop::B, 26};
    CHECK_THROWS_AS(channel_heatmap(tile, pruned, dropped, 4), MissingChannel);
}
