#include <doctest.h>

#include <algorithm>
#include <set>

#include "fakesat/dataset.hpp"
#include "fakesat/detector.hpp"
#include "fakesat/errors.hpp"
#include "fakesat/model_io.hpp"

using namespace fakesat;

namespace {

std::vector<Tile> labeled_tiles(int n_real, int n_fake, int size = 16) {
    std::vector<Tile> tiles;
    for (int i = 0; i < n_real; ++i) tiles.push_back(make_tile(Image(size, size, 0.1), Label::Real, "r" + std::to_string(i)));
    for (int i = 0; i < n_fake; ++i) tiles.push_back(make_tile(Image(size, size, 0.9), Label::Fake, "f" + std::to_string(i)));
    return tiles;
}

std::vector<ChannelScore> report_for(Hop hop, const std::vector<double>& f1s, std::set<int> degenerate = {}) {
    std::vector<ChannelScore> r;
    for (std::size_t k = 0; k < f1s.size(); ++k)
        r.push_back({{hop, static_cast<int>(k)}, f1s[k], f1s[k], 0.0, degenerate.count(static_cast<int>(k)) > 0});
    return r;
}

StumpEnsemble trees(std::size_t n) {
    StumpEnsemble e;
    e.trees.resize(n);
    return e;
}

// A model shaped like a trained one for parameter accounting only.
DetectorModel sized_model(const std::vector<Hop>& hops, int per_hop) {
    DetectorModel m;
    m.config.hops = hops;
    for (Hop h : hops) {
        HopBank hb;
        hb.hop = h;
        hb.bank.config = hop_patch_config(h);
        m.banks.push_back(hb);
        for (int k = 0; k < per_hop; ++k) {
            m.selected.push_back({h, k + 1});
            m.classifiers.push_back({{h, k + 1}, trees(100)});
        }
    }
    m.ensemble = trees(100 * m.selected.size());
    return m;
}

DetectorConfig small_config() {
    DetectorConfig c;
    c.hops = {Hop::A};
    c.boost.n_trees = 10;
    c.channel_grid = {1, 2};
    return c;
}

} // namespace

TEST_CASE("hop names and channel ids") {
    CHECK(hop_patch_config(Hop::A).dim() == 12);
    CHECK(hop_patch_config(Hop::B).dim() == 27);
    CHECK(hop_patch_config(Hop::C).dim() == 48);
    CHECK(parse_hops("C,A,B,A") == std::vector<Hop>{Hop::A, Hop::B, Hop::C});
    CHECK(parse_hops("abc") == std::vector<Hop>{Hop::A, Hop::B, Hop::C});
    CHECK_THROWS_AS(parse_hops("D"), ConfigError);
    CHECK(to_string(ChannelId{Hop::B, 26}) == "B:26");
    CHECK(parse_channel_id("B:26") == ChannelId{Hop::B, 26});
    CHECK_THROWS(parse_channel_id("B26"));
    CHECK(design_name(std::vector<Hop>{Hop::B}) == "PixelHop B");
    CHECK(design_name(std::vector<Hop>{Hop::A, Hop::B, Hop::C}) == "PixelHops A&B&C");
}

TEST_CASE("split_dataset is stratified and seeded") {
    const auto split = split_dataset(labeled_tiles(500, 500), {}, 7);
    CHECK(split.train.size() == 800);
    CHECK(split.val.size() == 100);
    CHECK(split.test.size() == 100);
    const auto fakes = [](const std::vector<Tile>& v) {
        return std::count_if(v.begin(), v.end(), [](const Tile& t) { return t.label == Label::Fake; });
    };
    CHECK(fakes(split.train) == 400);
    CHECK(fakes(split.val) == 50);
    CHECK(fakes(split.test) == 50);

    std::set<std::string> ids;
    for (const auto* part : {&split.train, &split.val, &split.test})
        for (const Tile& t : *part) ids.insert(t.id);
    CHECK(ids.size() == 1000);

    const auto again = split_dataset(labeled_tiles(500, 500), {}, 7);
    const auto other = split_dataset(labeled_tiles(500, 500), {}, 8);
    bool same = true, differs = false;
    for (std::size_t i = 0; i < split.test.size(); ++i) {
        same &= split.test[i].id == again.test[i].id;
        differs |= split.test[i].id != other.test[i].id;
    }
    CHECK(same);
    CHECK(differs);
}

TEST_CASE("split_dataset errors") {
    CHECK_THROWS_AS(split_dataset(labeled_tiles(10, 0), {}, 1), SingleClassError);
    auto tiles = labeled_tiles(5, 5);
    tiles[0].label = Label::Unknown;
    CHECK_THROWS_AS(split_dataset(tiles, {}, 1), ConfigError);
}

TEST_CASE("rank_channels orders by validation F1 and skips degenerate channels") {
    const auto report = report_for(Hop::B, {0.5, 0.9, 0.7, 0.9, 0.95}, {4});
    CHECK(rank_channels(report) == std::vector<int>{1, 3, 2, 0});
}

TEST_CASE("select_channels sweeps the grid on one hop") {
    const std::vector<std::vector<ChannelScore>> reports{report_for(Hop::B, {0.5, 0.9, 0.8, 0.7, 0.6})};
    DetectorConfig config;
    config.channel_grid = {1, 2, 3, 0};
    std::vector<std::size_t> seen;
    const auto pick = select_channels(reports, config, [&](const std::vector<ChannelId>& sel) {
        seen.push_back(sel.size());
        return sel.size() == 3 || sel.size() == 5 ? 0.9 : 0.8;
    });
    CHECK(seen == std::vector<std::size_t>{1, 2, 3, 5});
    // Ties keep the smaller set.
    CHECK(pick.selected == std::vector<ChannelId>{{Hop::B, 1}, {Hop::B, 2}, {Hop::B, 3}});
    CHECK(pick.sweep.size() == 4);
}

TEST_CASE("select_channels respects the per-hop cap") {
    const std::vector<std::vector<ChannelScore>> reports{report_for(Hop::A, {0.5, 0.9, 0.8, 0.7})};
    DetectorConfig config;
    config.channel_grid = {0};
    config.max_channels_per_hop = 2;
    const auto pick = select_channels(reports, config, [](const std::vector<ChannelId>&) { return 1.0; });
    CHECK(pick.selected.size() == 2);
}

TEST_CASE("select_channels with several hops considers top-1 and top-2 per hop") {
    const std::vector<std::vector<ChannelScore>> reports{
        report_for(Hop::A, {0.5, 0.9, 0.8}), report_for(Hop::B, {0.5, 0.6, 0.99}),
        report_for(Hop::C, {0.5, 0.7, 0.75})};
    DetectorConfig config;
    config.hops = {Hop::A, Hop::B, Hop::C};
    std::vector<std::size_t> seen;
    const auto pick = select_channels(reports, config, [&](const std::vector<ChannelId>& sel) {
        seen.push_back(sel.size());
        return 0.9;
    });
    CHECK(seen == std::vector<std::size_t>{3, 6});
    CHECK(pick.selected == std::vector<ChannelId>{{Hop::A, 1}, {Hop::B, 2}, {Hop::C, 2}});
}

TEST_CASE("select_channels errors") {
    DetectorConfig config;
    const auto scorer = [](const std::vector<ChannelId>&) { return 1.0; };
    CHECK_THROWS_AS(select_channels(std::vector<std::vector<ChannelScore>>{}, config, scorer), EmptyReport);
    const std::vector<std::vector<ChannelScore>> all_degenerate{report_for(Hop::B, {0.5, 0.6}, {0, 1})};
    CHECK_THROWS_AS(select_channels(all_degenerate, config, scorer), EmptyReport);
}

TEST_CASE("train_channelwise fits one classifier per channel") {
    const auto tiles = synth_tiles({6, 3, 32});
    const auto split = split_dataset(tiles, {0.5, 0.5, 0.0}, 1);
    BoostParams params;
    params.n_trees = 5;
    const auto result = train_channelwise(split.train, split.val, Hop::B, params);
    CHECK(result.classifiers.size() == 27);
    CHECK(result.scores.size() == 27);
    CHECK(result.train_block_scores[0].size() == split.train.size() * 4);
    CHECK(result.val_block_scores[26].size() == split.val.size() * 4);
    for (const auto& s : result.scores) {
        CHECK(s.f1_val >= 0.0);
        CHECK(s.f1_val <= 1.0);
    }
}

TEST_CASE("constant tiles are degenerate input") {
    const auto tiles = labeled_tiles(4, 4, 32);
    BoostParams params;
    params.n_trees = 2;
    CHECK_THROWS_AS(train_channelwise(tiles, tiles, Hop::A, params), DegenerateInput);
}

TEST_CASE("training end to end is deterministic and well formed") {
    const auto tiles = synth_tiles({20, 5, 32});
    const auto a = train(small_config(), tiles);
    const auto b = train(small_config(), tiles);
    CHECK(serialize_model(a.model) == serialize_model(b.model));

    const DetectorModel& m = a.model;
    CHECK(m.tile_height == 32);
    CHECK(m.banks.size() == 1);
    CHECK(m.channel_report.size() == 12);
    CHECK(m.classifiers.size() == m.selected.size());
    CHECK(m.ensemble.trees.size() == 10 * m.selected.size());
    CHECK(image_feature(a.split.test[0], m).size() == 4 * m.selected.size());
    for (const Tile& t : a.split.test) {
        const auto p = predict(t, m);
        CHECK(p.score >= 0.0);
        CHECK(p.score <= 1.0);
        CHECK(p.label == (p.score >= 0.5 ? Label::Fake : Label::Real));
    }
    const Metrics metrics = evaluate(a.split.test, m);
    CHECK(metrics.total() == a.split.test.size());
}

TEST_CASE("retain_all_channels keeps every classifier") {
    auto config = small_config();
    config.retain_all_channels = true;
    const auto out = train(config, synth_tiles({10, 6, 32}));
    CHECK(out.model.classifiers.size() == 12);
    CHECK(model_size_report(out.model).channelwise_params == 40 * out.model.selected.size());
}

TEST_CASE("prediction rejects tiles of the wrong size") {
    const auto out = train(small_config(), synth_tiles({10, 7, 32}));
    CHECK_THROWS_AS(predict(make_tile(Image(48, 48), Label::Real, "x"), out.model), ShapeError);
}

TEST_CASE("golden model sizes") {
    CHECK(model_size_report(sized_model({Hop::A}, 1)).total == 812);
    CHECK(model_size_report(sized_model({Hop::B}, 1)).total == 827);
    CHECK(model_size_report(sized_model({Hop::C}, 1)).total == 848);
    const auto abc = model_size_report(sized_model({Hop::A, Hop::B, Hop::C}, 1));
    CHECK(abc.filter_params == 87);
    CHECK(abc.channelwise_params == 1200);
    CHECK(abc.ensemble_params == 1200);
    CHECK(abc.total == 2487);
    CHECK(model_size_report(sized_model({Hop::A}, 12)).total == 9612);
}

TEST_CASE("F1 from precision and recall") {
    CHECK(f1_score(0.8273, 0.9192) == doctest::Approx(0.8708).epsilon(0.0001 / 0.8708));
    CHECK(f1_score(1.0, 0.9975) == doctest::Approx(0.9988).epsilon(0.0001 / 0.9988));
    CHECK(f1_score(0.0, 0.0) == 0.0);
}

TEST_CASE("metrics from counts") {
    const Metrics m = Metrics::from_counts(8, 2, 1, 9);
    CHECK(m.precision == doctest::Approx(0.8));
    CHECK(m.recall == doctest::Approx(8.0 / 9.0));
    CHECK(m.f1 == doctest::Approx(f1_score(0.8, 8.0 / 9.0)));
    const Metrics none = Metrics::from_counts(0, 0, 0, 5);
    CHECK(none.precision == 0.0);
    CHECK(none.f1 == 0.0);
    const std::vector<Label> truth{Label::Fake, Label::Real, Label::Unknown, Label::Fake};
    const std::vector<Label> guess{Label::Fake, Label::Fake, Label::Fake, Label::Real};
    const Metrics c = compute_metrics(truth, guess);
    CHECK(c.tp == 1);
    CHECK(c.fp == 1);
    CHECK(c.fn == 1);
    CHECK(c.total() == 3);
}

TEST_CASE("config validation") {
    DetectorConfig c;
    CHECK_NOTHROW(c.validate());
    c.hops.clear();
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.split = {0.5, 0.6, 0.1};
    CHECK_THROWS_AS(c.validate(), ConfigError);
}
