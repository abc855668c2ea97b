#include "fakesat/detector.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "fakesat/errors.hpp"
#include "fakesat/parallel.hpp"
#include "fakesat/pixelhop.hpp"
#include "fakesat/random.hpp"

namespace fakesat {

PatchConfig hop_patch_config(Hop hop) {
    switch (hop) {
    case Hop::A: return {2, kColorChannels};
    case Hop::B: return {3, kColorChannels};
    case Hop::C: return {4, kColorChannels};
    }
    throw ConfigError("unknown hop");
}

char hop_letter(Hop hop) { return static_cast<char>('A' + static_cast<int>(hop)); }

Hop parse_hop(char letter) {
    switch (letter) {
    case 'A': case 'a': return Hop::A;
    case 'B': case 'b': return Hop::B;
    case 'C': case 'c': return Hop::C;
    }
    throw ConfigError(std::string("unknown hop '") + letter + "', expected A, B or C");
}

std::vector<Hop> parse_hops(std::string_view text) {
    std::set<Hop> hops;
    for (char c : text) {
        if (c == ',' || c == '&' || c == ' ') continue;
        hops.insert(parse_hop(c));
    }
    if (hops.empty()) throw ConfigError("no hops given");
    return {hops.begin(), hops.end()};
}

std::string hops_to_string(std::span<const Hop> hops) {
    std::string out;
    for (Hop h : hops) {
        if (!out.empty()) out += ',';
        out += hop_letter(h);
    }
    return out;
}

std::string to_string(const ChannelId& id) { return std::string(1, hop_letter(id.hop)) + ":" + std::to_string(id.channel); }

ChannelId parse_channel_id(std::string_view text) {
    const auto colon = text.find(':');
    if (colon != 1) throw ConfigError("channel must look like B:26");
    const Hop hop = parse_hop(text[0]);
    const auto digits = text.substr(2);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw ConfigError("channel must look like B:26");
    }
    const int channel = std::stoi(std::string(digits));
    if (channel >= hop_patch_config(hop).dim()) throw IndexError("channel " + std::string(text) + " out of range");
    return {hop, channel};
}

std::string design_name(std::span<const Hop> hops) {
    std::string name = hops.size() > 1 ? "PixelHops " : "PixelHop ";
    for (std::size_t i = 0; i < hops.size(); ++i) {
        if (i) name += '&';
        name += hop_letter(hops[i]);
    }
    return name;
}

void DetectorConfig::validate() const {
    if (hops.empty()) throw ConfigError("at least one hop is required");
    if (!std::is_sorted(hops.begin(), hops.end()) || std::adjacent_find(hops.begin(), hops.end()) != hops.end()) {
        throw ConfigError("hops must be sorted and unique");
    }
    if (max_channels_per_hop < 1) throw ConfigError("max_channels_per_hop must be at least 1");
    if (channel_grid.empty()) throw ConfigError("channel_grid must not be empty");
    if (std::any_of(channel_grid.begin(), channel_grid.end(), [](int k) { return k < 0; })) {
        throw ConfigError("channel_grid entries must be >= 0");
    }
    if (boost.n_trees < 1 || !(boost.learning_rate > 0 && boost.learning_rate <= 1) || !(boost.lambda >= 0)) {
        throw ConfigError("invalid boosting parameters");
    }
    const double sum = split.train + split.val + split.test;
    if (split.train <= 0 || split.val <= 0 || split.test < 0 || std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError("split fractions must be positive and sum to 1");
    }
}

const SaabFilterBank& DetectorModel::bank(Hop hop) const {
    for (const auto& b : banks)
        if (b.hop == hop) return b.bank;
    throw ConfigMismatch(std::string("model has no bank for hop ") + hop_letter(hop));
}

const StumpEnsemble* DetectorModel::classifier(const ChannelId& id) const {
    for (const auto& c : classifiers)
        if (c.id == id) return &c.model;
    return nullptr;
}

DatasetSplit split_dataset(std::vector<Tile> tiles, const SplitFractions& fractions, std::uint64_t seed) {
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        if (tiles[i].label == Label::Unknown) throw ConfigError("tile '" + tiles[i].id + "' has no label");
        by_class[tiles[i].label == Label::Fake ? 1 : 0].push_back(i);
    }
    if (by_class[0].empty() || by_class[1].empty()) throw SingleClassError("dataset needs both real and fake tiles");

    DatasetSplit out;
    for (int cls = 0; cls < 2; ++cls) {
        auto& idx = by_class[cls];
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(cls) + 1));
        for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
        const double n = static_cast<double>(idx.size());
        const auto n_train = std::min(idx.size(), static_cast<std::size_t>(std::llround(fractions.train * n)));
        const auto n_val = std::min(idx.size() - n_train, static_cast<std::size_t>(std::llround(fractions.val * n)));
        for (std::size_t k = 0; k < idx.size(); ++k) {
            auto& dst = k < n_train ? out.train : (k < n_train + n_val ? out.val : out.test);
            dst.push_back(std::move(tiles[idx[k]]));
        }
    }
    return out;
}

namespace {

int label_value(Label label) { return label == Label::Fake ? 1 : 0; }

void check_uniform_size(std::span<const Tile> tiles, int height, int width) {
    for (const Tile& t : tiles) {
        if (t.height() != height || t.width() != width) {
            throw ShapeError("tile '" + t.id + "' is " + std::to_string(t.height()) + "x" + std::to_string(t.width()) +
                             ", expected " + std::to_string(height) + "x" + std::to_string(width));
        }
    }
}

/// Channel responses of every block of every tile, one row per block.
Matrix channel_feature_rows(std::span<const Tile> tiles, const SaabFilterBank& bank, int channel) {
    const std::size_t blocks = tiles.empty() ? 0 : static_cast<std::size_t>(tiles[0].block_count());
    const int n = positions_per_side(bank.config);
    Matrix X(tiles.size() * blocks, static_cast<std::size_t>(n) * n);
    std::size_t row = 0;
    for (const Tile& t : tiles) {
        for (int br = 0; br < t.block_rows(); ++br)
            for (int bc = 0; bc < t.block_cols(); ++bc) {
                const Block block = extract_block(t.pixels, br * kBlockSize, bc * kBlockSize);
                const auto plane = channel_plane(block, bank, channel);
                std::copy(plane.begin(), plane.end(), X.row(row++).begin());
            }
    }
    return X;
}

std::vector<int> block_labels(std::span<const Tile> tiles) {
    std::vector<int> labels;
    for (const Tile& t : tiles) labels.insert(labels.end(), static_cast<std::size_t>(t.block_count()), label_value(t.label));
    return labels;
}

double binary_f1(std::span<const double> scores, std::span<const int> labels) {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool guess = scores[i] >= 0.5;
        if (labels[i] && guess) ++tp;
        else if (!labels[i] && guess) ++fp;
        else if (labels[i]) ++fn;
        else ++tn;
    }
    return Metrics::from_counts(tp, fp, fn, tn).f1;
}

} // namespace

ChannelwiseResult train_channelwise(std::span<const Tile> train, std::span<const Tile> val, Hop hop,
                                    const BoostParams& params) {
    if (train.empty() || val.empty()) throw InsufficientData("channel-wise training needs train and validation tiles");
    check_uniform_size(val, train[0].height(), train[0].width());
    check_uniform_size(train, train[0].height(), train[0].width());

    ChannelwiseResult result;
    result.hop = hop;
    const PatchConfig config = hop_patch_config(hop);
    SaabAccumulator acc(config);
    for (const Tile& t : train)
        for (const Block& b : partition_blocks(t)) accumulate_patches(b, acc);
    result.fit = acc.finish();
    if (result.fit.report.ac_rank == 0) {
        throw DegenerateInput(std::string("hop ") + hop_letter(hop) + ": training patches carry no AC energy");
    }
    const SaabFilterBank& bank = result.fit.bank;

    const auto train_labels = block_labels(train);
    const auto val_labels = block_labels(val);
    const int L = config.dim();
    result.classifiers.resize(static_cast<std::size_t>(L));
    result.scores.resize(static_cast<std::size_t>(L));
    result.train_block_scores.resize(static_cast<std::size_t>(L));
    result.val_block_scores.resize(static_cast<std::size_t>(L));

    parallel_for(static_cast<std::size_t>(L), [&](std::size_t k) {
        const int channel = static_cast<int>(k);
        const Matrix X_train = channel_feature_rows(train, bank, channel);
        StumpEnsemble model = fit_stumps(X_train, train_labels, params);
        auto train_scores = predict_scores(model, X_train);
        const Matrix X_val = channel_feature_rows(val, bank, channel);
        auto val_scores = predict_scores(model, X_val);

        ChannelScore& score = result.scores[k];
        score.id = {hop, channel};
        score.f1_train = binary_f1(train_scores, train_labels);
        score.f1_val = binary_f1(val_scores, val_labels);
        score.energy = bank.energies[k];
        score.degenerate = bank.is_degenerate_channel(channel);

        result.classifiers[k] = std::move(model);
        result.train_block_scores[k] = std::move(train_scores);
        result.val_block_scores[k] = std::move(val_scores);
    });
    return result;
}

std::vector<int> rank_channels(std::span<const ChannelScore> report) {
    std::vector<int> order;
    for (std::size_t i = 0; i < report.size(); ++i)
        if (!report[i].degenerate) order.push_back(static_cast<int>(i));
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& sa = report[static_cast<std::size_t>(a)];
        const auto& sb = report[static_cast<std::size_t>(b)];
        if (sa.f1_val != sb.f1_val) return sa.f1_val > sb.f1_val;
        return sa.id.channel < sb.id.channel;
    });
    std::vector<int> channels;
    channels.reserve(order.size());
    for (int i : order) channels.push_back(report[static_cast<std::size_t>(i)].id.channel);
    return channels;
}

Selection select_channels(std::span<const std::vector<ChannelScore>> reports, const DetectorConfig& config,
                          const SelectionScorer& scorer) {
    if (reports.empty()) throw EmptyReport("no channel reports to select from");
    std::vector<std::vector<int>> ranked;
    std::vector<Hop> hops;
    for (const auto& report : reports) {
        if (report.empty()) throw EmptyReport("empty channel report");
        ranked.push_back(rank_channels(report));
        if (ranked.back().empty()) throw EmptyReport("every channel of a hop is degenerate");
        hops.push_back(report.front().id.hop);
    }
    const auto cap = static_cast<std::size_t>(config.max_channels_per_hop);

    std::vector<std::vector<ChannelId>> candidates;
    if (reports.size() == 1) {
        const std::size_t available = std::min(ranked[0].size(), cap);
        std::set<std::size_t> ks;
        for (int g : config.channel_grid) {
            const std::size_t k = g <= 0 ? ranked[0].size() : static_cast<std::size_t>(g);
            ks.insert(std::min(k, available));
        }
        for (std::size_t k : ks) {
            std::vector<ChannelId> sel;
            for (std::size_t i = 0; i < k; ++i) sel.push_back({hops[0], ranked[0][i]});
            candidates.push_back(std::move(sel));
        }
    } else {
        for (std::size_t per_hop : {std::size_t{1}, std::size_t{2}}) {
            std::vector<ChannelId> sel;
            for (std::size_t h = 0; h < ranked.size(); ++h) {
                const std::size_t k = std::min({per_hop, ranked[h].size(), cap});
                for (std::size_t i = 0; i < k; ++i) sel.push_back({hops[h], ranked[h][i]});
            }
            if (candidates.empty() || candidates.back() != sel) candidates.push_back(std::move(sel));
        }
    }

    Selection best;
    double best_f1 = -1.0;
    for (auto& sel : candidates) {
        const double f1 = scorer(sel);
        best.sweep.push_back({sel.size(), f1});
        if (f1 > best_f1) {
            best_f1 = f1;
            best.selected = sel;
        }
    }
    return best;
}

Matrix block_channel_scores(const Tile& tile, const DetectorModel& model) {
    if (tile.height() != model.tile_height || tile.width() != model.tile_width) {
        throw ShapeError("tile is " + std::to_string(tile.height()) + "x" + std::to_string(tile.width()) +
                         ", model was trained on " + std::to_string(model.tile_height) + "x" +
                         std::to_string(model.tile_width));
    }
    std::vector<std::pair<const SaabFilterBank*, const StumpEnsemble*>> parts;
    for (const ChannelId& id : model.selected) {
        const StumpEnsemble* clf = model.classifier(id);
        if (!clf) throw MissingChannel("model has no classifier for channel " + to_string(id));
        parts.emplace_back(&model.bank(id.hop), clf);
    }
    Matrix scores(static_cast<std::size_t>(tile.block_count()), model.selected.size());
    std::size_t row = 0;
    for (int br = 0; br < tile.block_rows(); ++br)
        for (int bc = 0; bc < tile.block_cols(); ++bc, ++row) {
            const Block block = extract_block(tile.pixels, br * kBlockSize, bc * kBlockSize);
            for (std::size_t s = 0; s < parts.size(); ++s) {
                const auto plane = channel_plane(block, *parts[s].first, model.selected[s].channel);
                scores(row, s) = predict_score(*parts[s].second, plane);
            }
        }
    return scores;
}

std::vector<double> image_feature(const Tile& tile, const DetectorModel& model) {
    return block_channel_scores(tile, model).data;
}

TrainOutcome train(const DetectorConfig& config, std::vector<Tile> dataset) {
    config.validate();
    if (dataset.empty()) throw InsufficientData("empty dataset");

    std::vector<Tile> perturbed(dataset.size());
    parallel_for(dataset.size(), [&](std::size_t i) { perturbed[i] = apply_perturbation(dataset[i], config.perturbation); });
    dataset.clear();
    const int height = perturbed[0].height();
    const int width = perturbed[0].width();
    check_uniform_size(perturbed, height, width);

    TrainOutcome out;
    out.split = split_dataset(std::move(perturbed), config.split, config.seed);
    const DatasetSplit& split = out.split;
    const auto has_both = [](std::span<const Tile> tiles) {
        bool r = false, f = false;
        for (const Tile& t : tiles) (t.label == Label::Fake ? f : r) = true;
        return r && f;
    };
    if (!has_both(split.train) || !has_both(split.val)) {
        throw SingleClassError("training and validation splits both need real and fake tiles");
    }

    DetectorModel& model = out.model;
    model.config = config;
    model.tile_height = height;
    model.tile_width = width;

    std::vector<ChannelwiseResult> hop_results;
    std::vector<std::vector<ChannelScore>> reports;
    for (Hop hop : config.hops) {
        hop_results.push_back(train_channelwise(split.train, split.val, hop, config.boost));
        reports.push_back(hop_results.back().scores);
    }
    const auto result_for = [&](Hop hop) -> const ChannelwiseResult& {
        for (const auto& r : hop_results)
            if (r.hop == hop) return r;
        throw ConfigMismatch("missing hop result");
    };

    const std::size_t blocks = static_cast<std::size_t>(model.blocks_per_tile());
    const auto assemble = [&](const std::vector<ChannelId>& sel, bool validation) {
        const std::size_t n_tiles = validation ? split.val.size() : split.train.size();
        Matrix X(n_tiles, blocks * sel.size());
        for (std::size_t s = 0; s < sel.size(); ++s) {
            const auto& r = result_for(sel[s].hop);
            const auto& cache = validation ? r.val_block_scores[static_cast<std::size_t>(sel[s].channel)]
                                           : r.train_block_scores[static_cast<std::size_t>(sel[s].channel)];
            for (std::size_t t = 0; t < n_tiles; ++t)
                for (std::size_t b = 0; b < blocks; ++b) X(t, b * sel.size() + s) = cache[t * blocks + b];
        }
        return X;
    };
    std::vector<int> train_labels, val_labels;
    std::vector<Label> val_truth;
    for (const Tile& t : split.train) train_labels.push_back(label_value(t.label));
    for (const Tile& t : split.val) {
        val_labels.push_back(label_value(t.label));
        val_truth.push_back(t.label);
    }

    std::map<std::vector<ChannelId>, StumpEnsemble> fitted;
    const SelectionScorer scorer = [&](const std::vector<ChannelId>& sel) {
        BoostParams params = config.boost;
        params.n_trees = config.boost.n_trees * static_cast<int>(sel.size());
        StumpEnsemble ensemble = fit_stumps(assemble(sel, false), train_labels, params);
        const auto scores = predict_scores(ensemble, assemble(sel, true));
        std::vector<Label> guesses;
        for (double s : scores) guesses.push_back(s >= 0.5 ? Label::Fake : Label::Real);
        const double f1 = compute_metrics(val_truth, guesses).f1;
        fitted.emplace(sel, std::move(ensemble));
        return f1;
    };
    Selection selection = select_channels(reports, config, scorer);
    model.selected = selection.selected;
    model.sweep = selection.sweep;
    model.ensemble = fitted.at(model.selected);

    for (const auto& r : hop_results) {
        model.banks.push_back({r.hop, r.fit.bank});
        for (std::size_t k = 0; k < r.classifiers.size(); ++k) {
            const ChannelId id{r.hop, static_cast<int>(k)};
            const bool chosen = std::find(model.selected.begin(), model.selected.end(), id) != model.selected.end();
            if (chosen || config.retain_all_channels) model.classifiers.push_back({id, r.classifiers[k]});
        }
        model.channel_report.insert(model.channel_report.end(), r.scores.begin(), r.scores.end());
    }
    return out;
}

Prediction predict(const Tile& tile, const DetectorModel& model) {
    const double score = predict_score(model.ensemble, image_feature(tile, model));
    return {score >= 0.5 ? Label::Fake : Label::Real, score};
}

Prediction predict_raw(const Tile& tile, const DetectorModel& model) {
    return predict(apply_perturbation(tile, model.config.perturbation), model);
}

Metrics evaluate(std::span<const Tile> tiles, const DetectorModel& model) {
    std::vector<Label> truth(tiles.size());
    std::vector<Label> guesses(tiles.size());
    parallel_for(tiles.size(), [&](std::size_t i) {
        truth[i] = tiles[i].label;
        guesses[i] = predict(tiles[i], model).label;
    });
    return compute_metrics(truth, guesses);
}

SizeReport model_size_report(const DetectorModel& model) {
    SizeReport r;
    r.design = design_name(model.config.hops);
    r.selected_channels = model.selected.size();
    for (const auto& b : model.banks) r.filter_params += static_cast<std::size_t>(b.bank.dim());
    for (const ChannelId& id : model.selected) {
        const StumpEnsemble* clf = model.classifier(id);
        if (!clf) throw MissingChannel("model has no classifier for channel " + to_string(id));
        r.channelwise_params += param_count(*clf);
    }
    r.ensemble_params = param_count(model.ensemble);
    r.total = r.filter_params + r.channelwise_params + r.ensemble_params;
    return r;
}

} // namespace fakesat
