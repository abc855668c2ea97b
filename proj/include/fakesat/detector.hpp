#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fakesat/boost.hpp"
#include "fakesat/image.hpp"
#include "fakesat/matrix.hpp"
#include "fakesat/metrics.hpp"
#include "fakesat/perturb.hpp"
#include "fakesat/saab.hpp"

namespace fakesat {

/// The three filter-bank geometries: A = 2x2x3, B = 3x3x3, C = 4x4x3.
enum class Hop { A, B, C };

PatchConfig hop_patch_config(Hop hop);
char hop_letter(Hop hop);
Hop parse_hop(char letter);
/// "A,B,C" or "ABC"; result is sorted and de-duplicated.
std::vector<Hop> parse_hops(std::string_view text);
std::string hops_to_string(std::span<const Hop> hops);

struct ChannelId {
    Hop hop = Hop::B;
    int channel = 0;

    friend auto operator<=>(const ChannelId&, const ChannelId&) = default;
};

/// "B:26".
std::string to_string(const ChannelId& id);
ChannelId parse_channel_id(std::string_view text);

struct SplitFractions {
    double train = 0.8;
    double val = 0.1;
    double test = 0.1;

    friend bool operator==(const SplitFractions&, const SplitFractions&) = default;
};

struct DetectorConfig {
    std::vector<Hop> hops{Hop::B};
    int max_channels_per_hop = 48;
    /// Candidate selected-channel counts for the single-hop sweep; 0 means every channel.
    std::vector<int> channel_grid{1, 2, 3, 4, 8, 0};
    BoostParams boost;
    SplitFractions split;
    std::uint64_t seed = 1;
    /// Applied to every tile before splitting, and again at inference time.
    PerturbationConfig perturbation;
    /// Keep the classifiers of unselected channels (for channel heat maps).
    bool retain_all_channels = false;

    /// Throws ConfigError.
    void validate() const;

    friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

struct ChannelScore {
    ChannelId id;
    double f1_train = 0.0;
    double f1_val = 0.0;
    double energy = 0.0;
    bool degenerate = false;
};

struct HopBank {
    Hop hop = Hop::B;
    SaabFilterBank bank;
};

struct ChannelClassifier {
    ChannelId id;
    StumpEnsemble model;
};

/// One point of the selected-channel-count sweep.
struct SweepPoint {
    std::size_t n_channels = 0;
    double f1_val = 0.0;
};

struct DetectorModel {
    DetectorConfig config;
    int tile_height = 0;
    int tile_width = 0;
    std::vector<HopBank> banks;
    std::vector<ChannelClassifier> classifiers;
    std::vector<ChannelId> selected;
    StumpEnsemble ensemble;
    std::vector<ChannelScore> channel_report;
    std::vector<SweepPoint> sweep;

    const SaabFilterBank& bank(Hop hop) const;
    /// nullptr when the channel's classifier was not retained.
    const StumpEnsemble* classifier(const ChannelId& id) const;
    int blocks_per_tile() const { return (tile_height / kBlockSize) * (tile_width / kBlockSize); }
};

struct DatasetSplit {
    std::vector<Tile> train;
    std::vector<Tile> val;
    std::vector<Tile> test;
};

/// Seeded shuffle stratified by class, then partition by the configured fractions.
/// Throws SingleClassError unless both classes are present.
DatasetSplit split_dataset(std::vector<Tile> tiles, const SplitFractions& fractions, std::uint64_t seed);

struct ChannelwiseResult {
    Hop hop = Hop::B;
    SaabFit fit;
    std::vector<StumpEnsemble> classifiers;       // one per channel
    std::vector<ChannelScore> scores;             // one per channel
    std::vector<std::vector<double>> train_block_scores; // [channel][tile * blocks + block]
    std::vector<std::vector<double>> val_block_scores;
};

/// Fits the hop's Saab bank on all training patches, then one boosted classifier per
/// channel on per-block channel responses. Channels are trained in parallel.
ChannelwiseResult train_channelwise(std::span<const Tile> train, std::span<const Tile> val, Hop hop,
                                    const BoostParams& params);

/// Channel indices of one hop by descending validation F1 (ties: lower index),
/// degenerate channels excluded.
std::vector<int> rank_channels(std::span<const ChannelScore> report);

struct Selection {
    std::vector<ChannelId> selected;
    std::vector<SweepPoint> sweep;
};

/// Image-level validation F1 of a candidate selection.
using SelectionScorer = std::function<double(const std::vector<ChannelId>&)>;

/// Single hop: sweeps the top-k channels over the configured grid. Several hops: the
/// candidates are the top-1 and top-2 channels of every hop. The candidate with the
/// highest image-level validation F1 wins; ties keep the smaller set.
Selection select_channels(std::span<const std::vector<ChannelScore>> reports, const DetectorConfig& config,
                          const SelectionScorer& scorer);

/// Soft scores of every selected channel for every block: blocks x N_ch.
Matrix block_channel_scores(const Tile& tile, const DetectorModel& model);

/// Block-major concatenation of block_channel_scores, length blocks * N_ch.
std::vector<double> image_feature(const Tile& tile, const DetectorModel& model);

struct TrainOutcome {
    DetectorModel model;
    DatasetSplit split; // after perturbation
};

/// Perturb, split, fit every hop, select channels, fit the image-level ensemble.
TrainOutcome train(const DetectorConfig& config, std::vector<Tile> dataset);

struct Prediction {
    Label label = Label::Unknown;
    double score = 0.5;
};

/// Scores a tile that has already been through the model's perturbation.
Prediction predict(const Tile& tile, const DetectorModel& model);

/// Applies the model's perturbation and then predicts. This is the entry point for raw inputs.
Prediction predict_raw(const Tile& tile, const DetectorModel& model);

/// Metrics over already-perturbed tiles.
Metrics evaluate(std::span<const Tile> tiles, const DetectorModel& model);

/// Parameter accounting in the layout of the model-size table.
struct SizeReport {
    std::string design;
    std::size_t selected_channels = 0;
    std::size_t filter_params = 0;
    std::size_t channelwise_params = 0;
    std::size_t ensemble_params = 0;
    std::size_t total = 0;
};

SizeReport model_size_report(const DetectorModel& model);

std::string design_name(std::span<const Hop> hops);

} // namespace fakesat
