// Command-line front end: synth, train, eval, heatmap, size, grid.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fakesat/dataset.hpp"
#include "fakesat/detector.hpp"
#include "fakesat/errors.hpp"
#include "fakesat/heatmap.hpp"
#include "fakesat/model_io.hpp"
#include "fakesat/perturb.hpp"
#include "fakesat/robustness.hpp"

#ifndef FAKESAT_BUILD_ID
#define FAKESAT_BUILD_ID "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fakesat;

namespace {

using Clock = std::chrono::steady_clock;

struct Manifest {
    json doc;
    Clock::time_point start = Clock::now();
    Clock::time_point mark = start;

    Manifest(std::string command, int argc, char** argv) {
        std::vector<std::string> args(argv, argv + argc);
        doc = {{"command", std::move(command)}, {"argv", args}, {"build_id", FAKESAT_BUILD_ID}, {"timings", json::object()}};
    }

    void lap(const std::string& name) {
        const auto now = Clock::now();
        doc["timings"][name] = std::chrono::duration<double>(now - mark).count();
        mark = now;
    }

    void write(const fs::path& path) {
        doc["timings"]["total"] = std::chrono::duration<double>(Clock::now() - start).count();
        write_text_file(path, doc.dump(2) + "\n");
    }
};

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::vector<int> parse_grid(const std::string& text) {
    std::vector<int> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "all") grid.push_back(0);
        else {
            try {
                const int v = std::stoi(item);
                if (v < 1) throw ConfigError("channel grid entries must be positive or 'all'");
                grid.push_back(v);
            } catch (const std::logic_error&) {
                throw ConfigError("bad channel grid entry '" + item + "'");
            }
        }
    }
    if (grid.empty()) throw ConfigError("empty channel grid");
    return grid;
}

std::vector<std::vector<Hop>> parse_designs(const std::string& text) {
    std::vector<std::vector<Hop>> designs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) designs.push_back(parse_hops(item));
    if (designs.empty()) throw ConfigError("no designs given");
    return designs;
}

fs::path sibling(const fs::path& p, const std::string& suffix) {
    fs::path out = p;
    out.replace_extension();
    return out.string() + suffix;
}

json metrics_report(const DetectorModel& model, const Metrics& m, std::size_t n_tiles, const std::string& split) {
    json selected = json::array();
    for (const auto& id : model.selected) selected.push_back(to_string(id));
    return {{"design", design_name(model.config.hops)},
            {"perturbation", to_string(model.config.perturbation)},
            {"split", split},
            {"tiles", n_tiles},
            {"metrics", to_json(m)},
            {"selected", selected},
            {"size", to_json(model_size_report(model))}};
}

struct TrainArgs {
    std::string data, hops = "B", out = "model.json", perturb = "none", grid = "1,2,3,4,8,all";
    std::string metrics, manifest;
    std::uint64_t seed = 1;
    int max_channels = 48;
    int trees = 100;
    bool retain_all = false;
};

int cmd_train(const TrainArgs& a, int argc, char** argv) {
    Manifest manifest("train", argc, argv);
    DetectorConfig config;
    config.hops = parse_hops(a.hops);
    config.seed = a.seed;
    config.perturbation = parse_perturbation(a.perturb);
    if (config.perturbation.kind == PerturbationConfig::Kind::Awgn) config.perturbation.seed = a.seed;
    config.max_channels_per_hop = a.max_channels;
    config.channel_grid = parse_grid(a.grid);
    config.boost.n_trees = a.trees;
    config.retain_all_channels = a.retain_all;
    config.validate();

    std::vector<Tile> tiles = load_dataset(a.data);
    manifest.doc["dataset_hash"] = hex64(dataset_hash(a.data));
    manifest.doc["seed"] = a.seed;
    manifest.doc["config"] = to_json(config);
    manifest.lap("load");
    std::cerr << "training " << design_name(config.hops) << " on " << tiles.size() << " tiles ("
              << to_string(config.perturbation) << ")\n";

    TrainOutcome outcome = train(config, std::move(tiles));
    manifest.lap("train");
    const Metrics m = evaluate(outcome.split.test, outcome.model);
    manifest.lap("evaluate");

    save_model(a.out, outcome.model);
    const json report = metrics_report(outcome.model, m, outcome.split.test.size(), "test");
    write_text_file(a.metrics.empty() ? sibling(a.out, ".metrics.json") : fs::path(a.metrics), report.dump(2) + "\n");
    manifest.write(a.manifest.empty() ? sibling(a.out, ".manifest.json") : fs::path(a.manifest));
    std::cout << report.dump(2) << "\n";
    std::cerr << "test F1 " << m.f1 << " (precision " << m.precision << ", recall " << m.recall << "), "
              << outcome.model.selected.size() << " channel(s) selected\n";
    return 0;
}

struct EvalArgs {
    std::string model, data, split = "all", manifest;
};

int cmd_eval(const EvalArgs& a, int argc, char** argv) {
    Manifest manifest("eval", argc, argv);
    const DetectorModel model = load_model(a.model);
    std::vector<Tile> tiles = load_dataset(a.data);
    std::vector<Tile> perturbed;
    perturbed.reserve(tiles.size());
    for (const Tile& t : tiles) perturbed.push_back(apply_perturbation(t, model.config.perturbation));
    std::vector<Tile> scored;
    if (a.split == "test") {
        scored = split_dataset(std::move(perturbed), model.config.split, model.config.seed).test;
    } else if (a.split == "all") {
        scored = std::move(perturbed);
    } else {
        throw ConfigError("--split must be 'all' or 'test'");
    }
    const Metrics m = evaluate(scored, model);
    const json report = metrics_report(model, m, scored.size(), a.split);
    std::cout << report.dump(2) << "\n";
    if (!a.manifest.empty()) {
        manifest.doc["dataset_hash"] = hex64(dataset_hash(a.data));
        manifest.doc["config"] = to_json(model.config);
        manifest.write(a.manifest);
    }
    return 0;
}

struct HeatmapArgs {
    std::string model, image, out = "heatmap.png", channel, scores, manifest;
    int stride = kDefaultHeatmapStride;
    bool no_perturb = false;
};

int cmd_heatmap(const HeatmapArgs& a, int argc, char** argv) {
    Manifest manifest("heatmap", argc, argv);
    const DetectorModel model = load_model(a.model);
    Tile tile = load_tile(a.image, Label::Unknown);
    if (!a.no_perturb) tile = apply_perturbation(tile, model.config.perturbation);
    const HeatMap map = a.channel.empty() ? compute_heatmap(tile, model, a.stride)
                                          : channel_heatmap(tile, model, parse_channel_id(a.channel), a.stride);
    render_png(map, a.out);
    if (!a.scores.empty()) write_text_file(a.scores, to_json(map).dump() + "\n");
    const Prediction p = predict(tile, model);
    std::cout << json{{"image", a.image},
                      {"label", std::string(to_string(p.label))},
                      {"score", p.score},
                      {"stride", map.stride},
                      {"channel", a.channel.empty() ? json(nullptr) : json(a.channel)},
                      {"out", a.out}}
                     .dump(2)
              << "\n";
    manifest.doc["config"] = to_json(model.config);
    manifest.write(a.manifest.empty() ? sibling(a.out, ".manifest.json") : fs::path(a.manifest));
    return 0;
}

struct SynthArgs {
    std::string out, manifest;
    int n = 200;
    int size = 64;
    std::uint64_t seed = 1;
};

int cmd_synth(const SynthArgs& a, int argc, char** argv) {
    Manifest manifest("synth", argc, argv);
    synth_dataset({a.n, a.seed, a.size}, a.out);
    manifest.doc["seed"] = a.seed;
    manifest.doc["dataset_hash"] = hex64(dataset_hash(a.out));
    fs::path out = fs::path(a.out);
    if (!out.has_filename()) out = out.parent_path();
    manifest.write(a.manifest.empty() ? fs::path(out.string() + ".manifest.json") : fs::path(a.manifest));
    std::cerr << "wrote " << 2 * a.n << " tiles of " << a.size << "x" << a.size << " to " << a.out << "\n";
    return 0;
}

int cmd_size(const std::string& model_path) {
    const DetectorModel model = load_model(model_path);
    const SizeReport r = model_size_report(model);
    std::cout << to_json(r).dump(2) << "\n";
    std::cerr << r.design << ": " << r.selected_channels << " channel(s), filters " << r.filter_params << ", c/w "
              << r.channelwise_params << ", ensemble " << r.ensemble_params << ", total " << r.total << "\n";
    return 0;
}

struct GridArgs {
    std::string data, designs = "B", out, json_out, perturbs, grid = "1,2,3,4,8,all", manifest;
    std::uint64_t seed = 1;
    int max_channels = 48;
};

int cmd_grid(const GridArgs& a, int argc, char** argv) {
    Manifest manifest("grid", argc, argv);
    DetectorConfig base;
    base.seed = a.seed;
    base.max_channels_per_hop = a.max_channels;
    base.channel_grid = parse_grid(a.grid);
    std::vector<PerturbationConfig> grid;
    if (a.perturbs.empty()) {
        grid = standard_perturbation_grid();
    } else {
        std::stringstream ss(a.perturbs);
        std::string item;
        while (std::getline(ss, item, ',')) grid.push_back(parse_perturbation(item));
    }
    const auto designs = parse_designs(a.designs);
    const std::vector<Tile> tiles = load_dataset(a.data);
    manifest.doc["dataset_hash"] = hex64(dataset_hash(a.data));
    manifest.doc["seed"] = a.seed;
    const GridReport report = run_robustness_grid(tiles, base, grid, designs, [](const GridRow& row) {
        std::cerr << to_string(row.perturbation) << " " << row.design << ": F1 " << row.metrics.f1 << "\n";
    });
    const std::string table = render_markdown(report);
    if (!a.out.empty()) write_text_file(a.out, table);
    if (!a.json_out.empty()) write_text_file(a.json_out, to_json(report).dump(2) + "\n");
    if (!a.manifest.empty()) manifest.write(a.manifest);
    std::cout << table;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fake satellite image detection with parallel Saab filter banks"};
    app.require_subcommand(1);

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "Train a detector and report held-out test metrics");
    train_cmd->add_option("--data", train_args.data, "Dataset root with real/ and fake/")->required();
    train_cmd->add_option("--hops", train_args.hops, "Filter banks: any of A,B,C");
    train_cmd->add_option("--out", train_args.out, "Model file");
    train_cmd->add_option("--seed", train_args.seed, "Split and noise seed");
    train_cmd->add_option("--perturb", train_args.perturb, "none | resize:N | awgn:SIGMA | jpeg:QF");
    train_cmd->add_option("--max-channels", train_args.max_channels, "Cap on selected channels per hop");
    train_cmd->add_option("--channel-grid", train_args.grid, "Candidate channel counts, e.g. 1,2,3,4,8,all");
    train_cmd->add_option("--trees", train_args.trees, "Trees per channel-wise classifier");
    train_cmd->add_flag("--retain-all", train_args.retain_all, "Keep every channel classifier (channel heat maps)");
    train_cmd->add_option("--metrics", train_args.metrics, "Metrics report path (default <out>.metrics.json)");
    train_cmd->add_option("--manifest", train_args.manifest, "Run manifest path (default <out>.manifest.json)");

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on a dataset");
    eval_cmd->add_option("--model", eval_args.model, "Model file")->required();
    eval_cmd->add_option("--data", eval_args.data, "Dataset root")->required();
    eval_cmd->add_option("--split", eval_args.split, "all | test (the model's held-out split)");
    eval_cmd->add_option("--manifest", eval_args.manifest, "Run manifest path");

    HeatmapArgs heat_args;
    auto* heat_cmd = app.add_subcommand("heatmap", "Render a real/fake heat map of one tile");
    heat_cmd->add_option("--model", heat_args.model, "Model file")->required();
    heat_cmd->add_option("--image", heat_args.image, "Tile image (PNG or JPEG)")->required();
    heat_cmd->add_option("--stride", heat_args.stride, "Window stride in pixels (1..16)");
    heat_cmd->add_option("--channel", heat_args.channel, "Single channel, e.g. B:26");
    heat_cmd->add_option("--out", heat_args.out, "Output PNG");
    heat_cmd->add_option("--scores", heat_args.scores, "Optional JSON side-car with the raw score grid");
    heat_cmd->add_flag("--no-perturb", heat_args.no_perturb, "Skip the model's input perturbation");
    heat_cmd->add_option("--manifest", heat_args.manifest, "Run manifest path (default <out>.manifest.json)");

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic real/fake dataset");
    synth_cmd->add_option("--out", synth_args.out, "Dataset root")->required();
    synth_cmd->add_option("--n", synth_args.n, "Tiles per class");
    synth_cmd->add_option("--seed", synth_args.seed, "Generator seed");
    synth_cmd->add_option("--size", synth_args.size, "Tile side in pixels (multiple of 16)");
    synth_cmd->add_option("--manifest", synth_args.manifest, "Run manifest path (default <out>.manifest.json)");

    std::string size_model;
    auto* size_cmd = app.add_subcommand("size", "Print the model-size breakdown");
    size_cmd->add_option("--model", size_model, "Model file")->required();

    GridArgs grid_args;
    auto* grid_cmd = app.add_subcommand("grid", "Run the perturbation robustness grid");
    grid_cmd->add_option("--data", grid_args.data, "Dataset root")->required();
    grid_cmd->add_option("--designs", grid_args.designs, "Designs separated by ';', e.g. 'A;B;C;A,B,C'");
    grid_cmd->add_option("--perturbs", grid_args.perturbs, "Comma-separated settings (default: full grid)");
    grid_cmd->add_option("--seed", grid_args.seed, "Split and noise seed");
    grid_cmd->add_option("--max-channels", grid_args.max_channels, "Cap on selected channels per hop");
    grid_cmd->add_option("--channel-grid", grid_args.grid, "Candidate channel counts");
    grid_cmd->add_option("--out", grid_args.out, "Markdown report path");
    grid_cmd->add_option("--json", grid_args.json_out, "JSON report path");
    grid_cmd->add_option("--manifest", grid_args.manifest, "Run manifest path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*train_cmd) return cmd_train(train_args, argc, argv);
        if (*eval_cmd) return cmd_eval(eval_args, argc, argv);
        if (*heat_cmd) return cmd_heatmap(heat_args, argc, argv);
        if (*synth_cmd) return cmd_synth(synth_args, argc, argv);
        if (*size_cmd) return cmd_size(size_model);
        if (*grid_cmd) return cmd_grid(grid_args, argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
