#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakesat/detector.hpp"

namespace fakesat {

struct GridRow {
    PerturbationConfig perturbation;
    std::string design;
    int tile_size = 0;
    Metrics metrics;
    SizeReport size;
};

struct GridReport {
    std::vector<GridRow> rows;
};

using GridProgress = std::function<void(const GridRow&)>;

/// Trains and tests one detector per (perturbation, design). Every run starts from
/// `base` with its perturbation and hops replaced; the AWGN seed follows base.seed.
GridReport run_robustness_grid(const std::vector<Tile>& dataset, const DetectorConfig& base,
                               std::span<const PerturbationConfig> grid,
                               std::span<const std::vector<Hop>> designs, const GridProgress& progress = {});

/// Markdown table: setting, tile size, design, F1, precision, recall, model size.
std::string render_markdown(const GridReport& report);

nlohmann::json to_json(const GridReport& report);

} // namespace fakesat
