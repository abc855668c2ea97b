#include "fakesat/robustness.hpp"

#include <cstdio>
#include <sstream>

#include "fakesat/model_io.hpp"

namespace fakesat {

GridReport run_robustness_grid(const std::vector<Tile>& dataset, const DetectorConfig& base,
                               std::span<const PerturbationConfig> grid,
                               std::span<const std::vector<Hop>> designs, const GridProgress& progress) {
    GridReport report;
    for (const PerturbationConfig& p : grid) {
        for (const auto& hops : designs) {
            DetectorConfig config = base;
            config.hops = hops;
            config.perturbation = p;
            if (p.kind == PerturbationConfig::Kind::Awgn) config.perturbation.seed = base.seed;
            const TrainOutcome outcome = train(config, dataset);
            GridRow row{p, design_name(hops), outcome.model.tile_height, evaluate(outcome.split.test, outcome.model),
                        model_size_report(outcome.model)};
            if (progress) progress(row);
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

std::string render_markdown(const GridReport& report) {
    std::ostringstream os;
    os << "| Setting | Tile size | Design | F1 score | Precision | Recall | Selected | Model size |\n";
    os << "|---|---|---|---|---|---|---|---|\n";
    char buf[64];
    const auto pct = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
        return std::string(buf);
    };
    for (const GridRow& r : report.rows) {
        os << "| " << to_string(r.perturbation) << " | " << r.tile_size << "x" << r.tile_size << " | " << r.design
           << " | " << pct(r.metrics.f1) << " | " << pct(r.metrics.precision) << " | " << pct(r.metrics.recall)
           << " | " << r.size.selected_channels << " | " << r.size.total << " |\n";
    }
    return os.str();
}

nlohmann::json to_json(const GridReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const GridRow& r : report.rows) {
        rows.push_back({{"perturbation", to_string(r.perturbation)},
                        {"design", r.design},
                        {"tile_size", r.tile_size},
                        {"metrics", to_json(r.metrics)},
                        {"size", to_json(r.size)}});
    }
    return {{"rows", rows}};
}

} // namespace fakesat
