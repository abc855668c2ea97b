#include "fakesat/model_io.hpp"

#include <fstream>
#include <sstream>

#include "fakesat/errors.hpp"

namespace fakesat {

using nlohmann::json;

namespace {

template <class T>
T get(const json& j, const char* key) {
    if (!j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad field '") + key + "': " + e.what());
    }
}

const char* kind_name(PerturbationConfig::Kind k) {
    switch (k) {
    case PerturbationConfig::Kind::None: return "none";
    case PerturbationConfig::Kind::Resize: return "resize";
    case PerturbationConfig::Kind::Awgn: return "awgn";
    case PerturbationConfig::Kind::Jpeg: return "jpeg";
    }
    return "none";
}

PerturbationConfig::Kind kind_from_name(const std::string& s) {
    if (s == "none") return PerturbationConfig::Kind::None;
    if (s == "resize") return PerturbationConfig::Kind::Resize;
    if (s == "awgn") return PerturbationConfig::Kind::Awgn;
    if (s == "jpeg") return PerturbationConfig::Kind::Jpeg;
    throw FormatError("unknown perturbation kind '" + s + "'");
}

Hop hop_from_json(const json& j) {
    const auto s = j.get<std::string>();
    if (s.size() != 1) throw FormatError("bad hop '" + s + "'");
    return parse_hop(s[0]);
}

json channel_json(const ChannelId& id) { return {{"hop", std::string(1, hop_letter(id.hop))}, {"channel", id.channel}}; }

ChannelId channel_from_json(const json& j) {
    return {hop_from_json(j.at("hop")), get<int>(j, "channel")};
}

} // namespace

json to_json(const SaabFilterBank& bank) {
    json kernels = json::array();
    for (int k = 0; k < bank.dim(); ++k) {
        const auto row = bank.kernel(k);
        kernels.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return {{"config", {{"size", bank.config.size}, {"channels", bank.config.channels}}},
            {"kernels", kernels},
            {"energies", bank.energies},
            {"ac_eigenvalues", bank.ac_eigenvalues},
            {"ac_rank", bank.ac_rank}};
}

SaabFilterBank saab_bank_from_json(const json& j) {
    SaabFilterBank bank;
    const json& cfg = j.at("config");
    bank.config = {get<int>(cfg, "size"), get<int>(cfg, "channels")};
    for (const auto& row : j.at("kernels")) {
        const auto values = row.get<std::vector<double>>();
        bank.kernels.insert(bank.kernels.end(), values.begin(), values.end());
    }
    bank.energies = get<std::vector<double>>(j, "energies");
    bank.ac_eigenvalues = get<std::vector<double>>(j, "ac_eigenvalues");
    bank.ac_rank = get<int>(j, "ac_rank");
    try {
        validate_bank(bank);
    } catch (const ConfigMismatch& e) {
        throw FormatError(e.what());
    }
    return bank;
}

json to_json(const StumpEnsemble& model) {
    json trees = json::array();
    for (const Stump& t : model.trees) trees.push_back(json::array({t.feature, t.threshold, t.left_value, t.right_value}));
    return {{"base_score", model.base_score},
            {"learning_rate", model.learning_rate},
            {"lambda", model.lambda},
            {"n_features", model.n_features},
            {"trees", trees}};
}

StumpEnsemble stump_ensemble_from_json(const json& j) {
    StumpEnsemble m;
    m.base_score = get<double>(j, "base_score");
    m.learning_rate = get<double>(j, "learning_rate");
    m.lambda = get<double>(j, "lambda");
    m.n_features = get<std::size_t>(j, "n_features");
    for (const auto& rec : j.at("trees")) {
        if (!rec.is_array() || rec.size() != 4) throw FormatError("stump records need 4 fields");
        Stump s{rec[0].get<int>(), rec[1].get<double>(), rec[2].get<double>(), rec[3].get<double>()};
        if (s.feature < 0 || static_cast<std::size_t>(s.feature) >= std::max<std::size_t>(m.n_features, 1)) {
            throw FormatError("stump feature index out of range");
        }
        m.trees.push_back(s);
    }
    return m;
}

json to_json(const DetectorConfig& c) {
    json hops = json::array();
    for (Hop h : c.hops) hops.push_back(std::string(1, hop_letter(h)));
    return {{"hops", hops},
            {"max_channels_per_hop", c.max_channels_per_hop},
            {"channel_grid", c.channel_grid},
            {"boost",
             {{"n_trees", c.boost.n_trees},
              {"learning_rate", c.boost.learning_rate},
              {"lambda", c.boost.lambda},
              {"min_child_weight", c.boost.min_child_weight}}},
            {"split", {{"train", c.split.train}, {"val", c.split.val}, {"test", c.split.test}}},
            {"seed", c.seed},
            {"perturbation",
             {{"kind", kind_name(c.perturbation.kind)},
              {"target_size", c.perturbation.target_size},
              {"sigma", c.perturbation.sigma},
              {"quality", c.perturbation.quality},
              {"seed", c.perturbation.seed}}},
            {"retain_all_channels", c.retain_all_channels}};
}

DetectorConfig detector_config_from_json(const json& j) {
    DetectorConfig c;
    c.hops.clear();
    for (const auto& h : j.at("hops")) c.hops.push_back(hop_from_json(h));
    c.max_channels_per_hop = get<int>(j, "max_channels_per_hop");
    c.channel_grid = get<std::vector<int>>(j, "channel_grid");
    const json& b = j.at("boost");
    c.boost = {get<int>(b, "n_trees"), get<double>(b, "learning_rate"), get<double>(b, "lambda"),
               get<double>(b, "min_child_weight")};
    const json& s = j.at("split");
    c.split = {get<double>(s, "train"), get<double>(s, "val"), get<double>(s, "test")};
    c.seed = get<std::uint64_t>(j, "seed");
    const json& p = j.at("perturbation");
    c.perturbation.kind = kind_from_name(get<std::string>(p, "kind"));
    c.perturbation.target_size = get<int>(p, "target_size");
    c.perturbation.sigma = get<double>(p, "sigma");
    c.perturbation.quality = get<int>(p, "quality");
    c.perturbation.seed = get<std::uint64_t>(p, "seed");
    c.retain_all_channels = get<bool>(j, "retain_all_channels");
    return c;
}

json to_json(const Metrics& m) {
    return {{"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn}, {"tn", m.tn},
            {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

json to_json(const SizeReport& r) {
    return {{"design", r.design},
            {"selected_channels", r.selected_channels},
            {"filter_params", r.filter_params},
            {"channelwise_params", r.channelwise_params},
            {"ensemble_params", r.ensemble_params},
            {"total", r.total}};
}

json to_json(const DetectorModel& model) {
    json banks = json::array();
    for (const auto& b : model.banks) {
        json jb = to_json(b.bank);
        jb["hop"] = std::string(1, hop_letter(b.hop));
        banks.push_back(std::move(jb));
    }
    json classifiers = json::array();
    for (const auto& c : model.classifiers) {
        json jc = channel_json(c.id);
        jc["model"] = to_json(c.model);
        classifiers.push_back(std::move(jc));
    }
    json selected = json::array();
    for (const auto& id : model.selected) selected.push_back(channel_json(id));
    json report = json::array();
    for (const auto& s : model.channel_report) {
        json js = channel_json(s.id);
        js["f1_train"] = s.f1_train;
        js["f1_val"] = s.f1_val;
        js["energy"] = s.energy;
        js["degenerate"] = s.degenerate;
        report.push_back(std::move(js));
    }
    json sweep = json::array();
    for (const auto& p : model.sweep) sweep.push_back({{"n_channels", p.n_channels}, {"f1_val", p.f1_val}});
    return {{"format_version", kModelFormatVersion},
            {"config", to_json(model.config)},
            {"tile_height", model.tile_height},
            {"tile_width", model.tile_width},
            {"banks", banks},
            {"classifiers", classifiers},
            {"selected", selected},
            {"ensemble", to_json(model.ensemble)},
            {"channel_report", report},
            {"sweep", sweep}};
}

DetectorModel detector_model_from_json(const json& j) {
    if (!j.is_object() || !j.contains("format_version")) throw FormatError("not a model document");
    const int version = get<int>(j, "format_version");
    if (version != kModelFormatVersion) {
        throw FormatError("model format_version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(kModelFormatVersion) + ")");
    }
    try {
        DetectorModel m;
        m.config = detector_config_from_json(j.at("config"));
        m.tile_height = get<int>(j, "tile_height");
        m.tile_width = get<int>(j, "tile_width");
        for (const auto& jb : j.at("banks")) m.banks.push_back({hop_from_json(jb.at("hop")), saab_bank_from_json(jb)});
        for (const auto& jc : j.at("classifiers"))
            m.classifiers.push_back({channel_from_json(jc), stump_ensemble_from_json(jc.at("model"))});
        for (const auto& js : j.at("selected")) m.selected.push_back(channel_from_json(js));
        m.ensemble = stump_ensemble_from_json(j.at("ensemble"));
        for (const auto& js : j.at("channel_report")) {
            m.channel_report.push_back({channel_from_json(js), get<double>(js, "f1_train"), get<double>(js, "f1_val"),
                                        get<double>(js, "energy"), get<bool>(js, "degenerate")});
        }
        for (const auto& jp : j.at("sweep")) m.sweep.push_back({get<std::size_t>(jp, "n_channels"), get<double>(jp, "f1_val")});
        return m;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed model: ") + e.what());
    } catch (const ConfigError& e) {
        throw FormatError(std::string("malformed model: ") + e.what());
    }
}

std::string serialize_model(const DetectorModel& model) { return to_json(model).dump(2) + "\n"; }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

void save_model(const std::filesystem::path& path, const DetectorModel& model) {
    write_text_file(path, serialize_model(model));
}

DetectorModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return detector_model_from_json(j);
}

} // namespace fakesat
