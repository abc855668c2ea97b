#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fakesat/dataset.hpp"
#include "fakesat/errors.hpp"
#include "fakesat/model_io.hpp"

using namespace fakesat;
namespace fs = std::filesystem;

namespace {

const TrainOutcome& trained() {
    static const TrainOutcome out = [] {
        DetectorConfig config;
        config.hops = {Hop::A, Hop::C};
        config.boost.n_trees = 8;
        config.perturbation = PerturbationConfig::awgn(0.02, 3);
        return train(config, synth_tiles({12, 4, 32}));
    }();
    return out;
}

fs::path scratch() {
    const auto dir = fs::temp_directory_path() / "fakesat_test_model_io";
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("model survives a save and load") {
    const DetectorModel& m = trained().model;
    const auto path = scratch() / "m.json";
    save_model(path, m);
    const DetectorModel back = load_model(path);
    CHECK(back.config == m.config);
    CHECK(back.tile_height == m.tile_height);
    CHECK(back.selected == m.selected);
    CHECK(back.ensemble == m.ensemble);
    REQUIRE(back.banks.size() == m.banks.size());
    for (std::size_t i = 0; i < m.banks.size(); ++i) {
        CHECK(back.banks[i].bank.kernels == m.banks[i].bank.kernels);
        CHECK(back.banks[i].bank.energies == m.banks[i].bank.energies);
        CHECK(back.banks[i].bank.ac_rank == m.banks[i].bank.ac_rank);
    }
    for (const Tile& t : trained().split.test) CHECK(predict(t, back).score == predict(t, m).score);
    CHECK(model_size_report(back).total == model_size_report(m).total);
}

TEST_CASE("serialization is canonical") {
    const std::string text = serialize_model(trained().model);
    CHECK(text.back() == '\n');
    const auto path = scratch() / "c.json";
    write_text_file(path, text);
    CHECK(serialize_model(load_model(path)) == text);
}

TEST_CASE("pieces round trip on their own") {
    const DetectorModel& m = trained().model;
    CHECK(stump_ensemble_from_json(to_json(m.ensemble)) == m.ensemble);
    CHECK(detector_config_from_json(to_json(m.config)) == m.config);
    const SaabFilterBank bank = saab_bank_from_json(to_json(m.banks[0].bank));
    CHECK(bank.kernels == m.banks[0].bank.kernels);
}

TEST_CASE("unsupported or malformed documents raise FormatError") {
    auto j = to_json(trained().model);
    j["format_version"] = 2;
    CHECK_THROWS_AS(detector_model_from_json(j), FormatError);
    CHECK_THROWS_AS(detector_model_from_json(nlohmann::json::array()), FormatError);
    auto k = to_json(trained().model);
    k.erase("ensemble");
    CHECK_THROWS_AS(detector_model_from_json(k), FormatError);

    const auto path = scratch() / "bad.json";
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS(load_model(path), FormatError);
    CHECK_THROWS_AS(load_model(scratch() / "missing.json"), IoError);
}
