#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "fakesat/detector.hpp"

namespace fakesat {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const SaabFilterBank& bank);
SaabFilterBank saab_bank_from_json(const nlohmann::json& j);

nlohmann::json to_json(const StumpEnsemble& model);
StumpEnsemble stump_ensemble_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DetectorConfig& config);
DetectorConfig detector_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Metrics& metrics);
nlohmann::json to_json(const SizeReport& report);

/// Self-describing model document, "format_version": 1.
nlohmann::json to_json(const DetectorModel& model);
/// Throws FormatError on a version mismatch or malformed document.
DetectorModel detector_model_from_json(const nlohmann::json& j);

/// Canonical text form: two-space indent, trailing newline. Identical models give
/// identical bytes.
std::string serialize_model(const DetectorModel& model);

void save_model(const std::filesystem::path& path, const DetectorModel& model);
DetectorModel load_model(const std::filesystem::path& path);

/// Writes `text` to `path`, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace fakesat
