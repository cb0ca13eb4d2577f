#pragma once

#include <nlohmann/json.hpp>

#include "passby/detection.hpp"
#include "passby/harness.hpp"
#include "passby/neural.hpp"
#include "passby/scaling.hpp"
#include "passby/speed.hpp"
#include "passby/svr.hpp"
#include "passby/synth.hpp"

namespace passby {

// Insertion-ordered JSON keeps serialized artifacts byte-stable across runs.
using ojson = nlohmann::ordered_json;

// Every schema carries a "schema" tag ("<name>/<version>"); loaders reject
// unknown tags with format_error. Doubles round-trip bit-exactly.

ojson scaler_to_json(const Scaler& scaler);
Scaler scaler_from_json(const ojson& j);

ojson fcnn_to_json(const Fcnn& net);
Fcnn fcnn_from_json(const ojson& j);

ojson svr_to_json(const SvrModel& model);
SvrModel svr_from_json(const ojson& j);

ojson detector_to_json(const DetectionModel& model);
DetectionModel detector_from_json(const ojson& j);

struct SpeedModelBundle {
  SpeedFeatureSpec spec;
  StftConfig stft;
  MelConfig mel;
  SvrModel svr;
};

ojson speed_bundle_to_json(const SpeedModelBundle& bundle);
SpeedModelBundle speed_bundle_from_json(const ojson& j);

// Partial configs are allowed: absent keys keep the published defaults.
ojson experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const ojson& j);

ojson experiment_report_to_json(const ExperimentReport& report);
ExperimentReport experiment_report_from_json(const ojson& j);

// Synthesis specs for the CLI.
ojson dataset_spec_to_json(const SynthDatasetSpec& spec);
SynthDatasetSpec dataset_spec_from_json(const ojson& j);

void save_json(const std::filesystem::path& path, const ojson& j);
ojson load_json(const std::filesystem::path& path);

}  // namespace passby
