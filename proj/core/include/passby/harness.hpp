#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "passby/detection.hpp"
#include "passby/features.hpp"
#include "passby/manifest.hpp"
#include "passby/speed.hpp"
#include "passby/svr.hpp"

namespace passby {

// Everything a cross-validation run depends on. All randomness is derived
// from master_seed via fixed streams, so a config + manifest pair fully
// determines the report.
struct ExperimentConfig {
  StftConfig stft;
  MelConfig mel;
  ContextSpec context;
  CvmdParams cvmd;
  std::vector<int> stage1_hidden = {64, 64};
  std::vector<int> stage2_hidden = {31, 15};
  double stage1_l2 = 1e-4;
  double stage2_l2 = 5e-6;
  int stage2_window = 31;
  TrainConfig stage1_train;  // seed fields are ignored; seeds are derived
  TrainConfig stage2_train;
  bool two_stage = true;
  SvrConfig svr;
  std::vector<SpeedFeatureSpec> speed_specs = {
      default_speed_spec(FeatureKind::MelSpectrogram),
      default_speed_spec(FeatureKind::LogMelSpectrogram),
      default_speed_spec(FeatureKind::Mfcc)};
  int iterations = 10;
  double train_fraction = 0.8;        // train vs validation within the pool
  double noise_train_fraction = 0.5;  // noise clips reserved for training
  int expected_sample_rate = 44100;   // 0 disables the check
  double expected_duration_s = 10.0;  // 0 disables the check
  int max_parallel_folds = 1;
  std::uint64_t master_seed = 0;
};

// Raw outcome for one test clip of one fold.
struct ClipRecord {
  std::string path;  // file name only
  bool has_vehicle = false;
  std::optional<double> speed_kmh;  // ground truth
  std::optional<double> t_cpa_s;
  double t_cpa_hat = 0.0;
  double min_cvmd = 0.0;
  bool vehicle_present = false;
  double one_stage_t_cpa_hat = 0.0;
  double one_stage_min_cvmd = 0.0;
  std::vector<double> speed_estimates;  // one per config.speed_specs entry
};

struct FoldResult {
  int iteration = 0;
  int fold = 0;
  std::string test_vehicle;
  std::vector<std::string> train_clips;  // membership fingerprint
  std::vector<std::string> val_clips;
  double presence_threshold = 0.0;
  double calibration_gap = 0.0;        // on training-side minima
  std::optional<double> test_gap;      // min test-noise minima - max test-vehicle minima
  std::vector<ClipRecord> records;
};

// Per-vehicle metric row (averaged over iterations); mirrors one table line.
struct VehicleRow {
  std::string vehicle_id;
  std::vector<double> rmse_kmh;      // per speed spec
  std::vector<double> acc_exact;     // class distance 0
  std::vector<double> acc_within1;   // class distance <= 1
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<std::string> vehicle_order;
  std::vector<FoldResult> folds;  // iterations x folds, in run order
  std::vector<VehicleRow> vehicles;
  VehicleRow average;  // unweighted mean over vehicles
  std::vector<double> detection_offsets;  // t_cpa_hat - truth, vehicle test clips
  std::vector<double> one_stage_offsets;
  double offset_mean = 0.0;
  double offset_std = 0.0;
  double one_stage_offset_mean = 0.0;
  double one_stage_offset_std = 0.0;
  std::vector<double> vehicle_minima;  // pooled test-clip CVMD minima
  std::vector<double> noise_minima;
  double presence_rate = 0.0;      // vehicle test clips flagged present
  double noise_reject_rate = 0.0;  // noise test clips flagged absent
  int positive_gap_folds = 0;
  int folds_with_noise = 0;  // folds whose test side had noise clips
};

// Leave-one-vehicle-out cross-validation over manifest clips, repeated
// config.iterations times with derived seeds.
ExperimentReport cross_validate(const Manifest& manifest,
                                const ExperimentConfig& cfg);

// detection_offset_histogram.csv and cvmd_minima_histogram.csv; the minima
// histogram carries the separating interval in a leading '#' metadata line.
void export_histograms(const ExperimentReport& report,
                       const std::filesystem::path& dir);

// rmse.csv and accuracy.csv, one row per vehicle plus an Average row.
void export_tables(const ExperimentReport& report,
                   const std::filesystem::path& dir);

double mean_of(const std::vector<double>& values);
double std_of(const std::vector<double>& values);  // population form

}  // namespace passby
