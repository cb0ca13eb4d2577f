#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "passby/audio.hpp"
#include "passby/features.hpp"
#include "passby/neural.hpp"
#include "passby/scaling.hpp"

namespace passby {

// Clip threshold of the regression target, seconds.
struct CvmdParams {
  double t_d = 0.75;
};

// Context frames fed to stage 1: offsets {-q*stride, ..., 0, ..., +q*stride}.
struct ContextSpec {
  int q = 12;
  int stride = 3;
};

struct CvmdCurve {
  Eigen::VectorXd values;  // seconds, one per frame
  double frame_period_s = 0.0;
  double t0_s = 0.0;
};

struct DetectorConfig {
  StftConfig stft;
  MelConfig mel;
  ContextSpec context;
  CvmdParams cvmd;
  std::vector<int> stage1_hidden = {64, 64};
  std::vector<int> stage2_hidden = {31, 15};
  double stage1_l2 = 1e-4;
  double stage2_l2 = 5e-6;
  int stage2_window = 31;  // consecutive stage-1 outputs, must be odd
  TrainConfig stage1_train;
  TrainConfig stage2_train;
  bool two_stage = true;
  std::uint64_t seed = 0;  // per-stage init/shuffle seeds are derived from this
};

struct DetectionModel {
  Fcnn stage1;
  Fcnn stage2;  // empty when two_stage is false
  Scaler stage1_scaler;
  Scaler stage2_scaler;
  ContextSpec context;
  CvmdParams cvmd;
  StftConfig stft;
  MelConfig mel;
  int stage2_window = 31;
  bool two_stage = true;
  double presence_threshold = 0.375;  // seconds; overwritten by calibration
};

struct DetectionResult {
  double t_cpa_hat = 0.0;
  double min_cvmd = 0.0;
  bool vehicle_present = false;
};

// Feature matrix plus the clip's CPA label; no value means no vehicle, which
// trains against the constant target t_d.
struct LabeledClip {
  FeatureMatrix lms;
  std::optional<double> t_cpa_s;
};

// Clipped time-to-CPA: |t - t_cpa| below t_d, else t_d.
double cvmd_target(double t_s, double t_cpa_s, const CvmdParams& params);

// Per-frame targets; std::nullopt yields the constant t_d curve.
Eigen::VectorXd cvmd_targets(Eigen::Index frames, double frame_period_s,
                             double t0_s, std::optional<double> t_cpa_s,
                             const CvmdParams& params);

// Concatenated band vectors at the context offsets, edge-replicated.
Eigen::VectorXd assemble_context(const FeatureMatrix& lms, Eigen::Index frame,
                                 const ContextSpec& spec);

// One row per frame of assemble_context output.
Eigen::MatrixXd assemble_context_matrix(const FeatureMatrix& lms,
                                        const ContextSpec& spec);

// Sliding centered windows over a curve (stride 1, edge-replicated); row f is
// the window centered at frame f.
Eigen::MatrixXd assemble_windows(const Eigen::VectorXd& curve, int window);

// Trains stage 1 on (context, target) pairs pooled over all training clips,
// then stage 2 on windows of stage-1's raw (unclamped) outputs with the same
// per-frame targets. Scalers are fit on the training split only.
DetectionModel train_detector(const std::vector<LabeledClip>& train,
                              const std::vector<LabeledClip>& val,
                              const DetectorConfig& cfg);

// Full pipeline curve, clamped to [0, t_d].
CvmdCurve predict_cvmd(const DetectionModel& model, const FeatureMatrix& lms);

// Stage-1-only curve (ablation), clamped to [0, t_d].
CvmdCurve predict_cvmd_stage1(const DetectionModel& model, const FeatureMatrix& lms);

// Global minimum with earliest-frame tie-break.
std::pair<double, double> estimate_cpa(const CvmdCurve& curve);  // (t_cpa_hat, min)

struct ThresholdCalibration {
  double threshold = 0.0;  // vehicle_present := min_cvmd < threshold
  double gap = 0.0;        // min(noise minima) - max(vehicle minima)
};

// Midpoint of the separating interval when the histograms are disjoint,
// otherwise the misclassification-minimizing cut (ties to the smaller value).
ThresholdCalibration calibrate_presence_threshold(
    const std::vector<double>& vehicle_minima,
    const std::vector<double>& noise_minima);

DetectionResult detect_from_features(const DetectionModel& model,
                                     const FeatureMatrix& lms);

// Computes LMS features with the model's STFT/mel configuration, then detects.
DetectionResult detect(const DetectionModel& model, const AudioClip& clip);

void write_cvmd_csv(const std::filesystem::path& path, const CvmdCurve& curve);

}  // namespace passby
