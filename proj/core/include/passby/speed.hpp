#pragma once

#include <Eigen/Dense>
#include <vector>

#include "passby/detection.hpp"
#include "passby/features.hpp"
#include "passby/svr.hpp"

namespace passby {

// CPA-centered feature block. band_lo/band_hi are inclusive and interpreted
// relative to index_base (0 keeps them as matrix indices).
struct SpeedFeatureSpec {
  FeatureKind representation = FeatureKind::MelSpectrogram;
  int time_window = 91;  // odd frame count centered at the CPA frame
  int band_lo = 3;
  int band_hi = 31;
  int index_base = 0;
};

// Published tunings per representation: MS 91 x [3,31], LMS 91 x [2,20],
// MFCC 61 x [1,31].
SpeedFeatureSpec default_speed_spec(FeatureKind kind);

struct SpeedEstimate {
  double speed_kmh = 0.0;
  int class_index = 0;
};

// 10 km/h classes starting at 25 km/h: clamp(floor((v - 25)/10), 0, 7).
int speed_class(double speed_kmh);

struct SpeedLabeledClip {
  FeatureMatrix features;  // kind must match the spec's representation
  double speed_kmh = 0.0;
  double t_cpa_s = 0.0;
};

// Nearest frame to a time instant, clamped to the matrix bounds.
Eigen::Index frame_at_time(const FeatureMatrix& fm, double t_s);

// Time-major flattened (time_window x selected bands) block centered at
// cpa_frame, edge-replicated at clip boundaries.
Eigen::VectorXd extract_speed_features(const FeatureMatrix& fm,
                                       Eigen::Index cpa_frame,
                                       const SpeedFeatureSpec& spec);

// Trains on features extracted at the ground-truth CPA frames.
SvrModel train_speed_model(const std::vector<SpeedLabeledClip>& clips,
                           const SpeedFeatureSpec& spec, const SvrConfig& svr);

// Extracts features at the detected CPA; requires detection.vehicle_present.
SpeedEstimate predict_speed(const SvrModel& model, const FeatureMatrix& fm,
                            const DetectionResult& detection,
                            const SpeedFeatureSpec& spec);

double rmse(const std::vector<double>& estimates,
            const std::vector<double>& truths);

// Fraction of pairs whose class distance is <= delta.
double class_accuracy(const std::vector<int>& estimated,
                      const std::vector<int>& truth, int delta);

}  // namespace passby
