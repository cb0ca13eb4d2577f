#include "passby/speed.hpp"

#include <algorithm>
#include <cmath>

#include "passby/error.hpp"

namespace passby {

namespace {

struct BandRange {
  Eigen::Index lo;
  Eigen::Index hi;  // inclusive
};

BandRange resolve_bands(const SpeedFeatureSpec& spec, Eigen::Index bands) {
  if (spec.time_window < 1 || spec.time_window % 2 == 0)
    throw config_error("time_window must be odd and >= 1");
  const Eigen::Index lo = spec.band_lo - spec.index_base;
  const Eigen::Index hi = spec.band_hi - spec.index_base;
  if (lo < 0 || lo > hi || hi >= bands)
    throw config_error("band range [" + std::to_string(spec.band_lo) + "," +
                       std::to_string(spec.band_hi) + "] (base " +
                       std::to_string(spec.index_base) +
                       ") does not fit a matrix with " + std::to_string(bands) +
                       " bands");
  return {lo, hi};
}

}  // namespace

SpeedFeatureSpec default_speed_spec(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::MelSpectrogram:
      return {kind, 91, 3, 31, 0};
    case FeatureKind::LogMelSpectrogram:
      return {kind, 91, 2, 20, 0};
    case FeatureKind::Mfcc:
      return {kind, 61, 1, 31, 0};
  }
  throw config_error("unknown feature kind");
}

int speed_class(double speed_kmh) {
  const int raw = static_cast<int>(std::floor((speed_kmh - 25.0) / 10.0));
  return std::clamp(raw, 0, 7);
}

Eigen::Index frame_at_time(const FeatureMatrix& fm, double t_s) {
  if (fm.values.rows() < 1) throw validation_error("empty feature matrix");
  if (!(fm.frame_period_s > 0)) throw validation_error("invalid frame period");
  const auto frame = std::lround((t_s - fm.t0_s) / fm.frame_period_s);
  return std::clamp<Eigen::Index>(frame, 0, fm.values.rows() - 1);
}

Eigen::VectorXd extract_speed_features(const FeatureMatrix& fm,
                                       Eigen::Index cpa_frame,
                                       const SpeedFeatureSpec& spec) {
  if (fm.kind != spec.representation)
    throw config_error("feature matrix kind does not match the speed spec");
  const auto [lo, hi] = resolve_bands(spec, fm.values.cols());
  const Eigen::Index frames = fm.values.rows();
  if (frames < 1) throw validation_error("empty feature matrix");
  const Eigen::Index width = hi - lo + 1;
  const int half = spec.time_window / 2;

  Eigen::VectorXd out(static_cast<Eigen::Index>(spec.time_window) * width);
  Eigen::Index at = 0;
  for (int k = -half; k <= half; ++k) {
    const Eigen::Index src =
        std::clamp<Eigen::Index>(cpa_frame + k, 0, frames - 1);
    out.segment(at, width) = fm.values.row(src).segment(lo, width).transpose();
    at += width;
  }
  return out;
}

SvrModel train_speed_model(const std::vector<SpeedLabeledClip>& clips,
                           const SpeedFeatureSpec& spec, const SvrConfig& svr) {
  if (clips.size() < 2)
    throw validation_error("speed training needs at least two clips");
  Eigen::MatrixXd x;
  Eigen::VectorXd y(static_cast<Eigen::Index>(clips.size()));
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const auto& clip = clips[i];
    const Eigen::VectorXd features = extract_speed_features(
        clip.features, frame_at_time(clip.features, clip.t_cpa_s), spec);
    if (x.size() == 0)
      x.resize(static_cast<Eigen::Index>(clips.size()), features.size());
    if (features.size() != x.cols())
      throw shape_error("clips disagree on feature dimensionality");
    x.row(static_cast<Eigen::Index>(i)) = features.transpose();
    y(static_cast<Eigen::Index>(i)) = clip.speed_kmh;
  }
  return svr_train(x, y, svr);
}

SpeedEstimate predict_speed(const SvrModel& model, const FeatureMatrix& fm,
                            const DetectionResult& detection,
                            const SpeedFeatureSpec& spec) {
  if (!detection.vehicle_present)
    throw validation_error("speed prediction requires a detected vehicle");
  const Eigen::VectorXd features = extract_speed_features(
      fm, frame_at_time(fm, detection.t_cpa_hat), spec);
  SpeedEstimate est;
  est.speed_kmh = svr_predict(model, features);
  est.class_index = speed_class(est.speed_kmh);
  return est;
}

double rmse(const std::vector<double>& estimates,
            const std::vector<double>& truths) {
  if (estimates.size() != truths.size())
    throw shape_error("estimate/truth lengths differ");
  if (estimates.empty()) throw validation_error("rmse of empty lists");
  double acc = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double diff = estimates[i] - truths[i];
    acc += diff * diff;
  }
  return std::sqrt(acc / static_cast<double>(estimates.size()));
}

double class_accuracy(const std::vector<int>& estimated,
                      const std::vector<int>& truth, int delta) {
  if (estimated.size() != truth.size())
    throw shape_error("estimate/truth lengths differ");
  if (estimated.empty()) throw validation_error("accuracy of empty lists");
  if (delta < 0) throw config_error("delta must be nonnegative");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < estimated.size(); ++i)
    if (std::abs(estimated[i] - truth[i]) <= delta) ++hits;
  return static_cast<double>(hits) / static_cast<double>(estimated.size());
}

}  // namespace passby
