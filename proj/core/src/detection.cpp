#include "passby/detection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "passby/csv.hpp"
#include "passby/error.hpp"
#include "passby/rng.hpp"

namespace passby {

namespace {

void check_context(const ContextSpec& spec) {
  if (spec.q < 0) throw config_error("context q must be >= 0");
  if (spec.stride < 1) throw config_error("context stride must be >= 1");
}

void check_params(const CvmdParams& params) {
  if (!(params.t_d > 0)) throw config_error("t_d must be positive");
}

Eigen::Index clamp_frame(Eigen::Index frame, Eigen::Index frames) {
  return std::clamp<Eigen::Index>(frame, 0, frames - 1);
}

// Stacked per-clip training rows for one stage.
struct StackedSet {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;                  // one column
  std::vector<Eigen::Index> offsets;  // row offset of each clip
};

StackedSet stack_stage1(const std::vector<LabeledClip>& clips,
                        const ContextSpec& context, const CvmdParams& params) {
  Eigen::Index rows = 0;
  for (const auto& clip : clips) rows += clip.lms.values.rows();
  const Eigen::Index dims =
      (2 * static_cast<Eigen::Index>(context.q) + 1) * clips.front().lms.values.cols();

  StackedSet set;
  set.x.resize(rows, dims);
  set.y.resize(rows, 1);
  Eigen::Index at = 0;
  for (const auto& clip : clips) {
    if (clip.lms.kind != FeatureKind::LogMelSpectrogram)
      throw validation_error("detector training expects LMS features");
    const Eigen::MatrixXd ctx = assemble_context_matrix(clip.lms, context);
    if (ctx.cols() != dims)
      throw shape_error("clips disagree on feature dimensionality");
    set.offsets.push_back(at);
    set.x.middleRows(at, ctx.rows()) = ctx;
    set.y.col(0).segment(at, ctx.rows()) =
        cvmd_targets(ctx.rows(), clip.lms.frame_period_s, clip.lms.t0_s,
                     clip.t_cpa_s, params);
    at += ctx.rows();
  }
  return set;
}

// Raw (unclamped) stage-1 outputs for rows already standardized.
Eigen::VectorXd stage1_raw(const Fcnn& stage1, const Eigen::MatrixXd& scaled_ctx) {
  return predict(stage1, scaled_ctx).col(0);
}

Eigen::MatrixXd stack_stage2(const Fcnn& stage1, const StackedSet& stage1_set,
                             int window) {
  Eigen::MatrixXd out(stage1_set.x.rows(), window);
  for (std::size_t c = 0; c < stage1_set.offsets.size(); ++c) {
    const Eigen::Index begin = stage1_set.offsets[c];
    const Eigen::Index end = (c + 1 < stage1_set.offsets.size())
                                 ? stage1_set.offsets[c + 1]
                                 : stage1_set.x.rows();
    const Eigen::VectorXd curve =
        stage1_raw(stage1, stage1_set.x.middleRows(begin, end - begin));
    out.middleRows(begin, end - begin) = assemble_windows(curve, window);
  }
  return out;
}

}  // namespace

double cvmd_target(double t_s, double t_cpa_s, const CvmdParams& params) {
  check_params(params);
  const double dist = std::abs(t_s - t_cpa_s);
  return dist < params.t_d ? dist : params.t_d;
}

Eigen::VectorXd cvmd_targets(Eigen::Index frames, double frame_period_s,
                             double t0_s, std::optional<double> t_cpa_s,
                             const CvmdParams& params) {
  check_params(params);
  if (frames < 1) throw validation_error("curve needs at least one frame");
  Eigen::VectorXd out(frames);
  if (!t_cpa_s) {
    out.setConstant(params.t_d);
    return out;
  }
  for (Eigen::Index f = 0; f < frames; ++f)
    out(f) = cvmd_target(t0_s + static_cast<double>(f) * frame_period_s,
                         *t_cpa_s, params);
  return out;
}

Eigen::VectorXd assemble_context(const FeatureMatrix& lms, Eigen::Index frame,
                                 const ContextSpec& spec) {
  check_context(spec);
  if (lms.kind != FeatureKind::LogMelSpectrogram)
    throw validation_error("context assembly expects LMS features");
  const Eigen::Index frames = lms.values.rows();
  const Eigen::Index bands = lms.values.cols();
  if (frames < 1) throw validation_error("empty feature matrix");

  Eigen::VectorXd out((2 * static_cast<Eigen::Index>(spec.q) + 1) * bands);
  Eigen::Index at = 0;
  for (int k = -spec.q; k <= spec.q; ++k) {
    const Eigen::Index src = clamp_frame(frame + k * spec.stride, frames);
    out.segment(at, bands) = lms.values.row(src).transpose();
    at += bands;
  }
  return out;
}

Eigen::MatrixXd assemble_context_matrix(const FeatureMatrix& lms,
                                        const ContextSpec& spec) {
  check_context(spec);
  if (lms.kind != FeatureKind::LogMelSpectrogram)
    throw validation_error("context assembly expects LMS features");
  const Eigen::Index frames = lms.values.rows();
  const Eigen::Index bands = lms.values.cols();
  if (frames < 1) throw validation_error("empty feature matrix");

  Eigen::MatrixXd out(frames, (2 * static_cast<Eigen::Index>(spec.q) + 1) * bands);
  for (Eigen::Index f = 0; f < frames; ++f) {
    Eigen::Index at = 0;
    for (int k = -spec.q; k <= spec.q; ++k) {
      const Eigen::Index src = clamp_frame(f + k * spec.stride, frames);
      out.row(f).segment(at, bands) = lms.values.row(src);
      at += bands;
    }
  }
  return out;
}

Eigen::MatrixXd assemble_windows(const Eigen::VectorXd& curve, int window) {
  if (window < 1 || window % 2 == 0)
    throw config_error("window must be odd and >= 1");
  const Eigen::Index frames = curve.size();
  if (frames < 1) throw validation_error("empty curve");
  const int half = window / 2;
  Eigen::MatrixXd out(frames, window);
  for (Eigen::Index f = 0; f < frames; ++f)
    for (int k = -half; k <= half; ++k)
      out(f, k + half) = curve(clamp_frame(f + k, frames));
  return out;
}

DetectionModel train_detector(const std::vector<LabeledClip>& train,
                              const std::vector<LabeledClip>& val,
                              const DetectorConfig& cfg) {
  check_context(cfg.context);
  check_params(cfg.cvmd);
  if (cfg.stage2_window < 1 || cfg.stage2_window % 2 == 0)
    throw config_error("stage2_window must be odd and >= 1");
  if (train.empty() || val.empty())
    throw validation_error("detector training needs non-empty train and val sets");

  StackedSet train1 = stack_stage1(train, cfg.context, cfg.cvmd);
  StackedSet val1 = stack_stage1(val, cfg.context, cfg.cvmd);

  DetectionModel model;
  model.context = cfg.context;
  model.cvmd = cfg.cvmd;
  model.stft = cfg.stft;
  model.mel = cfg.mel;
  model.stage2_window = cfg.stage2_window;
  model.two_stage = cfg.two_stage;
  model.presence_threshold = cfg.cvmd.t_d / 2.0;

  model.stage1_scaler = Scaler::fit(train1.x);
  model.stage1_scaler.apply_in_place(train1.x);
  model.stage1_scaler.apply_in_place(val1.x);

  std::vector<int> sizes1 = {static_cast<int>(train1.x.cols())};
  sizes1.insert(sizes1.end(), cfg.stage1_hidden.begin(), cfg.stage1_hidden.end());
  sizes1.push_back(1);
  Fcnn net1 = fcnn_init(sizes1, cfg.stage1_l2, mix_seed(cfg.seed, 1));
  TrainConfig tc1 = cfg.stage1_train;
  tc1.seed = mix_seed(cfg.seed, 2);
  model.stage1 = passby::train(std::move(net1), train1.x, train1.y, val1.x,
                               val1.y, tc1)
                     .first;

  if (cfg.two_stage) {
    Eigen::MatrixXd train2 = stack_stage2(model.stage1, train1, cfg.stage2_window);
    Eigen::MatrixXd val2 = stack_stage2(model.stage1, val1, cfg.stage2_window);
    model.stage2_scaler = Scaler::fit(train2);
    model.stage2_scaler.apply_in_place(train2);
    model.stage2_scaler.apply_in_place(val2);

    std::vector<int> sizes2 = {cfg.stage2_window};
    sizes2.insert(sizes2.end(), cfg.stage2_hidden.begin(), cfg.stage2_hidden.end());
    sizes2.push_back(1);
    Fcnn net2 = fcnn_init(sizes2, cfg.stage2_l2, mix_seed(cfg.seed, 3));
    TrainConfig tc2 = cfg.stage2_train;
    tc2.seed = mix_seed(cfg.seed, 4);
    model.stage2 = passby::train(std::move(net2), train2, train1.y, val2,
                                 val1.y, tc2)
                       .first;
  }
  return model;
}

namespace {

CvmdCurve finish_curve(Eigen::VectorXd values, const FeatureMatrix& lms,
                       double t_d) {
  CvmdCurve curve;
  curve.values = values.cwiseMax(0.0).cwiseMin(t_d);
  curve.frame_period_s = lms.frame_period_s;
  curve.t0_s = lms.t0_s;
  return curve;
}

Eigen::VectorXd raw_stage1_curve(const DetectionModel& model,
                                 const FeatureMatrix& lms) {
  Eigen::MatrixXd ctx = assemble_context_matrix(lms, model.context);
  model.stage1_scaler.apply_in_place(ctx);
  return stage1_raw(model.stage1, ctx);
}

}  // namespace

CvmdCurve predict_cvmd(const DetectionModel& model, const FeatureMatrix& lms) {
  if (!model.two_stage) return predict_cvmd_stage1(model, lms);
  if (lms.values.rows() < model.stage2_window)
    throw validation_error("clip has " + std::to_string(lms.values.rows()) +
                           " frames; stage 2 needs at least " +
                           std::to_string(model.stage2_window));
  const Eigen::VectorXd raw = raw_stage1_curve(model, lms);
  Eigen::MatrixXd windows = assemble_windows(raw, model.stage2_window);
  model.stage2_scaler.apply_in_place(windows);
  return finish_curve(predict(model.stage2, windows).col(0), lms, model.cvmd.t_d);
}

CvmdCurve predict_cvmd_stage1(const DetectionModel& model,
                              const FeatureMatrix& lms) {
  return finish_curve(raw_stage1_curve(model, lms), lms, model.cvmd.t_d);
}

std::pair<double, double> estimate_cpa(const CvmdCurve& curve) {
  if (curve.values.size() < 1) throw validation_error("empty curve");
  Eigen::Index best = 0;
  for (Eigen::Index f = 1; f < curve.values.size(); ++f)
    if (curve.values(f) < curve.values(best)) best = f;
  return {curve.t0_s + static_cast<double>(best) * curve.frame_period_s,
          curve.values(best)};
}

ThresholdCalibration calibrate_presence_threshold(
    const std::vector<double>& vehicle_minima,
    const std::vector<double>& noise_minima) {
  if (vehicle_minima.empty() || noise_minima.empty())
    throw validation_error("threshold calibration needs both distributions");

  const double v_max =
      *std::max_element(vehicle_minima.begin(), vehicle_minima.end());
  const double n_min =
      *std::min_element(noise_minima.begin(), noise_minima.end());

  ThresholdCalibration cal;
  cal.gap = n_min - v_max;
  if (cal.gap > 0) {
    cal.threshold = 0.5 * (v_max + n_min);
    return cal;
  }

  // Overlapping histograms: sweep every classification outcome reachable by a
  // cut (vehicle := value < threshold) and keep the smallest-error threshold.
  std::set<double> unique(vehicle_minima.begin(), vehicle_minima.end());
  unique.insert(noise_minima.begin(), noise_minima.end());
  std::vector<double> values(unique.begin(), unique.end());
  std::vector<double> candidates;
  candidates.push_back(values.front());  // classify everything as no-vehicle
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    candidates.push_back(0.5 * (values[i] + values[i + 1]));
  candidates.push_back(values.size() > 1
                           ? values.back() +
                                 0.5 * (values.back() - values[values.size() - 2])
                           : values.back() + 1.0);

  std::size_t best_errors = std::numeric_limits<std::size_t>::max();
  for (const double threshold : candidates) {
    std::size_t errors = 0;
    for (double v : vehicle_minima)
      if (!(v < threshold)) ++errors;
    for (double v : noise_minima)
      if (v < threshold) ++errors;
    if (errors < best_errors) {
      best_errors = errors;
      cal.threshold = threshold;
    }
  }
  return cal;
}

DetectionResult detect_from_features(const DetectionModel& model,
                                     const FeatureMatrix& lms) {
  const CvmdCurve curve = predict_cvmd(model, lms);
  const auto [t_cpa_hat, min_cvmd] = estimate_cpa(curve);
  return {t_cpa_hat, min_cvmd, min_cvmd < model.presence_threshold};
}

DetectionResult detect(const DetectionModel& model, const AudioClip& clip) {
  return detect_from_features(
      model, compute_features(clip, FeatureKind::LogMelSpectrogram, model.stft,
                              model.mel));
}

void write_cvmd_csv(const std::filesystem::path& path, const CvmdCurve& curve) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  csv::write_row(out, {"frame", "time_s", "cvmd_s"});
  for (Eigen::Index f = 0; f < curve.values.size(); ++f)
    csv::write_row(
        out, {std::to_string(f),
              csv::format_double(curve.t0_s +
                                 static_cast<double>(f) * curve.frame_period_s),
              csv::format_double(curve.values(f))});
  if (!out) throw io_error("write failed for " + path.string());
}

}  // namespace passby
