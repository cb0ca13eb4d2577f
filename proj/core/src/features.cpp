#include "passby/features.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>

#include "passby/csv.hpp"
#include "passby/error.hpp"
#include "passby/fft.hpp"

namespace passby {

namespace {

void check_stft(const StftConfig& cfg) {
  if (cfg.window_len <= 0 || (cfg.window_len & (cfg.window_len - 1)) != 0)
    throw config_error("window_len must be a power of two, got " +
                       std::to_string(cfg.window_len));
  if (cfg.hop <= 0 || cfg.hop > cfg.window_len)
    throw config_error("hop must satisfy 0 < hop <= window_len, got " +
                       std::to_string(cfg.hop));
}

// Reflection without repeating the edge sample: index period 2*(len-1).
long reflect_index(long s, long len) {
  if (len == 1) return 0;
  const long period = 2 * (len - 1);
  long m = s % period;
  if (m < 0) m += period;
  return m < len ? m : period - m;
}

}  // namespace

std::string feature_kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::MelSpectrogram: return "ms";
    case FeatureKind::LogMelSpectrogram: return "lms";
    case FeatureKind::Mfcc: return "mfcc";
  }
  throw config_error("unknown feature kind");
}

FeatureKind parse_feature_kind(const std::string& name) {
  if (name == "ms") return FeatureKind::MelSpectrogram;
  if (name == "lms") return FeatureKind::LogMelSpectrogram;
  if (name == "mfcc") return FeatureKind::Mfcc;
  throw config_error("unknown feature kind '" + name + "' (expected ms|lms|mfcc)");
}

std::vector<double> hamming_window(int n_points) {
  if (n_points <= 0) throw config_error("window length must be positive");
  std::vector<double> w(static_cast<std::size_t>(n_points));
  for (int n = 0; n < n_points; ++n)
    w[static_cast<std::size_t>(n)] =
        0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / n_points);
  return w;
}

long frame_count(long num_samples, int hop) {
  if (num_samples < 1) throw validation_error("clip must contain at least one sample");
  return 1 + (num_samples - 1) / hop;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

PowerSpectrogram stft_power(const AudioClip& clip, const StftConfig& cfg) {
  check_stft(cfg);
  const long len = static_cast<long>(clip.samples.size());
  const long frames = frame_count(len, cfg.hop);
  const int n_bins = cfg.window_len / 2 + 1;
  const int half = cfg.window_len / 2;
  const auto window = hamming_window(cfg.window_len);

  Radix2Fft fft(static_cast<std::size_t>(cfg.window_len));
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(cfg.window_len));

  PowerSpectrogram out;
  out.values.resize(frames, n_bins);
  out.frame_period_s = static_cast<double>(cfg.hop) / clip.sample_rate;
  out.t0_s = 0.0;

  for (long f = 0; f < frames; ++f) {
    const long start = f * cfg.hop - half;
    for (int n = 0; n < cfg.window_len; ++n) {
      const long src = reflect_index(start + n, len);
      buf[static_cast<std::size_t>(n)] = {
          static_cast<double>(clip.samples[static_cast<std::size_t>(src)]) *
              window[static_cast<std::size_t>(n)],
          0.0};
    }
    fft.forward(buf);
    for (int k = 0; k < n_bins; ++k)
      out.values(f, k) = std::norm(buf[static_cast<std::size_t>(k)]);
  }
  return out;
}

FilterBank build_mel_filterbank(const MelConfig& mel, const StftConfig& stft,
                                int sample_rate) {
  check_stft(stft);
  if (mel.n_mel < 1) throw config_error("n_mel must be >= 1");
  if (mel.f_low_hz < 0 || !(mel.f_low_hz < mel.f_high_hz))
    throw config_error("mel range requires 0 <= f_low < f_high");
  if (sample_rate <= 0) throw config_error("sample_rate must be positive");

  const int n_bins = stft.window_len / 2 + 1;
  const double bin_hz = static_cast<double>(sample_rate) / stft.window_len;
  const double nyquist = sample_rate / 2.0;

  // n_mel + 2 points equally spaced in mel; interior points are the peaks.
  const double m_lo = hz_to_mel(mel.f_low_hz);
  const double m_hi = hz_to_mel(mel.f_high_hz);
  std::vector<double> edge_hz(static_cast<std::size_t>(mel.n_mel) + 2);
  for (std::size_t j = 0; j < edge_hz.size(); ++j) {
    const double m = m_lo + (m_hi - m_lo) * static_cast<double>(j) /
                                static_cast<double>(mel.n_mel + 1);
    edge_hz[j] = std::min(mel_to_hz(m), nyquist);
  }

  FilterBank fb;
  fb.weights = Eigen::MatrixXd::Zero(mel.n_mel, n_bins);
  for (int i = 0; i < mel.n_mel; ++i) {
    const double lo = edge_hz[static_cast<std::size_t>(i)];
    const double center = edge_hz[static_cast<std::size_t>(i) + 1];
    const double hi = edge_hz[static_cast<std::size_t>(i) + 2];
    bool any = false;
    for (int k = 0; k < n_bins; ++k) {
      const double f = k * bin_hz;
      const double up = center > lo ? (f - lo) / (center - lo) : 0.0;
      const double down = hi > center ? (hi - f) / (hi - center) : 0.0;
      const double w = std::max(0.0, std::min(up, down));
      if (w > 0) {
        fb.weights(i, k) = w;
        any = true;
      }
    }
    if (!any)
      throw config_error("mel filter " + std::to_string(i) +
                         " covers no FFT bin; reduce n_mel or raise window_len");
  }
  return fb;
}

FeatureMatrix mel_spectrogram(const PowerSpectrogram& power, const FilterBank& fb) {
  if (power.values.cols() != fb.weights.cols())
    throw shape_error("spectrogram has " + std::to_string(power.values.cols()) +
                      " bins but filterbank expects " +
                      std::to_string(fb.weights.cols()));
  FeatureMatrix out;
  out.kind = FeatureKind::MelSpectrogram;
  out.values = power.values * fb.weights.transpose();
  out.frame_period_s = power.frame_period_s;
  out.t0_s = power.t0_s;
  return out;
}

FeatureMatrix log_mel(const FeatureMatrix& ms) {
  if (ms.kind != FeatureKind::MelSpectrogram)
    throw validation_error("log_mel expects an MS input");
  FeatureMatrix out = ms;
  out.kind = FeatureKind::LogMelSpectrogram;
  out.values = ms.values.unaryExpr([](double v) {
    return 10.0 * std::log10(std::max(v, kLogPowerFloor));
  });
  return out;
}

Eigen::MatrixXd dct2_orthonormal(int n) {
  if (n < 1) throw config_error("DCT size must be >= 1");
  Eigen::MatrixXd d(n, n);
  const double scale0 = std::sqrt(1.0 / n);
  const double scale = std::sqrt(2.0 / n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      d(k, j) = (k == 0 ? scale0 : scale) *
                std::cos(std::numbers::pi * (2.0 * j + 1.0) * k / (2.0 * n));
  return d;
}

FeatureMatrix mfcc(const FeatureMatrix& lms) {
  if (lms.kind != FeatureKind::LogMelSpectrogram)
    throw validation_error("mfcc expects an LMS input");
  const Eigen::MatrixXd d = dct2_orthonormal(static_cast<int>(lms.values.cols()));
  FeatureMatrix out;
  out.kind = FeatureKind::Mfcc;
  out.values = lms.values * d.transpose();
  out.frame_period_s = lms.frame_period_s;
  out.t0_s = lms.t0_s;
  return out;
}

FeatureMatrix compute_features(const AudioClip& clip, FeatureKind kind,
                               const StftConfig& stft, const MelConfig& mel) {
  const auto power = stft_power(clip, stft);
  const auto fb = build_mel_filterbank(mel, stft, clip.sample_rate);
  FeatureMatrix fm = mel_spectrogram(power, fb);
  if (kind == FeatureKind::MelSpectrogram) return fm;
  fm = log_mel(fm);
  if (kind == FeatureKind::LogMelSpectrogram) return fm;
  return mfcc(fm);
}

void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& fm) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open for writing: " + path.string());
  out << "# kind=" << feature_kind_name(fm.kind)
      << " frame_period_s=" << csv::format_double(fm.frame_period_s)
      << " t0_s=" << csv::format_double(fm.t0_s) << "\n";
  std::vector<std::string> row(static_cast<std::size_t>(fm.values.cols()));
  for (Eigen::Index b = 0; b < fm.values.cols(); ++b)
    row[static_cast<std::size_t>(b)] = std::to_string(b);
  csv::write_row(out, row);
  for (Eigen::Index f = 0; f < fm.values.rows(); ++f) {
    for (Eigen::Index b = 0; b < fm.values.cols(); ++b)
      row[static_cast<std::size_t>(b)] = csv::format_double(fm.values(f, b));
    csv::write_row(out, row);
  }
  if (!out) throw io_error("write failed for " + path.string());
}

}  // namespace passby
