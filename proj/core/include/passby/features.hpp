#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "passby/audio.hpp"

namespace passby {

// Analysis window/hop. The defaults give 400 frames on a 10 s, 44.1 kHz clip:
// frames = 1 + floor((L-1)/hop).
struct StftConfig {
  int window_len = 4096;  // power of two
  int hop = 1105;
};

struct MelConfig {
  int n_mel = 40;
  double f_low_hz = 0.0;
  double f_high_hz = 16000.0;
};

enum class FeatureKind { MelSpectrogram, LogMelSpectrogram, Mfcc };

// Short names used in configs and file headers: "ms", "lms", "mfcc".
std::string feature_kind_name(FeatureKind kind);
FeatureKind parse_feature_kind(const std::string& name);

struct PowerSpectrogram {
  Eigen::MatrixXd values;  // frames x (window_len/2 + 1), |FFT|^2
  double frame_period_s = 0.0;
  double t0_s = 0.0;  // time of frame 0 (centered framing -> 0)
};

struct FeatureMatrix {
  FeatureKind kind = FeatureKind::MelSpectrogram;
  Eigen::MatrixXd values;  // frames x bands
  double frame_period_s = 0.0;
  double t0_s = 0.0;
};

struct FilterBank {
  Eigen::MatrixXd weights;  // n_mel x (window_len/2 + 1), nonnegative
};

// Floor applied before taking logs; 10*log10(1e-10) = -100 dB.
inline constexpr double kLogPowerFloor = 1e-10;

// Periodic Hamming window w[n] = 0.54 - 0.46*cos(2*pi*n/n_points). The
// periodic form keeps a bin-centered sinusoid's spectral support at exactly
// three bins.
std::vector<double> hamming_window(int n_points);

long frame_count(long num_samples, int hop);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Centered framing: frame f covers samples [f*hop - w/2, f*hop + w/2 - 1],
// reflect-padded (no edge repeat) at the clip boundaries.
PowerSpectrogram stft_power(const AudioClip& clip, const StftConfig& cfg);

// Triangular filters whose peaks are equally spaced on the mel scale between
// f_low and f_high; each filter's edges are the neighboring peaks. Edge
// frequencies above Nyquist are clamped; a filter that covers no FFT bin is a
// configuration error.
FilterBank build_mel_filterbank(const MelConfig& mel, const StftConfig& stft,
                                int sample_rate);

FeatureMatrix mel_spectrogram(const PowerSpectrogram& power, const FilterBank& fb);
FeatureMatrix log_mel(const FeatureMatrix& ms);

// Orthonormal DCT-II matrix D (n x n): D*D^T = I.
Eigen::MatrixXd dct2_orthonormal(int n);

FeatureMatrix mfcc(const FeatureMatrix& lms);

// Full chain clip -> requested representation.
FeatureMatrix compute_features(const AudioClip& clip, FeatureKind kind,
                               const StftConfig& stft, const MelConfig& mel);

// One row per frame, header row of band indices, preceded by a '#' metadata
// line carrying kind and frame timing.
void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& fm);

}  // namespace passby
