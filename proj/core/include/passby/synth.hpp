#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "passby/audio.hpp"
#include "passby/manifest.hpp"

namespace passby {

inline constexpr double kSpeedOfSound = 343.0;  // m/s

// One synthetic pass-by: a vehicle on a straight line at constant speed whose
// closest approach to the microphone is cpa_distance_m at t_cpa_s.
struct PassBySpec {
  double speed_kmh = 50.0;
  double t_cpa_s = 5.0;
  double cpa_distance_m = 7.0;
  double duration_s = 10.0;
  int sample_rate = 44100;
  double engine_f0_hz = 90.0;  // at 50 km/h when speed_coupled_f0 is set
  int n_harmonics = 12;
  double harmonic_rolloff_db = 3.0;  // per harmonic step
  double broadband_level = 0.4;     // tire-noise gain relative to the stack
  double snr_db = 20.0;             // pass-by vs ambient, central 2 s RMS
  std::uint64_t seed = 0;
  bool speed_coupled_f0 = true;  // f0 scales with speed/50 so spectra carry speed
};

struct VehicleProfile {
  std::string vehicle_id;
  double engine_f0_hz = 90.0;
  int n_harmonics = 12;
  double harmonic_rolloff_db = 3.0;
  double broadband_level = 0.4;
};

struct SynthDatasetSpec {
  std::vector<VehicleProfile> vehicles;
  int clips_per_vehicle = 30;
  int noise_clips = 71;
  double speed_min_kmh = 30.0;
  double speed_max_kmh = 105.0;
  double t_cpa_min_s = 3.0;
  double t_cpa_max_s = 7.0;
  double cpa_distance_m = 7.0;
  double snr_min_db = 15.0;
  double snr_max_db = 25.0;
  double duration_s = 10.0;
  int sample_rate = 44100;
  std::uint64_t master_seed = 0;
};

// Observed frequency for a source approaching at v_radial (positive toward
// the listener): f_src * c / (c - v_radial). Requires |v_radial| < c.
double doppler_frequency(double f_src_hz, double v_radial_mps,
                         double c_mps = kSpeedOfSound);

// Harmonic engine stack plus speed-scaled broadband noise, Doppler-shifted by
// phase integration of the instantaneous radial velocity, attenuated by
// 1/r(t), with pink ambient noise mixed in at snr_db.
std::pair<AudioClip, ClipAnnotation> synth_passby(const PassBySpec& spec);

// Pink noise, peak-normalized to 1.
AudioClip synth_noise(double duration_s, int sample_rate, std::uint64_t seed);

// Ten vehicles with staggered engine profiles, 30 clips each, 71 noise clips.
SynthDatasetSpec make_default_dataset_spec();

// Writes WAV clips and manifest.csv (relative paths) into out_dir; returns the
// loaded manifest with resolved paths. Same spec -> byte-identical files.
Manifest synth_dataset(const SynthDatasetSpec& spec,
                       const std::filesystem::path& out_dir);

}  // namespace passby
