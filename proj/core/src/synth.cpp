#include "passby/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "passby/error.hpp"
#include "passby/rng.hpp"

namespace passby {

namespace {

void check_passby(const PassBySpec& spec) {
  if (!(spec.speed_kmh > 0)) throw config_error("speed must be positive");
  if (!(spec.t_cpa_s > 0) || !(spec.t_cpa_s < spec.duration_s))
    throw config_error("t_cpa_s must lie inside (0, duration_s)");
  if (!(spec.cpa_distance_m > 0)) throw config_error("cpa_distance_m must be positive");
  if (!(spec.duration_s > 0)) throw config_error("duration_s must be positive");
  if (spec.sample_rate <= 0) throw config_error("sample_rate must be positive");
  if (!(spec.engine_f0_hz > 0)) throw config_error("engine_f0_hz must be positive");
  if (spec.n_harmonics < 1) throw config_error("n_harmonics must be >= 1");
  if (spec.broadband_level < 0) throw config_error("broadband_level must be >= 0");
}

// Economy pink-noise filter (three one-pole sections); warmed up so the clip
// starts in the filter's stationary regime.
class PinkNoise {
 public:
  explicit PinkNoise(Rng& rng) : rng_(rng) {
    for (int i = 0; i < 2048; ++i) next();
  }

  double next() {
    const double white = rng_.normal();
    b0_ = 0.99765 * b0_ + white * 0.0990460;
    b1_ = 0.96300 * b1_ + white * 0.2965164;
    b2_ = 0.57000 * b2_ + white * 1.0526913;
    return b0_ + b1_ + b2_ + white * 0.1848;
  }

 private:
  Rng& rng_;
  double b0_ = 0.0, b1_ = 0.0, b2_ = 0.0;
};

double rms(const std::vector<double>& x, std::size_t begin, std::size_t end) {
  double acc = 0.0;
  for (std::size_t i = begin; i < end; ++i) acc += x[i] * x[i];
  return std::sqrt(acc / static_cast<double>(end - begin));
}

}  // namespace

double doppler_frequency(double f_src_hz, double v_radial_mps, double c_mps) {
  if (!(c_mps > 0)) throw config_error("speed of sound must be positive");
  if (!(std::abs(v_radial_mps) < c_mps))
    throw validation_error("radial speed " + std::to_string(v_radial_mps) +
                           " m/s is not below the speed of sound");
  return f_src_hz * c_mps / (c_mps - v_radial_mps);
}

std::pair<AudioClip, ClipAnnotation> synth_passby(const PassBySpec& spec) {
  check_passby(spec);
  const std::size_t n =
      static_cast<std::size_t>(std::llround(spec.duration_s * spec.sample_rate));
  const double v = spec.speed_kmh / 3.6;  // m/s
  const double f0 = spec.speed_coupled_f0
                        ? spec.engine_f0_hz * (spec.speed_kmh / 50.0)
                        : spec.engine_f0_hz;

  Rng rng(spec.seed);
  Rng ambient_rng(mix_seed(spec.seed, 1));
  PinkNoise ambient(ambient_rng);

  std::vector<double> harmonic_gain(static_cast<std::size_t>(spec.n_harmonics));
  std::vector<double> phase(static_cast<std::size_t>(spec.n_harmonics), 0.0);
  for (int h = 0; h < spec.n_harmonics; ++h)
    harmonic_gain[static_cast<std::size_t>(h)] =
        std::pow(10.0, -spec.harmonic_rolloff_db * h / 20.0);
  const double tire_gain =
      spec.broadband_level * std::pow(spec.speed_kmh / 50.0, 1.5);

  std::vector<double> vehicle(n);
  std::vector<double> pink(n);
  const double dt = 1.0 / spec.sample_rate;
  for (std::size_t i = 0; i < n; ++i) {
    const double delta = static_cast<double>(i) * dt - spec.t_cpa_s;
    const double r = std::hypot(spec.cpa_distance_m, v * delta);
    const double v_radial = -v * v * delta / r;  // positive while approaching

    double source = 0.0;
    for (int h = 0; h < spec.n_harmonics; ++h) {
      const double f = doppler_frequency(f0 * (h + 1), v_radial);
      phase[static_cast<std::size_t>(h)] +=
          2.0 * std::numbers::pi * f * dt;
      source += harmonic_gain[static_cast<std::size_t>(h)] *
                std::sin(phase[static_cast<std::size_t>(h)]);
    }
    source += tire_gain * rng.normal();
    vehicle[i] = source / r;
    pink[i] = ambient.next();
  }

  // Scale the ambient bed so the central 2 s around CPA sit at snr_db.
  const auto center =
      static_cast<std::size_t>(std::llround(spec.t_cpa_s * spec.sample_rate));
  const auto half_win = static_cast<std::size_t>(spec.sample_rate);  // 1 s
  const std::size_t begin = center > half_win ? center - half_win : 0;
  const std::size_t end = std::min(n, center + half_win);
  const double signal_rms = rms(vehicle, begin, end);
  const double noise_rms = rms(pink, begin, end);
  const double noise_gain =
      noise_rms > 0 ? signal_rms / (noise_rms * std::pow(10.0, spec.snr_db / 20.0))
                    : 0.0;

  AudioClip clip;
  clip.sample_rate = spec.sample_rate;
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    clip.samples[i] = static_cast<float>(vehicle[i] + noise_gain * pink[i]);

  ClipAnnotation ann;
  ann.has_vehicle = true;
  ann.speed_kmh = spec.speed_kmh;
  ann.t_cpa_s = spec.t_cpa_s;
  return {std::move(clip), ann};
}

AudioClip synth_noise(double duration_s, int sample_rate, std::uint64_t seed) {
  if (!(duration_s > 0)) throw config_error("duration_s must be positive");
  if (sample_rate <= 0) throw config_error("sample_rate must be positive");
  const std::size_t n =
      static_cast<std::size_t>(std::llround(duration_s * sample_rate));

  Rng rng(seed);
  PinkNoise pink(rng);
  std::vector<double> samples(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    samples[i] = pink.next();
    peak = std::max(peak, std::abs(samples[i]));
  }
  const double gain = peak > 0 ? 1.0 / peak : 1.0;

  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    clip.samples[i] = static_cast<float>(samples[i] * gain);
  return clip;
}

SynthDatasetSpec make_default_dataset_spec() {
  SynthDatasetSpec spec;
  for (int i = 0; i < 10; ++i) {
    VehicleProfile profile;
    profile.vehicle_id = "veh0" + std::to_string(i);
    profile.engine_f0_hz = 70.0 + 7.0 * i;
    profile.n_harmonics = 10 + i % 5;
    profile.harmonic_rolloff_db = 2.5 + 0.15 * i;
    profile.broadband_level = 0.3 + 0.02 * i;
    spec.vehicles.push_back(std::move(profile));
  }
  return spec;
}

Manifest synth_dataset(const SynthDatasetSpec& spec,
                       const std::filesystem::path& out_dir) {
  if (spec.vehicles.size() < 2)
    throw config_error("dataset needs at least two vehicles");
  if (spec.clips_per_vehicle < 1)
    throw config_error("clips_per_vehicle must be >= 1");
  if (spec.noise_clips < 0) throw config_error("noise_clips must be >= 0");
  if (!(spec.speed_min_kmh > 0) || !(spec.speed_min_kmh <= spec.speed_max_kmh))
    throw config_error("invalid speed range");
  if (!(spec.t_cpa_min_s > 0) || !(spec.t_cpa_min_s <= spec.t_cpa_max_s) ||
      !(spec.t_cpa_max_s < spec.duration_s))
    throw config_error("t_cpa range must lie inside (0, duration_s)");
  if (!(spec.snr_min_db <= spec.snr_max_db)) throw config_error("invalid SNR range");
  for (const auto& profile : spec.vehicles)
    if (profile.vehicle_id.empty())
      throw config_error("vehicle_id must not be empty");

  std::filesystem::create_directories(out_dir);
  Manifest manifest;

  for (std::size_t vi = 0; vi < spec.vehicles.size(); ++vi) {
    const auto& profile = spec.vehicles[vi];
    const std::uint64_t vehicle_seed = mix_seed(spec.master_seed, 100 + vi);
    for (int ci = 0; ci < spec.clips_per_vehicle; ++ci) {
      Rng draw(mix_seed(vehicle_seed, static_cast<std::uint64_t>(ci)));
      PassBySpec pb;
      pb.speed_kmh = draw.uniform(spec.speed_min_kmh, spec.speed_max_kmh);
      pb.t_cpa_s = draw.uniform(spec.t_cpa_min_s, spec.t_cpa_max_s);
      pb.snr_db = draw.uniform(spec.snr_min_db, spec.snr_max_db);
      pb.seed = draw.next_u64();
      pb.cpa_distance_m = spec.cpa_distance_m;
      pb.duration_s = spec.duration_s;
      pb.sample_rate = spec.sample_rate;
      pb.engine_f0_hz = profile.engine_f0_hz;
      pb.n_harmonics = profile.n_harmonics;
      pb.harmonic_rolloff_db = profile.harmonic_rolloff_db;
      pb.broadband_level = profile.broadband_level;

      auto [clip, ann] = synth_passby(pb);
      ann.vehicle_id = profile.vehicle_id;
      char name[64];
      std::snprintf(name, sizeof(name), "%s_c%02d.wav", profile.vehicle_id.c_str(),
                    ci);
      write_wav(out_dir / name, clip);
      manifest.entries.push_back({std::filesystem::path(name), ann});
    }
  }

  const std::uint64_t noise_seed = mix_seed(spec.master_seed, 999);
  for (int ni = 0; ni < spec.noise_clips; ++ni) {
    const AudioClip clip =
        synth_noise(spec.duration_s, spec.sample_rate,
                    mix_seed(noise_seed, static_cast<std::uint64_t>(ni)));
    char name[64];
    std::snprintf(name, sizeof(name), "noise_%02d.wav", ni);
    write_wav(out_dir / name, clip);
    ClipAnnotation ann;
    ann.has_vehicle = false;
    manifest.entries.push_back({std::filesystem::path(name), ann});
  }

  const auto manifest_path = out_dir / "manifest.csv";
  save_manifest(manifest_path, manifest);
  return load_manifest(manifest_path);
}

}  // namespace passby
