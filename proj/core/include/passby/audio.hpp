#pragma once

#include <filesystem>
#include <vector>

namespace passby {

// Mono audio clip. Samples are stored as 32-bit floats to match the on-disk
// format; all downstream processing promotes to double.
struct AudioClip {
  std::vector<float> samples;
  int sample_rate = 0;

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

// Reads a RIFF/WAVE file. Accepts 16-bit integer PCM and 32-bit float PCM,
// mono or multichannel; multichannel input is downmixed by channel averaging.
// Integer samples are normalized to [-1, 1]. Float samples are passed through
// unclamped.
AudioClip read_wav(const std::filesystem::path& path);

// Writes a mono 32-bit float PCM WAV. Reading the file back reproduces the
// sample sequence bit-exactly, including out-of-range values.
void write_wav(const std::filesystem::path& path, const AudioClip& clip);

}  // namespace passby
