#include "passby/audio.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "passby/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

namespace passby {
namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct FmtChunk {
  std::uint16_t format_tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits_per_sample = 0;
};

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

}  // namespace

AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string());

  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) throw io_error("read failed for " + path.string());
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t size = bytes.size();

  if (size < 12 || std::memcmp(data, "RIFF", 4) != 0 ||
      std::memcmp(data + 8, "WAVE", 4) != 0) {
    throw format_error("not a RIFF/WAVE file: " + path.string());
  }

  FmtChunk fmt;
  bool have_fmt = false;
  const unsigned char* payload = nullptr;
  std::size_t payload_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= size) {
    const unsigned char* id = data + pos;
    std::uint32_t chunk_size = read_u32(data + pos + 4);
    pos += 8;
    if (pos + chunk_size > size) {
      throw format_error("truncated chunk in " + path.string());
    }
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw format_error("fmt chunk too small");
      fmt.format_tag = read_u16(data + pos);
      fmt.channels = read_u16(data + pos + 2);
      fmt.sample_rate = read_u32(data + pos + 4);
      fmt.block_align = read_u16(data + pos + 12);
      fmt.bits_per_sample = read_u16(data + pos + 14);
      if (fmt.format_tag == kFormatExtensible) {
        // Actual format is the first word of the SubFormat GUID.
        if (chunk_size < 18 + 22) throw format_error("extensible fmt chunk too small");
        fmt.format_tag = read_u16(data + pos + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      payload = data + pos;
      payload_size = chunk_size;
    }
    pos += chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (!have_fmt) throw format_error("missing fmt chunk in " + path.string());
  if (payload == nullptr) throw format_error("missing data chunk in " + path.string());
  if (fmt.channels == 0 || fmt.sample_rate == 0) {
    throw format_error("invalid fmt chunk in " + path.string());
  }

  const bool is_f32 = fmt.format_tag == kFormatFloat && fmt.bits_per_sample == 32;
  const bool is_i16 = fmt.format_tag == kFormatPcm && fmt.bits_per_sample == 16;
  if (!is_f32 && !is_i16) {
    throw unsupported_error("unsupported WAV encoding (tag " +
                            std::to_string(fmt.format_tag) + ", " +
                            std::to_string(fmt.bits_per_sample) + " bits) in " +
                            path.string());
  }

  const std::size_t bytes_per_sample = fmt.bits_per_sample / 8;
  const std::size_t expected_align = bytes_per_sample * fmt.channels;
  if (fmt.block_align != expected_align) {
    throw format_error("inconsistent block alignment in " + path.string());
  }
  const std::size_t n_frames = payload_size / expected_align;
  if (n_frames == 0) throw validation_error("empty data chunk in " + path.string());

  AudioClip clip;
  clip.sample_rate = static_cast<int>(fmt.sample_rate);
  clip.samples.resize(n_frames);

  const double inv_channels = 1.0 / fmt.channels;
  for (std::size_t f = 0; f < n_frames; ++f) {
    const unsigned char* frame = payload + f * expected_align;
    if (fmt.channels == 1) {
      if (is_f32) {
        float v;
        std::memcpy(&v, frame, 4);
        clip.samples[f] = v;
      } else {
        std::int16_t v;
        std::memcpy(&v, frame, 2);
        clip.samples[f] = static_cast<float>(v / 32768.0);
      }
    } else {
      double acc = 0.0;
      for (std::uint16_t c = 0; c < fmt.channels; ++c) {
        if (is_f32) {
          float v;
          std::memcpy(&v, frame + 4 * c, 4);
          acc += v;
        } else {
          std::int16_t v;
          std::memcpy(&v, frame + 2 * c, 2);
          acc += v / 32768.0;
        }
      }
      clip.samples[f] = static_cast<float>(acc * inv_channels);
    }
  }

  for (float s : clip.samples) {
    if (!std::isfinite(s)) {
      throw validation_error("non-finite sample in " + path.string());
    }
  }
  return clip;
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
  if (clip.samples.empty()) throw validation_error("refusing to write an empty clip");
  if (clip.sample_rate <= 0) throw validation_error("invalid sample rate");

  const std::uint32_t data_size = static_cast<std::uint32_t>(clip.samples.size() * 4);
  std::string out;
  out.reserve(58 + data_size);

  out.append("RIFF");
  put_u32(out, 50 + data_size);  // fmt(26) + fact(12) + data header(8) + data
  out.append("WAVE");

  out.append("fmt ");
  put_u32(out, 18);
  put_u16(out, kFormatFloat);
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * 4);
  put_u16(out, 4);
  put_u16(out, 32);
  put_u16(out, 0);  // cbSize

  // fact chunk is required for non-PCM encodings.
  out.append("fact");
  put_u32(out, 4);
  put_u32(out, static_cast<std::uint32_t>(clip.samples.size()));

  out.append("data");
  put_u32(out, data_size);
  const std::size_t header_size = out.size();
  out.resize(header_size + data_size);
  std::memcpy(out.data() + header_size, clip.samples.data(), data_size);

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw io_error("cannot open for writing: " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw io_error("write failed for " + path.string());
}

}  // namespace passby
