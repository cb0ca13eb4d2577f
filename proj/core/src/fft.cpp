#include "passby/fft.hpp"

#include <cmath>
#include <numbers>

#include "passby/error.hpp"

namespace passby {

Radix2Fft::Radix2Fft(std::size_t size) : size_(size) {
  if (size == 0 || (size & (size - 1)) != 0)
    throw config_error("FFT size must be a power of two, got " +
                       std::to_string(size));
  bitrev_.resize(size);
  std::size_t log2n = 0;
  while ((std::size_t{1} << log2n) < size) ++log2n;
  for (std::size_t i = 0; i < size; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < log2n; ++b) r |= ((i >> b) & 1u) << (log2n - 1 - b);
    bitrev_[i] = r;
  }
  twiddles_.resize(size / 2);
  for (std::size_t k = 0; k < size / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(size);
    twiddles_[k] = {std::cos(angle), std::sin(angle)};
  }
}

void Radix2Fft::forward(std::vector<std::complex<double>>& data) const {
  if (data.size() != size_)
    throw shape_error("FFT input length " + std::to_string(data.size()) +
                      " does not match plan size " + std::to_string(size_));
  for (std::size_t i = 0; i < size_; ++i) {
    const std::size_t j = bitrev_[i];
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= size_; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t stride = size_ / len;
    for (std::size_t start = 0; start < size_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const std::complex<double> w = twiddles_[k * stride];
        const std::complex<double> odd = data[start + k + half] * w;
        const std::complex<double> even = data[start + k];
        data[start + k] = even + odd;
        data[start + k + half] = even - odd;
      }
    }
  }
}

}  // namespace passby
