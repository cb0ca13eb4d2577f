#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace passby {

// Iterative radix-2 Cooley-Tukey FFT with precomputed bit-reversal table and
// twiddle factors. Forward transform only, no normalization. Size must be a
// power of two (>= 1).
class Radix2Fft {
 public:
  explicit Radix2Fft(std::size_t size);

  std::size_t size() const { return size_; }

  // In-place forward DFT: X[k] = sum_n x[n]·exp(-2πi·kn/N).
  void forward(std::vector<std::complex<double>>& data) const;

 private:
  std::size_t size_;
  std::vector<std::size_t> bitrev_;
  std::vector<std::complex<double>> twiddles_;  // exp(-2πi·k/N), k in [0, N/2)
};

}  // namespace passby
