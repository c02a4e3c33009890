#ifndef MBINET_DSP_HPP
#define MBINET_DSP_HPP

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "mbinet/wav.hpp"

namespace mbinet {

// Power floor applied before the log in all spectral features.
inline constexpr double kPowerFloor = 1e-10;

// Default short-time analysis grid: 32 ms frames, 16 ms hop at 16 kHz.
inline constexpr int kStftFrameLen = 512;
inline constexpr int kStftHop = 256;
inline constexpr int kStftNfft = 512;
inline constexpr int kCanonicalRateHz = 16000;

// T x F matrix of log power, F = n_fft/2 + 1.
struct SpectralFrames {
  Eigen::MatrixXd values;
  double frame_hop_s = 0.0;
  double frame_len_s = 0.0;

  Eigen::Index frames() const { return values.rows(); }
  Eigen::Index bins() const { return values.cols(); }
};

// Band-limited rate conversion, windowed-sinc with 64 taps per output
// sample. Identity (bit-exact copy) when the rates already match.
// Output length is round(len * target_hz / input_hz).
StereoWaveform resample(const StereoWaveform& w, int target_hz);

std::vector<double> resample_channel(const std::vector<double>& x,
                                     int input_hz, int target_hz);

// Short-time log power spectrum. Hann window, no centering or padding:
// T = 1 + floor((len - frame_len) / hop), values = ln(|FFT|^2 + 1e-10).
SpectralFrames stft_power(const std::vector<double>& mono, int sample_rate_hz,
                          int frame_len, int hop, int n_fft);

// In-place complex DFT (forward). Radix-2 when the size is a power of two,
// direct evaluation otherwise.
void dft(std::vector<std::complex<double>>& buf);

// Periodic Hann window of length n.
std::vector<double> hann_window(int n);

}  // namespace mbinet

#endif  // MBINET_DSP_HPP
