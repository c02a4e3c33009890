#include "mbinet/dsp.hpp"

#include <cmath>
#include <numbers>

#include "mbinet/error.hpp"

namespace mbinet {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_radix2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; i++) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = -2.0 * kPi / static_cast<double>(len);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; k++) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

void dft_direct(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; k++) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t t = 0; t < n; t++) {
      double ang = -2.0 * kPi * static_cast<double>(k) *
                   static_cast<double>(t) / static_cast<double>(n);
      acc += a[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  a = std::move(out);
}

// Blackman-windowed sinc interpolation kernel, 64 taps around the source
// position. cutoff is the lowpass cutoff as a fraction of the input rate.
double sinc_interp(const std::vector<double>& x, double t, double cutoff) {
  constexpr int kHalfTaps = 32;
  const long center = static_cast<long>(std::floor(t));
  double acc = 0.0;
  for (long k = center - kHalfTaps + 1; k <= center + kHalfTaps; k++) {
    if (k < 0 || k >= static_cast<long>(x.size())) continue;
    double d = t - static_cast<double>(k);
    double s;
    if (std::abs(d) < 1e-12) {
      s = 2.0 * cutoff;
    } else {
      s = std::sin(2.0 * kPi * cutoff * d) / (kPi * d);
    }
    // Blackman window over the 64-tap span
    double u = (d + kHalfTaps) / (2.0 * kHalfTaps);
    double w = 0.42 - 0.5 * std::cos(2.0 * kPi * u) +
               0.08 * std::cos(4.0 * kPi * u);
    acc += x[static_cast<std::size_t>(k)] * s * w;
  }
  return acc;
}

}  // namespace

void dft(std::vector<std::complex<double>>& buf) {
  if (buf.empty()) return;
  if (is_pow2(buf.size()))
    fft_radix2(buf);
  else
    dft_direct(buf);
}

std::vector<double> hann_window(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; i++)
    w[static_cast<std::size_t>(i)] =
        0.5 - 0.5 * std::cos(2.0 * kPi * i / static_cast<double>(n));
  return w;
}

std::vector<double> resample_channel(const std::vector<double>& x,
                                     int input_hz, int target_hz) {
  if (input_hz <= 0 || target_hz <= 0)
    fail(ErrorKind::RangeError, "sample rates must be positive");
  if (input_hz == target_hz) return x;

  const double ratio = static_cast<double>(target_hz) / input_hz;
  const std::size_t out_len = static_cast<std::size_t>(
      std::llround(static_cast<double>(x.size()) * ratio));
  // Lowpass at 45% of the lower of the two rates, expressed relative to
  // the input rate. The kernel 2*fc*sinc(2*fc*t) has unity passband gain,
  // so no direction-dependent scaling is needed.
  const double cutoff =
      0.45 * static_cast<double>(std::min(input_hz, target_hz)) / input_hz;

  std::vector<double> y(out_len);
  for (std::size_t n = 0; n < out_len; n++) {
    double t = static_cast<double>(n) / ratio;
    y[n] = sinc_interp(x, t, cutoff);
  }
  return y;
}

StereoWaveform resample(const StereoWaveform& w, int target_hz) {
  if (w.sample_rate_hz == target_hz) return w;
  StereoWaveform out;
  out.sample_rate_hz = target_hz;
  out.left = resample_channel(w.left, w.sample_rate_hz, target_hz);
  out.right = resample_channel(w.right, w.sample_rate_hz, target_hz);
  return out;
}

SpectralFrames stft_power(const std::vector<double>& mono, int sample_rate_hz,
                          int frame_len, int hop, int n_fft) {
  if (frame_len > n_fft)
    fail(ErrorKind::RangeError, "frame_len must not exceed n_fft");
  if (hop < 1) fail(ErrorKind::RangeError, "hop must be >= 1");
  if (static_cast<int>(mono.size()) < frame_len)
    fail(ErrorKind::SignalTooShort,
         "signal of " + std::to_string(mono.size()) +
             " samples is shorter than one frame (" +
             std::to_string(frame_len) + ")");

  const std::size_t t_frames =
      1 + (mono.size() - static_cast<std::size_t>(frame_len)) /
              static_cast<std::size_t>(hop);
  const int bins = n_fft / 2 + 1;
  const std::vector<double> window = hann_window(frame_len);

  SpectralFrames out;
  out.values.resize(static_cast<Eigen::Index>(t_frames), bins);
  out.frame_hop_s = static_cast<double>(hop) / sample_rate_hz;
  out.frame_len_s = static_cast<double>(frame_len) / sample_rate_hz;

  std::vector<std::complex<double>> buf(static_cast<std::size_t>(n_fft));
  for (std::size_t t = 0; t < t_frames; t++) {
    const std::size_t start = t * static_cast<std::size_t>(hop);
    for (int i = 0; i < frame_len; i++)
      buf[static_cast<std::size_t>(i)] = mono[start + static_cast<std::size_t>(i)] *
                                         window[static_cast<std::size_t>(i)];
    for (int i = frame_len; i < n_fft; i++)
      buf[static_cast<std::size_t>(i)] = 0.0;
    dft(buf);
    for (int k = 0; k < bins; k++) {
      double p = std::norm(buf[static_cast<std::size_t>(k)]);
      out.values(static_cast<Eigen::Index>(t), k) = std::log(p + kPowerFloor);
    }
  }
  return out;
}

}  // namespace mbinet
