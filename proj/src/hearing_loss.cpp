#include "mbinet/hearing_loss.hpp"

#include <cmath>
#include <numbers>

#include "mbinet/error.hpp"

namespace mbinet {

namespace {
constexpr double kPi = std::numbers::pi;
}

void Audiogram::validate() const {
  for (double t : thresholds_db_hl)
    if (!(t >= 0.0 && t <= 120.0))
      fail(ErrorKind::RangeError,
           "audiogram threshold " + std::to_string(t) +
               " outside [0, 120] dB HL");
}

bool Audiogram::is_zero() const {
  for (double t : thresholds_db_hl)
    if (t != 0.0) return false;
  return true;
}

double audiogram_threshold_at(const Audiogram& a, double freq_hz) {
  const auto& f = kAudiogramFreqsHz;
  const auto& t = a.thresholds_db_hl;
  if (freq_hz <= f.front()) return t.front();
  if (freq_hz >= f.back()) return t.back();
  for (std::size_t i = 0; i + 1 < f.size(); i++) {
    if (freq_hz <= f[i + 1]) {
      double u = (std::log(freq_hz) - std::log(f[i])) /
                 (std::log(f[i + 1]) - std::log(f[i]));
      return t[i] + u * (t[i + 1] - t[i]);
    }
  }
  return t.back();
}

std::vector<double> design_hl_filter(const Audiogram& a, int sample_rate_hz) {
  a.validate();
  if (sample_rate_hz != 16000)
    fail(ErrorKind::RangeError, "hearing-loss filters are designed at 16 kHz");

  const int n = kHlFilterLength;
  const int m = kHlGroupDelay;
  const double nyquist = sample_rate_hz / 2.0;

  // Magnitude samples at f_k = k * fs / n for the lower half; the upper
  // half is implied by linear-phase symmetry.
  std::vector<double> amp(static_cast<std::size_t>(n / 2) + 1);
  for (std::size_t k = 0; k < amp.size(); k++) {
    double f = static_cast<double>(k) * sample_rate_hz / n;
    if (f > nyquist) f = nyquist;
    amp[k] = std::pow(10.0, -audiogram_threshold_at(a, f) / 20.0);
  }

  // Type-I frequency-sampling synthesis:
  //   h[i] = (A_0 + 2 * sum_k A_k cos(2 pi k (i - m) / n)) / n
  std::vector<double> h(static_cast<std::size_t>(n));
  for (int i = 0; i < n; i++) {
    double acc = amp[0];
    for (std::size_t k = 1; k < amp.size(); k++)
      acc += 2.0 * amp[k] *
             std::cos(2.0 * kPi * static_cast<double>(k) * (i - m) / n);
    h[static_cast<std::size_t>(i)] = acc / n;
  }
  return h;
}

namespace {

std::vector<double> filter_aligned(const std::vector<double>& x,
                                   const std::vector<double>& h) {
  const long n = static_cast<long>(x.size());
  const long taps = static_cast<long>(h.size());
  std::vector<double> y(x.size(), 0.0);
  for (long i = 0; i < n; i++) {
    double acc = 0.0;
    for (long k = 0; k < taps; k++) {
      long j = i + kHlGroupDelay - k;
      if (j >= 0 && j < n) acc += h[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(j)];
    }
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

}  // namespace

StereoWaveform apply_hearing_loss(const StereoWaveform& w,
                                  const ListenerProfile& p) {
  if (w.sample_rate_hz != 16000)
    fail(ErrorKind::RangeError,
         "apply_hearing_loss expects a 16 kHz waveform, got " +
             std::to_string(w.sample_rate_hz));
  std::vector<double> hl = design_hl_filter(p.left, w.sample_rate_hz);
  std::vector<double> hr = design_hl_filter(p.right, w.sample_rate_hz);
  StereoWaveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.left = filter_aligned(w.left, hl);
  out.right = filter_aligned(w.right, hr);
  return out;
}

}  // namespace mbinet
